#include "perp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "perp/error.hpp"

namespace perp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidModel, what); }

bool finite(double x) { return std::isfinite(x); }

// Properties of a Q law that the classifier needs.
struct QFacts {
  double mean = 0.0;
  double mean2 = 0.0;
  bool positive = false;          // Q > 0 a.s.
  bool log_plus_finite = true;    // E ln+|Q| < inf
  bool log_second_finite = true;  // E (ln Q)^2 < inf (meaningful when positive)
  bool pareto = false;
  bool boundary = false;
  double tail_index = 0.0;
  SlowVariation ell = SlowVariation::Growing;
};

QFacts q_facts(const QLaw& law) {
  return std::visit(
      overloaded{
          [](const RademacherQ& r) {
            QFacts f;
            f.mean = 2.0 * r.p - 1.0;
            f.mean2 = 1.0;
            f.positive = r.p == 1.0;
            return f;
          },
          [](const ConstantQ& c) {
            QFacts f;
            f.mean = c.value;
            f.mean2 = c.value * c.value;
            f.positive = c.value > 0.0;
            return f;
          },
          [](const LogNormalQ& l) {
            QFacts f;
            f.mean = std::exp(l.mean + 0.5 * l.sd * l.sd);
            f.mean2 = std::exp(2.0 * l.mean + 2.0 * l.sd * l.sd);
            f.positive = true;
            return f;
          },
          [](const ParetoLogQ& p) {
            QFacts f;
            f.mean = kInf;
            f.mean2 = kInf;
            f.positive = true;
            f.log_plus_finite = p.alpha < -1.0;
            f.log_second_finite = false;
            f.pareto = true;
            f.tail_index = p.alpha;
            return f;
          },
          [](const BoundaryLogQ& b) {
            QFacts f;
            f.mean = kInf;
            f.mean2 = kInf;
            f.positive = true;
            f.log_second_finite = false;
            f.boundary = true;
            f.tail_index = -2.0;
            f.ell = b.ell;
            return f;
          },
      },
      law);
}

void validate_q(const QLaw& law) {
  std::visit(overloaded{
                 [](const RademacherQ& r) {
                   if (!(r.p >= 0.0 && r.p <= 1.0)) invalid("Rademacher Q needs p in [0,1]");
                 },
                 [](const ConstantQ& c) {
                   if (!finite(c.value)) invalid("constant Q must be finite");
                 },
                 [](const LogNormalQ& l) {
                   if (!finite(l.mean) || !finite(l.sd) || l.sd < 0.0) {
                     invalid("lognormal Q needs finite mean and sd >= 0");
                   }
                 },
                 [](const ParetoLogQ& p) {
                   if (!(p.alpha > -2.0 && p.alpha < 0.0)) {
                     invalid("Pareto tail index must lie in (-2, 0); use the boundary law for -2");
                   }
                   if (!(p.t0 > 0.0) || !finite(p.t0)) invalid("Pareto scale t0 must be positive");
                 },
                 [](const BoundaryLogQ& b) {
                   if (!finite(b.t0) || !(b.t0 > 1.0)) invalid("boundary law needs t0 > 1");
                   // h must be decreasing on [t0, inf) and at most 1 at t0.
                   if (b.ell == SlowVariation::Growing && b.t0 < std::exp(0.5)) {
                     invalid("boundary law with l = ln t needs t0 >= e^{1/2}");
                   }
                   if (b.ell == SlowVariation::Vanishing && b.t0 * b.t0 * std::log(b.t0) < 1.0) {
                     invalid("boundary law with l = 1/ln t needs t0^2 ln t0 >= 1");
                   }
                 },
             },
             law);
}

ScaledReal unit(int sign) { return ScaledReal{sign, 0, 1.0}; }

double boundary_tail(const BoundaryLogQ& b, double t) {
  if (t < b.t0) return 1.0;
  const double l = b.ell == SlowVariation::Growing ? std::log(t) : 1.0 / std::log(t);
  return l / (t * t);
}

// inf{t >= t0 : h(t) <= level} for the boundary law, by geometric bracketing
// then bisection.
double boundary_inverse(const BoundaryLogQ& b, double level) {
  if (boundary_tail(b, b.t0) <= level) return b.t0;
  double lo = b.t0;
  double hi = 2.0 * b.t0;
  while (boundary_tail(b, hi) > level) {
    lo = hi;
    hi *= 2.0;
    if (!finite(hi)) throw Error(ErrorCode::RangeError, "tail quantile beyond double range");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (boundary_tail(b, mid) <= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

// ---------------------------------------------------------------------------

double tail_function(const QLaw& law, double t) {
  if (const auto* p = std::get_if<ParetoLogQ>(&law)) {
    return t < p->t0 ? 1.0 : std::pow(t / p->t0, p->alpha);
  }
  if (const auto* b = std::get_if<BoundaryLogQ>(&law)) return boundary_tail(*b, t);
  throw Error(ErrorCode::Unsupported, "Q law has no declared tail function");
}

double sample_log_tail(const QLaw& law, double u) {
  if (const auto* p = std::get_if<ParetoLogQ>(&law)) {
    return p->t0 * std::pow(u, 1.0 / p->alpha);
  }
  if (const auto* b = std::get_if<BoundaryLogQ>(&law)) return boundary_inverse(*b, u);
  throw Error(ErrorCode::Unsupported, "Q law has no declared tail function");
}

PairModel::PairModel(Family family) : family_(std::move(family)) {
  std::visit(
      overloaded{
          [this](const DiscreteJoint& d) {
            if (d.atoms.empty()) invalid("discrete joint law needs at least one atom");
            double total = 0.0;
            for (const auto& a : d.atoms) {
              if (!finite(a.q) || !finite(a.m)) invalid("atoms must be finite");
              if (!(a.prob >= 0.0 && a.prob <= 1.0)) invalid("atom probabilities must lie in [0,1]");
              total += a.prob;
            }
            if (std::fabs(total - 1.0) > 1e-9) invalid("atom probabilities must sum to 1");
            double running = 0.0;
            for (const auto& a : d.atoms) {
              running += a.prob / total;
              cumulative_.push_back(running);
              atom_values_.push_back({from_real(a.q), from_real(a.m)});
            }
            // Make the last atom with positive mass absorb rounding.
            for (std::size_t i = d.atoms.size(); i-- > 0;) {
              if (d.atoms[i].prob > 0.0) {
                for (std::size_t j = i; j < cumulative_.size(); ++j) cumulative_[j] = 1.0;
                break;
              }
            }
          },
          [this](const ScaledRademacher& s) {
            if (!finite(s.rho) || !(s.rho > 1.0)) invalid("scaled Rademacher needs rho > 1");
            if (!(s.p > 0.0 && s.p < 1.0)) invalid("scaled Rademacher needs 0 < p < 1");
            if (!std::holds_alternative<RademacherQ>(s.q) && !std::holds_alternative<ConstantQ>(s.q)) {
              invalid("scaled Rademacher supports Rademacher or constant Q");
            }
            validate_q(s.q);
            rho_ = from_real(s.rho);
          },
          [](const LogNormalPair& l) {
            if (!finite(l.mean_x) || !finite(l.var_x) || l.var_x < 0.0) {
              invalid("lognormal M needs finite mean and variance");
            }
            if (l.var_x == 0.0) {
              invalid("M is constant; R_n is then a sum of independent terms and is excluded");
            }
            validate_q(l.q);
          },
          [](const SignedUnit& s) {
            if (!(s.p_m > 0.0 && s.p_m < 1.0)) {
              invalid("signed unit M needs 0 < p_m < 1 (otherwise M is constant)");
            }
            if (std::holds_alternative<ParetoLogQ>(s.q) || std::holds_alternative<BoundaryLogQ>(s.q)) {
              invalid("signed unit M requires Q with finite variance");
            }
            validate_q(s.q);
          },
      },
      family_);
  if (auto q = q_law()) {
    if (const auto* c = std::get_if<ConstantQ>(&*q)) constant_q_ = from_real(c->value);
  }
}

std::optional<QLaw> PairModel::q_law() const {
  return std::visit(overloaded{
                        [](const DiscreteJoint&) -> std::optional<QLaw> { return std::nullopt; },
                        [](const auto& f) -> std::optional<QLaw> { return f.q; },
                    },
                    family_);
}

namespace {

ScaledReal sample_q(const QLaw& law, const ScaledReal& constant, Stream& rng) {
  switch (law.index()) {
    case 0: return unit(rng.sign(std::get<RademacherQ>(law).p));
    case 1: return constant;
    case 2: {
      const auto& l = std::get<LogNormalQ>(law);
      return from_log(1, l.mean + l.sd * rng.normal());
    }
    default: return from_log(1, sample_log_tail(law, rng.uniform()));
  }
}

}  // namespace

PairDraw PairModel::sample(Stream& rng) const {
  switch (family_.index()) {
    case 0: {
      const double u = rng.uniform();
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto i = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                   static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
      return atom_values_[i];
    }
    case 1: {
      const auto& s = std::get<ScaledRademacher>(family_);
      ScaledReal m = rho_;
      m.sign = rng.sign(s.p);
      return {sample_q(s.q, constant_q_, rng), m};
    }
    case 2: {
      const auto& l = std::get<LogNormalPair>(family_);
      const ScaledReal m = from_log(1, l.mean_x + std::sqrt(l.var_x) * rng.normal());
      return {sample_q(l.q, constant_q_, rng), m};
    }
    default: {
      const auto& s = std::get<SignedUnit>(family_);
      const ScaledReal m = unit(rng.sign(s.p_m));
      return {sample_q(s.q, constant_q_, rng), m};
    }
  }
}

// ---------------------------------------------------------------------------

Moments analytic_moments(const PairModel& model) {
  return std::visit(
      overloaded{
          [](const DiscreteJoint& d) {
            Moments mo;
            double mu = 0.0;
            double abs_mean = 0.0, mean_m = 0.0, mean_q = 0.0, mean_q2 = 0.0, mean_qm = 0.0;
            bool has_zero_m = false;
            for (const auto& a : d.atoms) {
              if (a.prob == 0.0) continue;
              if (a.m == 0.0) {
                has_zero_m = true;
              } else {
                mu += a.prob * std::log(std::fabs(a.m));
              }
              abs_mean += a.prob * std::fabs(a.m);
              mean_m += a.prob * a.m;
              mean_q += a.prob * a.q;
              mean_q2 += a.prob * a.q * a.q;
              mean_qm += a.prob * a.q * a.m;
            }
            double v2 = 0.0;
            if (has_zero_m) {
              mu = -kInf;
              v2 = kInf;
            } else {
              for (const auto& a : d.atoms) {
                if (a.prob == 0.0) continue;
                const double dev = std::log(std::fabs(a.m)) - mu;
                v2 += a.prob * dev * dev;
              }
              // Equal moduli give exactly zero spread.
              bool constant_modulus = true;
              double first = -1.0;
              for (const auto& a : d.atoms) {
                if (a.prob == 0.0) continue;
                if (first < 0.0) first = std::fabs(a.m);
                if (std::fabs(a.m) != first) constant_modulus = false;
              }
              if (constant_modulus) {
                v2 = 0.0;
                mu = std::log(first);
              }
            }
            mo.mu = mu;
            mo.v2 = v2;
            mo.abs_mean_M = abs_mean;
            mo.mean_M = mean_m;
            mo.mean_Q = mean_q;
            mo.mean_Q2 = mean_q2;
            mo.mean_QM = mean_qm;
            return mo;
          },
          [](const ScaledRademacher& s) {
            const QFacts q = q_facts(s.q);
            Moments mo;
            mo.mu = std::log(s.rho);
            mo.v2 = 0.0;
            mo.abs_mean_M = s.rho;
            mo.mean_M = s.rho * (2.0 * s.p - 1.0);
            mo.mean_Q = q.mean;
            mo.mean_Q2 = q.mean2;
            mo.mean_QM = q.mean * mo.mean_M;
            return mo;
          },
          [](const LogNormalPair& l) {
            const QFacts q = q_facts(l.q);
            Moments mo;
            mo.mu = l.mean_x;
            mo.v2 = l.var_x;
            mo.abs_mean_M = std::exp(l.mean_x + 0.5 * l.var_x);
            mo.mean_M = mo.abs_mean_M;
            mo.mean_Q = q.mean;
            mo.mean_Q2 = q.mean2;
            mo.mean_QM = q.mean * mo.mean_M;
            return mo;
          },
          [](const SignedUnit& s) {
            const QFacts q = q_facts(s.q);
            Moments mo;
            mo.mu = 0.0;
            mo.v2 = 0.0;
            mo.abs_mean_M = 1.0;
            mo.mean_M = 2.0 * s.p_m - 1.0;
            mo.mean_Q = q.mean;
            mo.mean_Q2 = q.mean2;
            mo.mean_QM = q.mean * mo.mean_M;
            return mo;
          },
      },
      model.family());
}

bool RegimeReport::tracks_running_max() const noexcept {
  switch (case_id) {
    case CaseId::IIIClt:
    case CaseId::IIIEvt:
    case CaseId::IIIBoundaryGrowing:
    case CaseId::IIIBoundaryVanishing: return true;
    default: return false;
  }
}

namespace {

struct SignMass {
  double positive = 0.0;
  double negative = 0.0;
};

SignMass m_sign_mass(const PairModel& model) {
  return std::visit(overloaded{
                        [](const DiscreteJoint& d) {
                          SignMass s;
                          for (const auto& a : d.atoms) {
                            if (a.m > 0.0) s.positive += a.prob;
                            if (a.m < 0.0) s.negative += a.prob;
                          }
                          return s;
                        },
                        [](const ScaledRademacher& r) { return SignMass{r.p, 1.0 - r.p}; },
                        [](const LogNormalPair&) { return SignMass{1.0, 0.0}; },
                        [](const SignedUnit& u) { return SignMass{u.p_m, 1.0 - u.p_m}; },
                    },
                    model.family());
}

QFacts model_q_facts(const PairModel& model, const Moments& mo) {
  if (auto law = model.q_law()) return q_facts(*law);
  const auto& d = std::get<DiscreteJoint>(model.family());
  QFacts f;
  f.mean = mo.mean_Q;
  f.mean2 = mo.mean_Q2;
  f.positive = std::all_of(d.atoms.begin(), d.atoms.end(),
                           [](const JointAtom& a) { return a.prob == 0.0 || a.q > 0.0; });
  return f;
}

RegimeReport unsupported(std::string note) {
  RegimeReport r;
  r.case_id = CaseId::Unsupported;
  r.note = std::move(note);
  return r;
}

}  // namespace

RegimeReport classify(const Moments& mo, const PairModel& model) {
  if (std::isnan(mo.mu) || std::isnan(mo.v2) || mo.v2 < 0.0) {
    invalid("moments are not consistent with a valid model");
  }
  if (std::isfinite(mo.mu) && mo.abs_mean_M < std::exp(mo.mu) * (1.0 - 1e-12)) {
    invalid("E|M| < exp(E ln|M|) violates Jensen's inequality");
  }

  if (const auto* d = std::get_if<DiscreteJoint>(&model.family())) {
    std::set<double> support;
    for (const auto& a : d->atoms) {
      if (a.prob > 0.0) support.insert(a.m);
    }
    if (support.size() < 2) {
      invalid("M is constant; R_n is then a sum of independent terms, which is excluded");
    }
  }

  const SignMass sign = m_sign_mass(model);
  const QFacts q = model_q_facts(model, mo);

  RegimeReport r;
  r.params.mu = mo.mu;

  if (mo.mu < -kZeroDriftTolerance) {
    r.case_id = CaseId::Convergent;
    r.note = "E ln|M| < 0: R_n converges in distribution to a perpetuity; no renorming applies";
    return r;
  }

  if (mo.mu > kZeroDriftTolerance) {
    if (mo.v2 == 0.0) {
      const double rho = mo.abs_mean_M;
      r.params.rho = rho;
      r.params.lambda = 1.0 / rho;
      r.params.p = sign.positive;
      r.normalization = Normalization::GeometricScale;
      if (sign.positive == 0.5) {
        r.case_id = CaseId::ISym;
        r.limit = LimitTag::BernoulliConvolution;
      } else {
        r.case_id = CaseId::IAsym;
        r.limit = LimitTag::SymmetrizedPerpetuity;
      }
      return r;
    }
    if (!q.log_plus_finite) {
      return unsupported("E ln+|Q| = infinity: divergent case without a known renorming");
    }
    if (!std::isfinite(mo.v2)) return unsupported("var ln|M| is infinite");
    r.params.v = std::sqrt(mo.v2);
    if (sign.positive > 0.0 && sign.negative > 0.0) {
      r.case_id = CaseId::IISigned;
      r.normalization = Normalization::LogNormalSigned;
      r.limit = LimitTag::LogNormalSymmetric;
    } else {
      r.case_id = CaseId::IIAbs;
      r.normalization = Normalization::LogNormalAbs;
      r.limit = LimitTag::LogNormalPositive;
    }
    return r;
  }

  // E ln|M| = 0.
  r.params.mu = 0.0;
  if (mo.abs_mean_M <= 1.0 + 1e-12) {
    if (!std::isfinite(mo.mean_Q2)) return unsupported("Case IV requires E Q^2 < infinity");
    r.case_id = CaseId::IV;
    r.params.p = sign.positive;
    r.params.beta2 = beta_squared(mo);
    r.normalization = Normalization::SqrtScale;
    r.limit = LimitTag::Gaussian;
    return r;
  }
  if (sign.negative > 0.0) {
    return unsupported(
        "E ln|M| = 0 with E|M| > 1 and M taking negative values is an open problem "
        "(only the M > 0 case has a known renorming)");
  }
  if (!q.positive) {
    return unsupported("E ln|M| = 0, E|M| > 1 requires Q = e^Y > 0 almost surely");
  }
  r.params.v = std::sqrt(mo.v2);
  if (q.pareto) {
    r.case_id = CaseId::IIIEvt;
    r.params.tail_index = q.tail_index;
    r.normalization = Normalization::TailPower;
    r.limit = LimitTag::ExpFrechet;
  } else if (q.boundary) {
    r.params.tail_index = -2.0;
    r.params.ell = q.ell;
    if (q.ell == SlowVariation::Growing) {
      r.case_id = CaseId::IIIBoundaryGrowing;
      r.normalization = Normalization::TailPower;
      r.limit = LimitTag::ExpFrechet;
    } else {
      r.case_id = CaseId::IIIBoundaryVanishing;
      r.normalization = Normalization::SqrtPower;
      r.limit = LimitTag::ExpHalfNormal;
    }
  } else {
    r.case_id = CaseId::IIIClt;
    r.normalization = Normalization::SqrtPower;
    r.limit = LimitTag::ExpHalfNormal;
  }
  return r;
}

double tail_quantile(const QLaw& law, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidInput, "tail_quantile needs n >= 1");
  const double level = 1.0 / static_cast<double>(n);
  if (const auto* p = std::get_if<ParetoLogQ>(&law)) {
    // (t/t0)^alpha <= 1/n  <=>  t >= t0 n^{-1/alpha}
    return p->t0 * std::pow(static_cast<double>(n), -1.0 / p->alpha);
  }
  if (const auto* b = std::get_if<BoundaryLogQ>(&law)) return boundary_inverse(*b, level);
  throw Error(ErrorCode::Unsupported, "Q law has no declared tail function");
}

double tail_quantile(const PairModel& model, std::uint64_t n) {
  const auto law = model.q_law();
  if (!law) throw Error(ErrorCode::Unsupported, "discrete models have no declared tail function");
  return tail_quantile(*law, n);
}

double beta_squared(const Moments& mo) {
  if (!std::isfinite(mo.mean_Q2) || !std::isfinite(mo.mean_Q)) {
    throw Error(ErrorCode::DomainError, "beta^2 requires E Q^2 < infinity");
  }
  if (!(mo.mean_M > -1.0 && mo.mean_M < 1.0)) {
    throw Error(ErrorCode::DomainError, "beta^2 requires -1 < E M < 1");
  }
  const double b2 = mo.mean_Q2 + 2.0 * mo.mean_Q * mo.mean_QM / (1.0 - mo.mean_M);
  if (b2 < -1e-12) throw Error(ErrorCode::DomainError, "beta^2 is negative; |M| is not 1");
  return std::max(b2, 0.0);
}

double sign_gap(double p, std::uint64_t n) {
  // Repeated squaring keeps integer powers exact where std::pow would be too.
  double base = 2.0 * p - 1.0;
  double result = 1.0;
  for (std::uint64_t k = n; k > 0; k >>= 1) {
    if (k & 1) result *= base;
    base *= base;
  }
  return result;
}

std::string_view to_string(CaseId id) {
  switch (id) {
    case CaseId::ISym: return "I-sym";
    case CaseId::IAsym: return "I-asym";
    case CaseId::IIAbs: return "II-abs";
    case CaseId::IISigned: return "II-signed";
    case CaseId::IIIClt: return "III-clt";
    case CaseId::IIIEvt: return "III-evt";
    case CaseId::IIIBoundaryGrowing: return "III-boundary-growing";
    case CaseId::IIIBoundaryVanishing: return "III-boundary-vanishing";
    case CaseId::IV: return "IV";
    case CaseId::Convergent: return "CONVERGENT";
    case CaseId::Unsupported: return "UNSUPPORTED";
  }
  return "UNSUPPORTED";
}

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::GeometricScale: return "R_n/rho^(n-1)";
    case Normalization::LogNormalAbs: return "|R_n|^(1/(v*sqrt(n)))/exp(mu*sqrt(n)/v)";
    case Normalization::LogNormalSigned: return "sgn(R_n)|R_n|^(1/(v*sqrt(n)))/exp(mu*sqrt(n)/v)";
    case Normalization::SqrtPower: return "R_n^(1/(v*sqrt(n)))";
    case Normalization::TailPower: return "R_n^(1/gamma_n)";
    case Normalization::SqrtScale: return "R_n/sqrt(n)";
    case Normalization::None: return "none";
  }
  return "none";
}

std::string_view to_string(LimitTag t) {
  switch (t) {
    case LimitTag::BernoulliConvolution: return "BernoulliConvolution";
    case LimitTag::SymmetrizedPerpetuity: return "SymmetrizedPerpetuity";
    case LimitTag::LogNormalPositive: return "LogNormalPositive";
    case LimitTag::LogNormalSymmetric: return "LogNormalSymmetric";
    case LimitTag::ExpHalfNormal: return "ExpHalfNormal";
    case LimitTag::ExpFrechet: return "ExpFrechet";
    case LimitTag::Gaussian: return "Gaussian";
    case LimitTag::None: return "none";
  }
  return "none";
}

std::string_view to_string(SlowVariation s) {
  return s == SlowVariation::Growing ? "growing" : "vanishing";
}

}  // namespace perp
