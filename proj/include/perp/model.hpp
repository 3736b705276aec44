#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "perp/random.hpp"
#include "perp/scaled.hpp"

namespace perp {

// ---------------------------------------------------------------------------
// Laws of Q
// ---------------------------------------------------------------------------

/// Q = +1 with probability p, -1 otherwise.
struct RademacherQ {
  double p = 0.5;
};

struct ConstantQ {
  double value = 1.0;
};

/// Q = e^Y with Y ~ Normal(mean, sd^2).
struct LogNormalQ {
  double mean = 0.0;
  double sd = 1.0;
};

/// Q = e^Y with P(Y > t) = (t / t0)^alpha for t >= t0, alpha in (-2, 0).
struct ParetoLogQ {
  double alpha = -1.0;
  double t0 = 1.0;
};

enum class SlowVariation { Growing, Vanishing };

/// Q = e^Y with P(Y > t) = t^{-2} l(t) for t >= t0 and an atom of mass
/// 1 - h(t0) at t0. l(t) = ln t (Growing) or 1 / ln t (Vanishing).
struct BoundaryLogQ {
  SlowVariation ell = SlowVariation::Growing;
  double t0 = 2.0;
};

using QLaw = std::variant<RademacherQ, ConstantQ, LogNormalQ, ParetoLogQ, BoundaryLogQ>;

// ---------------------------------------------------------------------------
// Joint families of (Q, M)
// ---------------------------------------------------------------------------

struct JointAtom {
  double q = 0.0;
  double m = 0.0;
  double prob = 0.0;
};

/// Finite joint law; Q and M may be dependent.
struct DiscreteJoint {
  std::vector<JointAtom> atoms;
};

/// M = rho * eps with P(eps = 1) = p; Q is Rademacher or constant,
/// independent of M.
struct ScaledRademacher {
  double rho = 2.0;
  double p = 0.5;
  QLaw q = RademacherQ{0.5};
};

/// M = e^X with X ~ Normal(mean_x, var_x); Q independent of M.
struct LogNormalPair {
  double mean_x = 0.0;
  double var_x = 1.0;
  QLaw q = ConstantQ{1.0};
};

/// M in {-1, +1} with P(M = 1) = p_m; Q independent with finite variance.
struct SignedUnit {
  double p_m = 0.5;
  QLaw q = ConstantQ{1.0};
};

using Family = std::variant<DiscreteJoint, ScaledRademacher, LogNormalPair, SignedUnit>;

/// One draw of the driving pair. Both components are scaled because
/// Q = e^Y with a heavy-tailed Y routinely exceeds the double range.
struct PairDraw {
  ScaledReal q;
  ScaledReal m;
};

/// Validated, immutable description of the joint law of (Q, M).
class PairModel {
 public:
  /// Throws InvalidModel when the parameters violate the family invariants.
  /// A DiscreteJoint with a single M value is accepted here (it is useful for
  /// deterministic checks of the engine) and rejected by classify().
  explicit PairModel(Family family);

  const Family& family() const noexcept { return family_; }

  bool is_discrete() const noexcept { return std::holds_alternative<DiscreteJoint>(family_); }

  /// Law of Q for the independent families; empty for DiscreteJoint.
  std::optional<QLaw> q_law() const;

  /// M is drawn first, then Q. Per draw: DiscreteJoint one uniform;
  /// ScaledRademacher one uniform for M; LogNormalPair one normal for M;
  /// SignedUnit one uniform for M. Q costs one uniform (Rademacher, Pareto,
  /// boundary), one normal (lognormal) or nothing (constant).
  PairDraw sample(Stream& rng) const;

 private:
  Family family_;
  std::vector<double> cumulative_;           // DiscreteJoint inverse CDF
  std::vector<PairDraw> atom_values_;        // DiscreteJoint atoms, scaled
  ScaledReal constant_q_;                    // ConstantQ in scaled form
  ScaledReal rho_;                           // ScaledRademacher modulus
};

/// Free-function spelling of PairModel::sample.
inline PairDraw sample_pair(const PairModel& model, Stream& rng) { return model.sample(rng); }

/// Y drawn from the log-tail law of a Pareto or boundary Q. Exposed for tests.
double sample_log_tail(const QLaw& law, double u);

/// h(t) = P(Y > t) for the Pareto and boundary laws.
double tail_function(const QLaw& law, double t);

// ---------------------------------------------------------------------------
// Moments and regime classification
// ---------------------------------------------------------------------------

struct Moments {
  double mu = 0.0;           ///< E ln|M|
  double v2 = 0.0;           ///< var ln|M|
  double abs_mean_M = 1.0;   ///< E|M|, possibly +inf
  double mean_M = 0.0;       ///< E M
  double mean_Q = 0.0;       ///< E Q, possibly +inf
  double mean_Q2 = 0.0;      ///< E Q^2, possibly +inf
  double mean_QM = 0.0;      ///< E QM
  bool exact = true;
};

Moments analytic_moments(const PairModel& model);

enum class CaseId {
  ISym,
  IAsym,
  IIAbs,
  IISigned,
  IIIClt,
  IIIEvt,
  IIIBoundaryGrowing,
  IIIBoundaryVanishing,
  IV,
  Convergent,
  Unsupported,
};

/// How R_n is mapped to a quantity with a nondegenerate limit.
enum class Normalization {
  GeometricScale,   ///< R_n / rho^{n-1}
  LogNormalAbs,     ///< |R_n|^{1/(v sqrt n)} / exp(mu sqrt n / v)
  LogNormalSigned,  ///< R_n^{1/(v sqrt n)} / exp(mu sqrt n / v), signed power
  SqrtPower,        ///< R_n^{1/(v sqrt n)}
  TailPower,        ///< R_n^{1/gamma_n}
  SqrtScale,        ///< R_n / sqrt n
  None,
};

enum class LimitTag {
  BernoulliConvolution,
  SymmetrizedPerpetuity,
  LogNormalPositive,
  LogNormalSymmetric,
  ExpHalfNormal,
  ExpFrechet,
  Gaussian,
  None,
};

struct RegimeParams {
  std::optional<double> rho;
  std::optional<double> lambda;
  std::optional<double> p;
  std::optional<double> mu;
  std::optional<double> v;
  std::optional<double> beta2;
  std::optional<double> tail_index;
  std::optional<SlowVariation> ell;
};

struct RegimeReport {
  CaseId case_id = CaseId::Unsupported;
  RegimeParams params;
  Normalization normalization = Normalization::None;
  LimitTag limit = LimitTag::None;
  std::string note;

  /// True for the positive-M Case III regimes, where the running maximum of
  /// the series terms is tracked.
  bool tracks_running_max() const noexcept;
};

std::string_view to_string(CaseId id);
std::string_view to_string(Normalization n);
std::string_view to_string(LimitTag t);
std::string_view to_string(SlowVariation s);

/// |mu| below this is treated as E ln|M| = 0.
inline constexpr double kZeroDriftTolerance = 1e-12;

/// Total on valid models. Throws InvalidModel if `moments` contradict the
/// model (for instance a violated Jensen inequality).
RegimeReport classify(const Moments& moments, const PairModel& model);

inline RegimeReport classify(const PairModel& model) {
  return classify(analytic_moments(model), model);
}

/// gamma_n = inf{t : h(t) <= 1/n}. Closed form for Pareto tails, bisection
/// (relative tolerance 1e-10) for the boundary laws. Throws Unsupported when
/// Q has no declared tail function.
double tail_quantile(const PairModel& model, std::uint64_t n);
double tail_quantile(const QLaw& law, std::uint64_t n);

/// EQ^2 + 2 EQ E(QM) / (1 - EM), the Case IV limit variance.
double beta_squared(const Moments& moments);

/// P(prod eps_j = 1) - P(prod eps_j = -1) = (2p - 1)^n.
double sign_gap(double p, std::uint64_t n);

}  // namespace perp
