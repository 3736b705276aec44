#include "perp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "perp/error.hpp"
#include "perp/normalize.hpp"
#include "perp/random.hpp"
#include "perp/simulate.hpp"

namespace perp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Separates the reference-sampler streams from the trajectory streams.
constexpr std::uint64_t kReferenceSalt = 0x6c696d69742d7265ULL;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + path.string() + "'");
  out << text;
}

json params_json(const RegimeParams& p) {
  json j = json::object();
  auto put = [&j](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("rho", p.rho);
  put("lambda", p.lambda);
  put("p", p.p);
  put("mu", p.mu);
  put("v", p.v);
  put("beta2", p.beta2);
  put("tail_index", p.tail_index);
  if (p.ell) j["ell"] = std::string(to_string(*p.ell));
  return j;
}

json regime_json(const RegimeReport& r, const Moments& mo) {
  json j;
  j["case"] = std::string(to_string(r.case_id));
  j["mu"] = mo.mu;
  j["v2"] = mo.v2;
  j["abs_mean_M"] = std::isfinite(mo.abs_mean_M) ? json(mo.abs_mean_M) : json("inf");
  j["normalization"] = std::string(to_string(r.normalization));
  j["params"] = params_json(r.params);
  if (r.case_id != CaseId::Convergent && r.case_id != CaseId::Unsupported) {
    j["limit"] = limit_for(r).name();
  } else {
    j["limit"] = nullptr;
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

RunConfig resolve(const CommandOptions& opt) {
  RunConfig c = load_config(opt.config_path);
  if (opt.seed) c.seed = *opt.seed;
  if (opt.workers) c.workers = *opt.workers;
  return c;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& c) {
  json m;
  m["command"] = command;
  m["config"] = to_json(c);
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

fs::path prepare_out(const CommandOptions& opt) {
  fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidInput, "cannot create output directory " + dir.string());
  return dir;
}

void require_run_fields(const RunConfig& c) {
  if (c.checkpoints.empty()) throw Error(ErrorCode::InvalidInput, "config needs 'checkpoints'");
  validate_checkpoints(c.checkpoints);
  if (c.samples < 1) throw Error(ErrorCode::InvalidInput, "config needs samples >= 1");
}

std::string samples_csv(const std::vector<double>& values) {
  std::string s = "value\n";
  for (double v : values) {
    s += format_double(v);
    s += '\n';
  }
  return s;
}

// ----------------------------------------------------------------------------

int cmd_classify(const CommandOptions& opt, std::ostream& out) {
  const RunConfig c = resolve(opt);
  const PairModel model(c.model);
  const Moments mo = analytic_moments(model);
  const RegimeReport r = classify(mo, model);
  const fs::path dir = prepare_out(opt);
  json report;
  report["command"] = "classify";
  report["regime"] = regime_json(r, mo);
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_manifest(dir, "classify", c);
  if (!opt.quiet) {
    out << "case: " << to_string(r.case_id) << '\n';
    if (report["regime"]["limit"].is_string()) {
      out << "limit: " << report["regime"]["limit"].get<std::string>() << '\n';
    }
    if (!r.note.empty()) out << "note: " << r.note << '\n';
  }
  return static_cast<int>(r.case_id == CaseId::Unsupported ? ExitCode::UnsupportedRegime
                                                           : ExitCode::Pass);
}

int cmd_verify(const CommandOptions& opt, std::ostream& out) {
  RunConfig c = resolve(opt);
  const VerifyOutcome v = verify_run(c);
  const fs::path dir = prepare_out(opt);

  c.series_terms = v.series_terms;
  c.thresholds.final_ks = v.final_threshold;

  json report;
  report["command"] = "verify";
  report["regime"] = regime_json(v.regime, analytic_moments(PairModel(c.model)));
  report["limit"] = v.law.name();
  report["series_terms"] = v.series_terms;
  json rows = json::array();
  for (const auto& row : v.rows) {
    rows.push_back({{"n", row.n},
                    {"ks", row.ks},
                    {"ks_kind", row.two_sample ? "two-sample" : "one-sample"},
                    {"mean", row.summary.mean},
                    {"variance", row.summary.variance ? json(*row.summary.variance) : json(nullptr)},
                    {"N", row.summary.count}});
  }
  report["checkpoints"] = rows;
  report["thresholds"] = {{"final_ks", v.final_threshold},
                          {"monotone_slack", c.thresholds.monotone_slack},
                          {"variance_rel_tol", c.thresholds.variance_rel_tol},
                          {"basis", "engineering choice; no convergence rate is known"}};
  report["monotone_ok"] = v.monotone_ok;
  report["final_ok"] = v.final_ok;
  if (v.variance_rel_error) {
    report["variance_check"] = {{"beta2", *v.regime.params.beta2},
                                {"relative_error", *v.variance_rel_error},
                                {"ok", v.variance_ok}};
  }
  report["pass"] = v.pass;
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_text(dir / "checkpoints.csv", checkpoints_csv(v));
  write_manifest(dir, "verify", c);
  if (c.export_samples) {
    const auto samples = normalized_samples(PairModel(c.model), v.regime, c);
    for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
      write_text(dir / ("samples_n" + std::to_string(c.checkpoints[i]) + ".csv"),
                 samples_csv(samples[i]));
    }
  }
  if (!opt.quiet) {
    for (const auto& row : v.rows) {
      out << "n=" << row.n << " ks=" << row.ks << (row.two_sample ? " (two-sample)" : "") << '\n';
    }
    out << "final threshold " << v.final_threshold << ": " << (v.final_ok ? "ok" : "FAIL")
        << "; monotone: " << (v.monotone_ok ? "ok" : "FAIL");
    if (v.variance_rel_error) {
      out << "; variance rel. error " << *v.variance_rel_error << ": "
          << (v.variance_ok ? "ok" : "FAIL");
    }
    out << '\n' << (v.pass ? "PASS" : "FAIL") << '\n';
  }
  return static_cast<int>(v.pass ? ExitCode::Pass : ExitCode::VerificationFailure);
}

int cmd_oracle(const CommandOptions& opt, std::ostream& out) {
  const RunConfig c = resolve(opt);
  const PairModel model(c.model);
  if (!model.is_discrete()) {
    throw Error(ErrorCode::InvalidModel, "oracle needs a discrete_joint model");
  }
  require_run_fields(c);
  std::vector<ExactDistribution> exact;
  for (const auto n : c.checkpoints) {
    if (n > 64) throw Error(ErrorCode::TooLarge, "oracle checkpoint beyond enumeration range");
    exact.push_back(enumerate_exact(model, static_cast<unsigned>(n)));
  }
  const BatchResult batch = run_batch(model, c.checkpoints, c.samples, c.seed, c.workers);
  const double bound = dkw_bound(c.samples, 0.01);

  bool case_iv = false;
  try {
    case_iv = classify(model).case_id == CaseId::IV;
  } catch (const Error&) {
    case_iv = false;  // degenerate M still has an exact law
  }

  json rows = json::array();
  std::string csv = "n,max_deviation,dkw_bound,N\n";
  bool pass = true;
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    std::vector<double> mc;
    mc.reserve(c.samples);
    for (const auto& r : batch.values[i]) mc.push_back(to_real(r));
    const Ecdf ecdf(mc);
    const auto& atoms = exact[i].atoms;
    // Compare between atoms so that last-bit differences between the two
    // arithmetic paths cannot move a sample across an atom.
    double dev = ecdf(atoms.front().value - 0.5);
    double acc = 0.0;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      acc += atoms[a].prob;
      const double probe = a + 1 < atoms.size() ? 0.5 * (atoms[a].value + atoms[a + 1].value)
                                                : atoms[a].value + 0.5;
      dev = std::max(dev, std::fabs(ecdf(probe) - std::min(acc, 1.0)));
    }
    const bool ok = dev <= bound;
    pass = pass && ok;
    json row = {{"n", c.checkpoints[i]},
                {"max_deviation", dev},
                {"dkw_bound", bound},
                {"atoms", atoms.size()},
                {"ok", ok}};
    if (case_iv) {
      const Summary s = summary(mc);
      const MeanVariance mv = exact_moments_recursion(model, c.checkpoints[i]);
      row["moments"] = {{"mc_mean", s.mean},
                        {"mc_variance", s.variance ? json(*s.variance) : json(nullptr)},
                        {"exact_mean", mv.mean},
                        {"exact_variance", mv.variance},
                        {"enumerated_mean", exact[i].mean()},
                        {"enumerated_variance", exact[i].variance()}};
    }
    rows.push_back(row);
    csv += std::to_string(c.checkpoints[i]) + "," + format_double(dev) + "," +
           format_double(bound) + "," + std::to_string(c.samples) + "\n";
    if (!opt.quiet) {
      out << "n=" << c.checkpoints[i] << " max deviation " << dev << " (DKW bound " << bound
          << ")" << (ok ? "" : " FAIL") << '\n';
    }
  }
  const fs::path dir = prepare_out(opt);
  json report;
  report["command"] = "oracle";
  report["checkpoints"] = rows;
  report["pass"] = pass;
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_text(dir / "checkpoints.csv", csv);
  write_manifest(dir, "oracle", c);
  if (!opt.quiet) out << (pass ? "PASS" : "FAIL") << '\n';
  return static_cast<int>(pass ? ExitCode::Pass : ExitCode::VerificationFailure);
}

int cmd_sample(const CommandOptions& opt, std::ostream& out) {
  RunConfig c = resolve(opt);
  require_run_fields(c);
  const PairModel model(c.model);
  const RegimeReport r = classify(model);
  if (r.case_id == CaseId::Unsupported || r.case_id == CaseId::Convergent) {
    throw Error(ErrorCode::Unsupported, "no renorming for regime " + std::string(to_string(r.case_id)) +
                                            (r.note.empty() ? "" : ": " + r.note));
  }
  const auto samples = normalized_samples(model, r, c);
  const fs::path dir = prepare_out(opt);
  json files = json::array();
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    const std::string name = "samples_n" + std::to_string(c.checkpoints[i]) + ".csv";
    write_text(dir / name, samples_csv(samples[i]));
    files.push_back(name);
  }
  json report;
  report["command"] = "sample";
  report["regime"] = regime_json(r, analytic_moments(model));
  report["files"] = files;
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_manifest(dir, "sample", c);
  if (!opt.quiet) out << "wrote " << files.size() << " sample file(s) to " << dir.string() << '\n';
  return static_cast<int>(ExitCode::Pass);
}

}  // namespace

// ----------------------------------------------------------------------------

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double default_final_ks(const RegimeReport& regime, const LimitLaw& law, std::size_t n) {
  switch (regime.case_id) {
    case CaseId::IIAbs:
    case CaseId::IISigned:
    case CaseId::IIIClt:
    case CaseId::IIIBoundaryVanishing: return 0.08;
    case CaseId::IIIEvt: return 0.05;
    case CaseId::IIIBoundaryGrowing: return 0.10;
    default: break;
  }
  // Two equal samples: sqrt(ln(2/delta) (1/N + 1/N) / 2) = sqrt(2) dkw_bound.
  const double base = law.has_cdf() ? dkw_bound(n, 0.01) : std::sqrt(2.0) * dkw_bound(n, 0.01);
  return base + 0.005;
}

unsigned resolve_series_terms(const RunConfig& config, const LimitLaw& law) {
  if (config.series_terms) return *config.series_terms;
  if (law.tag == LimitTag::BernoulliConvolution || law.tag == LimitTag::SymmetrizedPerpetuity) {
    return series_terms_for(law.lambda, 1e-9);
  }
  return 1;
}

std::vector<std::vector<double>> normalized_samples(const PairModel& model,
                                                    const RegimeReport& regime,
                                                    const RunConfig& config) {
  require_run_fields(config);
  const BatchResult batch = run_batch(model, config.checkpoints, config.samples, config.seed,
                                      config.workers);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < batch.checkpoints.size(); ++i) {
    const std::uint64_t n = batch.checkpoints[i];
    std::optional<double> gamma;
    if (regime.normalization == Normalization::TailPower) gamma = tail_quantile(model, n);
    out.push_back(Normalizer(regime, n, gamma).apply(batch.values[i]));
  }
  return out;
}

std::vector<double> reference_samples(const LimitLaw& law, std::size_t count, unsigned terms,
                                      std::uint64_t seed, std::size_t checkpoint_index) {
  Stream rng(derive_seed(seed ^ kReferenceSalt, checkpoint_index));
  std::vector<double> out(count);
  for (auto& x : out) x = sample_limit(law, rng, terms);
  return out;
}

VerifyOutcome verify_run(const RunConfig& config) {
  require_run_fields(config);
  const PairModel model(config.model);
  VerifyOutcome v;
  v.regime = classify(model);
  if (v.regime.case_id == CaseId::Unsupported || v.regime.case_id == CaseId::Convergent) {
    throw Error(ErrorCode::Unsupported,
                "no renormed limit for regime " + std::string(to_string(v.regime.case_id)) +
                    (v.regime.note.empty() ? "" : ": " + v.regime.note));
  }
  v.law = limit_for(v.regime);
  v.series_terms = resolve_series_terms(config, v.law);
  v.final_threshold = config.thresholds.final_ks.value_or(
      default_final_ks(v.regime, v.law, config.samples));

  const auto samples = normalized_samples(model, v.regime, config);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CheckpointRow row;
    row.n = config.checkpoints[i];
    row.summary = summary(samples[i]);
    if (v.law.has_cdf()) {
      const LimitLaw law = v.law;
      row.ks = ks_one_sample(samples[i], [&law](double x) { return cdf(law, x); });
    } else {
      row.two_sample = true;
      const auto ref = reference_samples(v.law, samples[i].size(), v.series_terms, config.seed, i);
      row.ks = ks_two_sample(samples[i], ref);
    }
    v.rows.push_back(row);
  }
  for (std::size_t i = 1; i < v.rows.size(); ++i) {
    if (v.rows[i].ks > v.rows[i - 1].ks + config.thresholds.monotone_slack) v.monotone_ok = false;
  }
  v.final_ok = v.rows.back().ks <= v.final_threshold;
  if (v.regime.case_id == CaseId::IV && v.rows.back().summary.variance) {
    const double beta2 = *v.regime.params.beta2;
    v.variance_rel_error = std::fabs(*v.rows.back().summary.variance - beta2) / beta2;
    v.variance_ok = *v.variance_rel_error <= config.thresholds.variance_rel_tol;
  }
  v.pass = v.monotone_ok && v.final_ok && v.variance_ok;
  return v;
}

std::string checkpoints_csv(const VerifyOutcome& v) {
  std::string s = "n,ks,mean,variance,N\n";
  for (const auto& row : v.rows) {
    s += std::to_string(row.n);
    s += ',' + format_double(row.ks);
    s += ',' + format_double(row.summary.mean);
    s += ',' + (row.summary.variance ? format_double(*row.summary.variance) : std::string());
    s += ',' + std::to_string(row.summary.count);
    s += '\n';
  }
  return s;
}

int run_command(std::string_view name, const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
  try {
    if (name == "classify") return cmd_classify(options, out);
    if (name == "verify") return cmd_verify(options, out);
    if (name == "oracle") return cmd_oracle(options, out);
    if (name == "sample") return cmd_sample(options, out);
    err << "unknown command '" << name << "'\n";
    return static_cast<int>(ExitCode::InvalidInput);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::Unsupported) {
      err << "the regime E ln|M| = 0, E|M| > 1 with signed M, the Pakes case E ln+ Q = inf and "
             "the alpha = -2, l ~ const boundary are open or excluded\n";
      return static_cast<int>(ExitCode::UnsupportedRegime);
    }
    return static_cast<int>(ExitCode::InvalidInput);
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed config: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InvalidInput);
  }
}

}  // namespace perp
