#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perp/config.hpp"
#include "perp/limits.hpp"
#include "perp/model.hpp"
#include "perp/stats.hpp"

namespace perp {

enum class ExitCode : int {
  Pass = 0,
  VerificationFailure = 1,
  InvalidInput = 2,
  UnsupportedRegime = 3,
};

struct CommandOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config
  std::optional<int> workers;         // overrides the config
  bool quiet = false;
};

/// Runs `classify`, `verify`, `oracle` or `sample`. Library errors are mapped
/// to exit codes here; nothing escapes as an exception.
int run_command(std::string_view name, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

// ---------------------------------------------------------------------------
// Pipeline pieces shared by the commands and the acceptance suite.
// ---------------------------------------------------------------------------

struct CheckpointRow {
  std::uint64_t n = 0;
  double ks = 0.0;
  Summary summary;
  bool two_sample = false;
};

struct VerifyOutcome {
  RegimeReport regime;
  LimitLaw law;
  unsigned series_terms = 0;
  double final_threshold = 0.0;
  std::vector<CheckpointRow> rows;
  bool monotone_ok = true;
  bool final_ok = true;
  std::optional<double> variance_rel_error;  // Case IV only
  bool variance_ok = true;
  bool pass = true;
};

/// Default final-checkpoint KS threshold. Exact-law cases use
/// dkw_bound(N, 0.01) + 0.005 (the two-sample analogue when the limit has no
/// CDF); the slow Case II/III convergences use fixed engineering values.
double default_final_ks(const RegimeReport& regime, const LimitLaw& law, std::size_t n);

/// Terms used for series limit laws: configured, or the smallest m with
/// truncation bound below 1e-9.
unsigned resolve_series_terms(const RunConfig& config, const LimitLaw& law);

/// Normalized samples of R_n at every checkpoint (index order).
std::vector<std::vector<double>> normalized_samples(const PairModel& model,
                                                    const RegimeReport& regime,
                                                    const RunConfig& config);

/// Reference draws of `law` for the two-sample comparison at checkpoint c.
std::vector<double> reference_samples(const LimitLaw& law, std::size_t count, unsigned terms,
                                      std::uint64_t seed, std::size_t checkpoint_index);

/// Runs the verify pipeline without touching the filesystem. Throws on
/// invalid input or an unsupported regime.
VerifyOutcome verify_run(const RunConfig& config);

/// CSV text with header n,ks,mean,variance,N and %.17g floats.
std::string checkpoints_csv(const VerifyOutcome& outcome);

std::string format_double(double x);

}  // namespace perp
