// perpsim: classify, simulate and verify renormed divergent perpetuities.
//
//   perpsim classify --config model.json --out results/
//   perpsim verify   --config run.json --out results/ --workers 8
//   perpsim oracle   --config discrete.json --out results/
//   perpsim sample   --config run.json --out results/
//
// Exit codes: 0 pass, 1 verification failure, 2 invalid input,
// 3 unsupported regime.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "perp/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Renormed divergent perpetuities: simulation and verification"};
  app.require_subcommand(1);

  perp::CommandOptions opt;
  std::uint64_t seed = 0;
  int workers = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--workers", workers, "OpenMP worker threads (overrides the config)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", opt.quiet, "Suppress console output");
  };

  for (const char* name : {"classify", "verify", "oracle", "sample"}) {
    const char* help = std::string_view(name) == "classify" ? "Classify the regime of a model"
                       : std::string_view(name) == "verify" ? "Check convergence to the limit law"
                       : std::string_view(name) == "oracle" ? "Compare against exact enumeration"
                                                            : "Export normalized samples";
    add_common(app.add_subcommand(name, help));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(perp::ExitCode::InvalidInput);
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed") > 0) opt.seed = seed;
  if (sub->count("--workers") > 0) opt.workers = workers;

  std::ostringstream sink;
  std::ostream& out = opt.quiet ? static_cast<std::ostream&>(sink) : std::cout;
  return perp::run_command(sub->get_name(), opt, out, std::cerr);
}
