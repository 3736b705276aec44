#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "perp/config.hpp"
#include "perp/error.hpp"

namespace perp {
namespace {

using nlohmann::json;

ErrorCode parse_error(const char* text) {
  try {
    parse_config(json::parse(text));
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorCode::Unavailable;
}

TEST(Config, ParsesEveryFamily) {
  const RunConfig a = parse_config(json::parse(R"({
    "model": {"family": "scaled_rademacher", "rho": 3, "p": 0.7, "q": {"law": "constant", "value": 2}},
    "checkpoints": [1, 5], "samples": 10, "seed": 42, "workers": 2, "series_terms": 12,
    "thresholds": {"final_ks": 0.2, "monotone_slack": 0.02}, "export_samples": true})"));
  const auto& s = std::get<ScaledRademacher>(a.model);
  EXPECT_EQ(s.rho, 3.0);
  EXPECT_EQ(std::get<ConstantQ>(s.q).value, 2.0);
  EXPECT_EQ(a.checkpoints, (std::vector<std::uint64_t>{1, 5}));
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(*a.series_terms, 12u);
  EXPECT_EQ(*a.thresholds.final_ks, 0.2);
  EXPECT_EQ(a.thresholds.variance_rel_tol, 0.05);
  EXPECT_TRUE(a.export_samples);

  const RunConfig b = parse_config(json::parse(R"({"model": {"family": "lognormal_pair",
    "mean_x": 0, "var_x": 1, "q": {"law": "boundary", "ell": "vanishing", "t0": 3}}})"));
  const auto& bq = std::get<BoundaryLogQ>(std::get<LogNormalPair>(b.model).q);
  EXPECT_EQ(bq.ell, SlowVariation::Vanishing);
  EXPECT_EQ(bq.t0, 3.0);
  EXPECT_EQ(b.samples, 10000u);

  const RunConfig c = parse_config(json::parse(R"({"model": {"family": "discrete_joint",
    "atoms": [{"q": 1, "m": 1, "prob": 0.5}, {"q": 1, "m": -1, "prob": 0.5}]}})"));
  EXPECT_EQ(std::get<DiscreteJoint>(c.model).atoms.size(), 2u);

  const RunConfig d = parse_config(json::parse(R"({"model": {"family": "signed_unit", "p_m": 0.75,
    "q": {"law": "pareto", "alpha": -1.5}}, "series_terms": null})"));
  EXPECT_FALSE(d.series_terms.has_value());
}

TEST(Config, StrictRejection) {
  EXPECT_EQ(parse_error(R"([])"), ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({})"), ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "signed_unit", "p_m": 0.5}, "sample": 5})"),
            ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "signed_unit", "pm": 0.5}})"), ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "cauchy"}})"), ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "signed_unit", "p_m": "half"}})"),
            ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "signed_unit", "p_m": 0.5, "q": {"law": "gamma"}}})"),
            ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "lognormal_pair", "mean_x": 0, "var_x": 1,
    "q": {"law": "boundary", "ell": "constant"}}})"),
            ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "signed_unit", "p_m": 0.5}, "checkpoints": [1, -2]})"),
            ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "signed_unit", "p_m": 0.5}, "seed": 1.5})"),
            ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "signed_unit", "p_m": 0.5},
    "thresholds": {"final": 0.1}})"),
            ErrorCode::InvalidInput);
  EXPECT_EQ(parse_error(R"({"model": {"family": "discrete_joint",
    "atoms": [{"q": 1, "m": 2, "p": 1}]}})"),
            ErrorCode::InvalidInput);
}

TEST(Config, RoundTripsThroughJson) {
  const RunConfig a = parse_config(json::parse(R"({
    "model": {"family": "lognormal_pair", "mean_x": 0.25, "var_x": 2, "q": {"law": "lognormal", "mean": 1, "sd": 0.5}},
    "checkpoints": [10, 100], "samples": 77, "seed": 9})"));
  const json once = to_json(a);
  EXPECT_EQ(to_json(parse_config(once)), once);
  EXPECT_TRUE(once["series_terms"].is_null());
  EXPECT_EQ(once["thresholds"]["monotone_slack"], 0.01);
}

TEST(Config, LoadsFilesWithComments) {
  const auto path = std::filesystem::temp_directory_path() / "perp_config_test.json";
  {
    std::ofstream out(path);
    out << "// comment\n{\"model\": {\"family\": \"signed_unit\", \"p_m\": 0.5}}\n";
  }
  EXPECT_EQ(std::get<SignedUnit>(load_config(path.string()).model).p_m, 0.5);
  {
    std::ofstream out(path);
    out << "{\"model\": ";
  }
  EXPECT_THROW(load_config(path.string()), Error);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), Error);
}

TEST(Config, ShippedExamplesParse) {
  for (const auto& entry : std::filesystem::directory_iterator(PERP_EXAMPLES_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
  }
}

}  // namespace
}  // namespace perp
