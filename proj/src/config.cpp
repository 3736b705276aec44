#include "perp/config.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <string_view>

#include "perp/error.hpp"

namespace perp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, "config " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail(path, "unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path, "missing key '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
  return j.contains(key) ? number(j, key, path) : fallback;
}

std::uint64_t unsigned_int(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path, "missing key '" + key + "'");
  if (!j.at(key).is_string()) fail(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

QLaw parse_q(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string law = text(j, "law", path);
  if (law == "rademacher") {
    reject_unknown(j, path, {"law", "p"});
    return RademacherQ{number_or(j, "p", path, 0.5)};
  }
  if (law == "constant") {
    reject_unknown(j, path, {"law", "value"});
    return ConstantQ{number(j, "value", path)};
  }
  if (law == "lognormal") {
    reject_unknown(j, path, {"law", "mean", "sd"});
    return LogNormalQ{number_or(j, "mean", path, 0.0), number_or(j, "sd", path, 1.0)};
  }
  if (law == "pareto") {
    reject_unknown(j, path, {"law", "alpha", "t0"});
    return ParetoLogQ{number(j, "alpha", path), number_or(j, "t0", path, 1.0)};
  }
  if (law == "boundary") {
    reject_unknown(j, path, {"law", "ell", "t0"});
    const std::string ell = text(j, "ell", path);
    if (ell != "growing" && ell != "vanishing") {
      fail(path + ".ell", "expected 'growing' or 'vanishing'");
    }
    return BoundaryLogQ{ell == "growing" ? SlowVariation::Growing : SlowVariation::Vanishing,
                        number_or(j, "t0", path, 2.0)};
  }
  fail(path + ".law", "unknown Q law '" + law + "'");
}

json q_to_json(const QLaw& law) {
  return std::visit(
      [](const auto& q) -> json {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, RademacherQ>) {
          return {{"law", "rademacher"}, {"p", q.p}};
        } else if constexpr (std::is_same_v<T, ConstantQ>) {
          return {{"law", "constant"}, {"value", q.value}};
        } else if constexpr (std::is_same_v<T, LogNormalQ>) {
          return {{"law", "lognormal"}, {"mean", q.mean}, {"sd", q.sd}};
        } else if constexpr (std::is_same_v<T, ParetoLogQ>) {
          return {{"law", "pareto"}, {"alpha", q.alpha}, {"t0", q.t0}};
        } else {
          return {{"law", "boundary"}, {"ell", std::string(to_string(q.ell))}, {"t0", q.t0}};
        }
      },
      law);
}

}  // namespace

Family parse_model(const json& j) {
  const std::string path = "model";
  require_object(j, path);
  const std::string family = text(j, "family", path);
  if (family == "discrete_joint") {
    reject_unknown(j, path, {"family", "atoms"});
    if (!j.contains("atoms") || !j.at("atoms").is_array()) fail(path + ".atoms", "expected an array");
    DiscreteJoint d;
    std::size_t i = 0;
    for (const auto& a : j.at("atoms")) {
      const std::string ap = path + ".atoms[" + std::to_string(i++) + "]";
      require_object(a, ap);
      reject_unknown(a, ap, {"q", "m", "prob"});
      d.atoms.push_back({number(a, "q", ap), number(a, "m", ap), number(a, "prob", ap)});
    }
    return d;
  }
  if (family == "scaled_rademacher") {
    reject_unknown(j, path, {"family", "rho", "p", "q"});
    ScaledRademacher s;
    s.rho = number(j, "rho", path);
    s.p = number_or(j, "p", path, 0.5);
    s.q = j.contains("q") ? parse_q(j.at("q"), path + ".q") : QLaw{RademacherQ{0.5}};
    return s;
  }
  if (family == "lognormal_pair") {
    reject_unknown(j, path, {"family", "mean_x", "var_x", "q"});
    LogNormalPair l;
    l.mean_x = number(j, "mean_x", path);
    l.var_x = number(j, "var_x", path);
    l.q = j.contains("q") ? parse_q(j.at("q"), path + ".q") : QLaw{ConstantQ{1.0}};
    return l;
  }
  if (family == "signed_unit") {
    reject_unknown(j, path, {"family", "p_m", "q"});
    SignedUnit s;
    s.p_m = number(j, "p_m", path);
    s.q = j.contains("q") ? parse_q(j.at("q"), path + ".q") : QLaw{ConstantQ{1.0}};
    return s;
  }
  fail(path + ".family", "unknown family '" + family + "'");
}

RunConfig parse_config(const json& j) {
  require_object(j, "root");
  reject_unknown(j, "root", {"model", "checkpoints", "samples", "seed", "workers", "series_terms",
                             "thresholds", "export_samples"});
  if (!j.contains("model")) fail("root", "missing key 'model'");
  RunConfig c;
  c.model = parse_model(j.at("model"));
  if (j.contains("checkpoints")) {
    const json& cps = j.at("checkpoints");
    if (!cps.is_array()) fail("checkpoints", "expected an array");
    for (std::size_t i = 0; i < cps.size(); ++i) {
      c.checkpoints.push_back(unsigned_int(cps[i], "checkpoints[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("samples")) c.samples = unsigned_int(j.at("samples"), "samples");
  if (j.contains("seed")) c.seed = unsigned_int(j.at("seed"), "seed");
  if (j.contains("workers")) {
    const auto w = unsigned_int(j.at("workers"), "workers");
    if (w > 4096) fail("workers", "implausible worker count");
    c.workers = static_cast<int>(w);
  }
  if (j.contains("series_terms") && !j.at("series_terms").is_null()) {
    const auto m = unsigned_int(j.at("series_terms"), "series_terms");
    if (m < 1 || m > 100000) fail("series_terms", "expected 1..100000");
    c.series_terms = static_cast<unsigned>(m);
  }
  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    require_object(t, "thresholds");
    reject_unknown(t, "thresholds", {"final_ks", "monotone_slack", "variance_rel_tol"});
    if (t.contains("final_ks") && !t.at("final_ks").is_null()) c.thresholds.final_ks = number(t, "final_ks", "thresholds");
    c.thresholds.monotone_slack = number_or(t, "monotone_slack", "thresholds", 0.01);
    c.thresholds.variance_rel_tol = number_or(t, "variance_rel_tol", "thresholds", 0.05);
  }
  if (j.contains("export_samples")) {
    if (!j.at("export_samples").is_boolean()) fail("export_samples", "expected a boolean");
    c.export_samples = j.at("export_samples").get<bool>();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const Family& model) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, DiscreteJoint>) {
          json atoms = json::array();
          for (const auto& a : f.atoms) atoms.push_back({{"q", a.q}, {"m", a.m}, {"prob", a.prob}});
          return {{"family", "discrete_joint"}, {"atoms", atoms}};
        } else if constexpr (std::is_same_v<T, ScaledRademacher>) {
          return {{"family", "scaled_rademacher"}, {"rho", f.rho}, {"p", f.p}, {"q", q_to_json(f.q)}};
        } else if constexpr (std::is_same_v<T, LogNormalPair>) {
          return {{"family", "lognormal_pair"},
                  {"mean_x", f.mean_x},
                  {"var_x", f.var_x},
                  {"q", q_to_json(f.q)}};
        } else {
          return {{"family", "signed_unit"}, {"p_m", f.p_m}, {"q", q_to_json(f.q)}};
        }
      },
      model);
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = to_json(c.model);
  j["checkpoints"] = c.checkpoints;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["series_terms"] = c.series_terms ? json(*c.series_terms) : json(nullptr);
  json t;
  t["final_ks"] = c.thresholds.final_ks ? json(*c.thresholds.final_ks) : json(nullptr);
  t["monotone_slack"] = c.thresholds.monotone_slack;
  t["variance_rel_tol"] = c.thresholds.variance_rel_tol;
  j["thresholds"] = t;
  j["export_samples"] = c.export_samples;
  return j;
}

}  // namespace perp
