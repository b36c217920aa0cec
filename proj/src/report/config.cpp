#include "mdrate/report.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace mdrate {
namespace {

const std::set<std::string> kTopLevel = {"schema", "name",  "model", "scale", "method",
                                         "side",   "x",     "n_grid", "reps", "seed",
                                         "eps",    "workers", "output", "exponent_grid"};

template <typename T>
T scalar(const YAML::Node& node, const std::string& what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("invalid value for '" + what + "'");
  }
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::string_view spacing_name(GridSpacing s) {
  return s == GridSpacing::loglog ? "loglog" : "geometric";
}

// JSON has no infinities; they travel as YAML-style strings.
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return ".nan";
  return v > 0 ? ".inf" : "-.inf";
}

}  // namespace

const std::vector<PresetInfo>& model_presets() {
  static const std::vector<PresetInfo> presets = {
      {"gaussian", {{"mu", 0.0}, {"sigma", 1.0}}, "normal law"},
      {"two_point", {{"p_high", 0.5}, {"low", -1.0}, {"high", 1.0}}, "P(X = high) = p_high, else low"},
      {"pareto", {{"alpha", 3.0}, {"xm", 1.0}}, "P(X > t) = (xm/t)^alpha for t >= xm"},
      {"constant", {{"value", 0.0}}, "degenerate law"},
      {"designed", {{"lambda_plus", 1.0}, {"lambda_minus", 1.0}, {"t0", std::exp(1.0)}},
       "tails t^-2 exp(-lambda g(log t)) beyond t0, centered; uses the config scale"},
      {"oscillating", {{"lambda_lo", 0.5}, {"lambda_hi", 2.0}, {"growth", 3.0}},
       "symmetric tail whose exponent oscillates between lambda_lo and lambda_hi"},
  };
  return presets;
}

ScaleFunction build_scale(const ScaleSpec& s) {
  try {
    if (s.kind == "power") return ScaleFunction::power(s.rho);
    if (s.kind == "log") return ScaleFunction::log_clamped();
    if (s.kind == "tlog") return ScaleFunction::t_log();
    if (s.kind == "power_logcorr") return ScaleFunction::power_log_correction(s.rho);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scale: ") + e.what());
  }
  throw ConfigError("unknown scale kind '" + s.kind + "'");
}

TailModel build_model(const ModelSpec& spec, const ScaleFunction& g) {
  const PresetInfo* info = nullptr;
  for (const auto& p : model_presets())
    if (p.name == spec.preset) info = &p;
  if (!info) throw ConfigError("unknown model preset '" + spec.preset + "'");
  std::map<std::string, double> v;
  for (const auto& [k, d] : info->defaults) v[k] = d;
  for (const auto& [k, d] : spec.params) {
    if (!v.count(k)) throw ConfigError("preset '" + spec.preset + "' has no parameter '" + k + "'");
    v[k] = d;
  }
  try {
    std::optional<TailModel> m;
    if (spec.preset == "gaussian") m = make_gaussian(v["mu"], v["sigma"]);
    if (spec.preset == "two_point") m = make_two_point(v["p_high"], v["low"], v["high"]);
    if (spec.preset == "pareto") m = make_pareto(v["alpha"], v["xm"]);
    if (spec.preset == "constant") m = make_constant(v["value"]);
    if (spec.preset == "designed")
      m = make_designed_tail(v["lambda_plus"], v["lambda_minus"], g, v["t0"]);
    if (spec.preset == "oscillating")
      m = make_oscillating_tail(v["lambda_lo"], v["lambda_hi"], g, v["growth"]);
    if (spec.centered && m->mu() != 0.0) m = m->centered();
    return *m;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

void validate(const ExperimentConfig& c) {
  if (c.name.empty()) throw ConfigError("name must be nonempty");
  if (c.name.find('/') != std::string::npos) throw ConfigError("name must not contain '/'");
  if (c.x.empty()) throw ConfigError("x must list at least one value");
  for (double x : c.x)
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("x values must be positive and finite");
  if (c.n_grid.empty()) throw ConfigError("n_grid must be nonempty");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] < 2) throw ConfigError("n_grid values must be >= 2");
    if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1])
      throw ConfigError("n_grid must be strictly increasing");
  }
  if (c.reps < 1000) throw ConfigError("reps must be >= 1000");
  if (c.eps) {
    for (double x : c.x)
      if (!(*c.eps > 0.0 && *c.eps < x)) throw ConfigError("eps must lie in (0, x) for every x");
  }
  if (c.method != Method::crude && c.side != Side::upper)
    throw ConfigError("only the crude method supports side other than upper");
  const auto g = build_scale(c.scale);
  if (c.scale.kind != "log" && c.scale.kind != "tlog" && !(c.scale.rho > 0.0))
    throw ConfigError("scale rho must be positive");
  for (auto n : c.n_grid)
    if (!(g(std::log(static_cast<double>(n))) > 0.0))
      throw ConfigError("g(log n) must be positive on n_grid");
  try {
    validate_grid(c.exponent_grid, g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("exponent_grid: ") + e.what());
  }
  build_model(c.model, g);
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  reject_unknown(root, kTopLevel, "config");
  if (!root["schema"] || scalar<std::string>(root["schema"], "schema") != kConfigSchema)
    throw ConfigError(std::string("schema must be '") + kConfigSchema + "'");

  ExperimentConfig c;
  auto need = [&](const char* key) {
    if (!root[key]) throw ConfigError(std::string("missing key '") + key + "'");
    return root[key];
  };
  c.name = scalar<std::string>(need("name"), "name");

  const auto model = need("model");
  if (!model.IsMap()) throw ConfigError("model must be a mapping");
  c.model.preset = scalar<std::string>(model["preset"], "model.preset");
  for (const auto& kv : model) {
    const auto key = kv.first.as<std::string>();
    if (key == "preset") continue;
    if (key == "centered") {
      c.model.centered = scalar<bool>(kv.second, "model.centered");
      continue;
    }
    c.model.params[key] = scalar<double>(kv.second, "model." + key);
  }

  if (root["scale"]) {
    const auto s = root["scale"];
    reject_unknown(s, {"kind", "rho"}, "scale");
    if (s["kind"]) c.scale.kind = scalar<std::string>(s["kind"], "scale.kind");
    if (s["rho"]) c.scale.rho = scalar<double>(s["rho"], "scale.rho");
  }
  try {
    c.method = parse_method(scalar<std::string>(need("method"), "method"));
    if (root["side"]) c.side = parse_side(scalar<std::string>(root["side"], "side"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto xs = need("x");
  if (xs.IsSequence()) {
    for (const auto& v : xs) c.x.push_back(scalar<double>(v, "x"));
  } else {
    c.x.push_back(scalar<double>(xs, "x"));
  }
  const auto ns = need("n_grid");
  if (!ns.IsSequence()) throw ConfigError("n_grid must be a list");
  for (const auto& v : ns) {
    const double d = scalar<double>(v, "n_grid");
    if (d != std::floor(d) || d > 9e15) throw ConfigError("n_grid values must be integers");
    c.n_grid.push_back(static_cast<std::int64_t>(d));
  }
  if (root["reps"]) {
    const double r = scalar<double>(root["reps"], "reps");
    if (r != std::floor(r) || r < 0 || r > 1e15) throw ConfigError("reps must be a whole number");
    c.reps = static_cast<std::uint64_t>(r);
  }
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["eps"] && !root["eps"].IsNull()) c.eps = scalar<double>(root["eps"], "eps");
  if (root["workers"]) c.workers = scalar<unsigned>(root["workers"], "workers");
  if (root["output"]) c.output = scalar<std::string>(root["output"], "output");
  if (root["exponent_grid"]) {
    const auto gnode = root["exponent_grid"];
    reject_unknown(gnode, {"t_min", "t_max", "points", "spacing"}, "exponent_grid");
    if (gnode["t_min"]) c.exponent_grid.t_min = scalar<double>(gnode["t_min"], "exponent_grid.t_min");
    if (gnode["t_max"]) c.exponent_grid.t_max = scalar<double>(gnode["t_max"], "exponent_grid.t_max");
    if (gnode["points"]) c.exponent_grid.points = scalar<int>(gnode["points"], "exponent_grid.points");
    if (gnode["spacing"]) {
      const auto sp = scalar<std::string>(gnode["spacing"], "exponent_grid.spacing");
      if (sp == "geometric") c.exponent_grid.spacing = GridSpacing::geometric;
      else if (sp == "loglog") c.exponent_grid.spacing = GridSpacing::loglog;
      else throw ConfigError("exponent_grid.spacing must be geometric or loglog");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["schema"] = kConfigSchema;
  j["name"] = c.name;
  nlohmann::ordered_json m;
  m["preset"] = c.model.preset;
  for (const auto& [k, v] : c.model.params) m[k] = number(v);
  m["centered"] = c.model.centered;
  j["model"] = m;
  j["scale"] = {{"kind", c.scale.kind}, {"rho", number(c.scale.rho)}};
  j["method"] = std::string(method_name(c.method));
  j["side"] = std::string(side_name(c.side));
  j["x"] = nlohmann::ordered_json::array();
  for (double x : c.x) j["x"].push_back(number(x));
  j["n_grid"] = c.n_grid;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["eps"] = c.eps ? number(*c.eps) : nlohmann::ordered_json();
  j["workers"] = c.workers;
  j["output"] = c.output;
  j["exponent_grid"] = {{"t_min", number(c.exponent_grid.t_min)},
                        {"t_max", number(c.exponent_grid.t_max)},
                        {"points", c.exponent_grid.points},
                        {"spacing", std::string(spacing_name(c.exponent_grid.spacing))}};
  return j.dump(2);
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& c) {
  if (!c.output.empty()) return c.output;
  if (const char* env = std::getenv("MDRATE_OUTPUT_DIR"); env && *env)
    return std::filesystem::path(env) / c.name;
  return std::filesystem::path("mdrate-out") / c.name;
}

}  // namespace mdrate
