#include "mdrate/report.hpp"

#include <boost/version.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mdrate {
namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::vector<Trajectory> run_trajectories(const ExperimentConfig& cfg, const TailModel& model,
                                         const ScaleFunction& g) {
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < cfg.x.size(); ++i) {
    const RunOptions opt{cfg.reps, cfg.seed + i, cfg.workers};
    out.push_back(convergence_trajectory(model, g, cfg.x[i], cfg.n_grid, cfg.method, opt, cfg.eps,
                                         cfg.side, cfg.exponent_grid));
  }
  return out;
}

std::string exponents_json(const ExperimentConfig& cfg, const TailModel& model,
                           const ScaleFunction& g) {
  const auto e = exponents_from_tail(model, g, cfg.exponent_grid);
  nlohmann::ordered_json j;
  j["model"] = model.label();
  j["scale"] = g.label();
  j["rho"] = number(g.rho());
  j["mu"] = number(model.mu());
  j["sigma2"] = number(model.sigma2());
  j["grid"] = {{"t_min", number(cfg.exponent_grid.t_min)},
               {"t_max", number(cfg.exponent_grid.t_max)},
               {"points", cfg.exponent_grid.points},
               {"spacing", cfg.exponent_grid.spacing == GridSpacing::loglog ? "loglog" : "geometric"},
               {"window", "last third"},
               {"lambda_max", kLambdaMax}};
  j["exponents"] = {{"lam1_bar", number(e.lam1_bar)},   {"lam1_under", number(e.lam1_under)},
                    {"lam2_bar", number(e.lam2_bar)},   {"lam2_under", number(e.lam2_under)},
                    {"lam_bar", number(e.lam_bar)},     {"lam_under", number(e.lam_under)}};
  j["regime"] = std::string(regime_name(classify(model.sigma2(), true, e, g.rho())));
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const std::vector<Trajectory>& runs) {
  os << "n,x,method,p_hat,stderr,log_p,normalized,rate_limsup,rate_liminf,flags\n";
  for (const auto& t : runs) {
    for (const auto& r : t.rows) {
      const auto& e = r.est;
      os << e.n << ',' << fmt(e.x) << ',' << method_name(e.method) << ',' << fmt(e.p_hat) << ','
         << fmt(e.stderr_p) << ',' << fmt(e.log_p) << ',' << fmt(e.normalized) << ','
         << fmt(r.rate_limsup) << ',' << fmt(r.rate_liminf) << ',' << flags_text(e.flags) << '\n';
    }
  }
}

std::string trajectory_csv(const ExperimentConfig& cfg) {
  const auto g = build_scale(cfg.scale);
  const auto model = build_model(cfg.model, g);
  std::ostringstream os;
  write_trajectory_csv(os, run_trajectories(cfg, model, g));
  return os.str();
}

RunResult run(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto g = build_scale(cfg.scale);
  const auto model = build_model(cfg.model, g);
  RunResult res;
  res.dir = resolve_output_dir(cfg);
  std::filesystem::create_directories(res.dir);

  const auto runs = run_trajectories(cfg, model, g);
  std::ostringstream csv;
  write_trajectory_csv(csv, runs);
  write_file(res.dir / "trajectory.csv", csv.str());
  for (const auto& t : runs)
    for (const auto& r : t.rows)
      if (!r.error.empty())
        res.errors.push_back("n=" + std::to_string(r.est.n) + " x=" + fmt(r.est.x) + ": " + r.error);

  write_file(res.dir / "exponents.json", exponents_json(cfg, model, g));

  std::vector<std::string> artifacts = {"trajectory.csv", "exponents.json"};
  if (std::isfinite(model.sigma2()) && model.sigma2() > 0.0) {
    const RateSpec spec{model.sigma2(), g.rho(), exponents_from_tail(model, g, cfg.exponent_grid)};
    double x_max = 0.0;
    for (double x : cfg.x) x_max = std::max(x_max, x);
    std::vector<double> xs;
    for (int i = 1; i <= 200; ++i) xs.push_back(2.0 * x_max * i / 200.0);
    std::ostringstream rc;
    write_rate_curve(rc, spec, xs, cfg.side);
    write_file(res.dir / "rate_curve.csv", rc.str());
    artifacts.push_back("rate_curve.csv");
  }

  nlohmann::ordered_json m;
  m["schema"] = kManifestSchema;
  m["config"] = nlohmann::ordered_json::parse(config_json(cfg));
  m["seed"] = cfg.seed;
  m["model_label"] = model.label();
  m["versions"] = {{"mdrate", kVersion},
                   {"boost", BOOST_LIB_VERSION},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  m["artifacts"] = artifacts;
  m["errors"] = res.errors;
  write_file(res.dir / "manifest.json", m.dump(2) + "\n");

  res.exit_code = res.errors.empty() ? 0 : 2;
  return res;
}

}  // namespace mdrate
