// mdrate run <config> | verify <suite> | list-presets
//
// Exit status: 0 ok, 1 invalid config or arguments, 2 estimator failure,
// 3 verification failure. Errors are printed to stderr as one JSON object.
#include "mdrate/kernels/kernels.hpp"
#include "mdrate/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

namespace {

int fail(int code, const std::string& kind, const std::string& message,
         const std::vector<std::string>& details = {}) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  if (!details.empty()) j["details"] = details;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moderate-deviation rate experiments"};
  app.require_subcommand(1);

  std::string config_path, output, suite;
  int workers = -1;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "YAML experiment config")->required();
  run->add_option("-o,--output", output, "output directory (overrides the config)");
  run->add_option("-w,--workers", workers, "worker threads (0: all cores)");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "inequalities | exponents | envelopes | all | acceptance")
      ->required();

  auto* list = app.add_subcommand("list-presets", "list model presets and scale kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(1, "usage", e.what());
  }

  try {
    if (*run) {
      auto cfg = mdrate::load_config(config_path);
      if (!output.empty()) cfg.output = output;
      if (workers >= 0) cfg.workers = static_cast<unsigned>(workers);
      const auto res = mdrate::run(cfg);
      std::cout << "wrote " << res.dir.string() << " (isa "
                << mdrate::kernels::isa_name(mdrate::kernels::active_isa()) << ")\n";
      if (res.exit_code != 0) return fail(res.exit_code, "estimator", "estimator failures", res.errors);
      return 0;
    }
    if (*verify) {
      const auto results = mdrate::verify_suite(suite);
      mdrate::print_results(std::cout, results);
      for (const auto& r : results)
        if (!r.pass) return 3;
      return 0;
    }
    if (*list) {
      for (const auto& p : mdrate::model_presets()) {
        std::cout << p.name << ":";
        for (const auto& [k, v] : p.defaults) std::cout << ' ' << k << '=' << v;
        std::cout << "  (" << p.summary << ")\n";
      }
      std::cout << "scale kinds: power(rho) log tlog power_logcorr(rho)\n"
                << "methods: crude tilted split conditional-lower\n"
                << "catalog:";
      for (const auto& c : mdrate::catalog()) std::cout << " [" << c.name << "]";
      std::cout << '\n';
      return 0;
    }
  } catch (const mdrate::ConfigError& e) {
    return fail(1, "validation", e.what());
  } catch (const std::exception& e) {
    return fail(2, "estimator", e.what());
  }
  return 0;
}
