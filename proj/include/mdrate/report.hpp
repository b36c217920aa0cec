// Experiment configs, artifact writers and verification suites behind the
// `mdrate` command line tool.
#pragma once

#include "mdrate/exponents.hpp"
#include "mdrate/rate.hpp"
#include "mdrate/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdrate {

inline constexpr const char* kConfigSchema = "mdrate-experiment/1";
inline constexpr const char* kManifestSchema = "mdrate-manifest/1";
inline constexpr const char* kVersion = "0.1.0";

// Invalid or inconsistent configuration (exit status 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  std::string preset;
  std::map<std::string, double> params;  // missing keys take preset defaults
  bool centered = false;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct ScaleSpec {
  std::string kind = "power";  // power | log | tlog | power_logcorr
  double rho = 1.0;
  friend bool operator==(const ScaleSpec&, const ScaleSpec&) = default;
};

struct ExperimentConfig {
  std::string name;
  ModelSpec model;
  ScaleSpec scale;
  Method method = Method::crude;
  Side side = Side::upper;
  std::vector<double> x;
  std::vector<std::int64_t> n_grid;
  std::uint64_t reps = 10000;
  std::uint64_t seed = 1;
  std::optional<double> eps;
  unsigned workers = 0;
  std::string output;  // empty: resolved from MDRATE_OUTPUT_DIR
  GridSpec exponent_grid{};
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Parses YAML (or JSON) text and validates it; throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);

// Canonical JSON echo; parse_config(config_json(c)) == c.
std::string config_json(const ExperimentConfig& cfg);

ScaleFunction build_scale(const ScaleSpec& spec);
TailModel build_model(const ModelSpec& spec, const ScaleFunction& g);

struct PresetInfo {
  std::string name;
  std::vector<std::pair<std::string, double>> defaults;
  std::string summary;
};
const std::vector<PresetInfo>& model_presets();

// Output directory: cfg.output, else $MDRATE_OUTPUT_DIR/<name>, else ./mdrate-out/<name>.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg);

// CSV with columns n,x,method,p_hat,stderr,log_p,normalized,rate_limsup,rate_liminf,flags.
void write_trajectory_csv(std::ostream& os, const std::vector<Trajectory>& runs);
std::string trajectory_csv(const ExperimentConfig& cfg);

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 estimator failure
  std::filesystem::path dir;
  std::vector<std::string> errors;
};

// Writes trajectory.csv, exponents.json, rate_curve.csv and manifest.json.
RunResult run(const ExperimentConfig& cfg);

// ---- verification ----------------------------------------------------------

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct CatalogEntry {
  std::string name;
  TailModel model;
  ScaleFunction g;
  GridSpec grid;
};
std::vector<CatalogEntry> catalog();

CriterionResult check_a1_exponent_recovery();
CriterionResult check_a2_sup_form();
CriterionResult check_a3_inequalities();
CriterionResult check_a4_gaussian(unsigned workers = 0);
CriterionResult check_a5_heavy_tail(unsigned workers = 0);
CriterionResult check_a6_envelopes(unsigned workers = 0);
CriterionResult check_a7_oscillation();
CriterionResult check_a8_classifier();
CriterionResult check_a9_determinism();

// Suites: inequalities, exponents, envelopes, all (the three cheap suites),
// acceptance (A1-A9). Throws ConfigError for an unknown suite name.
std::vector<CriterionResult> verify_suite(const std::string& suite);
void print_results(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace mdrate
