#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mixmax/experiments.hpp"
#include "mixmax/weights.hpp"

namespace mixmax {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MeshSpec {
  int n = 1;
  int K = 0;
  int J = 8;
  bool centered = true;
};

struct ExperimentSpec {
  std::string name;
  Variant variant = Variant::Theorem1;
  nlohmann::json u_desc, v_desc, f_desc;
  double r = 1.0;
  nlohmann::json phi_desc;
  std::optional<nlohmann::json> psi_desc;  // corollary only
  double gamma = 0.0, p = 0.0;             // theorem 3/4 only
  SweepSpec sweep;
  GridScope scope = GridScope::AllGrids;
  double ratio_ceiling = 1e6;
  bool refine = true;
};

struct RunConfig {
  int version = 1;
  std::uint64_t seed = 0;
  MeshSpec mesh;
  std::vector<ExperimentSpec> experiments;
};

// Strict parse: unknown keys are errors, not warnings.
RunConfig parse_config(const nlohmann::json& j);

// Deterministic cell-sampling closure built from a descriptor. Geometry is
// resolved against the base box once, so refined meshes see the same
// function.
using FieldEval = std::function<double(std::array<double, 2>)>;
FieldEval build_weight_eval(const nlohmann::json& desc, const Box& base_box, int base_J,
                            std::uint64_t seed);
FieldEval build_f_eval(const nlohmann::json& desc, const Box& base_box, int base_J,
                       std::uint64_t seed);

struct ExperimentOutcome {
  std::string name;
  bool precondition_failed = false;
  std::string reason;
  nlohmann::json summary;
  std::vector<RatioRow> rows;
  bool pass = false;
  double elapsed_seconds = 0.0;
};

struct RunResult {
  int exit_code = 0;
  std::vector<ExperimentOutcome> outcomes;
  nlohmann::json manifest;
};

// Executes every experiment of the config, writing <name>.csv and
// <name>.summary.json plus manifest.json under out_dir (empty out_dir writes
// nothing). Exit code: 0 all pass, 1 some inequality check failed,
// 2 precondition failure.
RunResult run_config(const RunConfig& cfg, const std::string& out_dir);
RunResult run_config_file(const std::string& config_path, const std::string& out_dir,
                          std::optional<std::uint64_t> seed_override,
                          std::optional<int> J_override, std::optional<int> K_override);

// classify-weight entry: builds the weight from its descriptor and mesh spec.
WeightReport classify_weight_desc(const nlohmann::json& desc, const MeshSpec& mesh,
                                  std::uint64_t seed);

// export-plot entry: report CSV -> whitespace-free columnar TSV.
void export_plot(const std::string& report_csv, const std::string& out_path);

std::string format_double(double v);  // deterministic shortest round-trip form

}  // namespace mixmax
