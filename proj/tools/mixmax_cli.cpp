// Command-line front end: experiment runner, weight classifier, maximal-field
// evaluator, plot export and a quick self-test. All outputs are deterministic
// under (config, seed); exit codes: 0 pass, 1 inequality failure,
// 2 precondition failure, 3 config or usage error.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mixmax/decomposition.hpp"
#include "mixmax/luxemburg.hpp"
#include "mixmax/parallel.hpp"
#include "mixmax/runner.hpp"

namespace {

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("MIXMAX_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // hardware concurrency
}

int self_test() {
  using namespace mixmax;
  int failures = 0;
  auto check = [&](bool ok, const char* what) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
  };

  YoungFn phi = YoungFn::llogl(1, 1);
  check(std::abs(phi(std::exp(1.0)) - 2.0 * std::exp(1.0)) < 1e-12, "llogl(1,1) at e");
  check(std::abs(YoungFn::power(2)(3.0) - 9.0) < 1e-12, "power eval");
  check(std::abs(ratio_lemma_f(1.0) - std::sqrt(2.0)) < 1e-12, "ratio lemma at 1");

  Box box = Box::corner(1, 0);
  MeshFn f = MeshFn::constant(box, 4, 1.0);
  DyadicCube root{0, 0, {0, 0}};
  check(std::abs(integrate(f, root) - 1.0) < 1e-15, "unit integral");
  check(std::abs(lux_norm(f, root, phi).norm - 1.0) < 1e-9, "constant Luxemburg norm");

  MeshFn g = MeshFn::sample(box, 6, [](std::array<double, 2> x) {
    return x[0] < 0.25 ? 1.0 : 0.0;
  });
  auto cubes = cz_levelset(g, YoungFn::power(1), 0, 0.5);
  check(cubes.size() == 1 && cubes[0].k == -2, "CZ finds the quarter cube");

  std::cout << (failures == 0 ? "self-test passed\n" : "self-test FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed weak-type inequality laboratory"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: MIXMAX_THREADS or all cores)");

  // run
  auto* run = app.add_subcommand("run", "execute experiments from a JSON config");
  std::string config_path, out_dir = "out";
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  int mesh_level = 0, box_level = 0;
  bool mesh_set = false, box_set = false;
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--out-dir", out_dir, "report directory");
  run->add_option("--seed", seed_flag, "override config seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_option("--mesh-level", mesh_level, "override mesh level J")->each([&](const std::string&) {
    mesh_set = true;
  });
  run->add_option("--box-level", box_level, "override box level K")->each([&](const std::string&) {
    box_set = true;
  });

  // classify-weight
  auto* classify = app.add_subcommand("classify-weight", "estimate Muckenhoupt constants");
  std::string weight_json, classify_out;
  int cw_n = 1, cw_K = 2, cw_J = 8;
  bool cw_corner = false;
  std::uint64_t cw_seed = 1;
  classify->add_option("--weight", weight_json, "weight descriptor JSON")->required();
  classify->add_option("--n", cw_n, "dimension");
  classify->add_option("--K", cw_K, "box level");
  classify->add_option("--J", cw_J, "mesh level");
  classify->add_flag("--corner", cw_corner, "anchor the box at 0 instead of centering it");
  classify->add_option("--seed", cw_seed, "sampling seed");
  classify->add_option("--out", classify_out, "also write the report JSON here");

  // maximal
  auto* maximal = app.add_subcommand("maximal", "evaluate a maximal field on a mesh file");
  std::string phi_json, input_path, output_path, scope_name = "all";
  double gamma = 0.0;
  maximal->add_option("--phi", phi_json, "Young function descriptor JSON")->required();
  maximal->add_option("--gamma", gamma, "fractional order in [0, n)");
  maximal->add_option("--input", input_path, "input mesh file")->required();
  maximal->add_option("--scope", scope_name, "grid0 | all");
  maximal->add_option("--out", output_path, "output mesh file")->required();

  // export-plot
  auto* exportp = app.add_subcommand("export-plot", "emit plot columns from a report CSV");
  std::string report_path, plot_out;
  exportp->add_option("--report", report_path, "report CSV")->required();
  exportp->add_option("--out", plot_out, "output TSV")->required();

  auto* selftest = app.add_subcommand("self-test", "run the built-in smoke checks");
  (void)selftest;

  CLI11_PARSE(app, argc, argv);
  mixmax::set_worker_threads(resolve_threads(threads));

  try {
    if (run->parsed()) {
      auto result = mixmax::run_config_file(
          config_path, out_dir, seed_set ? std::optional<std::uint64_t>(seed_flag) : std::nullopt,
          mesh_set ? std::optional<int>(mesh_level) : std::nullopt,
          box_set ? std::optional<int>(box_level) : std::nullopt);
      for (const auto& o : result.outcomes) {
        if (o.precondition_failed)
          std::cout << "[precondition] " << o.name << ": " << o.reason << "\n";
        else
          std::cout << (o.pass ? "[pass] " : "[FAIL] ") << o.name
                    << "  sup_ratio=" << o.summary.value("sup_ratio", 0.0) << "\n";
      }
      return result.exit_code;
    }
    if (classify->parsed()) {
      mixmax::MeshSpec spec{cw_n, cw_K, cw_J, !cw_corner};
      auto rep = mixmax::classify_weight_desc(nlohmann::json::parse(weight_json), spec, cw_seed);
      std::cout << rep.table();
      if (!classify_out.empty()) {
        std::ofstream os(classify_out);
        os << rep.to_json().dump(2) << "\n";
      }
      return 0;
    }
    if (maximal->parsed()) {
      auto phi = mixmax::YoungFn::from_json(nlohmann::json::parse(phi_json));
      auto mesh = mixmax::MeshFn::load_binary(input_path);
      auto scope = scope_name == "grid0" ? mixmax::GridScope::Grid0 : mixmax::GridScope::AllGrids;
      mixmax::maximal_field(mesh, phi, gamma, scope).save_binary(output_path);
      return 0;
    }
    if (exportp->parsed()) {
      mixmax::export_plot(report_path, plot_out);
      return 0;
    }
    return self_test();
  } catch (const mixmax::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
}
