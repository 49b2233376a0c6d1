#include "mixmax/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixmax/parallel.hpp"

namespace mixmax {

namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

GridScope scope_from_string(const std::string& s) {
  if (s == "grid0") return GridScope::Grid0;
  if (s == "all") return GridScope::AllGrids;
  throw ConfigError("scope must be 'grid0' or 'all'");
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

RunConfig parse_config(const nlohmann::json& j) {
  check_keys(j, {"version", "seed", "mesh", "experiments"}, "config");
  RunConfig cfg;
  cfg.version = j.at("version").get<int>();
  if (cfg.version != 1) throw ConfigError("config: unsupported version");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  const auto& jm = j.at("mesh");
  check_keys(jm, {"n", "K", "J", "centered"}, "mesh");
  cfg.mesh.n = jm.at("n").get<int>();
  cfg.mesh.K = jm.at("K").get<int>();
  cfg.mesh.J = jm.at("J").get<int>();
  cfg.mesh.centered = get_or(jm, "centered", true);
  if (cfg.mesh.n != 1 && cfg.mesh.n != 2) throw ConfigError("mesh: n must be 1 or 2");
  if (cfg.mesh.J < 2 || cfg.mesh.J > 12) throw ConfigError("mesh: J out of range [2,12]");

  if (!j.at("experiments").is_array()) throw ConfigError("config: experiments must be an array");
  for (const auto& je : j.at("experiments")) {
    check_keys(je,
               {"name", "variant", "u", "v", "f", "r", "phi", "psi", "gamma", "p", "sweep",
                "scope", "ratio_ceiling", "refine"},
               "experiment");
    ExperimentSpec e;
    e.name = je.at("name").get<std::string>();
    e.variant = variant_from_string(je.at("variant").get<std::string>());
    e.u_desc = je.at("u");
    e.v_desc = je.at("v");
    e.f_desc = je.at("f");
    e.r = get_or(je, "r", 1.0);
    e.phi_desc = je.value("phi", nlohmann::json{{"kind", "power"}, {"p", 1.0}});
    if (je.contains("psi")) e.psi_desc = je.at("psi");
    e.gamma = get_or(je, "gamma", 0.0);
    e.p = get_or(je, "p", 0.0);
    if (je.contains("sweep")) {
      const auto& js = je.at("sweep");
      check_keys(js, {"t_lo_rel", "t_hi_rel", "count"}, "sweep");
      e.sweep.t_lo_rel = get_or(js, "t_lo_rel", 1e-3);
      e.sweep.t_hi_rel = get_or(js, "t_hi_rel", 1e3);
      e.sweep.count = get_or(js, "count", 48);
    }
    e.scope = scope_from_string(get_or<std::string>(je, "scope", "all"));
    e.ratio_ceiling = get_or(je, "ratio_ceiling", 1e6);
    e.refine = get_or(je, "refine", true);
    if (e.variant == Variant::Corollary && !e.psi_desc)
      throw ConfigError("experiment '" + e.name + "': corollary needs psi");
    cfg.experiments.push_back(std::move(e));
  }
  return cfg;
}

FieldEval build_weight_eval(const nlohmann::json& desc, const Box& base_box, int base_J,
                            std::uint64_t seed) {
  (void)base_J;
  (void)seed;
  check_keys(desc, {"kind", "value", "beta", "bump_center", "bump_halfwidth", "bump_factor"},
             "weight");
  const std::string kind = desc.at("kind").get<std::string>();
  if (kind == "constant") {
    double v = desc.at("value").get<double>();
    if (!(v > 0.0)) throw ConfigError("weight: constant must be > 0");
    return [v](std::array<double, 2>) { return v; };
  }
  if (kind == "power_abs") {
    double beta = desc.at("beta").get<double>();
    int n = base_box.n;
    return [beta, n](std::array<double, 2> x) {
      double r = n == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
      return std::pow(r, beta);
    };
  }
  if (kind == "power_abs_bump") {
    double beta = desc.at("beta").get<double>();
    double factor = desc.at("bump_factor").get<double>();
    double hw = desc.at("bump_halfwidth").get<double>();
    auto cj = desc.at("bump_center");
    std::array<double, 2> c{cj.at(0).get<double>(),
                            base_box.n == 2 ? cj.at(1).get<double>() : 0.0};
    if (!(factor > 0.0)) throw ConfigError("weight: bump_factor must be > 0");
    int n = base_box.n;
    return [beta, factor, hw, c, n](std::array<double, 2> x) {
      double r = n == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
      double base = std::pow(r, beta);
      double d = n == 1 ? std::abs(x[0] - c[0])
                        : std::max(std::abs(x[0] - c[0]), std::abs(x[1] - c[1]));
      return d <= hw ? base * factor : base;
    };
  }
  throw ConfigError("weight: unknown kind '" + kind + "'");
}

FieldEval build_f_eval(const nlohmann::json& desc, const Box& base_box, int base_J,
                       std::uint64_t seed) {
  check_keys(desc,
             {"kind", "value", "center", "halfwidth", "height", "components", "seed_offset",
              "max_height"},
             "f");
  const std::string kind = desc.at("kind").get<std::string>();
  if (kind == "constant") {
    double v = desc.at("value").get<double>();
    if (!(v >= 0.0)) throw ConfigError("f: constant must be >= 0");
    return [v](std::array<double, 2>) { return v; };
  }
  struct Bump {
    std::array<double, 2> lo, hi;
    double height;
  };
  auto in_box = [](const Bump& b, std::array<double, 2> x, int n) {
    for (int a = 0; a < n; ++a)
      if (!(x[static_cast<std::size_t>(a)] >= b.lo[static_cast<std::size_t>(a)] &&
            x[static_cast<std::size_t>(a)] < b.hi[static_cast<std::size_t>(a)]))
        return false;
    return true;
  };
  std::vector<Bump> bumps;
  if (kind == "indicator") {
    auto cj = desc.at("center");
    double hw = desc.at("halfwidth").get<double>();
    double h = desc.at("height").get<double>();
    Bump b;
    for (int a = 0; a < base_box.n; ++a) {
      double c = cj.at(static_cast<std::size_t>(a)).get<double>();
      b.lo[static_cast<std::size_t>(a)] = c - hw;
      b.hi[static_cast<std::size_t>(a)] = c + hw;
    }
    b.height = h;
    bumps.push_back(b);
  } else if (kind == "indicator_mix") {
    int components = desc.at("components").get<int>();
    if (components < 1 || components > 64) throw ConfigError("f: components out of range");
    std::uint64_t off = get_or<std::uint64_t>(desc, "seed_offset", 0);
    double max_height = get_or(desc, "max_height", 1.0);
    SplitMix64 rng(SplitMix64::mix(seed, 0x66697864 ^ off));
    // Geometry snaps to 4-cell quanta of the base mesh so that the finer and
    // wider verification meshes sample the exact same function.
    double quantum = 4.0 * std::ldexp(1.0, base_box.K - base_J);
    long long slots = (1LL << base_J) / 4;
    int max_exp = std::max(1, base_J - 4);
    for (int i = 0; i < components; ++i) {
      long long span = 1LL << rng.below(static_cast<std::uint64_t>(max_exp));
      span = std::min(span, slots);
      Bump b;
      for (int a = 0; a < base_box.n; ++a) {
        long long pos = static_cast<long long>(rng.below(static_cast<std::uint64_t>(slots - span + 1)));
        b.lo[static_cast<std::size_t>(a)] =
            base_box.origin[static_cast<std::size_t>(a)] + quantum * static_cast<double>(pos);
        b.hi[static_cast<std::size_t>(a)] =
            b.lo[static_cast<std::size_t>(a)] + quantum * static_cast<double>(span);
      }
      b.height = max_height * static_cast<double>(1 + rng.below(63)) / 64.0;
      bumps.push_back(b);
    }
  } else {
    throw ConfigError("f: unknown kind '" + kind + "'");
  }
  int n = base_box.n;
  return [bumps, in_box, n](std::array<double, 2> x) {
    double v = 0.0;
    for (const auto& b : bumps)
      if (in_box(b, x, n)) v += b.height;
    return v;
  };
}

namespace {

struct Materialized {
  MeshFn u, v, f;
};

Materialized materialize(const ExperimentSpec& e, const Box& box, int J, const Box& base_box,
                         int base_J, std::uint64_t seed) {
  std::uint64_t s = SplitMix64::mix(seed, name_hash(e.name));
  return Materialized{
      MeshFn::sample(box, J, build_weight_eval(e.u_desc, base_box, base_J, s)),
      MeshFn::sample(box, J, build_weight_eval(e.v_desc, base_box, base_J, s ^ 1)),
      MeshFn::sample(box, J, build_f_eval(e.f_desc, base_box, base_J, s ^ 2))};
}

Box make_box(const MeshSpec& m, int K) { return m.centered ? Box::centered(m.n, K) : Box::corner(m.n, K); }

struct FractionalShape {
  double r = 1.0, delta = 0.0;
};

FractionalShape fractional_shape(const ExperimentSpec& e) {
  YoungFn phi = YoungFn::from_json(e.phi_desc);
  if (phi.kind() != YoungFn::Kind::LLogL)
    throw ConfigError("experiment '" + e.name + "': fractional variants need an llogl phi");
  auto j = phi.to_json();
  return {j.at("r").get<double>(), j.at("delta").get<double>()};
}

RatioReport run_curve(const ExperimentSpec& e, const MeshSpec& mesh, const Materialized& m,
                      const std::vector<double>& ts) {
  switch (e.variant) {
    case Variant::Theorem1: {
      TheoremData d{m.u, m.v, m.f, e.r, YoungFn::from_json(e.phi_desc), e.scope};
      return theorem1_curve(d, ts);
    }
    case Variant::StrongForm: {
      TheoremData d{m.u, m.v, m.f, e.r, YoungFn::from_json(e.phi_desc), e.scope};
      return strong_form_curve(d, ts);
    }
    case Variant::Sawyer: {
      TheoremData d{m.u, m.v, m.f, e.r, YoungFn::power(1.0), e.scope};
      RatioReport rep = strong_form_curve(d, ts);
      rep.variant = "sawyer";
      return rep;
    }
    case Variant::Corollary: {
      TheoremData d{m.u, m.v, m.f, e.r, YoungFn::from_json(e.phi_desc), e.scope};
      return corollary_curve(d, YoungFn::from_json(*e.psi_desc), ts);
    }
    case Variant::Theorem3: {
      FractionalShape fs = fractional_shape(e);
      FractionalData d{m.u, m.v, m.f, mesh.n, fs.r, fs.delta, e.gamma, e.p, e.scope};
      return theorem3_curve(d, ts);
    }
    case Variant::Theorem4: {
      FractionalShape fs = fractional_shape(e);
      FractionalData d{m.u, m.v, m.f, mesh.n, fs.r, fs.delta, e.gamma, 0.0, e.scope};
      return theorem4_curve(d, ts);
    }
  }
  throw std::logic_error("run_curve: bad variant");
}

// The measure weight v^rho whose A_inf condition the variant assumes.
double measure_exponent(const ExperimentSpec& e, const MeshSpec& mesh) {
  switch (e.variant) {
    case Variant::Theorem1:
    case Variant::StrongForm:
    case Variant::Corollary:
      return e.r;
    case Variant::Sawyer:
      return 1.0;
    case Variant::Theorem3: {
      FractionalShape fs = fractional_shape(e);
      double q = 1.0 / (1.0 / e.p - e.gamma / mesh.n);
      return q * (1.0 / e.p + 1.0 - 1.0 / fs.r);
    }
    case Variant::Theorem4: {
      FractionalShape fs = fractional_shape(e);
      return 1.0 / (1.0 / fs.r - e.gamma / mesh.n);
    }
  }
  return 1.0;
}

std::string check_preconditions(const ExperimentSpec& e, const MeshSpec& mesh, std::uint64_t seed,
                                nlohmann::json& detail) {
  // Weight classes first: u in A_1, v^rho in A_inf, judged by refinement trend.
  std::uint64_t s = SplitMix64::mix(seed, name_hash(e.name));
  ClassifyOptions opt;
  opt.ps = {};
  opt.ss = {};
  FieldEval u_eval = build_weight_eval(e.u_desc, make_box(mesh, mesh.K), mesh.J, s);
  FieldEval v_eval = build_weight_eval(e.v_desc, make_box(mesh, mesh.K), mesh.J, s ^ 1);
  double rho = measure_exponent(e, mesh);

  WeightGen u_gen = [&u_eval](const Box& b, int J) { return MeshFn::sample(b, J, u_eval); };
  WeightGen vr_gen = [&v_eval, rho](const Box& b, int J) {
    return MeshFn::sample(b, J, v_eval).pow(rho);
  };
  WeightReport u_rep = classify_weight(u_gen, mesh.n, mesh.K, mesh.J, mesh.centered, seed, opt);
  WeightReport vr_rep = classify_weight(vr_gen, mesh.n, mesh.K, mesh.J, mesh.centered, seed, opt);
  detail["u_classification"] = u_rep.to_json();
  detail["v_rho_classification"] = vr_rep.to_json();
  detail["v_rho_exponent"] = rho;
  if (u_rep.verdicts.at("A1") == Verdict::NonMember) return "u fails the A1 refinement trend";
  if (vr_rep.verdicts.at("Ainf") == Verdict::NonMember)
    return "v^rho fails the A_inf refinement trend";

  switch (e.variant) {
    case Variant::Theorem1:
    case Variant::StrongForm:
    case Variant::Sawyer:
    case Variant::Corollary: {
      YoungFn phi = e.variant == Variant::Sawyer ? YoungFn::power(1.0)
                                                 : YoungFn::from_json(e.phi_desc);
      auto cert = certify_Fr(phi, e.r, std::exp(1.0));
      if (!cert) return "phi admits no F_r certificate at this r";
      detail["fr_certificate"] = {{"C0", cert->C0},
                                  {"delta", cert->delta},
                                  {"t_star", cert->t_star},
                                  {"submult_const", cert->submult_const},
                                  {"lower_type_const", cert->lower_type_const}};
      if (e.variant == Variant::Corollary) {
        YoungFn psi = YoungFn::from_json(*e.psi_desc);
        auto [a6, b6] = check_equivalence(phi, psi, 1.0, 1e6);
        auto [a9, b9] = check_equivalence(phi, psi, 1.0, 1e9);
        detail["equivalence"] = {{"A", a6}, {"B", b6}};
        if (!(a6 > 0.0) || !std::isfinite(b6) || b9 > 2.0 * b6 || a9 < 0.5 * a6)
          return "psi is not equivalent to phi for large t";
      }
      break;
    }
    case Variant::Theorem3: {
      FractionalShape fs = fractional_shape(e);
      thm3_params(mesh.n, fs.r, fs.delta, e.gamma, e.p);  // throws on bad ranges
      break;
    }
    case Variant::Theorem4: {
      FractionalShape fs = fractional_shape(e);
      thm4_params(mesh.n, fs.r, fs.delta, e.gamma);
      break;
    }
  }
  return {};
}

void write_csv(const std::string& path, const std::vector<RatioRow>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "t,lhs,rhs,ratio,clamped\r\n";
  for (const auto& row : rows) {
    os << format_double(row.t) << ',' << format_double(row.lhs) << ',' << format_double(row.rhs)
       << ',' << (row.has_ratio ? format_double(row.ratio) : std::string()) << ','
       << (row.clamped ? '1' : '0') << "\r\n";
  }
}

}  // namespace

RunResult run_config(const RunConfig& cfg, const std::string& out_dir) {
  RunResult result;
  bool any_fail = false, any_precondition = false;
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  nlohmann::json manifest;
  manifest["artifact_version"] = "0.1.0";
  manifest["seed"] = cfg.seed;
  manifest["mesh"] = {{"n", cfg.mesh.n}, {"K", cfg.mesh.K}, {"J", cfg.mesh.J},
                      {"centered", cfg.mesh.centered}};
  manifest["experiments"] = nlohmann::json::array();

  for (const auto& e : cfg.experiments) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentOutcome out;
    out.name = e.name;
    nlohmann::json summary;
    summary["name"] = e.name;
    summary["variant"] = to_string(e.variant);
    summary["seed"] = cfg.seed;
    summary["parameters"] = {{"r", e.r},       {"gamma", e.gamma}, {"p", e.p},
                             {"phi", e.phi_desc}, {"u", e.u_desc},    {"v", e.v_desc},
                             {"f", e.f_desc}};
    if (e.psi_desc) summary["parameters"]["psi"] = *e.psi_desc;

    try {
      nlohmann::json detail;
      std::string precondition = check_preconditions(e, cfg.mesh, cfg.seed, detail);
      summary["preconditions"] = detail;
      if (!precondition.empty()) {
        out.precondition_failed = true;
        out.reason = precondition;
        summary["precondition_failure"] = precondition;
        any_precondition = true;
      } else {
        Box base_box = make_box(cfg.mesh, cfg.mesh.K);
        Materialized base = materialize(e, base_box, cfg.mesh.J, base_box, cfg.mesh.J, cfg.seed);
        std::vector<double> ts = make_sweep(e.sweep, base.f.max_value());
        RatioReport rep = run_curve(e, cfg.mesh, base, ts);
        rep.ratio_ceiling = e.ratio_ceiling;

        if (e.refine) {
          Materialized finer =
              materialize(e, base_box, cfg.mesh.J + 1, base_box, cfg.mesh.J, cfg.seed);
          RatioReport rep_f = run_curve(e, cfg.mesh, finer, ts);
          Box wide_box = make_box(cfg.mesh, cfg.mesh.K + 2);
          Materialized wider =
              materialize(e, wide_box, cfg.mesh.J, base_box, cfg.mesh.J, cfg.seed);
          MeshSpec wide_mesh = cfg.mesh;
          wide_mesh.K += 2;
          RatioReport rep_w = run_curve(e, wide_mesh, wider, ts);
          auto delta = [&](double other) {
            if (rep.sup_ratio == 0.0 && other == 0.0) return 0.0;
            if (rep.sup_ratio == 0.0) return std::numeric_limits<double>::infinity();
            return std::abs(other - rep.sup_ratio) / rep.sup_ratio;
          };
          rep.refinement_deltas["J+1"] = delta(rep_f.sup_ratio);
          rep.refinement_deltas["K+2"] = delta(rep_w.sup_ratio);
        }

        bool deltas_ok = true;
        for (const auto& [k, v] : rep.refinement_deltas) deltas_ok = deltas_ok && v < 0.25;
        rep.pass = !rep.hard_failure && rep.monotone_ok && deltas_ok &&
                   std::isfinite(rep.sup_ratio) && rep.sup_ratio <= e.ratio_ceiling;
        out.pass = rep.pass;
        out.rows = rep.rows;
        any_fail = any_fail || !rep.pass;

        summary["sup_ratio"] = rep.sup_ratio;
        summary["hard_failure"] = rep.hard_failure;
        summary["monotone_ok"] = rep.monotone_ok;
        summary["refinement_deltas"] = rep.refinement_deltas;
        summary["extra"] = rep.extra();
        summary["rows"] = rep.rows.size();
        summary["pass"] = rep.pass;
      }
    } catch (const std::invalid_argument& ex) {
      out.precondition_failed = true;
      out.reason = ex.what();
      summary["precondition_failure"] = ex.what();
      any_precondition = true;
    }

    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.summary = summary;

    if (!out_dir.empty()) {
      write_csv(out_dir + "/" + e.name + ".csv", out.rows);
      std::ofstream js(out_dir + "/" + e.name + ".summary.json", std::ios::binary);
      js << summary.dump(2) << "\n";
    }
    manifest["experiments"].push_back(
        {{"name", e.name},
         {"pass", out.pass},
         {"precondition_failed", out.precondition_failed},
         {"elapsed_seconds", out.elapsed_seconds}});
    result.outcomes.push_back(std::move(out));
  }

  result.manifest = manifest;
  if (!out_dir.empty()) {
    std::ofstream ms(out_dir + "/manifest.json", std::ios::binary);
    ms << manifest.dump(2) << "\n";
  }
  result.exit_code = any_precondition ? 2 : (any_fail ? 1 : 0);
  return result;
}

RunResult run_config_file(const std::string& config_path, const std::string& out_dir,
                          std::optional<std::uint64_t> seed_override,
                          std::optional<int> J_override, std::optional<int> K_override) {
  std::ifstream is(config_path);
  if (!is) throw ConfigError("cannot open config " + config_path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  RunConfig cfg = parse_config(j);
  if (seed_override) cfg.seed = *seed_override;
  if (J_override) cfg.mesh.J = *J_override;
  if (K_override) cfg.mesh.K = *K_override;
  return run_config(cfg, out_dir);
}

WeightReport classify_weight_desc(const nlohmann::json& desc, const MeshSpec& mesh,
                                  std::uint64_t seed) {
  Box base = mesh.centered ? Box::centered(mesh.n, mesh.K) : Box::corner(mesh.n, mesh.K);
  FieldEval eval = build_weight_eval(desc, base, mesh.J, seed);
  WeightGen gen = [&eval](const Box& b, int J) { return MeshFn::sample(b, J, eval); };
  return classify_weight(gen, mesh.n, mesh.K, mesh.J, mesh.centered, seed);
}

void export_plot(const std::string& report_csv, const std::string& out_path) {
  std::ifstream is(report_csv, std::ios::binary);
  if (!is) throw std::runtime_error("export-plot: missing report " + report_csv);
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("export-plot: cannot open " + out_path);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::ostringstream row;
    std::stringstream cells(line);
    std::string cell;
    bool first_cell = true;
    while (std::getline(cells, cell, ',')) {
      row << (first_cell ? "" : "\t") << (cell.empty() ? "nan" : cell);
      first_cell = false;
    }
    os << row.str() << "\n";
    first = false;
  }
  if (first) os << "t\tlhs\trhs\tratio\tclamped\n";
}

}  // namespace mixmax
