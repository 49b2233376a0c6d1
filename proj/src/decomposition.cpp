#include "mixmax/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "mixmax/luxemburg.hpp"

namespace mixmax {

namespace {

using CubeKey = std::tuple<int, long long, long long>;

CubeKey key_of(const DyadicCube& q) { return {q.k, q.coords[0], q.coords[1]}; }

struct NormCache {
  const MeshFn* g = nullptr;
  const YoungFn* phi = nullptr;
  std::map<CubeKey, double> norms;
  double get(const DyadicCube& q) {
    auto it = norms.find(key_of(q));
    if (it != norms.end()) return it->second;
    double v = lux_norm(*g, q, *phi).norm;
    norms.emplace(key_of(q), v);
    return v;
  }
};

struct AvgCache {
  const MeshFn* f = nullptr;
  std::map<CubeKey, double> avgs;
  double get(const DyadicCube& q) {
    auto it = avgs.find(key_of(q));
    if (it != avgs.end()) return it->second;
    double v = average(*f, q);
    avgs.emplace(key_of(q), v);
    return v;
  }
};

// Maximal cubes with score(Q) > lambda, descending from the grid top level;
// a cube is emitted as soon as it crosses the threshold, so every strict
// ancestor of an emitted cube scored <= lambda.
template <class Score>
void descend(const MeshFn& mesh, int grid_id, double lambda, Score&& score,
             std::vector<DyadicCube>& out, const DyadicCube* within = nullptr) {
  int L = mesh.box().K - mesh.J();
  std::vector<DyadicCube> stack;
  if (within) {
    if (within->k <= L) return;  // nothing below mesh resolution
    stack = cube_children(*within, mesh.n());
  } else {
    stack = enumerate_cubes(mesh, grid_id, mesh.box().K, mesh.box().K);
  }
  while (!stack.empty()) {
    DyadicCube q = stack.back();
    stack.pop_back();
    if (cube_geom(mesh, q).empty) continue;
    if (score(q) > lambda) {
      out.push_back(q);
      continue;
    }
    if (q.k > L) {
      for (auto& c : cube_children(q, mesh.n())) stack.push_back(c);
    }
  }
}

void build_masks(const MeshFn& mesh, const std::vector<DyadicCube>& cubes,
                 std::vector<std::uint8_t>& mask) {
  mask.assign(mesh.cell_count(), 0);
  int N = mesh.cells_per_axis();
  for (const auto& q : cubes) {
    CubeGeom g = cube_geom(mesh, q);
    if (g.empty) continue;
    for (int cy = g.cell_lo[1]; cy < (mesh.n() == 1 ? 1 : g.cell_hi[1]); ++cy) {
      if (mesh.n() == 2 && !g.contains_center(1, cy)) continue;
      for (int cx = g.cell_lo[0]; cx < g.cell_hi[0]; ++cx)
        if (g.contains_center(0, cx))
          mask[static_cast<std::size_t>(cy) * N + static_cast<std::size_t>(cx)] = 1;
    }
  }
}

// Integral of u over (cube ∩ cell-mask), masks being unions of whole cells.
double masked_cube_integral(const MeshFn& u, const DyadicCube& q,
                            const std::vector<std::uint8_t>& mask) {
  CubeGeom g = cube_geom(u, q);
  if (g.empty) return 0.0;
  int N = u.cells_per_axis();
  double unit = u.cell_side() / 3.0;
  double unit_vol = u.n() == 1 ? unit : unit * unit;
  CompensatedSum s;
  if (u.n() == 1) {
    for (int c = g.cell_lo[0]; c < g.cell_hi[0]; ++c)
      if (mask[static_cast<std::size_t>(c)])
        s.add(u.at(c, 0) * static_cast<double>(g.overlap(0, c)));
  } else {
    for (int cy = g.cell_lo[1]; cy < g.cell_hi[1]; ++cy)
      for (int cx = g.cell_lo[0]; cx < g.cell_hi[0]; ++cx)
        if (mask[static_cast<std::size_t>(cy) * N + static_cast<std::size_t>(cx)])
          s.add(u.at(cx, cy) * static_cast<double>(g.overlap(0, cx)) *
                static_cast<double>(g.overlap(1, cy)));
  }
  return s.value() * unit_vol;
}

struct UnitRange {
  std::array<long long, 2> lo{0, 0}, hi{0, 0};
  bool strictly_contains(const UnitRange& o, int n) const {
    bool equal = true;
    for (int a = 0; a < n; ++a) {
      if (o.lo[static_cast<std::size_t>(a)] < lo[static_cast<std::size_t>(a)] ||
          o.hi[static_cast<std::size_t>(a)] > hi[static_cast<std::size_t>(a)])
        return false;
      equal = equal && o.lo[static_cast<std::size_t>(a)] == lo[static_cast<std::size_t>(a)] &&
              o.hi[static_cast<std::size_t>(a)] == hi[static_cast<std::size_t>(a)];
    }
    return !equal;
  }
};

UnitRange unit_range(const MeshFn& mesh, const DyadicCube& q) {
  CubeGeom g = cube_geom(mesh, q);
  UnitRange r;
  r.lo = g.lo;
  r.hi = g.hi;
  if (mesh.n() == 1) {
    r.lo[1] = 0;
    r.hi[1] = 1;
  }
  return r;
}

}  // namespace

std::vector<DyadicCube> cz_levelset(const MeshFn& g, const YoungFn& phi, int grid_id,
                                    double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("cz_levelset: lambda must be > 0");
  NormCache nc{&g, &phi, {}};
  std::vector<DyadicCube> out;
  descend(g, grid_id, lambda, [&](const DyadicCube& q) { return nc.get(q); }, out);
  return out;
}

Stratification stratify(const MeshFn& f, const MeshFn& v, double r, const YoungFn& phi, double a,
                        std::optional<int> N_opt, int grid_id) {
  if (!(a > 1.0)) throw std::invalid_argument("stratify: a must exceed 1");
  if (!(r >= 1.0)) throw std::invalid_argument("stratify: r must be >= 1");
  if (!(v.min_value() > 0.0)) throw std::invalid_argument("stratify: v must be strictly positive");
  if (!f.same_layout(v)) throw std::invalid_argument("stratify: f/v layout mismatch");

  MeshFn g = f.multiply(v);
  MeshFn vr = v.pow(r);
  NormCache nc{&g, &phi, {}};
  AvgCache vrc{&vr, {}};

  // Single-grid maximal field of g from the same norm cache that drives the
  // cube selection, so the set identities hold exactly.
  int L = g.box().K - g.J();
  std::vector<double> field(g.cell_count(), 0.0);
  int N_axis = g.cells_per_axis();
  for (int k = g.box().K; k >= L; --k) {
    for (const auto& q : enumerate_cubes(g, grid_id, k, k)) {
      CubeGeom geo = cube_geom(g, q);
      if (geo.empty) continue;
      double norm = nc.get(q);
      for (int cy = geo.cell_lo[1]; cy < (g.n() == 1 ? 1 : geo.cell_hi[1]); ++cy) {
        if (g.n() == 2 && !geo.contains_center(1, cy)) continue;
        for (int cx = geo.cell_lo[0]; cx < geo.cell_hi[0]; ++cx)
          if (geo.contains_center(0, cx)) {
            double& slot = field[static_cast<std::size_t>(cy) * N_axis + cx];
            slot = std::max(slot, norm);
          }
      }
    }
  }
  MeshFn mfield(g.box(), g.J(), field);

  Stratification strat{a, r, grid_id, 0, -1, phi, g, v, vr, mfield, {}};

  double gmax = g.max_value();
  if (gmax == 0.0) return strat;  // f == 0: every Omega_k is empty

  double min_m = mfield.min_value();
  double max_m = mfield.max_value();
  int N;
  if (N_opt) {
    N = *N_opt;
  } else {
    // Smallest k with Omega_k != box; above it the root norm is <= a^k and
    // the maximality sandwich is genuine.
    N = static_cast<int>(std::ceil(std::log(min_m) / std::log(a)));
    while (std::pow(a, N) < min_m) ++N;
    while (N > std::numeric_limits<int>::min() + 1 && std::pow(a, N - 1) >= min_m) --N;
  }
  int k_max = N - 1;
  for (int k = N; std::pow(a, k) < max_m; ++k) k_max = k;
  strat.N = N;
  strat.k_max = k_max;

  for (int k = N; k <= k_max; ++k) {
    double ak = std::pow(a, k);
    double akr = std::pow(a, static_cast<double>(k) * r);
    double ak1 = std::pow(a, k + 1);
    StratLevel level;
    level.k = k;

    std::vector<DyadicCube> cubes;
    descend(g, grid_id, ak, [&](const DyadicCube& q) { return nc.get(q); }, cubes);
    build_masks(g, cubes, level.omega_mask);

    // E_k = {M g / v > 1} ∩ {a^k < v <= a^{k+1}} (the proof's t = 1 slice).
    level.ek_mask.assign(g.cell_count(), 0);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      double vv = v.at(i);
      if (mfield.at(i) > vv && ak < vv && vv <= ak1) level.ek_mask[i] = 1;
    }

    for (const auto& q : cubes) {
      StratCube sc;
      sc.cube = q;
      sc.g_norm = nc.get(q);
      sc.vr_avg = vrc.get(q);

      if (sc.vr_avg < akr) {
        sc.ell = -1;
      } else {
        int ell = static_cast<int>(
            std::floor(std::log(sc.vr_avg) / (r * std::log(a)) - k + 1e-12));
        while (std::pow(a, static_cast<double>(k + ell) * r) > sc.vr_avg) --ell;
        while (std::pow(a, static_cast<double>(k + ell + 1) * r) <= sc.vr_avg) ++ell;
        sc.ell = std::max(ell, 0);
      }

      auto flag_of = [&](const DyadicCube& c) {
        CubeGeom geo = cube_geom(g, c);
        if (geo.empty) return false;
        for (int cy = geo.cell_lo[1]; cy < (g.n() == 1 ? 1 : geo.cell_hi[1]); ++cy)
          for (int cx = geo.cell_lo[0]; cx < geo.cell_hi[0]; ++cx) {
            double ov = static_cast<double>(geo.overlap(0, cx)) *
                        (g.n() == 2 ? static_cast<double>(geo.overlap(1, cy)) : 1.0);
            if (ov <= 0.0) continue;
            double vv = g.n() == 1 ? v.at(cx, 0) : v.at(cx, cy);
            if (ak < vv && vv <= ak1) return true;
          }
        return false;
      };
      sc.gamma_flag = flag_of(q);

      if (sc.ell == -1) {
        // CZ of v^r restricted to Q at height a^{kr}; the parent average is
        // below the height, so every selected subcube is a strict descendant.
        std::vector<DyadicCube> subs;
        descend(g, grid_id, akr, [&](const DyadicCube& c) { return vrc.get(c); }, subs, &q);
        for (const auto& s : subs) {
          SubCube sub;
          sub.cube = s;
          sub.vr_avg = vrc.get(s);
          sub.gamma_flag = flag_of(s);
          sc.subcubes.push_back(sub);
        }
      }
      level.cubes.push_back(std::move(sc));
    }
    strat.levels.push_back(std::move(level));
  }
  return strat;
}

double sparsity_check(const Stratification& strat) {
  const MeshFn& mesh = strat.g;
  struct Member {
    UnitRange range;
    int strat_k;
    double measure;
  };
  std::vector<Member> members;
  for (const auto& level : strat.levels) {
    for (const auto& sc : level.cubes) {
      if (sc.ell >= 0) {
        if (sc.gamma_flag)
          members.push_back({unit_range(mesh, sc.cube), level.k, cube_measure(mesh, sc.cube)});
      } else {
        for (const auto& sub : sc.subcubes)
          if (sub.gamma_flag)
            members.push_back({unit_range(mesh, sub.cube), level.k, cube_measure(mesh, sub.cube)});
      }
    }
  }
  const int n = mesh.n();
  // Nesting-level monotonicity from the sparsity proof: strict containment
  // forces a strictly higher stratum.
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = 0; j < members.size(); ++j)
      if (i != j && members[j].range.strictly_contains(members[i].range, n) &&
          !(members[i].strat_k > members[j].strat_k))
        throw std::logic_error("sparsity_check: nesting-level monotonicity violated");

  long long units = 3LL * mesh.cells_per_axis();
  double unit = mesh.cell_side() / 3.0;
  double unit_vol = n == 1 ? unit : unit * unit;
  double worst = 0.0;
  std::vector<std::uint8_t> cover;
  for (std::size_t j = 0; j < members.size(); ++j) {
    long long covered = 0;
    if (n == 1) {
      cover.assign(static_cast<std::size_t>(units), 0);
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (i == j || !members[j].range.strictly_contains(members[i].range, n)) continue;
        for (long long x = members[i].range.lo[0]; x < members[i].range.hi[0]; ++x)
          cover[static_cast<std::size_t>(x)] = 1;
      }
      for (auto b : cover) covered += b;
    } else {
      cover.assign(static_cast<std::size_t>(units * units), 0);
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (i == j || !members[j].range.strictly_contains(members[i].range, n)) continue;
        for (long long y = members[i].range.lo[1]; y < members[i].range.hi[1]; ++y)
          for (long long x = members[i].range.lo[0]; x < members[i].range.hi[0]; ++x)
            cover[static_cast<std::size_t>(y * units + x)] = 1;
      }
      for (auto b : cover) covered += b;
    }
    if (members[j].measure > 0.0)
      worst = std::max(worst, static_cast<double>(covered) * unit_vol / members[j].measure);
  }
  double bound = std::pow(2.0, n) / (strat.a - 1.0) + 1e-9;
  if (worst > bound) throw std::logic_error("sparsity_check: proof bound exceeded");
  return worst;
}

PrincipalForest principal_cubes(const Stratification& strat, const MeshFn& u, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("principal_cubes: beta must be > 0");
  if (!u.same_layout(strat.g)) throw std::invalid_argument("principal_cubes: u layout mismatch");
  if (!(u.min_value() > 0.0)) throw std::invalid_argument("principal_cubes: u must be > 0");

  AvgCache uc{&u, {}};
  PrincipalForest forest;
  forest.beta = beta;

  std::map<int, std::vector<ForestMember>> classes;
  for (const auto& level : strat.levels) {
    for (const auto& sc : level.cubes) {
      if (sc.ell >= 0) {
        if (!sc.gamma_flag) continue;
        ForestMember m;
        m.cube = sc.cube;
        m.strat_k = level.k;
        m.ell = sc.ell;
        m.avg_u = uc.get(sc.cube);
        classes[sc.ell].push_back(m);
      } else {
        for (const auto& sub : sc.subcubes) {
          if (!sub.gamma_flag) continue;
          ForestMember m;
          m.cube = sub.cube;
          m.strat_k = level.k;
          m.ell = -1;
          m.lambda_parent = sc.cube;
          m.has_lambda_parent = true;
          m.avg_u = uc.get(sub.cube);
          classes[-1].push_back(m);
        }
      }
    }
  }

  const MeshFn& mesh = strat.g;
  for (auto& [ell, members] : classes) {
    // Sort big-to-small so parents precede children.
    std::sort(members.begin(), members.end(),
              [](const ForestMember& a, const ForestMember& b) { return a.cube.k > b.cube.k; });
    std::vector<UnitRange> ranges(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) ranges[i] = unit_range(mesh, members[i].cube);
    for (std::size_t i = 0; i < members.size(); ++i) {
      int best = -1;
      for (std::size_t j = 0; j < i; ++j) {
        if (!ranges[j].strictly_contains(ranges[i], mesh.n())) continue;
        if (best < 0 || members[j].cube.k < members[static_cast<std::size_t>(best)].cube.k)
          best = static_cast<int>(j);
      }
      members[i].parent = best;
      if (best < 0) {
        members[i].principal = true;
        members[i].home = static_cast<int>(i);
        continue;
      }
      const ForestMember& pm = members[static_cast<std::size_t>(best)];
      int home = pm.principal ? best : pm.home;
      const ForestMember& hm = members[static_cast<std::size_t>(home)];
      double threshold = ell >= 0
                             ? 2.0 * hm.avg_u
                             : std::pow(strat.a,
                                        static_cast<double>(members[i].strat_k - hm.strat_k) *
                                            beta * strat.r) *
                                   hm.avg_u;
      if (members[i].avg_u > threshold) {
        members[i].principal = true;
        members[i].home = static_cast<int>(i);
      } else {
        members[i].home = home;
      }
    }
  }
  forest.classes = std::move(classes);

  // h1 per class l >= 0: sum of avg_Q u over principal cubes covering a cell.
  for (const auto& [ell, members] : forest.classes) {
    if (ell < 0) continue;
    std::vector<double> h(mesh.cell_count(), 0.0);
    int N_axis = mesh.cells_per_axis();
    for (const auto& m : members) {
      if (!m.principal) continue;
      CubeGeom geo = cube_geom(mesh, m.cube);
      for (int cy = geo.cell_lo[1]; cy < (mesh.n() == 1 ? 1 : geo.cell_hi[1]); ++cy) {
        if (mesh.n() == 2 && !geo.contains_center(1, cy)) continue;
        for (int cx = geo.cell_lo[0]; cx < geo.cell_hi[0]; ++cx)
          if (geo.contains_center(0, cx))
            h[static_cast<std::size_t>(cy) * N_axis + cx] += m.avg_u;
      }
    }
    forest.h1.emplace(ell, MeshFn(mesh.box(), mesh.J(), std::move(h)));
  }

  // h2: u(Q_{s,l}^t)/|Q_s^t| spread over the Lambda parent Q_s^t.
  {
    std::vector<double> h(mesh.cell_count(), 0.0);
    int N_axis = mesh.cells_per_axis();
    auto it = forest.classes.find(-1);
    if (it != forest.classes.end()) {
      for (const auto& m : it->second) {
        if (!m.principal || !m.has_lambda_parent) continue;
        double mass = integrate(u, m.cube);
        CubeGeom geo = cube_geom(mesh, m.lambda_parent);
        if (geo.empty || geo.measure <= 0.0) continue;
        double dens = mass / geo.measure;
        for (int cy = geo.cell_lo[1]; cy < (mesh.n() == 1 ? 1 : geo.cell_hi[1]); ++cy) {
          if (mesh.n() == 2 && !geo.contains_center(1, cy)) continue;
          for (int cx = geo.cell_lo[0]; cx < geo.cell_hi[0]; ++cx)
            if (geo.contains_center(0, cx))
              h[static_cast<std::size_t>(cy) * N_axis + cx] += dens;
        }
      }
    }
    forest.h2 = MeshFn(mesh.box(), mesh.J(), std::move(h));
  }
  return forest;
}

ClaimsReport claims_check(const Stratification& strat, const PrincipalForest& forest,
                          const MeshFn& u, const MeshFn& v, double r, const YoungFn& phi,
                          const MeshFn& f) {
  (void)v;
  ClaimsReport rep;
  MeshFn pf = f.map(phi).multiply(strat.vr);

  // Claims 1 and 3: a^{kr} |Q| <= C ∫_Q Phi(|f|) v^r.
  for (const auto& level : strat.levels) {
    double akr = std::pow(strat.a, static_cast<double>(level.k) * r);
    for (const auto& sc : level.cubes) {
      double integral = integrate(pf, sc.cube);
      double m = cube_measure(strat.g, sc.cube);
      // norm > a^k forces g, hence Phi(|f|) v^r, to live somewhere on Q
      double ratio = integral > 0.0 ? akr * m / integral
                                    : std::numeric_limits<double>::infinity();
      if (sc.ell >= 0) {
        if (sc.gamma_flag) {
          rep.claim1 = std::max(rep.claim1, ratio);
          ++rep.claim1_cubes;
        }
      } else {
        rep.claim3 = std::max(rep.claim3, ratio);
        ++rep.claim3_cubes;
      }
    }
  }

  for (const auto& [ell, h] : forest.h1) {
    (void)ell;
    for (std::size_t i = 0; i < h.cell_count(); ++i)
      rep.claim2 = std::max(rep.claim2, h.at(i) / u.at(i));
  }
  if (forest.h2) {
    for (std::size_t i = 0; i < forest.h2->cell_count(); ++i)
      rep.claim4 = std::max(rep.claim4, forest.h2->at(i) / u.at(i));
  }

  // Statement of the imported decay lemma: u(E_k ∩ Q_j^k) <= c1 e^{-c2 l r}
  // u(Q_j^k). Fit on the per-l upper envelope; the max log-deviation of the
  // envelope from the fitted line is the reported residual.
  std::map<int, double> envelope;
  for (const auto& level : strat.levels) {
    for (const auto& sc : level.cubes) {
      if (sc.ell < 0 || !sc.gamma_flag) continue;
      double num = masked_cube_integral(u, sc.cube, level.ek_mask);
      double den = integrate(u, sc.cube);
      if (num > 0.0 && den > 0.0) {
        double ratio = num / den;
        auto [it, inserted] = envelope.emplace(sc.ell, ratio);
        if (!inserted) it->second = std::max(it->second, ratio);
      }
    }
  }
  rep.lem23_points = static_cast<int>(envelope.size());
  if (envelope.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [ell, z] : envelope) {
      double x = ell * r, y = std::log(z);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double npts = static_cast<double>(envelope.size());
    double denom = npts * sxx - sx * sx;
    double slope = denom != 0.0 ? (npts * sxy - sx * sy) / denom : 0.0;
    double intercept = (sy - slope * sx) / npts;
    rep.lem23_c2 = std::max(0.0, -slope);
    rep.lem23_c1 = std::exp(intercept);
    for (auto [ell, z] : envelope) {
      double x = ell * r;
      rep.lem23_max_residual =
          std::max(rep.lem23_max_residual, std::abs(std::log(z) - (intercept + slope * x)));
    }
  } else if (envelope.size() == 1) {
    rep.lem23_c1 = envelope.begin()->second;
    rep.lem23_c2 = 0.0;
    rep.lem23_max_residual = 0.0;
  }
  return rep;
}

nlohmann::json ClaimsReport::to_json() const {
  return {{"claim1", claim1},
          {"claim2", claim2},
          {"claim3", claim3},
          {"claim4", claim4},
          {"lem23_c1", lem23_c1},
          {"lem23_c2", lem23_c2},
          {"lem23_max_residual", lem23_max_residual},
          {"lem23_points", lem23_points},
          {"claim1_cubes", claim1_cubes},
          {"claim3_cubes", claim3_cubes}};
}

nlohmann::json stratification_to_json(const Stratification& strat) {
  nlohmann::json j;
  j["a"] = strat.a;
  j["r"] = strat.r;
  j["grid_id"] = strat.grid_id;
  j["N"] = strat.N;
  j["k_max"] = strat.k_max;
  j["levels"] = nlohmann::json::array();
  for (const auto& level : strat.levels) {
    nlohmann::json jl;
    jl["k"] = level.k;
    jl["cubes"] = nlohmann::json::array();
    for (const auto& sc : level.cubes) {
      nlohmann::json jc;
      jc["cube"] = cube_to_string(sc.cube);
      jc["level"] = sc.cube.k;
      jc["g_norm"] = sc.g_norm;
      jc["vr_avg"] = sc.vr_avg;
      jc["ell"] = sc.ell;
      jc["gamma"] = sc.gamma_flag;
      if (!sc.subcubes.empty()) {
        jc["subcubes"] = nlohmann::json::array();
        for (const auto& sub : sc.subcubes)
          jc["subcubes"].push_back({{"cube", cube_to_string(sub.cube)},
                                    {"vr_avg", sub.vr_avg},
                                    {"gamma", sub.gamma_flag}});
      }
      jl["cubes"].push_back(std::move(jc));
    }
    j["levels"].push_back(std::move(jl));
  }
  return j;
}

nlohmann::json forest_to_json(const PrincipalForest& forest) {
  nlohmann::json j;
  j["beta"] = forest.beta;
  j["classes"] = nlohmann::json::array();
  for (const auto& [ell, members] : forest.classes) {
    nlohmann::json jc;
    jc["ell"] = ell;
    jc["members"] = nlohmann::json::array();
    for (const auto& m : members) {
      jc["members"].push_back({{"cube", cube_to_string(m.cube)},
                               {"level", m.cube.k},
                               {"stratum", m.strat_k},
                               {"parent", m.parent},
                               {"principal", m.principal},
                               {"avg_u", m.avg_u}});
    }
    j["classes"].push_back(std::move(jc));
  }
  return j;
}

}  // namespace mixmax
