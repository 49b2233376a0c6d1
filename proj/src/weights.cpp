#include "mixmax/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mixmax {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Member: return "member";
    case Verdict::NonMember: return "non-member";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

void require_cubes(std::span<const DyadicCube> cubes, const char* who) {
  if (cubes.empty()) throw std::invalid_argument(std::string(who) + ": empty cube list");
}

void require_positive(const MeshFn& w, const char* who) {
  if (!(w.min_value() > 0.0)) throw std::invalid_argument(std::string(who) + ": weight must be > 0");
}

}  // namespace

double ap_constant(const MeshFn& w, double p, std::span<const DyadicCube> cubes) {
  if (!(p > 1.0)) throw std::invalid_argument("ap_constant: p must exceed 1");
  require_cubes(cubes, "ap_constant");
  require_positive(w, "ap_constant");
  const double dual_exp = 1.0 - p / (p - 1.0);  // 1 - p'
  MeshFn wd = w.pow(dual_exp);
  double worst = 0.0;
  for (const auto& q : cubes) {
    CubeGeom g = cube_geom(w, q);
    if (g.empty) continue;
    double c = (integrate(w, q) / g.measure) *
               std::pow(integrate(wd, q) / g.measure, p - 1.0);
    worst = std::max(worst, c);
  }
  return worst;
}

double a1_constant(const MeshFn& w, std::span<const DyadicCube> cubes) {
  require_cubes(cubes, "a1_constant");
  require_positive(w, "a1_constant");
  double worst = 0.0;
  for (const auto& q : cubes) {
    CubeGeom g = cube_geom(w, q);
    if (g.empty) continue;
    worst = std::max(worst, integrate(w, q) / g.measure / essential_inf(w, q));
  }
  return worst;
}

double rh_constant(const MeshFn& w, double s, std::span<const DyadicCube> cubes) {
  if (!(s > 1.0)) throw std::invalid_argument("rh_constant: s must exceed 1");
  require_cubes(cubes, "rh_constant");
  require_positive(w, "rh_constant");
  MeshFn ws = w.pow(s);
  double worst = 0.0;
  for (const auto& q : cubes) {
    CubeGeom g = cube_geom(w, q);
    if (g.empty) continue;
    double c = std::pow(integrate(ws, q) / g.measure, 1.0 / s) / (integrate(w, q) / g.measure);
    worst = std::max(worst, c);
  }
  return worst;
}

double ainf_exp_constant(const MeshFn& w, std::span<const DyadicCube> cubes) {
  require_cubes(cubes, "ainf_exp_constant");
  require_positive(w, "ainf_exp_constant");
  // log w is signed, so it cannot live in a MeshFn; integrate it per cube.
  double worst = 0.0;
  for (const auto& q : cubes) {
    CubeGeom g = cube_geom(w, q);
    if (g.empty) continue;
    CompensatedSum s;
    double unit = w.cell_side() / 3.0;
    double unit_vol = w.n() == 1 ? unit : unit * unit;
    if (w.n() == 1) {
      for (int c = g.cell_lo[0]; c < g.cell_hi[0]; ++c)
        s.add(std::log(w.at(c, 0)) * static_cast<double>(g.overlap(0, c)));
    } else {
      for (int cy = g.cell_lo[1]; cy < g.cell_hi[1]; ++cy)
        for (int cx = g.cell_lo[0]; cx < g.cell_hi[0]; ++cx)
          s.add(std::log(w.at(cx, cy)) * static_cast<double>(g.overlap(0, cx)) *
                static_cast<double>(g.overlap(1, cy)));
    }
    double avg_log = s.value() * unit_vol / g.measure;
    double c = (integrate(w, q) / g.measure) * std::exp(-avg_log);
    worst = std::max(worst, c);
  }
  return worst;
}

namespace {

// One sampled subset: Lebesgue fraction and w-mass fraction.
struct SubsetPoint {
  double m;
  double R;
};

struct CubeCells {
  std::vector<double> wmass;   // per cell: w_c * |c ∩ Q|
  std::vector<double> lmass;   // per cell: |c ∩ Q|
  std::vector<double> value;   // w_c
  double wtot = 0.0, ltot = 0.0;
};

CubeCells gather_cells(const MeshFn& w, const CubeGeom& g) {
  CubeCells cc;
  double unit = w.cell_side() / 3.0;
  double unit_vol = w.n() == 1 ? unit : unit * unit;
  auto push = [&](double wv, double ov) {
    double lm = ov * unit_vol;
    cc.value.push_back(wv);
    cc.lmass.push_back(lm);
    cc.wmass.push_back(lm * wv);
    cc.wtot += lm * wv;
    cc.ltot += lm;
  };
  if (w.n() == 1) {
    for (int c = g.cell_lo[0]; c < g.cell_hi[0]; ++c)
      push(w.at(c, 0), static_cast<double>(g.overlap(0, c)));
  } else {
    for (int cy = g.cell_lo[1]; cy < g.cell_hi[1]; ++cy)
      for (int cx = g.cell_lo[0]; cx < g.cell_hi[0]; ++cx)
        push(w.at(cx, cy),
             static_cast<double>(g.overlap(0, cx)) * static_cast<double>(g.overlap(1, cy)));
  }
  return cc;
}

void add_subset(const CubeCells& cc, const std::vector<std::size_t>& cells,
                std::vector<SubsetPoint>& out) {
  double lm = 0.0, wm = 0.0;
  for (std::size_t c : cells) {
    lm += cc.lmass[c];
    wm += cc.wmass[c];
  }
  double m = lm / cc.ltot, R = wm / cc.wtot;
  if (m > 0.0 && m < 1.0) out.push_back({m, R});
}

void sample_cube(const MeshFn& w, const DyadicCube& q, int subsets_per_cube, std::uint64_t seed,
                 std::vector<SubsetPoint>& out) {
  CubeGeom g = cube_geom(w, q);
  if (g.empty) return;
  CubeCells cc = gather_cells(w, g);
  std::size_t ncells = cc.value.size();
  if (ncells < 2) return;

  std::uint64_t cube_tag =
      SplitMix64::mix(static_cast<std::uint64_t>(q.grid_id) * 0x1000193 + static_cast<std::uint64_t>(q.k + 64),
                      static_cast<std::uint64_t>(q.coords[0] + (q.coords[1] << 20) + (1 << 19)));
  SplitMix64 rng(SplitMix64::mix(seed, cube_tag));

  // Dyadic sub-boxes: recursive halving of the cell-index range, three deep.
  struct Range {
    std::size_t lo, hi;
    int depth;
  };
  std::vector<Range> stack{{0, ncells, 0}};
  while (!stack.empty()) {
    Range r = stack.back();
    stack.pop_back();
    if (r.depth > 0) {
      std::vector<std::size_t> cells(r.hi - r.lo);
      std::iota(cells.begin(), cells.end(), r.lo);
      add_subset(cc, cells, out);
    }
    if (r.depth < 3 && r.hi - r.lo >= 2) {
      std::size_t mid = r.lo + (r.hi - r.lo) / 2;
      stack.push_back({r.lo, mid, r.depth + 1});
      stack.push_back({mid, r.hi, r.depth + 1});
    }
  }

  // Random cell unions; sizes sweep the dyadic fractions and the exact half.
  std::vector<std::size_t> perm(ncells);
  for (int j = 0; j < subsets_per_cube; ++j) {
    std::size_t target;
    int slot = j % 6;
    if (slot <= 1)
      target = std::max<std::size_t>(1, ncells / 2);
    else
      target = std::max<std::size_t>(1, ncells >> (slot + 1));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < target; ++i) {
      std::size_t pick = i + static_cast<std::size_t>(rng.below(ncells - i));
      std::swap(perm[i], perm[pick]);
    }
    std::vector<std::size_t> cells(perm.begin(), perm.begin() + static_cast<long>(target));
    add_subset(cc, cells, out);
  }

  // Level sets of w: both tails.
  std::vector<std::size_t> order(ncells);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cc.value[a] < cc.value[b]; });
  for (double frac : {0.125, 0.25, 0.5, 0.75, 0.875}) {
    std::size_t cut = std::max<std::size_t>(1, static_cast<std::size_t>(frac * ncells));
    cut = std::min(cut, ncells - 1);
    std::vector<std::size_t> low(order.begin(), order.begin() + static_cast<long>(cut));
    std::vector<std::size_t> high(order.begin() + static_cast<long>(cut), order.end());
    add_subset(cc, low, out);
    add_subset(cc, high, out);
  }
  // Extreme tails: a handful of cells of largest/smallest w. Concentration of
  // mass on the top cells is exactly what breaks A_inf.
  for (std::size_t tail : {1u, 2u, 4u, 8u}) {
    if (tail >= ncells) break;
    std::vector<std::size_t> top(order.end() - static_cast<long>(tail), order.end());
    std::vector<std::size_t> bottom(order.begin(), order.begin() + static_cast<long>(tail));
    add_subset(cc, top, out);
    add_subset(cc, bottom, out);
  }
}

}  // namespace

std::pair<double, double> ainf_pair(const MeshFn& w, std::span<const DyadicCube> cubes,
                                    int subsets_per_cube, std::uint64_t seed) {
  if (subsets_per_cube < 8) throw std::invalid_argument("ainf_pair: need >= 8 subsets per cube");
  require_cubes(cubes, "ainf_pair");
  require_positive(w, "ainf_pair");
  std::vector<SubsetPoint> pts;
  for (const auto& q : cubes) sample_cube(w, q, subsets_per_cube, seed, pts);
  if (pts.empty()) return {1.0, 1.0};

  double half_peak = 0.0, any_peak = 0.0;
  for (const auto& p : pts) {
    any_peak = std::max(any_peak, p.R);
    if (p.m >= 0.4 && p.m <= 0.6) half_peak = std::max(half_peak, p.R);
  }
  double cap = 10.0 * (half_peak > 0.0 ? half_peak : any_peak);
  cap = std::max(cap, 1.0);

  auto needed_c = [&](double eps) {
    double c = 0.0;
    for (const auto& p : pts)
      if (p.R > 0.0) c = std::max(c, p.R / std::pow(p.m, eps));
    return c;
  };
  double lo = 0.0, hi = 1.0;
  if (needed_c(hi) <= cap) {
    lo = 1.0;
  } else {
    for (int i = 0; i < 48; ++i) {
      double mid = 0.5 * (lo + hi);
      if (needed_c(mid) <= cap)
        lo = mid;
      else
        hi = mid;
    }
  }
  double eps = lo;
  double C = std::max(1.0, needed_c(eps));
  return {C, eps};
}

nlohmann::json WeightReport::to_json() const {
  nlohmann::json j;
  for (const auto& [p, c] : ap_constants) j["ap_constants"][std::to_string(p)] = c;
  j["a1_constant"] = a1_constant;
  j["ainf_pair"] = {{"C", ainf_pair.first}, {"eps", ainf_pair.second}};
  j["ainf_exp_constant"] = ainf_exp_constant;
  for (const auto& [s, c] : rh_constants) j["rh_constants"][std::to_string(s)] = c;
  for (const auto& [k, v] : verdicts) j["verdicts"][k] = to_string(v);
  for (const auto& [k, v] : growth) j["growth"][k] = v;
  j["cube_family"] = cube_family;
  j["ainf_fit_note"] =
      "eps maximized over (0,1] subject to C <= 10x the observed half-measure ratio";
  return j;
}

std::string WeightReport::table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %14s %10s %s\n", "class", "constant", "growth", "verdict");
  os << buf << std::string(52, '-') << "\n";
  auto row = [&](const std::string& name, double c) {
    double gr = growth.count(name) ? growth.at(name) : 0.0;
    std::string v = verdicts.count(name) ? to_string(verdicts.at(name)) : "-";
    std::snprintf(buf, sizeof buf, "%-12s %14.6g %10.3f %s\n", name.c_str(), c, gr, v.c_str());
    os << buf;
  };
  row("A1", a1_constant);
  for (const auto& [p, c] : ap_constants) {
    std::snprintf(buf, sizeof buf, "A%g", p);
    row(buf, c);
  }
  row("Ainf", ainf_exp_constant);
  for (const auto& [s, c] : rh_constants) {
    std::snprintf(buf, sizeof buf, "RH%g", s);
    row(buf, c);
  }
  std::snprintf(buf, sizeof buf, "Ainf fit: C=%.6g eps=%.6g  (family: %s)\n", ainf_pair.first,
                ainf_pair.second, cube_family.c_str());
  os << buf;
  return os.str();
}

WeightReport classify_weight(const WeightGen& gen, int n, int K, int J, bool centered,
                             std::uint64_t seed, const ClassifyOptions& opt) {
  auto make_box = [&](int KK) { return centered ? Box::centered(n, KK) : Box::corner(n, KK); };
  struct Stage {
    MeshFn w;
    std::vector<DyadicCube> cubes;
  };
  auto build = [&](int KK, int JJ) {
    MeshFn w = gen(make_box(KK), JJ);
    std::vector<DyadicCube> cubes = full_cube_family(w);
    return Stage{std::move(w), std::move(cubes)};
  };
  // Probes: one and two mesh octaves plus one box move. Boundary weights
  // (|x|^{-n-1} and |x|) grow by exactly 2 - o(1) per mesh octave, so a
  // single octave cannot clear the strict "exceeds 2x" rule; two octaves can.
  Stage base = build(K, J), finer = build(K, J + 1), finer2 = build(K, J + 2),
        wider = build(K + 2, J);

  WeightReport rep;
  {
    char buf[96];
    std::snprintf(buf, sizeof buf, "3^n grids, levels [%d,%d], J=%d, K=%d", K - J, K, J, K);
    rep.cube_family = buf;
  }
  auto sev_all = [&](const Stage& st) {
    std::map<std::string, double> sev;
    sev["A1"] = a1_constant(st.w, st.cubes);
    for (double p : opt.ps) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "A%g", p);
      sev[buf] = ap_constant(st.w, p, st.cubes);
    }
    for (double s : opt.ss) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "RH%g", s);
      sev[buf] = rh_constant(st.w, s, st.cubes);
    }
    sev["Ainf"] = ainf_exp_constant(st.w, st.cubes);
    return sev;
  };
  auto s0 = sev_all(base), s1 = sev_all(finer), s1b = sev_all(finer2), s2 = sev_all(wider);

  rep.a1_constant = s0.at("A1");
  for (double p : opt.ps) rep.ap_constants[p] = ap_constant(base.w, p, base.cubes);
  for (double s : opt.ss) rep.rh_constants[s] = rh_constant(base.w, s, base.cubes);
  rep.ainf_exp_constant = s0.at("Ainf");
  rep.ainf_pair = ainf_pair(base.w, base.cubes, opt.subsets_per_cube, seed);

  for (const auto& [name, c0] : s0) {
    double g1 = s1.at(name) / c0, g1b = s1b.at(name) / c0, g2 = s2.at(name) / c0;
    double worst = std::max({g1, 1.0 / g1, g1b, 1.0 / g1b, g2, 1.0 / g2});
    double grow = std::max({g1, g1b, g2});
    rep.growth[name] = grow;
    if (grow > opt.blowup_factor)
      rep.verdicts[name] = Verdict::NonMember;
    else if (worst <= opt.stable_factor)
      rep.verdicts[name] = Verdict::Member;
    else
      rep.verdicts[name] = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace mixmax
