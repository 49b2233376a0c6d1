#include "mixmax/maximal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mixmax/parallel.hpp"

namespace mixmax {

namespace {

std::atomic<int> g_threads{1};

struct ScoredCube {
  DyadicCube cube;
  double score = 0.0;  // |Q|^{gamma/n} * norm
};

// Broadcast each cube's score to the cells whose center it contains.
void reduce_max(const MeshFn& f, const std::vector<ScoredCube>& cubes, std::vector<double>& out) {
  int N = f.cells_per_axis();
  for (const auto& sc : cubes) {
    CubeGeom g = cube_geom(f, sc.cube);
    if (g.empty) continue;
    if (f.n() == 1) {
      for (int c = g.cell_lo[0]; c < g.cell_hi[0]; ++c)
        if (g.contains_center(0, c)) {
          double& slot = out[static_cast<std::size_t>(c)];
          slot = std::max(slot, sc.score);
        }
    } else {
      for (int cy = g.cell_lo[1]; cy < g.cell_hi[1]; ++cy) {
        if (!g.contains_center(1, cy)) continue;
        for (int cx = g.cell_lo[0]; cx < g.cell_hi[0]; ++cx)
          if (g.contains_center(0, cx)) {
            double& slot = out[static_cast<std::size_t>(cy) * N + cx];
            slot = std::max(slot, sc.score);
          }
      }
    }
  }
}

std::vector<ScoredCube> score_cubes(const MeshFn& f, const YoungFn& phi, double gamma,
                                    std::vector<DyadicCube> cubes) {
  std::vector<ScoredCube> scored(cubes.size());
  double inv_n = 1.0 / f.n();
  parallel_for(cubes.size(), [&](std::size_t i) {
    const DyadicCube& q = cubes[i];
    double norm = lux_norm(f, q, phi).norm;
    double m = cube_measure(f, q);
    scored[i] = {q, gamma > 0.0 ? std::pow(m, gamma * inv_n) * norm : norm};
  });
  return scored;
}

}  // namespace

void set_worker_threads(int count) { g_threads.store(count > 0 ? count : 0); }

int worker_threads() {
  int t = g_threads.load();
  if (t > 0) return t;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int workers = std::min<std::size_t>(static_cast<std::size_t>(worker_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

MeshFn maximal_field(const MeshFn& f, const YoungFn& phi, double gamma, GridScope scope) {
  if (!(gamma >= 0.0) || gamma >= f.n())
    throw std::invalid_argument("maximal_field: gamma must lie in [0, n)");
  int L = f.box().K - f.J();
  std::vector<DyadicCube> cubes;
  if (scope == GridScope::Grid0)
    cubes = enumerate_cubes(f, 0, L, f.box().K);
  else
    cubes = full_cube_family(f);
  auto scored = score_cubes(f, phi, gamma, std::move(cubes));
  std::vector<double> out(f.cell_count(), 0.0);
  reduce_max(f, scored, out);
  return MeshFn(f.box(), f.J(), std::move(out));
}

double dyadic_control_check(const MeshFn& f, const YoungFn& phi) {
  // Surrogate for the full maximal operator: axis-aligned cubes of dyadic
  // side anchored at every cell corner, clipped at the box edge. They are not
  // members of any single shifted grid, which is the point of the check.
  int L = f.box().K - f.J();
  int N = f.cells_per_axis();
  struct Anchored {
    std::array<int, 2> lo{0, 0}, hi{0, 0};  // cell index range, half-open
  };
  std::vector<Anchored> anchored;
  for (int k = f.box().K; k >= L; --k) {
    int side_cells = 1 << (k - L);
    if (f.n() == 1) {
      for (int c = 0; c < N; ++c)
        anchored.push_back({{c, 0}, {std::min(c + side_cells, N), 1}});
    } else {
      for (int cy = 0; cy < N; ++cy)
        for (int cx = 0; cx < N; ++cx)
          anchored.push_back(
              {{cx, cy}, {std::min(cx + side_cells, N), std::min(cy + side_cells, N)}});
    }
  }
  std::vector<double> scores(anchored.size(), 0.0);
  parallel_for(anchored.size(), [&](std::size_t i) {
    const Anchored& a = anchored[i];
    std::vector<double> vals;
    if (f.n() == 1) {
      for (int c = a.lo[0]; c < a.hi[0]; ++c) vals.push_back(f.at(c, 0));
    } else {
      for (int cy = a.lo[1]; cy < a.hi[1]; ++cy)
        for (int cx = a.lo[0]; cx < a.hi[0]; ++cx) vals.push_back(f.at(cx, cy));
    }
    double fmax = 0.0;
    for (double v : vals) fmax = std::max(fmax, v);
    if (fmax == 0.0) return;
    // Cells weigh equally inside an anchored cube, so the modular average is
    // a plain mean of phi values.
    auto G = [&](double lambda) {
      CompensatedSum s;
      for (double v : vals)
        if (v > 0.0) s.add(phi(v / lambda));
      return s.value() / static_cast<double>(vals.size());
    };
    if (phi.kind() == YoungFn::Kind::Power) {
      double p = phi.power_exponent();
      CompensatedSum s;
      for (double v : vals) s.add(std::pow(v, p));
      scores[i] = std::pow(s.value() / static_cast<double>(vals.size()), 1.0 / p);
      return;
    }
    double hi = fmax;
    while (G(hi) > 1.0) hi *= 2.0;
    double lo = fmax * 1e-16;
    if (G(lo) <= 1.0) {
      scores[i] = lo;
      return;
    }
    for (int it = 0; it < 300 && hi - lo > 1e-10 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      if (G(mid) <= 1.0)
        hi = mid;
      else
        lo = mid;
    }
    scores[i] = hi;
  });
  std::vector<double> lhs(f.cell_count(), 0.0);
  for (std::size_t i = 0; i < anchored.size(); ++i) {
    const Anchored& a = anchored[i];
    for (int cy = a.lo[1]; cy < a.hi[1]; ++cy)
      for (int cx = a.lo[0]; cx < a.hi[0]; ++cx) {
        double& slot = lhs[static_cast<std::size_t>(cy) * N + static_cast<std::size_t>(cx)];
        slot = std::max(slot, scores[i]);
      }
  }

  std::vector<double> rhs(f.cell_count(), 0.0);
  int L0 = f.box().K - f.J();
  for (int gid = 0; gid < grid_count(f.n()); ++gid) {
    auto scored = score_cubes(f, phi, 0.0, enumerate_cubes(f, gid, L0, f.box().K));
    std::vector<double> field(f.cell_count(), 0.0);
    reduce_max(f, scored, field);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += field[i];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (rhs[i] > 0.0)
      worst = std::max(worst, lhs[i] / rhs[i]);
    else if (lhs[i] > 0.0)
      return std::numeric_limits<double>::infinity();
  }
  return worst;
}

double hedberg_check(const MeshFn& f, const MeshFn& w, int n, double r, double delta, double gamma,
                     double p) {
  if (n != f.n()) throw std::invalid_argument("hedberg_check: dimension mismatch");
  if (!(p >= r && p < n / gamma))
    throw std::invalid_argument("hedberg_check: need r <= p < n/gamma");
  YoungFn phi = YoungFn::llogl(r, delta);
  YoungFn xi = p > r ? thm3_params(n, r, delta, gamma, p).xi : thm4_params(n, r, delta, gamma).xi;
  double q = 1.0 / (1.0 / p - gamma / n);

  MeshFn fp = f.pow(p);
  DyadicCube root{0, f.box().K, {0, 0}};
  double ip = integrate(fp, root);
  if (!(ip > 0.0)) return 0.0;

  MeshFn lhs = maximal_field(f.divide(w), phi, gamma, GridScope::AllGrids);
  MeshFn mxi = maximal_field(f.pow(p / q).divide(w), xi, 0.0, GridScope::AllGrids);
  double scale = std::pow(ip, gamma / n);
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.cell_count(); ++i) {
    double denom = mxi.at(i) * scale;
    double num = lhs.at(i);
    if (denom > 0.0)
      worst = std::max(worst, num / denom);
    else if (num > 0.0)
      return std::numeric_limits<double>::infinity();
  }
  return worst;
}

double maximal_embedding_check(const MeshFn& v, const YoungFn& xi, const YoungFn& eta,
                               double beta) {
  if (!(beta >= 1.0)) throw std::invalid_argument("maximal_embedding_check: beta must be >= 1");
  MeshFn mxi = maximal_field(v.pow(beta), xi, 0.0, GridScope::AllGrids);
  MeshFn meta = maximal_field(v, eta, 0.0, GridScope::AllGrids);
  double worst = 0.0;
  for (std::size_t i = 0; i < mxi.cell_count(); ++i) {
    double num = std::pow(mxi.at(i), 1.0 / beta);
    double den = meta.at(i);
    if (den > 0.0)
      worst = std::max(worst, num / den);
    else if (num > 0.0)
      return std::numeric_limits<double>::infinity();
  }
  return worst;
}

}  // namespace mixmax
