#include "mixmax/luxemburg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mixmax {

namespace {

constexpr double kRelTol = 1e-10;

// Cells of Q with their masses: omega_c = |c ∩ Q| (optionally times w_c).
struct CubeSamples {
  std::vector<double> value;
  std::vector<double> mass;
  double total_mass = 0.0;
  double max_value = 0.0;
};

CubeSamples gather(const MeshFn& f, const DyadicCube& q, const MeshFn* w) {
  if (w && !f.same_layout(*w)) throw std::invalid_argument("lux: f/w layout mismatch");
  CubeGeom g = cube_geom(f, q);
  if (g.empty) throw std::invalid_argument("lux: cube disjoint from box");
  CubeSamples cs;
  double unit = f.cell_side() / 3.0;
  double unit_vol = f.n() == 1 ? unit : unit * unit;
  CompensatedSum total;
  auto push = [&](double fv, double ov, double wv) {
    if (!std::isfinite(fv)) throw std::invalid_argument("lux: non-finite cell value");
    fv = std::abs(fv);
    double m = ov * unit_vol * wv;
    cs.value.push_back(fv);
    cs.mass.push_back(m);
    total.add(m);
    if (m > 0.0) cs.max_value = std::max(cs.max_value, fv);
  };
  if (f.n() == 1) {
    for (int c = g.cell_lo[0]; c < g.cell_hi[0]; ++c)
      push(f.at(c, 0), static_cast<double>(g.overlap(0, c)), w ? w->at(c, 0) : 1.0);
  } else {
    for (int cy = g.cell_lo[1]; cy < g.cell_hi[1]; ++cy)
      for (int cx = g.cell_lo[0]; cx < g.cell_hi[0]; ++cx)
        push(f.at(cx, cy),
             static_cast<double>(g.overlap(0, cx)) * static_cast<double>(g.overlap(1, cy)),
             w ? w->at(cx, cy) : 1.0);
  }
  cs.total_mass = total.value();
  if (!(cs.total_mass > 0.0)) throw std::invalid_argument("lux: w(Q) vanishes");
  return cs;
}

double modular_average(const CubeSamples& cs, const YoungFn& phi, double lambda) {
  CompensatedSum s;
  for (std::size_t i = 0; i < cs.value.size(); ++i)
    if (cs.mass[i] > 0.0 && cs.value[i] > 0.0) s.add(cs.mass[i] * phi(cs.value[i] / lambda));
  return s.value() / cs.total_mass;
}

LuxResult solve(const CubeSamples& cs, const YoungFn& phi) {
  LuxResult res;
  if (cs.max_value == 0.0) {
    res.zero_input = true;
    return res;
  }
  if (phi.kind() == YoungFn::Kind::Power) {
    // G(lambda) = avg(f^p) / lambda^p: the norm is the p-mean, exactly.
    double p = phi.power_exponent();
    CompensatedSum s;
    for (std::size_t i = 0; i < cs.value.size(); ++i)
      if (cs.mass[i] > 0.0 && cs.value[i] > 0.0) s.add(cs.mass[i] * std::pow(cs.value[i], p));
    res.norm = std::pow(s.value() / cs.total_mass, 1.0 / p);
    res.residual = modular_average(cs, phi, res.norm);
    return res;
  }
  if (!phi.monotone_eval()) throw std::logic_error("lux: non-monotone Young function");
  double hi = cs.max_value;
  int guard = 0;
  while (modular_average(cs, phi, hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 200) throw std::runtime_error("lux: bracket growth failed");
  }
  double lo = cs.max_value * 1e-16;
  if (modular_average(cs, phi, lo) <= 1.0) {
    res.norm = lo;
    res.residual = modular_average(cs, phi, lo);
    return res;
  }
  int iters = 0;
  while (hi - lo > kRelTol * hi && iters < 300) {
    double mid = 0.5 * (lo + hi);
    if (modular_average(cs, phi, mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
    ++iters;
  }
  res.norm = hi;
  res.iterations = iters;
  res.residual = modular_average(cs, phi, hi);
  return res;
}

}  // namespace

LuxResult lux_norm(const MeshFn& f, const DyadicCube& q, const YoungFn& phi) {
  return solve(gather(f, q, nullptr), phi);
}

LuxResult weighted_lux_norm(const MeshFn& f, const DyadicCube& q, const YoungFn& phi,
                            const MeshFn& w) {
  return solve(gather(f, q, &w), phi);
}

double lux_infimum_form(const MeshFn& f, const DyadicCube& q, const YoungFn& phi,
                        const MeshFn& w) {
  CubeSamples cs = gather(f, q, &w);
  if (cs.max_value == 0.0) return 0.0;
  double norm0 = solve(cs, phi).norm;
  auto objective = [&](double log_tau) {
    double tau = std::exp(log_tau);
    return tau * (1.0 + modular_average(cs, phi, tau));
  };
  double a = std::log(norm0) + std::log(1e-6);
  double b = std::log(norm0) + std::log(1e6);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > 1e-9) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    }
  }
  double best = std::min(f1, f2);
  best = std::min(best, objective(std::log(norm0) + std::log(1e-6)));
  best = std::min(best, objective(std::log(norm0) + std::log(1e6)));
  return best;
}

HolderCheck gen_holder_check(const MeshFn& f, const MeshFn& g, const DyadicCube& q,
                             const YoungFn& phi, const YoungFn& psi, const YoungFn& phi2) {
  HolderCheck out;
  double worst = 0.0;
  auto ts = log_space(1.0, 1e6, 121);
  std::vector<double> ratios;
  ratios.reserve(ts.size());
  for (double t : ts) {
    double r = psi.inverse(t) * phi2.inverse(t) / phi.inverse(t);
    ratios.push_back(r);
    worst = std::max(worst, r);
  }
  out.hypothesis_const = worst;
  // Same growth criterion as the F_r fit: a hypothesis that keeps growing
  // across the top decade is flagged, finite-looking bands pass.
  double t_hi = ts.back();
  bool growing = true;
  bool any = false;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] < t_hi / 10.0) continue;
    any = true;
    if (!(ratios[i] > ratios[i - 1])) growing = false;
  }
  out.hypothesis_ok = !(any && growing);

  double num = lux_norm(f.multiply(g), q, phi).norm;
  double den = lux_norm(f, q, psi).norm * lux_norm(g, q, phi2).norm;
  if (num == 0.0 && den == 0.0) {
    out.zero_over_zero = true;
    out.ratio = 0.0;
  } else if (den == 0.0) {
    out.ratio = std::numeric_limits<double>::infinity();
  } else {
    out.ratio = num / den;
  }
  return out;
}

double jensen_check(const MeshFn& f, const DyadicCube& q, const YoungFn& phi, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("jensen_check: r must be >= 1");
  double a = lux_norm(f, q, phi).norm;
  double b = lux_norm(f.pow(r), q, phi).norm;
  if (a == 0.0 && b == 0.0) return 0.0;
  return std::pow(a, r) / b;
}

}  // namespace mixmax
