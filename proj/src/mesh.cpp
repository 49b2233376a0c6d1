#include "mixmax/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "mixmax/young.hpp"

namespace mixmax {

namespace {

void check_dim(int n) {
  if (n != 1 && n != 2) throw std::invalid_argument("mesh: dimension must be 1 or 2");
}

// Sign of the one-third shift alternates with the level; this is what makes
// each shifted family an actual dyadic grid (children tile their parent).
int shift_sign(int k) { return (((k % 2) + 2) % 2 == 0) ? 1 : -1; }

int grid_digit(int grid_id, int axis) {
  return axis == 0 ? grid_id % 3 : (grid_id / 3) % 3;
}

}  // namespace

Box Box::centered(int n, int K) {
  check_dim(n);
  Box b;
  b.n = n;
  b.K = K;
  double half = std::ldexp(1.0, K - 1);
  b.origin = {-half, n == 2 ? -half : 0.0};
  return b;
}

Box Box::corner(int n, int K) {
  check_dim(n);
  Box b;
  b.n = n;
  b.K = K;
  b.origin = {0.0, 0.0};
  return b;
}

bool operator==(const Box& a, const Box& b) {
  return a.n == b.n && a.K == b.K && a.origin == b.origin;
}

bool operator==(const DyadicCube& a, const DyadicCube& b) {
  return a.grid_id == b.grid_id && a.k == b.k && a.coords == b.coords;
}

MeshFn::MeshFn(const Box& box, int J, std::vector<double> values)
    : box_(box), J_(J), values_(std::move(values)) {
  check_dim(box.n);
  if (J < 0 || J > 14) throw std::invalid_argument("mesh: J out of range");
  std::size_t expect = static_cast<std::size_t>(1) << (box.n * J);
  if (values_.size() != expect) throw std::invalid_argument("mesh: value count mismatch");
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("mesh: values must be finite and >= 0");
  }
}

MeshFn MeshFn::constant(const Box& box, int J, double c) {
  std::size_t count = static_cast<std::size_t>(1) << (box.n * J);
  return MeshFn(box, J, std::vector<double>(count, c));
}

MeshFn MeshFn::sample(const Box& box, int J,
                      const std::function<double(std::array<double, 2>)>& fn) {
  check_dim(box.n);
  int N = 1 << J;
  double h = std::ldexp(1.0, box.K - J);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(1) << (box.n * J));
  if (box.n == 1) {
    for (int cx = 0; cx < N; ++cx)
      vals.push_back(fn({box.origin[0] + (cx + 0.5) * h, 0.0}));
  } else {
    for (int cy = 0; cy < N; ++cy)
      for (int cx = 0; cx < N; ++cx)
        vals.push_back(fn({box.origin[0] + (cx + 0.5) * h, box.origin[1] + (cy + 0.5) * h}));
  }
  return MeshFn(box, J, std::move(vals));
}

double MeshFn::cell_volume() const {
  double h = cell_side();
  return box_.n == 1 ? h : h * h;
}

std::array<double, 2> MeshFn::cell_center(std::size_t flat) const {
  int N = cells_per_axis();
  double h = cell_side();
  int cx = static_cast<int>(flat % static_cast<std::size_t>(N));
  int cy = static_cast<int>(flat / static_cast<std::size_t>(N));
  return {box_.origin[0] + (cx + 0.5) * h,
          box_.n == 2 ? box_.origin[1] + (cy + 0.5) * h : 0.0};
}

MeshFn MeshFn::map(const std::function<double(double)>& fn) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = fn(values_[i]);
  return MeshFn(box_, J_, std::move(out));
}

MeshFn MeshFn::map(const YoungFn& phi) const {
  return map([&phi](double x) { return phi(x); });
}

MeshFn MeshFn::multiply(const MeshFn& g) const {
  if (!same_layout(g)) throw std::invalid_argument("mesh: layout mismatch");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] * g.values_[i];
  return MeshFn(box_, J_, std::move(out));
}

MeshFn MeshFn::divide(const MeshFn& g) const {
  if (!same_layout(g)) throw std::invalid_argument("mesh: layout mismatch");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (g.values_[i] <= 0.0) throw std::domain_error("mesh: division by nonpositive cell");
    out[i] = values_[i] / g.values_[i];
  }
  return MeshFn(box_, J_, std::move(out));
}

MeshFn MeshFn::add(const MeshFn& g) const {
  if (!same_layout(g)) throw std::invalid_argument("mesh: layout mismatch");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] + g.values_[i];
  return MeshFn(box_, J_, std::move(out));
}

MeshFn MeshFn::pow(double e) const {
  return map([e](double x) { return std::pow(x, e); });
}

MeshFn MeshFn::scale(double c) const {
  if (!(c >= 0.0)) throw std::invalid_argument("mesh: scale must be >= 0");
  return map([c](double x) { return c * x; });
}

double MeshFn::max_value() const { return *std::max_element(values_.begin(), values_.end()); }
double MeshFn::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

CubeGeom cube_geom(const MeshFn& mesh, const DyadicCube& q) {
  const Box& box = mesh.box();
  int L = box.K - mesh.J();
  if (q.k < L) throw std::invalid_argument("cube_geom: level below mesh resolution");
  long long side_u = 3LL << (q.k - L);
  long long N3 = 3LL * mesh.cells_per_axis();
  CubeGeom g;
  double len_u = 1.0;
  for (int a = 0; a < box.n; ++a) {
    long long sh = shift_sign(q.k) * static_cast<long long>(grid_digit(q.grid_id, a))
                   * (side_u / 3);
    long long lo = q.coords[static_cast<std::size_t>(a)] * side_u + sh;
    long long hi = lo + side_u;
    lo = std::max(lo, 0LL);
    hi = std::min(hi, N3);
    if (hi <= lo) return g;  // disjoint from box
    g.lo[static_cast<std::size_t>(a)] = lo;
    g.hi[static_cast<std::size_t>(a)] = hi;
    g.cell_lo[static_cast<std::size_t>(a)] = static_cast<int>(lo / 3);
    g.cell_hi[static_cast<std::size_t>(a)] = static_cast<int>((hi + 2) / 3);
    len_u *= static_cast<double>(hi - lo);
  }
  g.empty = false;
  double unit = mesh.cell_side() / 3.0;
  g.measure = len_u * (box.n == 1 ? unit : unit * unit);
  return g;
}

double cube_measure(const MeshFn& mesh, const DyadicCube& q) { return cube_geom(mesh, q).measure; }

double integrate(const MeshFn& f, const DyadicCube& q) {
  CubeGeom g = cube_geom(f, q);
  if (g.empty) return 0.0;
  double unit = f.cell_side() / 3.0;
  CompensatedSum sum;
  if (f.n() == 1) {
    for (int c = g.cell_lo[0]; c < g.cell_hi[0]; ++c)
      sum.add(f.at(c, 0) * static_cast<double>(g.overlap(0, c)));
    return sum.value() * unit;
  }
  for (int cy = g.cell_lo[1]; cy < g.cell_hi[1]; ++cy) {
    double oy = static_cast<double>(g.overlap(1, cy));
    for (int cx = g.cell_lo[0]; cx < g.cell_hi[0]; ++cx)
      sum.add(f.at(cx, cy) * static_cast<double>(g.overlap(0, cx)) * oy);
  }
  return sum.value() * unit * unit;
}

double average(const MeshFn& f, const DyadicCube& q) {
  CubeGeom g = cube_geom(f, q);
  if (g.empty) throw std::invalid_argument("average: cube disjoint from box");
  return integrate(f, q) / g.measure;
}

double essential_inf(const MeshFn& f, const DyadicCube& q) {
  CubeGeom g = cube_geom(f, q);
  if (g.empty) throw std::invalid_argument("essential_inf: empty intersection");
  double m = std::numeric_limits<double>::infinity();
  if (f.n() == 1) {
    for (int c = g.cell_lo[0]; c < g.cell_hi[0]; ++c) m = std::min(m, f.at(c, 0));
  } else {
    for (int cy = g.cell_lo[1]; cy < g.cell_hi[1]; ++cy)
      for (int cx = g.cell_lo[0]; cx < g.cell_hi[0]; ++cx) m = std::min(m, f.at(cx, cy));
  }
  return m;
}

int grid_count(int n) {
  check_dim(n);
  return n == 1 ? 3 : 9;
}

std::vector<DyadicCube> enumerate_cubes(const MeshFn& mesh, int grid_id, int k_min, int k_max) {
  const Box& box = mesh.box();
  int L = box.K - mesh.J();
  if (grid_id < 0 || grid_id >= grid_count(box.n))
    throw std::invalid_argument("enumerate_cubes: invalid grid_id");
  if (k_min < L || k_max > box.K || k_min > k_max)
    throw std::invalid_argument("enumerate_cubes: level range outside [K-J, K]");
  long long N3 = 3LL * mesh.cells_per_axis();
  std::vector<DyadicCube> out;
  for (int k = k_max; k >= k_min; --k) {
    long long side_u = 3LL << (k - L);
    std::array<long long, 2> m_lo{0, 0}, m_hi{0, 0};
    for (int a = 0; a < box.n; ++a) {
      long long sh = shift_sign(k) * static_cast<long long>(grid_digit(grid_id, a))
                     * (side_u / 3);
      m_lo[static_cast<std::size_t>(a)] = ceil_div(1 - side_u - sh, side_u);
      m_hi[static_cast<std::size_t>(a)] = floor_div(N3 - 1 - sh, side_u);
    }
    if (box.n == 1) {
      for (long long m = m_lo[0]; m <= m_hi[0]; ++m)
        out.push_back(DyadicCube{grid_id, k, {m, 0}});
    } else {
      for (long long my = m_lo[1]; my <= m_hi[1]; ++my)
        for (long long mx = m_lo[0]; mx <= m_hi[0]; ++mx)
          out.push_back(DyadicCube{grid_id, k, {mx, my}});
    }
  }
  return out;
}

std::vector<DyadicCube> full_cube_family(const MeshFn& mesh) {
  std::vector<DyadicCube> out;
  int L = mesh.box().K - mesh.J();
  for (int g = 0; g < grid_count(mesh.n()); ++g) {
    auto cubes = enumerate_cubes(mesh, g, L, mesh.box().K);
    out.insert(out.end(), cubes.begin(), cubes.end());
  }
  return out;
}

std::vector<DyadicCube> cube_children(const DyadicCube& q, int n) {
  check_dim(n);
  int eps = shift_sign(q.k);
  std::vector<DyadicCube> out;
  if (n == 1) {
    for (int dx = 0; dx < 2; ++dx)
      out.push_back(DyadicCube{q.grid_id, q.k - 1,
                               {2 * q.coords[0] + eps * grid_digit(q.grid_id, 0) + dx, 0}});
  } else {
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx)
        out.push_back(DyadicCube{q.grid_id, q.k - 1,
                                 {2 * q.coords[0] + eps * grid_digit(q.grid_id, 0) + dx,
                                  2 * q.coords[1] + eps * grid_digit(q.grid_id, 1) + dy}});
  }
  return out;
}

DyadicCube cube_parent(const DyadicCube& q, int n) {
  check_dim(n);
  int eps = shift_sign(q.k + 1);
  DyadicCube p{q.grid_id, q.k + 1, {0, 0}};
  for (int a = 0; a < n; ++a)
    p.coords[static_cast<std::size_t>(a)] =
        floor_div(q.coords[static_cast<std::size_t>(a)] - eps * grid_digit(q.grid_id, a), 2);
  return p;
}

bool cube_contains(const MeshFn& mesh, const DyadicCube& outer, const DyadicCube& inner) {
  if (outer.grid_id != inner.grid_id) throw std::invalid_argument("cube_contains: mixed grids");
  if (inner.k > outer.k) return false;
  DyadicCube cur = inner;
  while (cur.k < outer.k) cur = cube_parent(cur, mesh.n());
  return cur.coords == outer.coords;
}

MeshFn power_weight(const Box& box, int J, double beta) {
  return MeshFn::sample(box, J, [&](std::array<double, 2> x) {
    double r = box.n == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    return std::pow(r, beta);
  });
}

std::string cube_to_string(const DyadicCube& q) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "g%d:k%d:(%lld,%lld)", q.grid_id, q.k,
                static_cast<long long>(q.coords[0]), static_cast<long long>(q.coords[1]));
  return buf;
}

namespace {
constexpr char kMagic[4] = {'M', 'X', 'M', '1'};
}

void MeshFn::save_binary(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("mesh: cannot open " + path);
  os.write(kMagic, 4);
  std::int32_t hdr[3] = {static_cast<std::int32_t>(box_.n), static_cast<std::int32_t>(box_.K),
                         static_cast<std::int32_t>(J_)};
  os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  os.write(reinterpret_cast<const char*>(box_.origin.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(box_.n)));
  os.write(reinterpret_cast<const char*>(values_.data()),
           static_cast<std::streamsize>(sizeof(double) * values_.size()));
  if (!os) throw std::runtime_error("mesh: write failed: " + path);
}

MeshFn MeshFn::load_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("mesh: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("mesh: bad magic in " + path);
  std::int32_t hdr[3];
  is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  Box box;
  box.n = hdr[0];
  box.K = hdr[1];
  check_dim(box.n);
  is.read(reinterpret_cast<char*>(box.origin.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(box.n)));
  int J = hdr[2];
  if (J < 0 || J > 14) throw std::runtime_error("mesh: bad J in " + path);
  std::vector<double> vals(static_cast<std::size_t>(1) << (box.n * J));
  is.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(sizeof(double) * vals.size()));
  if (!is) throw std::runtime_error("mesh: truncated file: " + path);
  return MeshFn(box, J, std::move(vals));
}

void MeshFn::save_csv(std::ostream& os) const {
  char buf[128];
  if (box_.n == 1)
    os << "x,value\r\n";
  else
    os << "x,y,value\r\n";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    auto c = cell_center(i);
    if (box_.n == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\r\n", c[0], values_[i]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\r\n", c[0], c[1], values_[i]);
    os << buf;
  }
}

}  // namespace mixmax
