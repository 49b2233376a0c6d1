#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "mixmax/mesh.hpp"
#include "mixmax/util.hpp"
#include "mixmax/young.hpp"

using namespace mixmax;

namespace {

// Independent naive overlap integral: samples cube/cell overlaps in plain
// double arithmetic with no unit trick and no compensation.
double naive_integrate(const MeshFn& f, const DyadicCube& q) {
  CubeGeom g = cube_geom(f, q);
  if (g.empty) return 0.0;
  double unit = f.cell_side() / 3.0;
  double lo0 = static_cast<double>(g.lo[0]) * unit, hi0 = static_cast<double>(g.hi[0]) * unit;
  double sum = 0.0;
  int N = f.cells_per_axis();
  double h = f.cell_side();
  if (f.n() == 1) {
    for (int c = 0; c < N; ++c) {
      double a = std::max(lo0, c * h), b = std::min(hi0, (c + 1) * h);
      if (b > a) sum += f.at(c, 0) * (b - a);
    }
    return sum;
  }
  double lo1 = static_cast<double>(g.lo[1]) * unit, hi1 = static_cast<double>(g.hi[1]) * unit;
  for (int cy = 0; cy < N; ++cy) {
    double ay = std::max(lo1, cy * h), by = std::min(hi1, (cy + 1) * h);
    if (by <= ay) continue;
    for (int cx = 0; cx < N; ++cx) {
      double ax = std::max(lo0, cx * h), bx = std::min(hi0, (cx + 1) * h);
      if (bx > ax) sum += f.at(cx, cy) * (bx - ax) * (by - ay);
    }
  }
  return sum;
}

MeshFn random_mesh(const Box& box, int J, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::size_t count = static_cast<std::size_t>(1) << (box.n * J);
  std::vector<double> vals(count);
  for (auto& v : vals) v = static_cast<double>(rng.below(1024)) / 256.0;
  return MeshFn(box, J, std::move(vals));
}

}  // namespace

TEST_CASE("integrate basics") {
  Box box = Box::corner(1, 0);
  MeshFn one = MeshFn::constant(box, 4, 1.0);
  DyadicCube root{0, 0, {0, 0}};
  CHECK(integrate(one, root) == doctest::Approx(1.0).epsilon(1e-15));

  // f = 2 * indicator of the left half integrates to 1 over [0,1).
  MeshFn f = MeshFn::sample(box, 4, [](std::array<double, 2> x) {
    return x[0] < 0.5 ? 2.0 : 0.0;
  });
  CHECK(integrate(f, root) == doctest::Approx(1.0).epsilon(1e-15));

  // Disjoint cube integrates to zero.
  DyadicCube away{0, -4, {37, 0}};
  CHECK(integrate(one, away) == 0.0);
}

TEST_CASE("integrate equals the naive overlap oracle") {
  for (int n : {1, 2}) {
    Box box = Box::centered(n, 1);
    int J = n == 1 ? 6 : 4;
    MeshFn f = random_mesh(box, J, 42 + static_cast<std::uint64_t>(n));
    for (int grid = 0; grid < grid_count(n); ++grid) {
      for (const auto& q : enumerate_cubes(f, grid, box.K - J, box.K)) {
        double got = integrate(f, q);
        double want = naive_integrate(f, q);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("integrate is additive over siblings and monotone") {
  Box box = Box::corner(1, 2);
  MeshFn f = random_mesh(box, 6, 7);
  DyadicCube q{1, 0, {2, 0}};
  auto kids = cube_children(q, 1);
  double whole = integrate(f, q);
  double parts = 0.0;
  for (const auto& c : kids) parts += integrate(f, c);
  CHECK(whole == doctest::Approx(parts).epsilon(1e-13));

  MeshFn g = f.map([](double x) { return x + 0.5; });
  CHECK(integrate(g, q) >= whole);
}

TEST_CASE("essential_inf") {
  Box box = Box::corner(1, 0);
  MeshFn c = MeshFn::constant(box, 4, 3.25);
  DyadicCube root{0, 0, {0, 0}};
  CHECK(essential_inf(c, root) == 3.25);

  // |x| sampled at centers on J=4: first cell center is 2^-5.
  MeshFn absx = MeshFn::sample(box, 4, [](std::array<double, 2> x) { return std::abs(x[0]); });
  CHECK(essential_inf(absx, root) == doctest::Approx(std::ldexp(1.0, -5)));

  // A single small cell inside the cube dominates the infimum.
  std::vector<double> vals(16, 1.0);
  vals[9] = 0.125;
  MeshFn dip(box, 4, vals);
  CHECK(essential_inf(dip, root) == 0.125);
}

TEST_CASE("power weights at centers") {
  MeshFn flat = power_weight(Box::corner(1, 0), 4, 0.0);
  CHECK(flat.min_value() == 1.0);
  CHECK(flat.max_value() == 1.0);

  MeshFn w = power_weight(Box::centered(1, 1), 1, 1.0);
  CHECK(w.at(0, 0) == doctest::Approx(0.5));
  CHECK(w.at(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("cube enumeration counts") {
  Box box = Box::corner(1, 0);
  MeshFn f = MeshFn::constant(box, 2, 1.0);
  auto grid0 = enumerate_cubes(f, 0, -2, 0);
  CHECK(grid0.size() == 4 + 2 + 1);
  CHECK(grid_count(2) == 9);
  CHECK_THROWS_AS(enumerate_cubes(f, 7, -2, 0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_cubes(f, 0, -3, 0), std::invalid_argument);

  // Shifted grids at level k cover the box with one extra cube.
  for (int g : {1, 2}) {
    auto cubes = enumerate_cubes(f, g, 0, 0);
    CHECK(cubes.size() == 2);
  }

  // Brute-force count oracle: every level-k cube with admissible shift that
  // meets [0, 2^K) appears exactly once.
  MeshFn f3 = MeshFn::constant(box, 3, 1.0);
  for (int g : {0, 1, 2}) {
    for (int k = -3; k <= 0; ++k) {
      auto cubes = enumerate_cubes(f3, g, k, k);
      std::size_t expect = 0;
      double side = std::ldexp(1.0, k);
      double shift = ((k % 2) == 0 ? 1.0 : -1.0) * g * side / 3.0;
      for (long long m = -8; m <= 8; ++m) {
        double lo = m * side + shift, hi = lo + side;
        if (hi > 0.0 && lo < 1.0) ++expect;
      }
      CHECK(cubes.size() == expect);
    }
  }
}

TEST_CASE("each grid level partitions the box") {
  for (int n : {1, 2}) {
    Box box = Box::centered(n, 1);
    int J = n == 1 ? 5 : 3;
    MeshFn f = MeshFn::constant(box, J, 1.0);
    double vol = n == 1 ? box.side() : box.side() * box.side();
    for (int g = 0; g < grid_count(n); ++g) {
      for (int k = box.K - J; k <= box.K; ++k) {
        auto cubes = enumerate_cubes(f, g, k, k);
        double total = 0.0;
        for (const auto& q : cubes) total += cube_measure(f, q);
        CHECK(total == doctest::Approx(vol).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("same-grid cubes are nested or disjoint") {
  Box box = Box::centered(1, 1);
  MeshFn f = MeshFn::constant(box, 5, 1.0);
  for (int g : {0, 1, 2}) {
    auto cubes = enumerate_cubes(f, g, box.K - 5, box.K);
    for (const auto& a : cubes) {
      CubeGeom ga = cube_geom(f, a);
      for (const auto& b : cubes) {
        CubeGeom gb = cube_geom(f, b);
        long long lo = std::max(ga.lo[0], gb.lo[0]);
        long long hi = std::min(ga.hi[0], gb.hi[0]);
        if (hi <= lo) continue;  // disjoint within the box
        bool a_in_b = gb.lo[0] <= ga.lo[0] && ga.hi[0] <= gb.hi[0];
        bool b_in_a = ga.lo[0] <= gb.lo[0] && gb.hi[0] <= ga.hi[0];
        CHECK((a_in_b || b_in_a));
      }
    }
  }
}

TEST_CASE("children tile their parent exactly") {
  Box box = Box::centered(2, 2);
  MeshFn f = MeshFn::constant(box, 4, 1.0);
  for (int g : {0, 4, 8}) {
    for (const auto& q : enumerate_cubes(f, g, 0, 1)) {
      if (q.k == box.K - 4) continue;
      double total = 0.0;
      for (const auto& c : cube_children(q, 2)) {
        CHECK(cube_contains(f, q, c));
        CHECK(cube_parent(c, 2) == q);
        total += cube_measure(f, c);
      }
      CHECK(total == doctest::Approx(cube_measure(f, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("pointwise maps") {
  Box box = Box::corner(1, 0);
  MeshFn f = MeshFn::constant(box, 3, 2.0);
  CHECK(f.map([](double x) { return x; }).at(0, 0) == 2.0);
  CHECK(f.map(YoungFn::power(2)).at(0, 0) == 4.0);
  MeshFn r = random_mesh(box, 3, 11);
  YoungFn phi = YoungFn::llogl(1, 1);
  MeshFn m = r.map(phi);
  for (std::size_t i = 0; i < r.cell_count(); ++i) CHECK(m.at(i) == phi(r.at(i)));
  CHECK_THROWS_AS(f.multiply(MeshFn::constant(box, 4, 1.0)), std::invalid_argument);
}

TEST_CASE("binary and csv round trips") {
  Box box = Box::centered(2, 1);
  MeshFn f = random_mesh(box, 3, 99);
  auto path = std::filesystem::temp_directory_path() / "mixmax_mesh_test.bin";
  f.save_binary(path.string());
  MeshFn g = MeshFn::load_binary(path.string());
  CHECK(g.box() == f.box());
  CHECK(g.J() == f.J());
  CHECK(g.values() == f.values());
  std::filesystem::remove(path);

  std::ostringstream os;
  f.save_csv(os);
  std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 64);
}
