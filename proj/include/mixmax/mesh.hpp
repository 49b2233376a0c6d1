#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mixmax/util.hpp"

namespace mixmax {

class YoungFn;

// Finite computational domain: an axis-aligned box of dyadic side 2^K.
struct Box {
  int n = 1;  // dimension, 1 or 2
  int K = 0;  // side length 2^K
  std::array<double, 2> origin{0.0, 0.0};

  double side() const { return std::ldexp(1.0, K); }

  // Box centered at 0. The origin lands on a cell corner for every J >= 1,
  // so power weights |x|^beta never see x = 0 at a cell center.
  static Box centered(int n, int K);
  // Box with lower corner at 0.
  static Box corner(int n, int K);
};

bool operator==(const Box& a, const Box& b);

// A cube of side 2^k from one of the 3^n shifted dyadic grids. Grid 0 is the
// grid of the mesh itself (anchored at the box origin); the other grids are
// one-third-trick translates. Coordinates are the per-axis integer positions
// of the cube within its grid.
struct DyadicCube {
  int grid_id = 0;
  int k = 0;
  std::array<long long, 2> coords{0, 0};
};

bool operator==(const DyadicCube& a, const DyadicCube& b);

// Nonnegative piecewise-constant function on a uniform 2^J x ... x 2^J mesh.
// Immutable after construction.
class MeshFn {
 public:
  MeshFn(const Box& box, int J, std::vector<double> values);

  static MeshFn constant(const Box& box, int J, double c);
  static MeshFn sample(const Box& box, int J,
                       const std::function<double(std::array<double, 2>)>& fn);

  const Box& box() const { return box_; }
  int n() const { return box_.n; }
  int J() const { return J_; }
  int cells_per_axis() const { return 1 << J_; }
  std::size_t cell_count() const { return values_.size(); }
  double cell_side() const { return std::ldexp(1.0, box_.K - J_); }
  double cell_volume() const;

  double at(std::size_t flat) const { return values_[flat]; }
  double at(int cx, int cy) const {
    return values_[static_cast<std::size_t>(cy) * (1u << J_) + static_cast<std::size_t>(cx)];
  }
  const std::vector<double>& values() const { return values_; }
  std::array<double, 2> cell_center(std::size_t flat) const;

  bool same_layout(const MeshFn& o) const { return box_ == o.box_ && J_ == o.J_; }

  // Pointwise maps; all return fresh meshes.
  MeshFn map(const std::function<double(double)>& fn) const;
  MeshFn map(const YoungFn& phi) const;
  MeshFn multiply(const MeshFn& g) const;
  MeshFn divide(const MeshFn& g) const;
  MeshFn add(const MeshFn& g) const;
  MeshFn pow(double e) const;
  MeshFn scale(double c) const;

  double max_value() const;
  double min_value() const;

  void save_binary(const std::string& path) const;
  static MeshFn load_binary(const std::string& path);
  void save_csv(std::ostream& os) const;

 private:
  Box box_;
  int J_;
  std::vector<double> values_;
};

// Cube geometry relative to a mesh, in integer units of cell_side/3. The
// one-third shifts are exact integers in these units, so overlaps with mesh
// cells are computed without rounding.
struct CubeGeom {
  std::array<long long, 2> lo{0, 0}, hi{0, 0};    // clipped to [0, 3N]
  std::array<int, 2> cell_lo{0, 0}, cell_hi{0, 0};  // overlapped cells, half-open
  bool empty = true;
  double measure = 0.0;  // |Q ∩ box|
  // Overlap of cell index c with the cube along axis a, in units (0..3).
  long long overlap(int axis, long long c) const {
    long long l = std::max(lo[axis], 3 * c), h = std::min(hi[axis], 3 * c + 3);
    return h > l ? h - l : 0;
  }
  bool contains_center(int axis, long long c) const {
    return 2 * lo[axis] <= 6 * c + 3 && 6 * c + 3 < 2 * hi[axis];
  }
};

CubeGeom cube_geom(const MeshFn& mesh, const DyadicCube& q);

// |Q ∩ box|; zero when disjoint.
double cube_measure(const MeshFn& mesh, const DyadicCube& q);

// Exact integral of f over Q ∩ box (compensated summation).
double integrate(const MeshFn& f, const DyadicCube& q);

// integrate / measure; throws when the intersection is empty.
double average(const MeshFn& f, const DyadicCube& q);

// Minimum cell value among cells with positive overlap with Q.
double essential_inf(const MeshFn& f, const DyadicCube& q);

// All cubes of the given grid with levels in [k_min, k_max] that intersect
// the box. Levels must lie in [K-J, K].
std::vector<DyadicCube> enumerate_cubes(const MeshFn& mesh, int grid_id, int k_min, int k_max);

// Family used by the weight scans and the all-grid maximal operator:
// every grid, all levels K-J..K.
std::vector<DyadicCube> full_cube_family(const MeshFn& mesh);

int grid_count(int n);  // 3^n

// Children of q at level k-1 (the nested one-third construction); parent at k+1.
std::vector<DyadicCube> cube_children(const DyadicCube& q, int n);
DyadicCube cube_parent(const DyadicCube& q, int n);

// Strict containment as subsets of R^n (same grid implies nested-or-disjoint).
bool cube_contains(const MeshFn& mesh, const DyadicCube& outer, const DyadicCube& inner);

// Cell-centered discretization of |x|^beta.
MeshFn power_weight(const Box& box, int J, double beta);

std::string cube_to_string(const DyadicCube& q);

}  // namespace mixmax
