#pragma once

#include <cstdint>

#include "fbl/fbl_norm.hpp"

namespace fbl {

// Regular lattices on the 2n facets of the cube sphere {x* : |x*|_inf = 1}.
// Facet (c, s) fixes coordinate c to s and runs the other coordinates over
// -1 + 2k/resolution, k = 0..resolution. Points are stored as columns.
struct SphereGrid {
  int n = 0;
  int resolution = 0;
  Mat points;
  double covering_radius = 0.0;  // 1 / resolution in the sup metric

  Eigen::Index facet_size() const { return points.cols() / (2 * n); }
};

SphereGrid make_sphere_grid(int n, int resolution);

// 400 for n = 2, 64 for n = 3, 16 for n = 4, 8 beyond.
int default_grid_resolution(int n);

struct SupBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Certified bounds on sup |f| over the cube sphere: grid maximum, plus the
// Lipschitz constant times the covering radius.
SupBounds ck_sup_norm(const LatticeExpr& f, const SphereGrid& grid);

struct SandwichReport {
  double norm_lower = 0.0;
  double norm_upper = 0.0;
  double sup_lower = 0.0;
  double sup_upper = 0.0;
  bool upper_ok = false;  // sup_lower <= norm_upper
  bool lower_ok = false;  // norm_lower <= n * sup_upper
  bool passed() const { return upper_ok && lower_ok; }
};

SandwichReport sandwich_check(const SpaceModel& space, const LatticeExpr& f, int m_max, int budget,
                              const SphereGrid& grid, std::uint64_t seed = 0);

Json to_json(const SandwichReport& report);

}  // namespace fbl
