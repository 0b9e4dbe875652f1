#include "fbl/c_of_k.hpp"

#include <algorithm>
#include <cmath>

#include "fbl/error.hpp"
#include "fbl/parallel.hpp"

namespace fbl {

SphereGrid make_sphere_grid(int n, int resolution) {
  if (n < 1 || n > 8) throw InputError("sphere grid: dimension must be in [1, 8]");
  if (resolution < 1) throw InputError("sphere grid: resolution must be positive");
  const int side = resolution + 1;
  Eigen::Index per_facet = 1;
  for (int i = 1; i < n; ++i) per_facet *= side;
  if (per_facet > 20'000'000 / (2 * n)) throw InputError("sphere grid: too many points");

  SphereGrid g;
  g.n = n;
  g.resolution = resolution;
  g.covering_radius = 1.0 / resolution;
  g.points.resize(n, 2 * n * per_facet);
  Eigen::Index col = 0;
  std::vector<int> idx(std::max(n - 1, 1));
  for (int c = 0; c < n; ++c)
    for (int s : {1, -1})
      for (Eigen::Index k = 0; k < per_facet; ++k, ++col) {
        Eigen::Index rest = k;
        for (int i = 0; i < n - 1; ++i) {
          idx[i] = static_cast<int>(rest % side);
          rest /= side;
        }
        for (int i = 0, j = 0; i < n; ++i) {
          if (i == c)
            g.points(i, col) = s;
          else
            g.points(i, col) = -1.0 + 2.0 * idx[j++] / resolution;
        }
      }
  return g;
}

int default_grid_resolution(int n) {
  switch (n) {
    case 1:
    case 2: return 400;
    case 3: return 64;
    case 4: return 16;
    default: return 8;
  }
}

SupBounds ck_sup_norm(const LatticeExpr& f, const SphereGrid& grid) {
  if (f.dim() != grid.n)
    throw InputError("ck_sup_norm: expression dimension " + std::to_string(f.dim()) + " vs grid " +
                     std::to_string(grid.n));
  const Eigen::Index per = grid.facet_size();
  const auto facet_max = parallel_map<double>(2 * grid.n, [&](std::size_t facet) {
    double best = 0.0;
    Vec p(grid.n);
    for (Eigen::Index k = 0; k < per; ++k) {
      p = grid.points.col(static_cast<Eigen::Index>(facet) * per + k);
      best = std::max(best, std::abs(f.eval(p)));
    }
    return best;
  });
  SupBounds b;
  for (double v : facet_max) b.lower = std::max(b.lower, v);
  b.upper = b.lower + lipschitz_bound(SpaceModel::l1(grid.n), f) * grid.covering_radius;
  return b;
}

SandwichReport sandwich_check(const SpaceModel& space, const LatticeExpr& f, int m_max, int budget,
                              const SphereGrid& grid, std::uint64_t seed) {
  if (space.kind() != SpaceKind::L1) throw InputError("sandwich_check: requires an l1 space");
  SearchOptions opts;
  opts.m = m_max;
  opts.budget = budget;
  opts.seed = seed;
  SandwichReport r;
  r.norm_lower = norm_lower(space, f, opts).lower;
  r.norm_upper = norm_upper_recursive(space, f);
  const auto s = ck_sup_norm(f, grid);
  r.sup_lower = s.lower;
  r.sup_upper = s.upper;
  const double rel = 1e-12;
  r.upper_ok = r.sup_lower <= r.norm_upper * (1 + rel);
  r.lower_ok = r.norm_lower <= space.dim() * r.sup_upper * (1 + rel);
  return r;
}

Json to_json(const SandwichReport& r) {
  return {{"norm_lower", r.norm_lower}, {"norm_upper", r.norm_upper}, {"sup_lower", r.sup_lower},
          {"sup_upper", r.sup_upper},   {"upper_ok", r.upper_ok},     {"lower_ok", r.lower_ok}};
}

}  // namespace fbl
