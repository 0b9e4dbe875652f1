#include "fbl/dual_functionals.hpp"

#include <algorithm>
#include <cmath>

#include "fbl/error.hpp"

namespace fbl {

DualFunctional dual_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
    throw InputError("dual functional: expected {\"terms\": [...]}");
  DualFunctional a;
  int dim = -1;
  for (std::size_t i = 0; i < j["terms"].size(); ++i) {
    const auto& t = j["terms"][i];
    const std::string where = "dual functional at /terms/" + std::to_string(i);
    if (!t.is_object() || !t.contains("gamma") || !t["gamma"].is_number() || !t.contains("xs"))
      throw InputError(where + ": expected {\"gamma\": number, \"xs\": [...]}");
    DualTerm term{t["gamma"].get<double>(), vector_from_json(t["xs"], where + "/xs")};
    if (dim >= 0 && term.point.size() != dim) throw InputError(where + ": inconsistent dimension");
    dim = static_cast<int>(term.point.size());
    a.terms.push_back(std::move(term));
  }
  return a;
}

Json to_json(const DualFunctional& a) {
  Json terms = Json::array();
  for (const auto& t : a.terms) terms.push_back({{"gamma", t.gamma}, {"xs", to_json(t.point)}});
  return {{"terms", terms}};
}

double apply(const DualFunctional& a, const LatticeExpr& f) {
  double s = 0.0;
  for (const auto& t : a.terms) {
    if (t.point.size() != f.dim()) throw InputError("apply: dimension mismatch");
    s += t.gamma * f.eval(t.point);
  }
  return s;
}

namespace {

void check_dims(const SpaceModel& space, const DualFunctional& a, const char* who) {
  for (const auto& t : a.terms)
    if (t.point.size() != space.dim())
      throw InputError(std::string(who) + ": point of length " + std::to_string(t.point.size()) + " in space " +
                       space.label());
}

double sup_distance(const Vec& a, const Vec& b) { return (a - b).lpNorm<Eigen::Infinity>(); }

double sine_to(const Vec& u, const Vec& v) {
  const Vec r = v - (u.dot(v) / u.squaredNorm()) * u;
  return r.norm() / v.norm();
}

}  // namespace

Bracket bracket(const SpaceModel& space, const DualFunctional& a) {
  check_dims(space, a, "bracket");
  if (static_cast<int>(a.terms.size()) > kMaxSignEnumeration)
    throw InputError("bracket: at most " + std::to_string(kMaxSignEnumeration) + " terms");
  DualTuple scaled;
  Vec sum = Vec::Zero(space.dim());
  for (const auto& t : a.terms) {
    scaled.push_back(t.gamma * t.point);
    sum += scaled.back();
  }
  return {dual_norm(space, sum), max_signed_dual_norm(space, scaled)};
}

bool pairwise_independent(const std::vector<Vec>& vs, double tol) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      if (std::min(sine_to(vs[i], vs[j]), sine_to(vs[j], vs[i])) < tol) return false;
  return true;
}

double dirac_separation_value(const SpaceModel& space, const DualFunctional& a, double d) {
  check_dims(space, a, "dirac_separation_value");
  if (!(d >= 1.0)) throw InputError("dirac_separation_value: distance bound must be >= 1");
  std::vector<Vec> points;
  double s = 0.0;
  for (const auto& t : a.terms) {
    if (t.gamma == 0.0 || t.point.isZero(0.0)) continue;
    points.push_back(t.point);
    s += std::abs(t.gamma) * dual_norm(space, t.point);
  }
  if (!pairwise_independent(points)) throw InputError("dirac_separation_value: parallel pair of points");
  return s / (space.dim() * d);
}

namespace {

// max_c |x*_c - p_c M_n(x*)|, which is |x* - p|_inf on the cube sphere.
LatticeExpr sup_distance_expr(const Vec& p, const LatticeExpr& mn) {
  const int n = static_cast<int>(p.size());
  std::vector<LatticeExpr> parts;
  for (int c = 0; c < n; ++c) {
    const auto coord = LatticeExpr::delta(Vec::Unit(n, c));
    if (p[c] == 0.0)
      parts.push_back(LatticeExpr::abs(coord));
    else
      parts.push_back(LatticeExpr::abs(LatticeExpr::add({coord, mn.scaled(-p[c])})));
  }
  return n == 1 ? parts[0] : LatticeExpr::sup(std::move(parts));
}

}  // namespace

SignInterpolant sign_interpolant(const SpaceModel& space, const std::vector<Vec>& points,
                                 const std::vector<int>& signs, std::optional<double> theta,
                                 std::optional<int> grid_resolution) {
  if (space.kind() != SpaceKind::L1) throw InputError("sign_interpolant: requires an l1 space");
  if (points.empty()) throw InputError("sign_interpolant: no points");
  if (points.size() != signs.size()) throw InputError("sign_interpolant: points and signs differ in length");
  const int n = space.dim();
  std::vector<Vec> ps;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != n) throw InputError("sign_interpolant: dimension mismatch");
    if (signs[i] != 1 && signs[i] != -1) throw InputError("sign_interpolant: signs must be +1 or -1");
    const double r = points[i].lpNorm<Eigen::Infinity>();
    if (std::abs(r - 1.0) > 1e-12) throw InputError("sign_interpolant: point not on the unit sphere");
    ps.push_back(points[i] / r);
  }
  double min_dist = 2.0;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const double d = sup_distance(ps[i], ps[j]);
      if (d == 0.0) throw InputError("sign_interpolant: duplicate point");
      min_dist = std::min(min_dist, d);
    }
  const double th = theta.value_or(std::min(0.5, min_dist / 4));
  if (!(th > 0.0 && th < 1.0)) throw InputError("sign_interpolant: sharpness must lie in (0, 1)");
  if (2 * th > min_dist)
    throw InputError("sign_interpolant: points closer than 2 theta (" + format_number(min_dist) + ")");

  const auto mn = max_abs_coordinates(n);
  const auto zero = zero_expr(n);
  std::vector<LatticeExpr> bumps;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto tent = LatticeExpr::add({mn, sup_distance_expr(ps[i], mn).scaled(-1.0 / th)});
    bumps.push_back(LatticeExpr::sup({tent, zero}).scaled(signs[i]));
  }
  SignInterpolant g{bumps.size() == 1 ? bumps[0] : LatticeExpr::add(std::move(bumps)), ps, signs, th};

  for (std::size_t j = 0; j < ps.size(); ++j)
    if (std::abs(g.expr.eval(ps[j]) - signs[j]) > 1e-9)
      throw CertificationError("sign_interpolant: value at point " + std::to_string(j) + " is " +
                               format_number(g.expr.eval(ps[j])));
  g.grid_resolution = grid_resolution.value_or(default_grid_resolution(n));
  const auto bounds = ck_sup_norm(g.expr, make_sphere_grid(n, g.grid_resolution));
  g.grid_sup = bounds.lower;
  g.certified_sup = bounds.upper;
  if (g.grid_sup > 1.0 + 1e-12)
    throw CertificationError("sign_interpolant: |g| exceeds M_n on the grid (" + format_number(g.grid_sup) + ")");
  return g;
}

DualWitness dual_lower_via_witness(const SpaceModel& space, const DualFunctional& a, std::optional<double> theta) {
  if (space.kind() != SpaceKind::L1) throw InputError("dual_lower_via_witness: requires an l1 space");
  check_dims(space, a, "dual_lower_via_witness");
  std::vector<Vec> points;
  std::vector<int> signs;
  for (const auto& t : a.terms) {
    if (t.gamma == 0.0 || t.point.isZero(0.0)) continue;
    points.push_back(t.point / t.point.lpNorm<Eigen::Infinity>());
    signs.push_back(t.gamma > 0 ? 1 : -1);
  }
  if (points.empty()) throw InputError("dual_lower_via_witness: functional has no nonzero terms");
  auto g = sign_interpolant(space, points, signs, theta);
  auto f = g.expr.scaled(1.0 / space.dim());
  return {apply(a, f), f, std::move(g)};
}

Json to_json(const SignInterpolant& g) {
  return {{"expr", to_json(g.expr)},
          {"points", to_json(g.points)},
          {"signs", g.signs},
          {"theta", g.theta},
          {"grid_resolution", g.grid_resolution},
          {"grid_sup", g.grid_sup},
          {"certified_sup", g.certified_sup}};
}

}  // namespace fbl
