#include "fbl/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbl/error.hpp"
#include "fbl/rng.hpp"
#include "fbl/simplex.hpp"

namespace fbl {

namespace {

void check_dim(const SpaceModel& space, const Vec& v, const char* what) {
  if (v.size() != space.dim())
    throw InputError(std::string(what) + ": dimension mismatch (got " + std::to_string(v.size()) +
                     ", space " + space.label() + ")");
}

bool lex_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

double polytope_dual_norm(const SpaceModel& space, const Vec& xs) {
  // min sum |lambda_j| s.t. sum lambda_j a_j = xs, with lambda = p - q, p, q >= 0.
  const int n = space.dim();
  const int k = static_cast<int>(space.facets().size());
  Mat A(n, 2 * k);
  for (int j = 0; j < k; ++j) {
    A.col(j) = space.facets()[j];
    A.col(k + j) = -space.facets()[j];
  }
  const LpSolution sol = solve_lp(A, xs, Vec::Ones(2 * k));
  if (sol.status != LpStatus::Optimal)
    throw InputError("polytope dual norm LP has no optimum: facets do not span the space");
  return sol.objective;
}

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::L1: return "l1";
    case SpaceKind::L2: return "l2";
    case SpaceKind::Linf: return "linf";
    case SpaceKind::Polytope: return "polytope";
  }
  return "?";
}

SpaceModel SpaceModel::l1(int dim) {
  if (dim < 1) throw InputError("space dimension must be >= 1");
  return SpaceModel(SpaceKind::L1, dim, {});
}

SpaceModel SpaceModel::l2(int dim) {
  if (dim < 1) throw InputError("space dimension must be >= 1");
  return SpaceModel(SpaceKind::L2, dim, {});
}

SpaceModel SpaceModel::linf(int dim) {
  if (dim < 1) throw InputError("space dimension must be >= 1");
  return SpaceModel(SpaceKind::Linf, dim, {});
}

SpaceModel SpaceModel::polytope(std::vector<Vec> facets) {
  if (facets.empty()) throw InputError("polytope needs at least one facet");
  const auto dim = facets.front().size();
  if (dim < 1 || dim > kMaxPolytopeDim)
    throw InputError("polytope dimension must be in [1, " + std::to_string(kMaxPolytopeDim) + "]");
  if (static_cast<int>(facets.size()) > kMaxPolytopeFacets)
    throw InputError("polytope has more than " + std::to_string(kMaxPolytopeFacets) + " facets");
  Mat A(facets.size(), dim);
  for (std::size_t j = 0; j < facets.size(); ++j) {
    if (facets[j].size() != dim) throw InputError("polytope facets have inconsistent lengths");
    if (!facets[j].allFinite()) throw InputError("polytope facet is not finite");
    A.row(static_cast<Eigen::Index>(j)) = facets[j].transpose();
  }
  if (A.fullPivLu().rank() < dim)
    throw InputError("polytope facets do not span the space (unbounded ball)");
  return SpaceModel(SpaceKind::Polytope, static_cast<int>(dim), std::move(facets));
}

std::string SpaceModel::label() const {
  return to_string(kind_) + "(" + std::to_string(dim_) + ")";
}

SpaceModel space_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw InputError("space descriptor: missing string field \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "polytope") {
    if (!j.contains("facets")) throw InputError("space descriptor: polytope needs \"facets\"");
    SpaceModel s = SpaceModel::polytope(vectors_from_json(j["facets"], "/facets"));
    if (j.contains("dim") && j["dim"].get<int>() != s.dim())
      throw InputError("space descriptor: \"dim\" disagrees with facet length");
    return s;
  }
  if (j.contains("facets")) throw InputError("space descriptor: \"facets\" only allowed for polytope");
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw InputError("space descriptor: missing integer field \"dim\"");
  const int dim = j["dim"].get<int>();
  if (kind == "l1") return SpaceModel::l1(dim);
  if (kind == "l2") return SpaceModel::l2(dim);
  if (kind == "linf") return SpaceModel::linf(dim);
  throw InputError("space descriptor: unknown kind \"" + kind + "\"");
}

Json to_json(const SpaceModel& space) {
  Json j = {{"kind", to_string(space.kind())}, {"dim", space.dim()}};
  if (space.kind() == SpaceKind::Polytope) j["facets"] = to_json(space.facets());
  return j;
}

double norm(const SpaceModel& space, const Vec& x) {
  check_dim(space, x, "norm");
  switch (space.kind()) {
    case SpaceKind::L1: return x.lpNorm<1>();
    case SpaceKind::L2: return x.norm();
    case SpaceKind::Linf: return x.lpNorm<Eigen::Infinity>();
    case SpaceKind::Polytope: {
      double best = 0.0;
      for (const auto& a : space.facets()) best = std::max(best, std::abs(a.dot(x)));
      return best;
    }
  }
  return 0.0;
}

double dual_norm(const SpaceModel& space, const Vec& xs) {
  check_dim(space, xs, "dual_norm");
  switch (space.kind()) {
    case SpaceKind::L1: return xs.lpNorm<Eigen::Infinity>();
    case SpaceKind::L2: return xs.norm();
    case SpaceKind::Linf: return xs.lpNorm<1>();
    case SpaceKind::Polytope: return polytope_dual_norm(space, xs);
  }
  return 0.0;
}

Vec norming_functional(const SpaceModel& space, const Vec& x) {
  check_dim(space, x, "norming_functional");
  if (x.isZero(0.0)) throw InputError("norming_functional: zero vector has no norming functional");
  const int n = space.dim();
  Vec out = Vec::Zero(n);
  switch (space.kind()) {
    case SpaceKind::L1:
      for (int c = 0; c < n; ++c) out[c] = x[c] > 0 ? 1.0 : -1.0;
      return out;
    case SpaceKind::L2:
      return x / x.norm();
    case SpaceKind::Linf: {
      const double peak = x.lpNorm<Eigen::Infinity>();
      int last = -1;
      for (int c = 0; c < n; ++c) {
        if (std::abs(x[c]) != peak) continue;
        if (x[c] < 0) {
          out[c] = -1.0;
          return out;
        }
        last = c;
      }
      out[last] = 1.0;
      return out;
    }
    case SpaceKind::Polytope: {
      const double peak = norm(space, x);
      bool found = false;
      for (const auto& a : space.facets()) {
        const double v = a.dot(x);
        if (std::abs(v) != peak) continue;
        Vec cand = v > 0 ? Vec(a) : Vec(-a);
        if (!found || lex_less(cand, out)) out = cand;
        found = true;
      }
      return out;
    }
  }
  return out;
}

std::vector<Vec> sample_sphere(const SpaceModel& space, Side side, int count, std::uint64_t seed) {
  if (count < 1) throw InputError("sample_sphere: count must be >= 1");
  Rng rng(seed);
  std::vector<Vec> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Vec g = rng.gaussian_vector(space.dim());
    const double r = side == Side::Primal ? norm(space, g) : dual_norm(space, g);
    if (r > 0.0) out.push_back(g / r);
  }
  return out;
}

std::vector<Vec> dual_ball_extreme_points(const SpaceModel& space) {
  const int n = space.dim();
  std::vector<Vec> out;
  switch (space.kind()) {
    case SpaceKind::L1: {
      if (n > 6) break;
      for (int mask = 0; mask < (1 << n); ++mask) {
        Vec s(n);
        for (int c = 0; c < n; ++c) s[c] = (mask >> c) & 1 ? -1.0 : 1.0;
        out.push_back(s);
      }
      break;
    }
    case SpaceKind::Linf:
      for (int c = 0; c < n; ++c) {
        out.push_back(Vec::Unit(n, c));
        out.push_back(-Vec::Unit(n, c));
      }
      break;
    case SpaceKind::Polytope:
      for (const auto& a : space.facets()) {
        const double d = dual_norm(space, a);
        if (d <= 0) continue;
        out.push_back(a / d);
        out.push_back(-a / d);
      }
      break;
    case SpaceKind::L2:
      break;
  }
  return out;
}

double operator_norm_from_l1(const SpaceModel& space, const Mat& T) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < T.cols(); ++j) best = std::max(best, norm(space, T.col(j)));
  return best;
}

double operator_norm_to_l1(const SpaceModel& space, const Mat& S) {
  // ||S y||_1 = max_s <s, S y> = max_s <S^T s, y>; s and -s give the same value.
  const int n = static_cast<int>(S.rows());
  double best = 0.0;
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    Vec s(n);
    s[0] = 1.0;
    for (int c = 1; c < n; ++c) s[c] = (mask >> (c - 1)) & 1 ? -1.0 : 1.0;
    best = std::max(best, dual_norm(space, S.transpose() * s));
  }
  return best;
}

OperatorPair make_operator_pair(const SpaceModel& space, const Mat& T) {
  const int n = space.dim();
  if (T.rows() != n || T.cols() != n) throw InputError("operator pair: matrix has wrong shape");
  if (!T.allFinite()) throw InputError("operator pair: matrix is not finite");
  Eigen::FullPivLU<Mat> lu(T);
  if (!lu.isInvertible()) throw InputError("operator pair: matrix is singular");
  OperatorPair p;
  p.T = T;
  p.Tinv = lu.inverse();
  if ((p.T * p.Tinv - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
    throw InputError("operator pair: inverse not accurate to 1e-12");
  p.norm_T = operator_norm_from_l1(space, p.T);
  p.norm_Tinv = operator_norm_to_l1(space, p.Tinv);
  p.cost = p.norm_T * p.norm_Tinv;
  return p;
}

namespace {

Mat sylvester_hadamard(int n) {
  Mat h = Mat::Ones(1, 1);
  while (h.rows() < n) {
    const auto k = h.rows();
    Mat next(2 * k, 2 * k);
    next << h, h, h, -h;
    h = next;
  }
  return h;
}

double cost_or_inf(const SpaceModel& space, const Mat& T) {
  try {
    return make_operator_pair(space, T).cost;
  } catch (const InputError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

BanachMazurBound bm_distance_upper(const SpaceModel& space, const BanachMazurOptions& options) {
  const int n = space.dim();
  if (space.kind() == SpaceKind::L1) {
    BanachMazurBound b;
    b.witness = make_operator_pair(space, Mat::Identity(n, n));
    b.distance = b.witness.cost;
    return b;
  }

  std::vector<Mat> starts{Mat::Identity(n, n)};
  if ((n & (n - 1)) == 0 && n > 1) starts.push_back(sylvester_hadamard(n));
  Rng rng(options.seed);
  for (int r = 0; r < options.restarts; ++r) {
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    starts.push_back(g);
  }

  Mat best_T;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const Mat& start : starts) {
    Mat T = start;
    double cost = cost_or_inf(space, T);
    double step = 0.1 * std::max(1e-12, T.cwiseAbs().maxCoeff());
    int failures = 0;
    for (int it = 0; it < options.iterations && std::isfinite(cost); ++it) {
      Mat cand = T;
      cand(rng.below(n), rng.below(n)) += step * rng.normal();
      const double c = cost_or_inf(space, cand);
      if (c < cost) {
        T = cand;
        cost = c;
        failures = 0;
      } else if (++failures >= 2 * n * n) {
        step *= 0.5;
        failures = 0;
      }
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_T = T;
    }
  }

  BanachMazurBound b;
  b.witness = make_operator_pair(space, best_T);
  b.distance = b.witness.cost;
  return b;
}

double alpha_constant(const SpaceModel& space) {
  if (space.dim() < 2) throw InputError("alpha_constant: requires dim >= 2");
  return 2.0 / (space.dim() * bm_distance_upper(space).distance);
}

}  // namespace fbl
