#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbl/json_io.hpp"

namespace fbl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class SpaceKind { L1, L2, Linf, Polytope };

std::string to_string(SpaceKind kind);

// A finite-dimensional real normed space E. Polytope spaces have unit ball
// {x : |<a_j, x>| <= 1 for all j}; the facet normals must span R^n.
class SpaceModel {
 public:
  static constexpr int kMaxPolytopeDim = 6;
  static constexpr int kMaxPolytopeFacets = 32;

  static SpaceModel l1(int dim);
  static SpaceModel l2(int dim);
  static SpaceModel linf(int dim);
  static SpaceModel polytope(std::vector<Vec> facets);

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<Vec>& facets() const { return facets_; }
  std::string label() const;  // e.g. "l1(2)"

 private:
  SpaceModel(SpaceKind kind, int dim, std::vector<Vec> facets)
      : kind_(kind), dim_(dim), facets_(std::move(facets)) {}

  SpaceKind kind_;
  int dim_;
  std::vector<Vec> facets_;
};

SpaceModel space_from_json(const Json& j);
Json to_json(const SpaceModel& space);

double norm(const SpaceModel& space, const Vec& x);
double dual_norm(const SpaceModel& space, const Vec& xs);

// A unit dual vector attaining <x*, x> = norm(x). When the norming face has
// several extreme points, the lexicographically smallest one is returned.
Vec norming_functional(const SpaceModel& space, const Vec& x);

enum class Side { Primal, Dual };

// Gaussian directions rescaled to the unit sphere of E (or E*).
std::vector<Vec> sample_sphere(const SpaceModel& space, Side side, int count, std::uint64_t seed);

// Extreme points of the dual unit ball when there are finitely many of them
// (L1: sign vectors, Linf: +-e_c, Polytope: +-a_j normalized); empty for L2.
std::vector<Vec> dual_ball_extreme_points(const SpaceModel& space);

// An isomorphism T : l1(n) -> E with its inverse and operator norms.
struct OperatorPair {
  Mat T;
  Mat Tinv;
  double norm_T = 0.0;     // ||T : l1 -> E||
  double norm_Tinv = 0.0;  // ||T^{-1} : E -> l1||
  double cost = 0.0;       // norm_T * norm_Tinv
};

// ||T||_{l1->E} is the largest column norm; ||S||_{E->l1} is the largest dual
// norm of S^T s over sign vectors s.
double operator_norm_from_l1(const SpaceModel& space, const Mat& T);
double operator_norm_to_l1(const SpaceModel& space, const Mat& S);

// Builds the pair for T, or throws InputError if T is not numerically invertible.
OperatorPair make_operator_pair(const SpaceModel& space, const Mat& T);

struct BanachMazurBound {
  double distance = 0.0;
  OperatorPair witness;
};

struct BanachMazurOptions {
  int restarts = 6;
  int iterations = 300;
  std::uint64_t seed = 0x5eedULL;
};

// Certified upper bound on the multiplicative Banach-Mazur distance between
// l1(n) and E. distance always equals witness.cost.
BanachMazurBound bm_distance_upper(const SpaceModel& space, const BanachMazurOptions& options = {});

// 2 / (n d) with d = bm_distance_upper(space).distance. Requires dim >= 2.
double alpha_constant(const SpaceModel& space);

}  // namespace fbl
