#pragma once

#include <optional>
#include <vector>

#include "fbl/c_of_k.hpp"
#include "fbl/fbl_norm.hpp"

namespace fbl {

struct DualTerm {
  double gamma = 0.0;
  Vec point;
};

// sum_i gamma_i delta_{x_i*}, acting on FBL[E] by evaluation.
struct DualFunctional {
  std::vector<DualTerm> terms;
};

DualFunctional dual_from_json(const Json& j);
Json to_json(const DualFunctional& a);

double apply(const DualFunctional& a, const LatticeExpr& f);

struct Bracket {
  double lower = 0.0;  // dual norm of sum_i gamma_i x_i*
  double upper = 0.0;  // max over signs mu of dual norm of sum_i mu_i gamma_i x_i*
};

Bracket bracket(const SpaceModel& space, const DualFunctional& a);

// (1 / (n d)) sum_i |gamma_i| dual_norm(x_i*), a lower bound on the norm of a
// when the points are pairwise independent and d bounds the Banach-Mazur
// distance to l1(n). Terms with gamma = 0 or x* = 0 are ignored.
double dirac_separation_value(const SpaceModel& space, const DualFunctional& a, double d);

constexpr double kIndependenceTolerance = 1e-9;

// True when no two of the vectors are parallel (|sin angle| < tolerance).
bool pairwise_independent(const std::vector<Vec>& vs, double tol = kIndependenceTolerance);

// g = sum_i s_i b_i with b_i = max(M_n - |x* - p_i M_n|_inf / theta, 0), where
// M_n is the sup of the coordinate moduli. On the cube sphere b_i is the
// tent of radius theta around p_i, so |g| <= M_n and ||g|| <= n.
struct SignInterpolant {
  LatticeExpr expr;
  std::vector<Vec> points;
  std::vector<int> signs;
  double theta = 0.0;
  int grid_resolution = 0;
  double grid_sup = 0.0;       // max |g| over the verification grid
  double certified_sup = 0.0;  // grid_sup + Lipschitz slack
};

SignInterpolant sign_interpolant(const SpaceModel& space, const std::vector<Vec>& points,
                                 const std::vector<int>& signs, std::optional<double> theta = std::nullopt,
                                 std::optional<int> grid_resolution = std::nullopt);

struct DualWitness {
  double value = 0.0;      // apply(a, witness)
  LatticeExpr witness;     // (1/n) g, norm at most 1
  SignInterpolant interpolant;
};

// Constructive lower bound on the norm of a over l1(n).
DualWitness dual_lower_via_witness(const SpaceModel& space, const DualFunctional& a,
                                   std::optional<double> theta = std::nullopt);

Json to_json(const SignInterpolant& g);

}  // namespace fbl
