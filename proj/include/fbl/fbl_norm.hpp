#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbl/lattice_expr.hpp"
#include "fbl/spaces.hpp"

namespace fbl {

// A finite list of dual vectors (x_1*, ..., x_m*). Zero vectors are allowed.
using DualTuple = std::vector<Vec>;

bool lex_less(const DualTuple& a, const DualTuple& b);

struct AdmissibilityVerdict {
  bool admissible = true;
  double gauge = 0.0;      // sup_{x in B_E} sum_i |x_i*(x)|
  double excess = 0.0;     // gauge - 1 (may be negative)
  std::vector<int> signs;  // a worst sign pattern
  int coordinate = -1;     // worst coordinate (l1 check only)
};

constexpr int kMaxSignEnumeration = 24;

// max over sign patterns xi of dual_norm(sum_i xi_i x_i*), with xi_0 = +1
// fixed; worst pattern written to `signs` if non-null.
double max_signed_dual_norm(const SpaceModel& space, const DualTuple& t, std::vector<int>* signs = nullptr);

// Admissible iff every signed sum has dual norm <= 1 + tol.
AdmissibilityVerdict is_admissible(const SpaceModel& space, const DualTuple& t, double tol);

// For E = l1(n): per-coordinate sums sum_i |x_i*[c]| <= 1 + tol.
AdmissibilityVerdict is_admissible_l1(const SpaceModel& space, const DualTuple& t, double tol);

// The gauge g(t) (per-coordinate maximum for L1, sign enumeration otherwise).
double tuple_gauge(const SpaceModel& space, const DualTuple& t);

// t / g(t), shrunk by ulps if needed until is_admissible(t, 0) holds.
DualTuple gauge_project(const SpaceModel& space, const DualTuple& t);

// Sum_i |f(x_i*)|.
double tuple_value(const LatticeExpr& f, const DualTuple& t);

struct UpperTrace {
  std::string rule;
  double value = 0.0;
  std::vector<UpperTrace> children;
};
Json to_json(const UpperTrace& trace);

struct NormCertificate {
  double lower = 0.0;
  double upper = 0.0;
  DualTuple witness;
  double witness_value = 0.0;
  UpperTrace upper_trace;
  int m = 0;
  int budget = 0;
  std::uint64_t seed = 0;
};

struct SearchOptions {
  int m = 2;
  int budget = 1000;  // evaluations per tuple length
  std::uint64_t seed = 0;
  std::vector<DualTuple> hints;  // extra structured starts
};

constexpr int kDefaultBudget = 1000;

// Best admissible-tuple value found for tuple lengths 1..m. Search for length k
// is seeded with the best (k-1)-tuple padded by a zero vector, so the result is
// nondecreasing in m; every length-k search is a fixed-prefix process, so the
// result is nondecreasing in budget. The witness is re-verified at tol 0.
NormCertificate norm_lower(const SpaceModel& space, const LatticeExpr& f, const SearchOptions& options);

// Triangle-inequality bound with base case ||delta_x|| = ||x||.
double norm_upper_recursive(const SpaceModel& space, const LatticeExpr& f);
UpperTrace norm_upper_trace(const SpaceModel& space, const LatticeExpr& f);

// Lower and upper sides together.
NormCertificate certify_norm(const SpaceModel& space, const LatticeExpr& f, const SearchOptions& options);

// Lipschitz constant of x* -> f(x*) for the sup-metric on E* = l_inf(n).
double lipschitz_bound(const SpaceModel& space, const LatticeExpr& f);

// Exhaustive grid over l1(2) tuples of length m <= 2 (grid step 2/resolution
// per coordinate); a lower bound on the m-restricted norm.
double grid_oracle_norm(const SpaceModel& space, const LatticeExpr& f, int m, int resolution);

Json to_json(const NormCertificate& cert);

}  // namespace fbl
