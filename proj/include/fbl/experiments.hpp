#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbl/dual_functionals.hpp"
#include "fbl/fbl_norm.hpp"

namespace fbl {

// A random expression rescaled by its recursive upper bound, kept only when
// the search certifies its norm to within 1e-7 relative; the result has
// certified norm in [lower, 1].
struct UnitExpr {
  LatticeExpr f;
  NormCertificate cert;
};
UnitExpr random_unit_certified(const SpaceModel& space, std::uint64_t seed, int m = 2,
                               int budget = kDefaultBudget);

struct OctaOptions {
  int m = 2;
  int budget = kDefaultBudget;
  int restarts = 8;
  std::uint64_t seed = 0;
};

struct OctaResult {
  Vec x;                                    // unit vector of E
  std::vector<NormCertificate> certificates;  // one per f_i, for f_i + delta_x
  double value = 0.0;                       // min_i certificates[i].lower
  int candidates = 0;
};

OctaResult octa_witness_search(const SpaceModel& space, const std::vector<LatticeExpr>& fs,
                               const OctaOptions& options);

struct SliceSpec {
  LatticeExpr f;
  double alpha = 0.0;
};

struct SliceInhabitant {
  DualFunctional a;
  double value = 0.0;  // apply(a, f)
  NormCertificate cert;
};

SliceInhabitant slice_inhabit(const SpaceModel& space, const SliceSpec& slice, int m, int budget,
                              std::uint64_t seed);

struct DiameterOptions {
  double eta = 1e-3;
  int m = 2;
  int budget = kDefaultBudget;
  std::uint64_t seed = 0;
};

struct DiameterCertificate {
  std::vector<DualFunctional> u;
  std::vector<DualFunctional> v;
  std::vector<double> lambdas;
  DualFunctional difference;  // sum_i lambda_i (u_i - v_i)
  double eta = 0.0;           // perturbation size actually used
  double bm_distance = 1.0;
  double formula_value = 0.0;
  double witness_value = 0.0;  // l1 only
  double value = 0.0;
  std::string method;  // "formula" or "witness"
  double alpha = 0.0;  // alpha_constant(space)
};

DiameterCertificate cc_slice_diameter(const SpaceModel& space, const std::vector<SliceSpec>& slices,
                                      const std::vector<double>& lambdas, const DiameterOptions& options);

struct RoughDirection {
  std::string kind;  // "max_abs", "interpolant" or "random"
  double h_upper = 0.0;
  double plus_lower = 0.0;
  double minus_lower = 0.0;
  double quotient = 0.0;
};

struct RoughScale {
  double t = 0.0;
  RoughDirection best;
  std::vector<RoughDirection> directions;
};

struct RoughReport {
  double f_lower = 0.0;
  double f_upper = 0.0;
  double alpha = 0.0;
  std::vector<RoughScale> scales;
};

RoughReport rough_probe(const SpaceModel& space, const LatticeExpr& f, const std::vector<double>& scales,
                        int m, int budget, std::uint64_t seed);

Json to_json(const OctaResult& r);
Json to_json(const SliceInhabitant& s);
Json to_json(const DiameterCertificate& d);
Json to_json(const RoughReport& r);

}  // namespace fbl
