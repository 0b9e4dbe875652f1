#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbl/json_io.hpp"

namespace fbl {

using Vec = Eigen::VectorXd;

// An element of the vector lattice generated by the evaluations
// delta_x(x*) = <x*, x> inside the functions on E*. Immutable; copies share
// structure.
class LatticeExpr {
 public:
  enum class Kind { Delta, Scale, Add, Sup, Inf, Abs, Neg };

  static LatticeExpr delta(Vec x);
  static LatticeExpr scale(double k, LatticeExpr of);
  static LatticeExpr add(std::vector<LatticeExpr> children);
  static LatticeExpr sup(std::vector<LatticeExpr> children);
  static LatticeExpr inf(std::vector<LatticeExpr> children);
  static LatticeExpr abs(LatticeExpr of);
  static LatticeExpr neg(LatticeExpr of);

  // Scale(k, *this), folding into an existing top-level Scale.
  LatticeExpr scaled(double k) const;

  Kind kind() const;
  int dim() const;
  const Vec& vector() const;  // Delta only
  double factor() const;      // Scale only
  std::span<const LatticeExpr> children() const;
  std::size_t node_count() const;

  double eval(const Vec& xs) const;

 private:
  struct Node;
  explicit LatticeExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static LatticeExpr make(Kind kind, std::vector<LatticeExpr> children, Vec x, double k);
  double eval_unchecked(const Vec& xs) const;

  std::shared_ptr<const Node> node_;
};

// |delta_{e_1}| v ... v |delta_{e_n}|: equals the ell_inf norm of x*.
LatticeExpr max_abs_coordinates(int n);

// The zero function, written as Scale(0, Delta(e_1)).
LatticeExpr zero_expr(int n);

// Deduplicated Delta leaves (bitwise equality), in depth-first order.
struct CoordinateSupport {
  std::vector<Vec> vectors;
};
CoordinateSupport support(const LatticeExpr& f);

struct HomogeneityReport {
  bool passed = true;
  int trials = 0;
  std::optional<Vec> violating_point;
  double violating_lambda = 0.0;
  double lhs = 0.0;  // eval(lambda x*)
  double rhs = 0.0;  // lambda eval(x*)
};

using Evaluator = std::function<double(const Vec&)>;

// Samples (x*, lambda >= 0), including lambda = 0, and checks
// eval(lambda x*) = lambda eval(x*) to 1e-9 relative.
HomogeneityReport homogeneity_check(const Evaluator& eval, int dim, int trials, std::uint64_t seed);
HomogeneityReport homogeneity_check(const LatticeExpr& f, int trials, std::uint64_t seed);

// Random expression tree of the given depth with leaves on the l1(dim) sphere.
LatticeExpr random_expr(int dim, int depth, std::uint64_t seed);

Json to_json(const LatticeExpr& f);
LatticeExpr expr_from_json(const Json& j);
std::string serialize(const LatticeExpr& f);
LatticeExpr parse_expr(const std::string& text);

}  // namespace fbl
