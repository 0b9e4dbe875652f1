#include "fbl/lattice_expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "fbl/error.hpp"
#include "fbl/rng.hpp"
#include "fbl/spaces.hpp"

namespace fbl {

struct LatticeExpr::Node {
  Kind kind;
  std::vector<LatticeExpr> children;
  Vec x;
  double k = 0.0;
  int dim = 0;
  std::size_t count = 1;
};

LatticeExpr LatticeExpr::make(Kind kind, std::vector<LatticeExpr> children, Vec x, double k) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->k = k;
  if (kind == Kind::Delta) {
    if (x.size() < 1) throw InputError("delta: empty vector");
    if (!x.allFinite()) throw InputError("delta: vector is not finite");
    node->dim = static_cast<int>(x.size());
    node->x = std::move(x);
  } else {
    for (const auto& c : children) {
      if (!c.node_) throw InputError("lattice expression: null child");
      if (node->dim == 0) node->dim = c.dim();
      if (c.dim() != node->dim) throw InputError("lattice expression: children have different dimensions");
      node->count += c.node_count();
    }
    node->children = std::move(children);
  }
  return LatticeExpr(std::move(node));
}

LatticeExpr LatticeExpr::delta(Vec x) { return make(Kind::Delta, {}, std::move(x), 0.0); }

LatticeExpr LatticeExpr::scale(double k, LatticeExpr of) {
  if (!std::isfinite(k)) throw InputError("scale: factor is not finite");
  return make(Kind::Scale, {std::move(of)}, {}, k);
}

LatticeExpr LatticeExpr::add(std::vector<LatticeExpr> children) {
  if (children.size() < 2) throw InputError("add: needs at least 2 children");
  return make(Kind::Add, std::move(children), {}, 0.0);
}

LatticeExpr LatticeExpr::sup(std::vector<LatticeExpr> children) {
  if (children.size() < 2) throw InputError("sup: needs at least 2 children");
  return make(Kind::Sup, std::move(children), {}, 0.0);
}

LatticeExpr LatticeExpr::inf(std::vector<LatticeExpr> children) {
  if (children.size() < 2) throw InputError("inf: needs at least 2 children");
  return make(Kind::Inf, std::move(children), {}, 0.0);
}

LatticeExpr LatticeExpr::abs(LatticeExpr of) { return make(Kind::Abs, {std::move(of)}, {}, 0.0); }

LatticeExpr LatticeExpr::neg(LatticeExpr of) { return make(Kind::Neg, {std::move(of)}, {}, 0.0); }

LatticeExpr LatticeExpr::scaled(double k) const {
  if (kind() == Kind::Scale) return scale(k * factor(), children()[0]);
  return scale(k, *this);
}

LatticeExpr::Kind LatticeExpr::kind() const { return node_->kind; }
int LatticeExpr::dim() const { return node_->dim; }
std::size_t LatticeExpr::node_count() const { return node_->count; }

const Vec& LatticeExpr::vector() const {
  if (kind() != Kind::Delta) throw InputError("vector(): not a delta node");
  return node_->x;
}

double LatticeExpr::factor() const {
  if (kind() != Kind::Scale) throw InputError("factor(): not a scale node");
  return node_->k;
}

std::span<const LatticeExpr> LatticeExpr::children() const { return node_->children; }

double LatticeExpr::eval(const Vec& xs) const {
  if (xs.size() != dim())
    throw InputError("eval: dimension mismatch (expression " + std::to_string(dim()) + ", point " +
                     std::to_string(xs.size()) + ")");
  return eval_unchecked(xs);
}

double LatticeExpr::eval_unchecked(const Vec& xs) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Delta:
      return xs.dot(n.x);
    case Kind::Scale:
      return n.k * n.children[0].eval_unchecked(xs);
    case Kind::Add: {
      double s = 0.0;
      for (const auto& c : n.children) s += c.eval_unchecked(xs);
      return s;
    }
    case Kind::Sup: {
      double m = n.children[0].eval_unchecked(xs);
      for (std::size_t i = 1; i < n.children.size(); ++i) m = std::max(m, n.children[i].eval_unchecked(xs));
      return m;
    }
    case Kind::Inf: {
      double m = n.children[0].eval_unchecked(xs);
      for (std::size_t i = 1; i < n.children.size(); ++i) m = std::min(m, n.children[i].eval_unchecked(xs));
      return m;
    }
    case Kind::Abs:
      return std::abs(n.children[0].eval_unchecked(xs));
    case Kind::Neg:
      return -n.children[0].eval_unchecked(xs);
  }
  return 0.0;
}

LatticeExpr max_abs_coordinates(int n) {
  if (n < 1) throw InputError("max_abs_coordinates: n must be >= 1");
  std::vector<LatticeExpr> terms;
  for (int c = 0; c < n; ++c) terms.push_back(LatticeExpr::abs(LatticeExpr::delta(Vec::Unit(n, c))));
  if (n == 1) return terms.front();
  return LatticeExpr::sup(std::move(terms));
}

LatticeExpr zero_expr(int n) { return LatticeExpr::scale(0.0, LatticeExpr::delta(Vec::Unit(n, 0))); }

namespace {

bool bitwise_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data(), [](double u, double v) {
           return std::memcmp(&u, &v, sizeof u) == 0;
         });
}

void collect_support(const LatticeExpr& f, std::vector<Vec>& out) {
  if (f.kind() == LatticeExpr::Kind::Delta) {
    for (const auto& v : out)
      if (bitwise_equal(v, f.vector())) return;
    out.push_back(f.vector());
    return;
  }
  for (const auto& c : f.children()) collect_support(c, out);
}

}  // namespace

CoordinateSupport support(const LatticeExpr& f) {
  CoordinateSupport s;
  collect_support(f, s.vectors);
  return s;
}

HomogeneityReport homogeneity_check(const Evaluator& eval, int dim, int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("homogeneity_check: trials must be >= 1");
  Rng rng(seed);
  HomogeneityReport report;
  for (int t = 0; t < trials; ++t) {
    const Vec xs = rng.gaussian_vector(dim);
    const double lambda = t == 0 ? 0.0 : rng.uniform(0.0, 4.0);
    const double lhs = eval(lambda * xs);
    const double rhs = lambda * eval(xs);
    ++report.trials;
    const double tol = 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (!(std::abs(lhs - rhs) <= tol)) {
      report.passed = false;
      report.violating_point = xs;
      report.violating_lambda = lambda;
      report.lhs = lhs;
      report.rhs = rhs;
      return report;
    }
  }
  return report;
}

HomogeneityReport homogeneity_check(const LatticeExpr& f, int trials, std::uint64_t seed) {
  return homogeneity_check([&f](const Vec& xs) { return f.eval(xs); }, f.dim(), trials, seed);
}

namespace {

LatticeExpr random_node(int dim, int depth, Rng& rng) {
  const auto leaf = [&] {
    return LatticeExpr::delta(sample_sphere(SpaceModel::l1(dim), Side::Primal, 1, rng.next()).front());
  };
  if (depth <= 1) return leaf();
  switch (rng.below(7)) {
    case 0:
      return leaf();
    case 1: {
      const double k = rng.uniform(-2.0, 2.0);
      return LatticeExpr::scale(k, random_node(dim, depth - 1, rng));
    }
    case 2: {
      auto a = random_node(dim, depth - 1, rng);
      return LatticeExpr::add({a, random_node(dim, depth - 1, rng)});
    }
    case 3: {
      auto a = random_node(dim, depth - 1, rng);
      return LatticeExpr::sup({a, random_node(dim, depth - 1, rng)});
    }
    case 4: {
      auto a = random_node(dim, depth - 1, rng);
      return LatticeExpr::inf({a, random_node(dim, depth - 1, rng)});
    }
    case 5:
      return LatticeExpr::abs(random_node(dim, depth - 1, rng));
    default:
      return LatticeExpr::neg(random_node(dim, depth - 1, rng));
  }
}

}  // namespace

LatticeExpr random_expr(int dim, int depth, std::uint64_t seed) {
  if (depth < 1) throw InputError("random_expr: depth must be >= 1");
  if (dim < 1) throw InputError("random_expr: dim must be >= 1");
  Rng rng(seed);
  return random_node(dim, depth, rng);
}

Json to_json(const LatticeExpr& f) {
  using K = LatticeExpr::Kind;
  const auto list = [&] {
    Json a = Json::array();
    for (const auto& c : f.children()) a.push_back(to_json(c));
    return a;
  };
  switch (f.kind()) {
    case K::Delta: return {{"delta", to_json(f.vector())}};
    case K::Scale: return {{"scale", {{"k", f.factor()}, {"of", to_json(f.children()[0])}}}};
    case K::Add: return {{"add", list()}};
    case K::Sup: return {{"sup", list()}};
    case K::Inf: return {{"inf", list()}};
    case K::Abs: return {{"abs", to_json(f.children()[0])}};
    case K::Neg: return {{"neg", to_json(f.children()[0])}};
  }
  return {};
}

namespace {

LatticeExpr parse_node(const Json& j, const std::string& path) {
  const auto fail = [&](const std::string& msg) -> LatticeExpr {
    throw InputError("expression at " + (path.empty() ? std::string("/") : path) + ": " + msg);
  };
  if (!j.is_object() || j.size() != 1) return fail("expected an object with exactly one key");
  const std::string key = j.begin().key();
  const Json& body = j.begin().value();
  const std::string here = path + "/" + key;
  const auto fail_here = [&](const std::string& msg) -> LatticeExpr {
    throw InputError("expression at " + here + ": " + msg);
  };
  try {
    if (key == "delta") return LatticeExpr::delta(vector_from_json(body, here));
    if (key == "scale") {
      if (!body.is_object() || !body.contains("k") || !body.contains("of") || body.size() != 2)
        return fail_here("scale needs exactly the fields \"k\" and \"of\"");
      if (!body["k"].is_number()) return fail_here("scale factor \"k\" must be a number");
      return LatticeExpr::scale(body["k"].get<double>(), parse_node(body["of"], here + "/of"));
    }
    if (key == "abs") return LatticeExpr::abs(parse_node(body, here));
    if (key == "neg") return LatticeExpr::neg(parse_node(body, here));
    if (key == "add" || key == "sup" || key == "inf") {
      if (!body.is_array()) return fail_here(key + " expects an array");
      if (body.size() < 2) return fail_here(key + " needs at least 2 children, got " + std::to_string(body.size()));
      std::vector<LatticeExpr> kids;
      for (std::size_t i = 0; i < body.size(); ++i) kids.push_back(parse_node(body[i], here + "/" + std::to_string(i)));
      if (key == "add") return LatticeExpr::add(std::move(kids));
      if (key == "sup") return LatticeExpr::sup(std::move(kids));
      return LatticeExpr::inf(std::move(kids));
    }
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind("expression at ", 0) == 0) throw;
    return fail_here(msg);
  }
  return fail("unknown node kind \"" + key + "\"");
}

}  // namespace

LatticeExpr expr_from_json(const Json& j) { return parse_node(j, ""); }

std::string serialize(const LatticeExpr& f) { return dump_canonical(to_json(f)); }

LatticeExpr parse_expr(const std::string& text) { return expr_from_json(parse_json_text(text, "expression")); }

}  // namespace fbl
