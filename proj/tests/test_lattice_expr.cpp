#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

#include "fbl/error.hpp"
#include "fbl/fbl_norm.hpp"
#include "fbl/lattice_expr.hpp"
#include "fbl/rng.hpp"

using namespace fbl;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

LatticeExpr d(const Vec& x) { return LatticeExpr::delta(x); }

std::vector<LatticeExpr> corpus(int count, int dim, std::uint64_t seed) {
  std::vector<LatticeExpr> out;
  for (int i = 0; i < count; ++i) out.push_back(random_expr(dim, 1 + i % 4, mix_seed(seed, i)));
  return out;
}

}  // namespace

TEST_CASE("evaluation examples") {
  CHECK(d(v2(1, 0)).eval(v2(0.3, -0.8)) == 0.3);
  CHECK(LatticeExpr::sup({d(v2(1, 0)), d(v2(0, 1))}).eval(v2(-1, 1)) == 1);
  CHECK(LatticeExpr::inf({d(v2(1, 0)), d(v2(0, 1))}).eval(v2(-1, 1)) == -1);
  const auto m2 = max_abs_coordinates(2);
  CHECK(m2.eval(v2(0.4, -0.9)) == 0.9);
  CHECK(LatticeExpr::neg(d(v2(2, 1))).eval(v2(1, 1)) == -3);
  CHECK(LatticeExpr::scale(-0.5, d(v2(2, 1))).eval(v2(1, 1)) == -1.5);
  CHECK(LatticeExpr::add({d(v2(2, 1)), d(v2(1, 0)), d(v2(0, 1))}).eval(v2(1, 1)) == 5);
  CHECK_THROWS_AS(m2.eval(Vec::Ones(3)), InputError);
}

TEST_CASE("construction is validated") {
  CHECK_THROWS_AS(LatticeExpr::sup({d(v2(1, 0))}), InputError);
  CHECK_THROWS_AS(LatticeExpr::add({d(v2(1, 0)), d(Vec::Ones(3))}), InputError);
  CHECK_THROWS_AS(LatticeExpr::scale(NAN, d(v2(1, 0))), InputError);
  CHECK_THROWS_AS(d(Vec()), InputError);
}

TEST_CASE("scale folding") {
  const auto f = LatticeExpr::scale(2, d(v2(1, 0))).scaled(3);
  CHECK(f.kind() == LatticeExpr::Kind::Scale);
  CHECK(f.factor() == 6);
  CHECK(f.children()[0].kind() == LatticeExpr::Kind::Delta);
}

TEST_CASE("abs and neg agree with their desugared forms") {
  for (const auto& f : corpus(100, 2, 1)) {
    const auto a = LatticeExpr::abs(f);
    const auto a2 = LatticeExpr::sup({f, LatticeExpr::scale(-1, f)});
    const auto n = LatticeExpr::neg(f);
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      const Vec x = rng.gaussian_vector(2);
      CHECK(a.eval(x) == a2.eval(x));
      CHECK(n.eval(x) == -f.eval(x));
    }
  }
}

TEST_CASE("support") {
  CHECK(support(d(v2(1, 0))).vectors.size() == 1);
  const auto f = LatticeExpr::add({d(v2(1, 0)), LatticeExpr::scale(2, d(v2(1, 0)))});
  REQUIRE(support(f).vectors.size() == 1);
  CHECK(support(f).vectors[0] == v2(1, 0));
  const auto s = support(max_abs_coordinates(2)).vectors;
  REQUIRE(s.size() == 2);
  CHECK(s[0] == v2(1, 0));
  CHECK(s[1] == v2(0, 1));
}

TEST_CASE("expression depends only on its support") {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    // Leaves in the span of e1, e2 inside R^3: moving x* along e3 changes nothing.
    const auto g = random_expr(2, 1 + i % 4, mix_seed(8, i));
    const auto lift = [](const Vec& v) {
      Vec w = Vec::Zero(3);
      w.head(2) = v;
      return w;
    };
    Json j = to_json(g);
    std::function<void(Json&)> walk = [&](Json& n) {
      if (n.contains("delta")) {
        Vec v = vector_from_json(n["delta"], "");
        n["delta"] = to_json(lift(v));
        return;
      }
      for (auto& [k, c] : n.items()) {
        if (k == "scale") walk(c["of"]);
        else if (c.is_array()) for (auto& e : c) walk(e);
        else walk(c);
      }
    };
    walk(j);
    const auto f = expr_from_json(j);
    REQUIRE(f.dim() == 3);
    const Vec x = rng.gaussian_vector(3);
    Vec y = x;
    y[2] += rng.normal();
    CHECK(f.eval(x) == f.eval(y));
  }
}

TEST_CASE("homogeneity on a random corpus") {
  for (const auto& f : corpus(500, 3, 9)) {
    const auto r = homogeneity_check(f, 20, 5);
    CHECK(r.passed);
    CHECK(f.eval(Vec::Zero(3)) == 0);
  }
  CHECK(homogeneity_check(max_abs_coordinates(2), 100, 1).passed);
}

TEST_CASE("homogeneity check catches a broken evaluator") {
  const auto f = max_abs_coordinates(2);
  const auto r = homogeneity_check([&](const Vec& x) { return f.eval(x) + 0.01; }, 2, 10, 3);
  CHECK_FALSE(r.passed);
  REQUIRE(r.violating_point.has_value());
  CHECK(r.lhs != doctest::Approx(r.rhs));
}

TEST_CASE("continuity along segments is controlled by the Lipschitz bound") {
  const auto l1 = SpaceModel::l1(2);
  Rng rng(12);
  for (const auto& f : corpus(100, 2, 13)) {
    const double lip = lipschitz_bound(l1, f);
    const Vec a = rng.gaussian_vector(2), b = rng.gaussian_vector(2);
    Vec prev = a;
    for (int k = 1; k <= 50; ++k) {
      const Vec cur = a + (b - a) * (k / 50.0);
      CHECK(std::abs(f.eval(cur) - f.eval(prev)) <= lip * (cur - prev).lpNorm<Eigen::Infinity>() * (1 + 1e-12) + 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("random expressions") {
  CHECK(random_expr(2, 1, 5).kind() == LatticeExpr::Kind::Delta);
  CHECK(serialize(random_expr(2, 4, 77)) == serialize(random_expr(2, 4, 77)));
  std::set<LatticeExpr::Kind> kinds;
  for (int s = 0; s < 200; ++s) {
    const auto f = random_expr(3, 3, s);
    CHECK(support(f).vectors.size() <= 8);
    std::function<void(const LatticeExpr&)> walk = [&](const LatticeExpr& g) {
      kinds.insert(g.kind());
      for (const auto& c : g.children()) walk(c);
    };
    walk(f);
    for (const auto& v : support(f).vectors) CHECK(v.lpNorm<1>() == doctest::Approx(1).epsilon(1e-14));
  }
  CHECK(kinds.size() == 7);
}

TEST_CASE("serialization round trip") {
  const auto m2 = max_abs_coordinates(2);
  const auto text = serialize(m2);
  CHECK(text == R"({"sup":[{"abs":{"delta":[1,0]}},{"abs":{"delta":[0,1]}}]})");
  CHECK(serialize(parse_expr(text)) == text);
  for (const auto& f : corpus(100, 3, 21)) {
    const auto t = serialize(f);
    CHECK(serialize(parse_expr(t)) == t);
    const Vec x = Vec::LinSpaced(3, -0.7, 0.4);
    CHECK(parse_expr(t).eval(x) == f.eval(x));
  }
}

TEST_CASE("parse errors are located") {
  const auto msg = [](const std::string& text) {
    try {
      parse_expr(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg(R"({"sup":[{"delta":[1,0]}]})").find("/sup") != std::string::npos);
  CHECK(msg(R"({"sup":[{"delta":[1,0]}]})").find("at least 2") != std::string::npos);
  CHECK(msg(R"({"add":[{"delta":[1,0]},{"delta":[1,"a"]}]})").find("/add/1") != std::string::npos);
  CHECK(msg(R"({"scale":{"k":2}})").find("/scale") != std::string::npos);
  CHECK(msg(R"({"pow":{}})").find("unknown") != std::string::npos);
  CHECK(msg(R"({"delta":[1,0]})").empty());
  CHECK_FALSE(msg(R"({"delta":[1,0)").empty());
}
