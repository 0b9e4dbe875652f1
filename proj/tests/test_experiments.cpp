#include <doctest.h>

#include <cmath>

#include "fbl/error.hpp"
#include "fbl/experiments.hpp"
#include "fbl/rng.hpp"

using namespace fbl;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

LatticeExpr half_m2() { return max_abs_coordinates(2).scaled(0.5); }

}  // namespace

TEST_CASE("random unit certified expressions") {
  const auto l1 = SpaceModel::l1(2);
  for (int i = 0; i < 10; ++i) {
    const auto u = random_unit_certified(l1, i);
    CHECK(u.cert.upper <= 1 + 1e-12);
    CHECK(u.cert.upper - u.cert.lower <= 1e-6);
    CHECK(serialize(random_unit_certified(l1, i).f) == serialize(u.f));
  }
}

TEST_CASE("octa examples") {
  const auto l1 = SpaceModel::l1(2);
  const auto a = octa_witness_search(l1, {LatticeExpr::delta(v2(1, 0)), LatticeExpr::delta(v2(-1, 0))}, {});
  CHECK(a.x == v2(0, 1));
  CHECK(a.value == doctest::Approx(2).epsilon(1e-12));

  const auto b = octa_witness_search(l1, {LatticeExpr::delta(v2(1, 0))}, {});
  CHECK(b.x == v2(1, 0));
  CHECK(b.value == doctest::Approx(2).epsilon(1e-12));

  const auto c = octa_witness_search(l1, {half_m2()}, {});
  CHECK(c.x == v2(1, 0));
  CHECK(c.value == doctest::Approx(2).epsilon(1e-12));
  CHECK(c.certificates[0].upper == 2);

  CHECK_THROWS_AS(octa_witness_search(l1, {max_abs_coordinates(2)}, {}), InputError);
}

TEST_CASE("octa witnesses re-verify and grow with budget") {
  const auto s = SpaceModel::l2(2);
  std::vector<LatticeExpr> fs;
  for (int j = 0; j < 3; ++j) fs.push_back(random_unit_certified(s, 50 + j).f);
  OctaOptions o;
  double prev = -1;
  for (int b : {20, 100, 400}) {
    o.budget = b;
    const auto r = octa_witness_search(s, fs, o);
    CHECK(r.value >= prev);
    prev = r.value;
    CHECK(norm(s, r.x) == doctest::Approx(1).epsilon(1e-14));
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto g = LatticeExpr::add({fs[i], LatticeExpr::delta(r.x)});
      CHECK(is_admissible(s, r.certificates[i].witness, 0).admissible);
      CHECK(tuple_value(g, r.certificates[i].witness) == r.certificates[i].lower);
    }
  }
}

TEST_CASE("slice inhabitants") {
  const auto l1 = SpaceModel::l1(2);
  const auto a = slice_inhabit(l1, {half_m2(), 0.2}, 2, 500, 0);
  CHECK(a.value == doctest::Approx(1).epsilon(1e-12));
  CHECK(apply(a.a, half_m2()) > 0.8);
  CHECK(bracket(l1, a.a).upper <= 1);

  const auto b = slice_inhabit(l1, {LatticeExpr::delta(v2(1, 0)), 0.1}, 2, 500, 0);
  CHECK(b.a.terms.size() == 1);
  CHECK(b.value == 1);

  // Scale(1/2, |delta_e1|) has norm 1/2: no functional of norm 1 clears depth 0.1.
  const auto weak = LatticeExpr::abs(LatticeExpr::delta(v2(1, 0))).scaled(0.5);
  CHECK_THROWS_AS(slice_inhabit(l1, {weak, 0.1}, 2, 200, 0), SearchError);
  CHECK_THROWS_AS(slice_inhabit(l1, {max_abs_coordinates(2), 0.1}, 2, 200, 0), InputError);
}

TEST_CASE("slice diameter examples") {
  const auto l1 = SpaceModel::l1(2);
  const auto d = cc_slice_diameter(l1, {{half_m2(), 0.2}}, {1.0}, {});
  CHECK(d.value >= 1.8);
  CHECK(d.alpha == 1);
  CHECK(d.value <= 2);
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    CHECK(bracket(l1, d.u[i]).upper <= 1);
    CHECK(bracket(l1, d.v[i]).upper <= 1);
    CHECK(apply(d.u[i], half_m2()) > 0.8);
  }
  const auto e = cc_slice_diameter(l1, {{LatticeExpr::delta(v2(1, 0)), 0.1}}, {1.0}, {});
  CHECK(e.value >= 1 - 1e-6);
  CHECK_THROWS_AS(cc_slice_diameter(l1, {{half_m2(), 0.2}}, {0.9}, {}), InputError);
}

TEST_CASE("slice diameters on random families") {
  for (int n : {2, 3}) {
    const auto s = SpaceModel::l1(n);
    int good = 0;
    for (int run = 0; run < 5; ++run) {
      std::vector<SliceSpec> slices;
      for (int j = 0; j < 3; ++j) slices.push_back({random_unit_certified(s, mix_seed(run, j)).f, 0.2});
      DiameterOptions o;
      o.seed = run;
      const auto d = cc_slice_diameter(s, slices, {0.2, 0.3, 0.5}, o);
      CHECK(d.value <= 2 + 1e-12);
      CHECK(dirac_separation_value(s, d.difference, d.bm_distance) == d.formula_value);
      good += d.value >= 0.9 * d.alpha;
    }
    CHECK(good >= 4);
  }
}

TEST_CASE("slice diameter over a non-l1 space uses the formula") {
  const auto s = SpaceModel::l2(2);
  const auto f = random_unit_certified(s, 3).f;
  const auto d = cc_slice_diameter(s, {{f, 0.2}}, {1.0}, {});
  CHECK(d.method == "formula");
  CHECK(d.value > 0);
  CHECK(d.alpha <= 1 / std::sqrt(2.0) + 1e-12);
}

TEST_CASE("roughness of delta_e1") {
  const auto l1 = SpaceModel::l1(2);
  const auto r = rough_probe(l1, LatticeExpr::delta(v2(1, 0)), {1e-1, 1e-2, 1e-3}, 2, 500, 0);
  CHECK(r.alpha == 1);
  for (const auto& sc : r.scales) {
    CHECK(sc.directions[0].kind == "max_abs");
    CHECK(sc.directions[0].quotient >= 0.99);
  }
  CHECK_THROWS_AS(rough_probe(l1, LatticeExpr::delta(v2(1, 0)), {0.0}, 2, 100, 0), InputError);
}

TEST_CASE("smooth direction gives no roughness") {
  const auto l1 = SpaceModel::l1(2);
  const auto f = LatticeExpr::delta(v2(1, 0));
  for (double t : {1e-1, 1e-2, 1e-3}) {
    SearchOptions o;
    o.m = 2;
    const double plus = norm_lower(l1, LatticeExpr::add({f, f.scaled(t)}), o).lower;
    const double minus = norm_lower(l1, LatticeExpr::add({f, f.scaled(-t)}), o).lower;
    CHECK(std::max(0.0, (plus + minus - 2) / t) <= 1e-9);
  }
}
