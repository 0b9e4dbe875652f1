// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "fbl/c_of_k.hpp"
#include "fbl/dual_functionals.hpp"
#include "fbl/experiments.hpp"
#include "fbl/fbl_norm.hpp"
#include "fbl/rng.hpp"

using namespace fbl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

SearchOptions opts(int m, int budget = kDefaultBudget, std::uint64_t seed = 0) {
  SearchOptions o;
  o.m = m;
  o.budget = budget;
  o.seed = seed;
  return o;
}

SpaceModel hexagon() {
  const double s = std::sqrt(3.0) / 2;
  return SpaceModel::polytope({v2(1, 0), v2(0.5, s), v2(-0.5, s)});
}

Vec cube_sphere_point(Rng& rng, int n) {
  Vec v = rng.gaussian_vector(n);
  return v / v.lpNorm<Eigen::Infinity>();
}

Outcome isometry() {
  Timer timer;
  Rng rng(101);
  int bad = 0, total = 0;
  double worst = 0.0;
  for (const auto& s : {SpaceModel::l1(2), SpaceModel::l2(3), SpaceModel::linf(2), hexagon()}) {
    for (int i = 0; i < 100; ++i, ++total) {
      const Vec x = rng.gaussian_vector(s.dim());
      const auto f = LatticeExpr::delta(x);
      const double nx = norm(s, x);
      const double lower = norm_lower(s, f, opts(1, kDefaultBudget, i)).lower;
      worst = std::max(worst, std::abs(lower - nx));
      if (std::abs(lower - nx) > 1e-9 || norm_upper_recursive(s, f) != nx) ++bad;
    }
  }
  const double t = timer.seconds();
  return {bad == 0 && t < 30,
          std::to_string(total - bad) + "/" + std::to_string(total) + " exact, max |lower - norm| " +
              fmt("%.2e", worst) + ", " + fmt("%.1fs", t)};
}

Outcome max_abs_norm() {
  Timer timer;
  bool ok = true;
  std::string detail;
  for (int n : {2, 3, 4}) {
    const auto c = certify_norm(SpaceModel::l1(n), max_abs_coordinates(n), opts(n));
    ok = ok && c.lower >= n - 1e-6 && c.upper == n && c.lower <= c.upper * (1 + 1e-12);
    detail += "n=" + std::to_string(n) + " [" + fmt("%.12g", c.lower) + ", " + fmt("%.12g", c.upper) + "] ";
  }
  const double t = timer.seconds();
  return {ok && t < 10, detail + fmt("%.1fs", t)};
}

Outcome bracket_sandwich() {
  Rng rng(303);
  int violations = 0, witnesses = 0;
  for (int i = 0; i < 200; ++i) {
    const auto s = i % 2 == 0 ? SpaceModel::l1(2) : SpaceModel::l2(2);
    DualFunctional a;
    for (int k = 0, m = 1 + rng.below(5); k < m; ++k) a.terms.push_back({rng.normal(), rng.gaussian_vector(2)});
    const auto b = bracket(s, a);
    if (b.lower > b.upper) ++violations;
    if (dirac_separation_value(s, a, bm_distance_upper(s).distance) > b.upper + 1e-9) ++violations;
    if (s.kind() == SpaceKind::L1) {
      ++witnesses;
      if (dual_lower_via_witness(s, a).value > b.upper + 1e-9) ++violations;
    }
  }
  return {violations == 0, "200 functionals, " + std::to_string(witnesses) + " witness bounds, " +
                               std::to_string(violations) + " violations"};
}

Outcome dirac_separation() {
  Timer timer;
  int bad = 0, total = 0;
  double worst_margin = 1e300;
  for (int n : {2, 3}) {
    const auto s = SpaceModel::l1(n);
    const auto mn = max_abs_coordinates(n);
    const auto grid = make_sphere_grid(n, default_grid_resolution(n));
    Rng rng(404 + n);
    for (int i = 0; i < 50; ++i, ++total) {
      const Vec x1 = cube_sphere_point(rng, n), x2 = cube_sphere_point(rng, n);
      DualFunctional a;
      a.terms = {{1.0, x1}, {-1.0, x2}};
      const auto w = dual_lower_via_witness(s, a);
      // Re-verification from the serialized witness only.
      const auto f = parse_expr(serialize(w.witness));
      const double value = f.eval(x1) - f.eval(x2);
      bool ok = std::abs(value - w.value) <= 1e-12 && w.value >= 2.0 / n - 1e-6;
      ok = ok && ck_sup_norm(f.scaled(n), grid).lower <= 1 + 1e-12;
      for (int k = 0; k < 200 && ok; ++k) {
        const Vec p = rng.gaussian_vector(n);
        ok = std::abs(n * f.eval(p)) <= mn.eval(p) * (1 + 1e-12);
      }
      worst_margin = std::min(worst_margin, w.value - 2.0 / n);
      if (!ok) ++bad;
    }
  }
  const double t = timer.seconds();
  return {bad == 0 && t < 60, std::to_string(total - bad) + "/" + std::to_string(total) +
                                  " pairs verified, min(value - 2/n) " + fmt("%.2e", worst_margin) + ", " +
                                  fmt("%.1fs", t)};
}

Outcome representation_sandwich() {
  const auto s = SpaceModel::l1(2);
  const auto grid = make_sphere_grid(2, default_grid_resolution(2));
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const auto f = random_expr(2, 1 + i % 3, mix_seed(505, i));
    if (!sandwich_check(s, f, 2, kDefaultBudget, grid, i).passed()) ++failures;
  }
  return {failures == 0, "50 expressions, " + std::to_string(failures) + " failures"};
}

Outcome admissibility_equivalence() {
  Rng rng(606);
  int mismatches = 0, admissible = 0, total = 0;
  for (int n : {2, 3}) {
    const auto s = SpaceModel::l1(n);
    for (int i = 0; i < 1000; ++i, ++total) {
      DualTuple t;
      for (int k = 0, m = 1 + rng.below(6); k < m; ++k) t.push_back(rng.gaussian_vector(n));
      const double g = tuple_gauge(s, t);
      const double u = i % 10 == 0 ? 1.0 : rng.uniform(0.9, 1.1);
      for (auto& v : t) v *= u / g;
      const bool a = is_admissible(s, t, 0).admissible;
      if (a != is_admissible_l1(s, t, 0).admissible) ++mismatches;
      admissible += a;
    }
  }
  return {mismatches == 0, std::to_string(total) + " tuples (" + std::to_string(admissible) + " admissible), " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome slice_diameter() {
  Timer timer;
  const auto s = SpaceModel::l1(2);
  int above_09 = 0, above_05 = 0;
  double lowest = 1e300;
  for (int run = 0; run < 20; ++run) {
    std::vector<SliceSpec> slices;
    for (int j = 0; j < 3; ++j) slices.push_back({random_unit_certified(s, mix_seed(700 + run, j)).f, 0.2});
    Rng rng(mix_seed(701, run));
    std::vector<double> lambdas(3);
    double sum = 0;
    for (auto& l : lambdas) sum += l = 0.05 + rng.uniform();
    for (auto& l : lambdas) l /= sum;
    DiameterOptions o;
    o.seed = run;
    const auto d = cc_slice_diameter(s, slices, lambdas, o);
    above_09 += d.value >= 0.9;
    above_05 += d.value >= 0.5;
    lowest = std::min(lowest, d.value);
  }
  const double t = timer.seconds();
  return {above_09 >= 18 && above_05 == 20 && t < 300,
          std::to_string(above_09) + "/20 runs >= 0.9, " + std::to_string(above_05) + "/20 >= 0.5, min " +
              fmt("%.4f", lowest) + ", " + fmt("%.1fs", t)};
}

Outcome roughness() {
  const auto s = SpaceModel::l1(2);
  const std::vector<double> scales{1e-1, 1e-2, 1e-3};
  const auto r = rough_probe(s, LatticeExpr::delta(v2(1, 0)), scales, 2, kDefaultBudget, 0);
  bool ok = true;
  std::string detail = "delta_e1:";
  for (const auto& sc : r.scales) {
    double via_max_abs = 0.0;
    for (const auto& d : sc.directions)
      if (d.kind == "max_abs") via_max_abs = d.quotient;
    ok = ok && via_max_abs >= r.alpha - 0.01;
    detail += " " + fmt("%.3f", via_max_abs);
  }
  int rough_enough = 0;
  for (int i = 0; i < 10; ++i) {
    const auto u = random_unit_certified(s, mix_seed(808, i));
    const auto q = rough_probe(s, u.f, scales, 2, kDefaultBudget, i);
    double best = 0.0;
    for (const auto& sc : q.scales) best = std::max(best, sc.best.quotient);
    rough_enough += best >= 0.5 * q.alpha;
  }
  ok = ok && rough_enough == 10;
  return {ok, detail + "; random unit f with quotient >= alpha/2: " + std::to_string(rough_enough) + "/10"};
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(FBL_BINARY) + " " + args).c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome monotonicity_and_determinism() {
  int violations = 0, checks = 0;
  for (const auto& s : {SpaceModel::l1(2), SpaceModel::l2(2), SpaceModel::l1(3)}) {
    for (int i = 0; i < 12; ++i) {
      const auto f = random_expr(s.dim(), 1 + i % 3, mix_seed(909, i));
      double prev = -1;
      for (int m = 1; m <= 4; ++m, ++checks) {
        const double v = norm_lower(s, f, opts(m, 300, i)).lower;
        violations += v < prev;
        prev = v;
      }
      prev = -1;
      for (int b : {1, 10, 50, 200, 1000}) {
        const double v = norm_lower(s, f, opts(2, b, i)).lower;
        violations += v < prev;
        prev = v;
        ++checks;
      }
    }
  }
  {
    std::ofstream("acc_space.json") << R"({"kind":"l1","dim":2})";
    std::ofstream("acc_expr.json") << serialize(random_expr(2, 3, 5));
  }
  const std::vector<std::string> commands = {
      "norm --space acc_space.json --expr acc_expr.json --m 3 --seed 7",
      "octa --space acc_space.json --runs 2 --budget 200 --seed 3",
      "slice-diam --space acc_space.json --runs 2 --budget 300 --seed 1",
      "rough --space acc_space.json --expr acc_expr.json --budget 200",
  };
  int identical = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const std::string a = "acc_a" + std::to_string(k) + ".json", b = "acc_b" + std::to_string(k) + ".json";
    const bool ran = run_cli(commands[k] + " --out " + a) == 0 && run_cli(commands[k] + " --out " + b) == 0;
    identical += ran && slurp(a) == slurp(b) && !slurp(a).empty();
  }
  const bool ok = violations == 0 && identical == static_cast<int>(commands.size());
  return {ok, std::to_string(checks) + " monotonicity checks, " + std::to_string(violations) + " violations; " +
                  std::to_string(identical) + "/" + std::to_string(commands.size()) + " CLI reports byte-identical"};
}

bool octa_reverifies(const SpaceModel& s, const std::vector<LatticeExpr>& fs, const OctaResult& r) {
  double value = 1e300;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto g = LatticeExpr::add({fs[i], LatticeExpr::delta(r.x)});
    const auto& c = r.certificates[i];
    const auto tuple = vectors_from_json(to_json(c.witness), "witness");
    if (!is_admissible(s, tuple, 0).admissible) return false;
    if (std::abs(tuple_value(g, tuple) - c.lower) > 1e-12) return false;
    if (c.lower > norm_upper_recursive(s, g) * (1 + 1e-12)) return false;
    value = std::min(value, c.lower);
  }
  return value == r.value && std::abs(norm(s, r.x) - 1) <= 1e-12;
}

Outcome octahedrality(std::string& table) {
  const auto s = SpaceModel::l1(2);
  const auto a = octa_witness_search(s, {LatticeExpr::delta(v2(1, 0)), LatticeExpr::delta(v2(-1, 0))}, {});
  const auto half = max_abs_coordinates(2).scaled(0.5);
  const auto b = octa_witness_search(s, {half}, {});
  const double b_upper = norm_upper_recursive(s, LatticeExpr::add({half, LatticeExpr::delta(b.x)}));
  bool ok = std::abs(a.value - 2) <= 1e-9 && std::abs(b.value - 2) <= 1e-9 && std::abs(b_upper - 2) <= 1e-9;
  int verified = 0;
  for (int run = 0; run < 20; ++run) {
    std::vector<LatticeExpr> fs;
    for (int j = 0; j < 3; ++j) fs.push_back(random_unit_certified(s, mix_seed(1000 + run, j)).f);
    OctaOptions o;
    o.seed = run;
    const auto r = octa_witness_search(s, fs, o);
    const bool v = octa_reverifies(s, fs, r);
    verified += v;
    char line[160];
    std::snprintf(line, sizeof line, "      family %2d  x = (% .6f, % .6f)  value %.9f  %s\n", run, r.x[0], r.x[1],
                  r.value, v ? "verified" : "NOT VERIFIED");
    table += line;
  }
  ok = ok && verified == 20;
  return {ok, "{d_e1, d_-e1} " + fmt("%.12g", a.value) + ", {M2/2} " + fmt("%.12g", b.value) + " (upper " +
                  fmt("%.12g", b_upper) + "), " + std::to_string(verified) + "/20 random families re-verified"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::string table;
  const std::vector<Criterion> criteria = {
      {1, "isometry of delta", isometry},
      {2, "norm of max |delta_e_i| equals n", max_abs_norm},
      {3, "bracket sandwich", bracket_sandwich},
      {4, "Dirac separation 2/n", dirac_separation},
      {5, "representation sandwich", representation_sandwich},
      {6, "admissibility equivalence", admissibility_equivalence},
      {7, "slice-diameter constant", slice_diameter},
      {8, "roughness", roughness},
      {9, "monotonicity and determinism", monotonicity_and_determinism},
      {10, "octahedrality evidence", [&] { return octahedrality(table); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%2d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  if (!table.empty()) std::printf("octahedrality evidence (l1(2), 3-element unit families):\n%s", table.c_str());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
