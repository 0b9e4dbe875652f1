#include "fbl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fbl/error.hpp"
#include "fbl/parallel.hpp"
#include "fbl/rng.hpp"

namespace fbl {

namespace {

SearchOptions search_options(int m, int budget, std::uint64_t seed) {
  SearchOptions o;
  o.m = m;
  o.budget = budget;
  o.seed = seed;
  return o;
}

LatticeExpr plus(const LatticeExpr& a, const LatticeExpr& b) { return LatticeExpr::add({a, b}); }

}  // namespace

UnitExpr random_unit_certified(const SpaceModel& space, std::uint64_t seed, int m, int budget) {
  const auto opts = search_options(m, budget, seed);
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(mix_seed(seed, attempt));
    const int depth = 1 + rng.below(3);
    const auto g = random_expr(space.dim(), depth, rng.next());
    const double upper = norm_upper_recursive(space, g);
    if (!(upper > 0.0)) continue;
    if (upper - norm_lower(space, g, opts).lower > 1e-7 * upper) continue;
    auto f = g.scaled(1.0 / upper);
    auto cert = certify_norm(space, f, opts);
    return {std::move(f), std::move(cert)};
  }
  throw SearchError("random_unit_certified: no tightly certified expression in 1000 attempts");
}

OctaResult octa_witness_search(const SpaceModel& space, const std::vector<LatticeExpr>& fs,
                               const OctaOptions& options) {
  constexpr int kScreenBudget = 150;
  constexpr int kAscentSeeds = 3;
  constexpr int kAscentSteps = 12;
  if (fs.empty()) throw InputError("octa_witness_search: empty family");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].dim() != space.dim()) throw InputError("octa_witness_search: dimension mismatch");
    const double u = norm_upper_recursive(space, fs[i]);
    if (u > 1.0 + 1e-6)
      throw InputError("octa_witness_search: element " + std::to_string(i) + " has certified upper bound " +
                       format_number(u) + " > 1");
  }
  const int n = space.dim();
  std::vector<Vec> cands;
  const auto push_unit = [&](const Vec& v) {
    if (v.isZero(0.0)) return;
    Vec x = v / norm(space, v);
    for (const auto& c : cands)
      if ((c.array() == x.array()).all()) return;
    cands.push_back(std::move(x));
  };
  for (int c = 0; c < n; ++c) {
    push_unit(Vec::Unit(n, c));
    push_unit(-Vec::Unit(n, c));
  }
  for (const auto& f : fs)
    for (const auto& v : support(f).vectors) {
      push_unit(v);
      push_unit(-v);
    }
  for (const auto& v : sample_sphere(space, Side::Primal, options.restarts, mix_seed(options.seed, 1))) push_unit(v);

  const auto score = [&](const Vec& x, int budget) {
    double worst = std::numeric_limits<double>::infinity();
    const auto dx = LatticeExpr::delta(x);
    for (const auto& f : fs)
      worst = std::min(worst, norm_lower(space, plus(f, dx), search_options(options.m, budget, options.seed)).lower);
    return worst;
  };

  // Screening runs at a fixed budget; only the final pass uses options.budget.
  const auto screened = parallel_map<double>(cands.size(), [&](std::size_t i) { return score(cands[i], kScreenBudget); });
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return screened[a] > screened[b]; });
  const std::size_t seeds = std::min<std::size_t>(kAscentSeeds, order.size());
  const auto ascended = parallel_map<std::vector<Vec>>(seeds, [&](std::size_t r) {
    Rng rng(mix_seed(options.seed, 100 + r));
    Vec x = cands[order[r]];
    double cur = screened[order[r]];
    double step = 0.25;
    std::vector<Vec> found;
    for (int it = 0; it < kAscentSteps; ++it) {
      Vec y = x + step / std::sqrt(static_cast<double>(n)) * rng.gaussian_vector(n);
      if (y.isZero(0.0)) continue;
      y /= norm(space, y);
      const double s = score(y, kScreenBudget);
      if (s > cur) {
        cur = s;
        x = y;
        found.push_back(y);
      } else {
        step *= 0.5;
      }
    }
    return found;
  });
  for (const auto& list : ascended)
    for (const auto& y : list) push_unit(y);

  struct Scored {
    double value = 0.0;
    std::vector<NormCertificate> certs;
  };
  const auto finals = parallel_map<Scored>(cands.size(), [&](std::size_t i) {
    Scored s{std::numeric_limits<double>::infinity(), {}};
    const auto dx = LatticeExpr::delta(cands[i]);
    for (const auto& f : fs) {
      s.certs.push_back(certify_norm(space, plus(f, dx), search_options(options.m, options.budget, options.seed)));
      s.value = std::min(s.value, s.certs.back().lower);
    }
    return s;
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < finals.size(); ++i)
    if (finals[i].value > finals[best].value) best = i;
  return {cands[best], finals[best].certs, finals[best].value, static_cast<int>(cands.size())};
}

SliceInhabitant slice_inhabit(const SpaceModel& space, const SliceSpec& slice, int m, int budget,
                              std::uint64_t seed) {
  if (!(slice.alpha > 0.0 && slice.alpha < 1.0)) throw InputError("slice_inhabit: depth must lie in (0, 1)");
  auto cert = certify_norm(space, slice.f, search_options(m, budget, seed));
  if (cert.upper > 1.0 + 1e-6)
    throw InputError("slice_inhabit: slice element has certified upper bound " + format_number(cert.upper) + " > 1");
  DualFunctional a;
  for (const auto& x : cert.witness) {
    const double v = slice.f.eval(x);
    if (v != 0.0) a.terms.push_back({v > 0 ? 1.0 : -1.0, x});
  }
  const double value = apply(a, slice.f);
  if (!(value > 1.0 - slice.alpha))
    throw SearchError("slice_inhabit: best value " + format_number(value) + " does not clear 1 - alpha = " +
                      format_number(1.0 - slice.alpha));
  return {std::move(a), value, std::move(cert)};
}

namespace {

DualFunctional perturbed(const SpaceModel& space, const DualFunctional& a, double eta, Rng& rng) {
  DualTuple t;
  for (const auto& term : a.terms)
    t.push_back(term.point + eta * term.point.lpNorm<Eigen::Infinity>() * rng.gaussian_vector(space.dim()));
  t = gauge_project(space, t);
  DualFunctional out;
  for (std::size_t i = 0; i < t.size(); ++i) out.terms.push_back({a.terms[i].gamma, t[i]});
  return out;
}

// a / bracket(a).upper, shrunk by ulps until the upper bound is at most 1.
DualFunctional normalized(const SpaceModel& space, const DualFunctional& a) {
  const double u = bracket(space, a).upper;
  if (!(u > 0.0)) throw CertificationError("cc_slice_diameter: functional with zero upper bound");
  DualFunctional out = a;
  for (auto& t : out.terms) t.gamma /= u;
  for (int i = 0; i < 128 && bracket(space, out).upper > 1.0; ++i)
    for (auto& t : out.terms) t.gamma *= 1.0 - 0x1.0p-50;
  if (bracket(space, out).upper > 1.0) throw CertificationError("cc_slice_diameter: could not normalize functional");
  return out;
}

}  // namespace

DiameterCertificate cc_slice_diameter(const SpaceModel& space, const std::vector<SliceSpec>& slices,
                                      const std::vector<double>& lambdas, const DiameterOptions& options) {
  constexpr int kHalvings = 8;
  constexpr int kResamples = 16;
  if (slices.empty()) throw InputError("cc_slice_diameter: no slices");
  if (lambdas.size() != slices.size()) throw InputError("cc_slice_diameter: one weight per slice required");
  double total = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw InputError("cc_slice_diameter: weights must be nonnegative");
    total += l;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("cc_slice_diameter: weights must sum to 1");
  if (!(options.eta > 0.0)) throw InputError("cc_slice_diameter: perturbation must be positive");

  const auto inhabitants = parallel_map<DualFunctional>(slices.size(), [&](std::size_t i) {
    return slice_inhabit(space, slices[i], options.m, options.budget, mix_seed(options.seed, i)).a;
  });

  DiameterCertificate d;
  d.lambdas = lambdas;
  bool placed = false;
  bool independence_failed = false;
  for (int h = 0; h <= kHalvings && !placed; ++h) {
    const double eta = std::ldexp(options.eta, -h);
    bool membership_lost = false;
    for (int r = 0; r < kResamples && !placed && !membership_lost; ++r) {
      d.u.clear();
      d.v.clear();
      std::vector<Vec> all_points;
      for (std::size_t i = 0; i < slices.size() && !membership_lost; ++i) {
        Rng rng(mix_seed(mix_seed(options.seed, 1000 + static_cast<std::uint64_t>(h) * kResamples + r), i));
        auto u = perturbed(space, inhabitants[i], eta, rng);
        auto v = perturbed(space, inhabitants[i], eta, rng);
        if (!(apply(u, slices[i].f) > 1.0 - slices[i].alpha) || !(apply(v, slices[i].f) > 1.0 - slices[i].alpha)) {
          membership_lost = true;
          break;
        }
        for (const auto* w : {&u, &v})
          for (const auto& t : w->terms) all_points.push_back(t.point);
        d.u.push_back(normalized(space, u));
        d.v.push_back(normalized(space, v));
      }
      if (membership_lost) break;
      bool nonzero = std::none_of(all_points.begin(), all_points.end(), [](const Vec& p) { return p.isZero(0.0); });
      if (nonzero && pairwise_independent(all_points)) {
        placed = true;
        d.eta = eta;
      } else {
        independence_failed = true;
      }
    }
  }
  if (!placed)
    throw SearchError(independence_failed ? "cc_slice_diameter: pairwise independence unattainable"
                                          : "cc_slice_diameter: slice membership lost at every perturbation size");

  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (!(apply(d.u[i], slices[i].f) > 1.0 - slices[i].alpha) || !(apply(d.v[i], slices[i].f) > 1.0 - slices[i].alpha))
      throw CertificationError("cc_slice_diameter: normalized functional left its slice");
    for (const auto& t : d.u[i].terms) d.difference.terms.push_back({lambdas[i] * t.gamma, t.point});
    for (const auto& t : d.v[i].terms) d.difference.terms.push_back({-lambdas[i] * t.gamma, t.point});
  }
  d.bm_distance = bm_distance_upper(space).distance;
  d.formula_value = dirac_separation_value(space, d.difference, d.bm_distance);
  d.value = d.formula_value;
  d.method = "formula";
  if (space.kind() == SpaceKind::L1) {
    d.witness_value = dual_lower_via_witness(space, d.difference).value;
    if (d.witness_value > d.value) {
      d.value = d.witness_value;
      d.method = "witness";
    }
  }
  if (d.value > 2.0 * total + 1e-12) throw CertificationError("cc_slice_diameter: value exceeds the ball diameter");
  d.alpha = space.dim() >= 2 ? alpha_constant(space) : 2.0;
  return d;
}

RoughReport rough_probe(const SpaceModel& space, const LatticeExpr& f, const std::vector<double>& scales, int m,
                        int budget, std::uint64_t seed) {
  constexpr int kRandomDirections = 4;
  if (scales.empty()) throw InputError("rough_probe: no scales");
  for (double t : scales)
    if (!(t > 0.0)) throw InputError("rough_probe: scales must be positive");
  const auto cert = certify_norm(space, f, search_options(m, budget, seed));
  if (cert.upper - cert.lower > 1e-6)
    throw InputError("rough_probe: certificate gap " + format_number(cert.upper - cert.lower) + " exceeds 1e-6");
  const int n = space.dim();

  RoughReport report;
  report.f_lower = cert.lower;
  report.f_upper = cert.upper;
  report.alpha = n >= 2 ? alpha_constant(space) : 2.0;

  DualTuple x_tuple;
  std::vector<int> x_signs;
  for (const auto& x : cert.witness) {
    const double v = f.eval(x);
    if (v == 0.0) continue;
    x_tuple.push_back(x);
    x_signs.push_back(v > 0 ? 1 : -1);
  }

  report.scales = parallel_map<RoughScale>(scales.size(), [&](std::size_t si) {
    const double t = scales[si];
    std::vector<std::pair<std::string, LatticeExpr>> dirs;
    std::vector<double> uppers;
    std::vector<DualTuple> hints;

    auto mt = max_abs_coordinates(n).scaled(t);
    uppers.push_back(norm_upper_recursive(space, mt));
    dirs.emplace_back("max_abs", std::move(mt));

    if (space.kind() == SpaceKind::L1 && !x_tuple.empty()) {
      Rng rng(mix_seed(seed, 5000 + si));
      DualTuple z_tuple;
      for (const auto& x : x_tuple)
        z_tuple.push_back(x + 1e-3 * t * x.lpNorm<Eigen::Infinity>() * rng.gaussian_vector(n));
      z_tuple = gauge_project(space, z_tuple);
      std::vector<Vec> points;
      std::vector<int> signs;
      bool ok = true;
      const auto add_point = [&](const Vec& w, int s) {
        if (w.isZero(0.0)) {
          ok = false;
          return;
        }
        const Vec p = w / w.lpNorm<Eigen::Infinity>();
        for (std::size_t j = 0; j < points.size(); ++j)
          if ((points[j].array() == p.array()).all()) {
            ok = ok && signs[j] == s;
            return;
          }
        points.push_back(p);
        signs.push_back(s);
      };
      for (std::size_t i = 0; i < x_tuple.size(); ++i) add_point(x_tuple[i], x_signs[i]);
      for (std::size_t i = 0; i < z_tuple.size(); ++i) add_point(z_tuple[i], -x_signs[i]);
      if (ok) {
        try {
          auto g = sign_interpolant(space, points, signs);
          // |g| <= M_n pointwise, hence ||t g|| <= t ||M_n|| = t n.
          uppers.push_back(t * n);
          dirs.emplace_back("interpolant", g.expr.scaled(t));
          hints = {x_tuple, z_tuple};
        } catch (const InputError&) {
        }
      }
    }

    for (int j = 0; j < kRandomDirections; ++j) {
      Rng rng(mix_seed(seed, 7000 + 16 * si + j));
      const auto r = random_expr(n, 1 + rng.below(3), rng.next());
      const double u = norm_upper_recursive(space, r);
      if (!(u > 0.0)) continue;
      auto h = r.scaled(t / u);
      uppers.push_back(norm_upper_recursive(space, h));
      dirs.emplace_back("random", std::move(h));
    }

    RoughScale out;
    out.t = t;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      auto opts = search_options(m, budget, seed);
      opts.hints = hints;
      RoughDirection d;
      d.kind = dirs[k].first;
      d.h_upper = uppers[k];
      d.plus_lower = norm_lower(space, plus(f, dirs[k].second), opts).lower;
      d.minus_lower = norm_lower(space, plus(f, dirs[k].second.scaled(-1.0)), opts).lower;
      d.quotient = std::max(0.0, (d.plus_lower + d.minus_lower - 2.0 * cert.upper) / d.h_upper);
      if (k == 0 || d.quotient > out.best.quotient) out.best = d;
      out.directions.push_back(std::move(d));
    }
    return out;
  });
  return report;
}

Json to_json(const OctaResult& r) {
  Json certs = Json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c));
  return {{"x", to_json(r.x)}, {"value", r.value}, {"certificates", certs}, {"candidates", r.candidates}};
}

Json to_json(const SliceInhabitant& s) {
  return {{"functional", to_json(s.a)}, {"value", s.value}, {"certificate", to_json(s.cert)}};
}

Json to_json(const DiameterCertificate& d) {
  Json u = Json::array(), v = Json::array();
  for (const auto& a : d.u) u.push_back(to_json(a));
  for (const auto& a : d.v) v.push_back(to_json(a));
  return {{"u", u},
          {"v", v},
          {"lambdas", d.lambdas},
          {"difference", to_json(d.difference)},
          {"eta", d.eta},
          {"bm_distance", d.bm_distance},
          {"formula_value", d.formula_value},
          {"witness_value", d.witness_value},
          {"value", d.value},
          {"method", d.method},
          {"alpha", d.alpha}};
}

namespace {

Json to_json(const RoughDirection& d) {
  return {{"kind", d.kind},
          {"h_upper", d.h_upper},
          {"plus_lower", d.plus_lower},
          {"minus_lower", d.minus_lower},
          {"quotient", d.quotient}};
}

}  // namespace

Json to_json(const RoughReport& r) {
  Json scales = Json::array();
  for (const auto& s : r.scales) {
    Json dirs = Json::array();
    for (const auto& d : s.directions) dirs.push_back(to_json(d));
    scales.push_back({{"t", s.t}, {"best", to_json(s.best)}, {"directions", dirs}});
  }
  return {{"f_lower", r.f_lower}, {"f_upper", r.f_upper}, {"alpha", r.alpha}, {"scales", scales}};
}

}  // namespace fbl
