#include "fbl/fbl_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbl/error.hpp"
#include "fbl/rng.hpp"

namespace fbl {

bool lex_less(const DualTuple& a, const DualTuple& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const Vec& u, const Vec& v) {
    return std::lexicographical_compare(u.data(), u.data() + u.size(), v.data(), v.data() + v.size());
  });
}

namespace {

void check_tuple(const SpaceModel& space, const DualTuple& t) {
  for (const auto& v : t)
    if (v.size() != space.dim())
      throw InputError("dual tuple: vector of length " + std::to_string(v.size()) + " in space " + space.label());
}

// Admissibility check used internally: the linear per-coordinate test for l1,
// sign enumeration otherwise. Both agree bitwise on l1 (same-sign sums).
bool admissible_fast(const SpaceModel& space, const DualTuple& t, double tol) {
  return space.kind() == SpaceKind::L1 ? is_admissible_l1(space, t, tol).admissible
                                       : is_admissible(space, t, tol).admissible;
}

}  // namespace

double max_signed_dual_norm(const SpaceModel& space, const DualTuple& t, std::vector<int>* signs) {
  const int m = static_cast<int>(t.size());
  if (m > kMaxSignEnumeration)
    throw InputError("sign enumeration limited to " + std::to_string(kMaxSignEnumeration) + " vectors, got " +
                     std::to_string(m));
  check_tuple(space, t);
  if (signs) signs->assign(m, 1);
  if (m == 0) return 0.0;
  double best = -1.0;
  Vec sum(space.dim());
  for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
    sum = t[0];
    for (int i = 1; i < m; ++i) {
      if ((mask >> (i - 1)) & 1u)
        sum -= t[i];
      else
        sum += t[i];
    }
    const double d = dual_norm(space, sum);
    if (d > best) {
      best = d;
      if (signs)
        for (int i = 1; i < m; ++i) (*signs)[i] = (mask >> (i - 1)) & 1u ? -1 : 1;
    }
  }
  return best;
}

AdmissibilityVerdict is_admissible(const SpaceModel& space, const DualTuple& t, double tol) {
  AdmissibilityVerdict v;
  v.gauge = max_signed_dual_norm(space, t, &v.signs);
  v.excess = v.gauge - 1.0;
  v.admissible = v.gauge <= 1.0 + tol;
  return v;
}

AdmissibilityVerdict is_admissible_l1(const SpaceModel& space, const DualTuple& t, double tol) {
  if (space.kind() != SpaceKind::L1) throw InputError("is_admissible_l1: space is " + space.label());
  check_tuple(space, t);
  AdmissibilityVerdict v;
  const int m = static_cast<int>(t.size());
  v.signs.assign(m, 1);
  if (m == 0) {
    v.excess = -1.0;
    return v;
  }
  for (int c = 0; c < space.dim(); ++c) {
    double s = 0.0;
    for (const auto& x : t) s += std::abs(x[c]);
    if (s > v.gauge || v.coordinate < 0) {
      v.gauge = s;
      v.coordinate = c;
    }
  }
  for (int i = 0; i < m; ++i) v.signs[i] = t[i][v.coordinate] < 0 ? -1 : 1;
  v.excess = v.gauge - 1.0;
  v.admissible = v.gauge <= 1.0 + tol;
  return v;
}

double tuple_gauge(const SpaceModel& space, const DualTuple& t) {
  if (space.kind() == SpaceKind::L1) return is_admissible_l1(space, t, 0.0).gauge;
  return max_signed_dual_norm(space, t);
}

DualTuple gauge_project(const SpaceModel& space, const DualTuple& t) {
  const double g = tuple_gauge(space, t);
  if (!(g > 0.0)) throw InputError("gauge_project: all-zero tuple");
  double s = 1.0 / g;
  DualTuple out(t.size());
  for (int attempt = 0; attempt < 128; ++attempt) {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] * s;
    if (admissible_fast(space, out, 0.0)) return out;
    s *= 1.0 - 0x1.0p-50;
  }
  throw CertificationError("gauge_project: could not reach an admissible tuple");
}

double tuple_value(const LatticeExpr& f, const DualTuple& t) {
  double v = 0.0;
  for (const auto& x : t) v += std::abs(f.eval(x));
  return v;
}

namespace {

struct Candidate {
  DualTuple tuple;
  double value = -1.0;  // < 0: nothing evaluated yet
};

bool better(const Candidate& a, const Candidate& b) {
  return a.value > b.value || (a.value == b.value && a.value >= 0 && lex_less(a.tuple, b.tuple));
}

bool exact_equal(const Vec& a, const Vec& b) { return a.size() == b.size() && (a.array() == b.array()).all(); }

DualTuple padded(const DualTuple& t, int k, int n) {
  DualTuple out = t;
  while (static_cast<int>(out.size()) < k) out.push_back(Vec::Zero(n));
  return out;
}

struct SearchContext {
  const SpaceModel& space;
  const LatticeExpr& f;
  std::vector<Vec> anchors;
  std::vector<DualTuple> hints;
};

std::vector<Vec> build_anchors(const SpaceModel& space, const LatticeExpr& f) {
  std::vector<Vec> raw;
  const auto supp = support(f).vectors;
  for (std::size_t i = 0; i < supp.size() && i < 16; ++i) {
    if (supp[i].isZero(0.0)) continue;
    raw.push_back(norming_functional(space, supp[i]));
    raw.push_back(norming_functional(space, -supp[i]));
  }
  const auto ext = dual_ball_extreme_points(space);
  for (std::size_t i = 0; i < ext.size() && i < 64; ++i) raw.push_back(ext[i]);
  for (int c = 0; c < space.dim(); ++c) {
    const Vec e = Vec::Unit(space.dim(), c);
    const double d = dual_norm(space, e);
    raw.push_back(e / d);
    raw.push_back(-e / d);
  }
  std::vector<Vec> out;
  for (auto& v : raw) {
    bool dup = false;
    for (const auto& u : out) dup = dup || exact_equal(u, v);
    if (!dup) out.push_back(std::move(v));
  }
  return out;
}

// Search over admissible k-tuples. Each call to step() performs exactly one
// objective evaluation; the trajectory depends only on the seed and on the
// best tuple of the (k-1)-search, never on the total budget.
class StageSearch {
 public:
  static constexpr int kStructuredAscent = 2;
  static constexpr std::size_t kMaxStructured = 160;

  StageSearch(const SearchContext& ctx, int k, std::uint64_t seed) : ctx_(ctx), k_(k), rng_(seed) {
    const int n = ctx.space.dim();
    for (const auto& h : ctx.hints)
      if (static_cast<int>(h.size()) <= k) structured_.push_back(padded(h, k, n));
    DualTuple coords;
    for (int c = 0; c < std::min(k, n); ++c) {
      const Vec e = Vec::Unit(n, c);
      coords.push_back(e / dual_norm(ctx.space, e));
    }
    structured_.push_back(padded(coords, k, n));
    for (const auto& a : ctx.anchors) structured_.push_back(padded({a}, k, n));
    if (k >= 2) {
      for (std::size_t i = 0; i < ctx.anchors.size() && structured_.size() < kMaxStructured; ++i)
        for (std::size_t j = i + 1; j < ctx.anchors.size() && structured_.size() < kMaxStructured; ++j)
          structured_.push_back(padded({ctx.anchors[i], ctx.anchors[j]}, k, n));
    }
  }

  const Candidate& best() const { return best_; }

  void step(const Candidate* lower) {
    if (remaining_ <= 0 || current_.value < 0) {
      start_episode(lower);
      return;
    }
    --remaining_;
    Candidate cand;
    if (!evaluate(propose(), cand)) {
      note_failure();
      return;
    }
    if (cand.value > current_.value) {
      current_ = std::move(cand);
      failures_ = 0;
      record(current_);
    } else {
      note_failure();
    }
  }

 private:
  bool evaluate(const DualTuple& t, Candidate& out) {
    if (tuple_gauge(ctx_.space, t) <= 0.0) return false;
    out.tuple = gauge_project(ctx_.space, t);
    out.value = tuple_value(ctx_.f, out.tuple);
    return true;
  }

  void record(const Candidate& c) {
    if (better(c, best_)) best_ = c;
  }

  void note_failure() {
    if (++failures_ >= 2 * k_) {
      failures_ = 0;
      step_size_ *= 0.5;
      if (step_size_ < 1e-10) step_size_ = initial_step_;
    }
  }

  DualTuple random_tuple() {
    DualTuple t;
    for (int i = 0; i < k_; ++i) t.push_back(rng_.gaussian_vector(ctx_.space.dim()));
    return t;
  }

  void start_episode(const Candidate* lower) {
    const std::size_t e = episode_++;
    const int n = ctx_.space.dim();
    const bool has_lower = k_ > 1 && lower && lower->value >= 0;
    DualTuple start;
    if (e == 0 && has_lower) {
      start = padded(lower->tuple, k_, n);
      begin(kStructuredAscent, 0.3);
    } else if (e - (k_ > 1 ? 1 : 0) < structured_.size() && e >= static_cast<std::size_t>(k_ > 1 ? 1 : 0)) {
      start = structured_[e - (k_ > 1 ? 1 : 0)];
      begin(kStructuredAscent, 0.3);
    } else {
      switch (e % 3) {
        case 0:
          if (best_.value >= 0) {
            start = best_.tuple;
            begin(30, 0.05);
            break;
          }
          [[fallthrough]];
        case 1:
          if (has_lower) {
            start = padded(lower->tuple, k_, n);
            begin(20, 0.1);
            break;
          }
          [[fallthrough]];
        default:
          start = random_tuple();
          begin(30, 0.3);
      }
    }
    Candidate c;
    if (evaluate(start, c)) {
      current_ = std::move(c);
      record(current_);
    } else {
      current_ = Candidate{};
      remaining_ = 0;
    }
  }

  void begin(int length, double step) {
    remaining_ = length;
    step_size_ = initial_step_ = step;
    failures_ = 0;
  }

  DualTuple propose() {
    DualTuple t = current_.tuple;
    const int n = ctx_.space.dim();
    const int i = rng_.below(k_);
    const double r = rng_.uniform();
    const double scale = step_size_ / std::sqrt(static_cast<double>(n));
    if (r < 0.6) {
      t[i] += scale * rng_.gaussian_vector(n);
    } else if (r < 0.75) {
      for (auto& v : t) v += scale * rng_.gaussian_vector(n);
    } else if (r < 0.85) {
      t[i] = -t[i];
    } else if (r < 0.95 && !ctx_.anchors.empty()) {
      const double mag = std::max(t[i].lpNorm<Eigen::Infinity>(), 1.0 / k_);
      t[i] = mag * ctx_.anchors[rng_.below(static_cast<int>(ctx_.anchors.size()))];
    } else {
      t[i].setZero();
    }
    return t;
  }

  const SearchContext& ctx_;
  int k_;
  Rng rng_;
  std::vector<DualTuple> structured_;
  std::size_t episode_ = 0;
  int remaining_ = 0;
  Candidate current_;
  Candidate best_;
  double step_size_ = 0.3;
  double initial_step_ = 0.3;
  int failures_ = 0;
};

}  // namespace

NormCertificate norm_lower(const SpaceModel& space, const LatticeExpr& f, const SearchOptions& options) {
  if (options.m < 1) throw InputError("norm_lower: m must be >= 1");
  if (options.budget < 1) throw InputError("norm_lower: budget must be >= 1");
  if (f.dim() != space.dim())
    throw InputError("norm_lower: expression dimension " + std::to_string(f.dim()) + " vs space " + space.label());
  for (const auto& h : options.hints) check_tuple(space, h);

  SearchContext ctx{space, f, build_anchors(space, f), options.hints};
  std::vector<StageSearch> stages;
  stages.reserve(options.m);
  for (int k = 1; k <= options.m; ++k) stages.emplace_back(ctx, k, mix_seed(options.seed, static_cast<std::uint64_t>(k)));
  for (int t = 0; t < options.budget; ++t)
    for (int k = 0; k < options.m; ++k) stages[k].step(k > 0 ? &stages[k - 1].best() : nullptr);

  Candidate best;
  for (const auto& s : stages)
    if (better(s.best(), best)) best = s.best();

  NormCertificate cert;
  cert.m = options.m;
  cert.budget = options.budget;
  cert.seed = options.seed;
  if (best.value <= 0.0) {
    cert.witness = DualTuple(options.m, Vec::Zero(space.dim()));
    cert.lower = cert.witness_value = 0.0;
  } else {
    cert.witness = best.tuple;
    cert.lower = cert.witness_value = best.value;
  }
  const bool ok = cert.witness.size() <= static_cast<std::size_t>(kMaxSignEnumeration)
                      ? is_admissible(space, cert.witness, 0.0).admissible
                      : admissible_fast(space, cert.witness, 0.0);
  if (!ok) throw CertificationError("norm_lower: witness failed admissibility re-check");
  if (tuple_value(f, cert.witness) != cert.lower)
    throw CertificationError("norm_lower: witness value does not reproduce");
  cert.upper = std::numeric_limits<double>::infinity();
  return cert;
}

UpperTrace norm_upper_trace(const SpaceModel& space, const LatticeExpr& f) {
  using K = LatticeExpr::Kind;
  UpperTrace t;
  switch (f.kind()) {
    case K::Delta:
      t.rule = "delta";
      t.value = norm(space, f.vector());
      return t;
    case K::Scale:
      t.rule = "scale";
      t.children.push_back(norm_upper_trace(space, f.children()[0]));
      t.value = std::abs(f.factor()) * t.children[0].value;
      return t;
    case K::Add:
    case K::Sup:
    case K::Inf:
      t.rule = f.kind() == K::Add ? "add" : f.kind() == K::Sup ? "sup" : "inf";
      for (const auto& c : f.children()) {
        t.children.push_back(norm_upper_trace(space, c));
        t.value += t.children.back().value;
      }
      return t;
    case K::Abs:
    case K::Neg:
      t.rule = f.kind() == K::Abs ? "abs" : "neg";
      t.children.push_back(norm_upper_trace(space, f.children()[0]));
      t.value = t.children[0].value;
      return t;
  }
  return t;
}

double norm_upper_recursive(const SpaceModel& space, const LatticeExpr& f) {
  if (f.dim() != space.dim()) throw InputError("norm_upper_recursive: dimension mismatch");
  return norm_upper_trace(space, f).value;
}

NormCertificate certify_norm(const SpaceModel& space, const LatticeExpr& f, const SearchOptions& options) {
  NormCertificate cert = norm_lower(space, f, options);
  cert.upper_trace = norm_upper_trace(space, f);
  cert.upper = cert.upper_trace.value;
  if (cert.lower > cert.upper * (1.0 + 1e-12))
    throw CertificationError("certify_norm: lower bound exceeds upper bound");
  return cert;
}

double lipschitz_bound(const SpaceModel& space, const LatticeExpr& f) {
  using K = LatticeExpr::Kind;
  if (space.kind() != SpaceKind::L1) throw InputError("lipschitz_bound: requires an l1 space");
  if (f.dim() != space.dim()) throw InputError("lipschitz_bound: dimension mismatch");
  switch (f.kind()) {
    case K::Delta: return f.vector().lpNorm<1>();
    case K::Scale: return std::abs(f.factor()) * lipschitz_bound(space, f.children()[0]);
    case K::Abs:
    case K::Neg: return lipschitz_bound(space, f.children()[0]);
    default: {
      double s = 0.0;
      for (const auto& c : f.children()) s += lipschitz_bound(space, c);
      return s;
    }
  }
}

double grid_oracle_norm(const SpaceModel& space, const LatticeExpr& f, int m, int resolution) {
  if (space.kind() != SpaceKind::L1 || space.dim() != 2)
    throw InputError("grid_oracle_norm: only l1(2) is supported");
  if (m < 1 || m > 2) throw InputError("grid_oracle_norm: m must be 1 or 2");
  if (resolution < 2) throw InputError("grid_oracle_norm: resolution must be >= 2");
  if (f.dim() != 2) throw InputError("grid_oracle_norm: dimension mismatch");
  const int R = (resolution + 1) / 2;
  const int W = 2 * R + 1;
  // F[a][b] = |f(a/R, b/R)|
  std::vector<double> F(static_cast<std::size_t>(W) * W);
  Vec p(2);
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b) {
      p << static_cast<double>(a) / R, static_cast<double>(b) / R;
      F[static_cast<std::size_t>(a + R) * W + (b + R)] = std::abs(f.eval(p));
    }
  const auto at = [&](int a, int b) { return F[static_cast<std::size_t>(a + R) * W + (b + R)]; };

  double best = 0.0;
  if (m == 1) {
    for (double v : F) best = std::max(best, v);
    return best;
  }
  std::vector<double> prefix(R + 1);
  for (int a1 = -R; a1 <= R; ++a1) {
    const int room = R - std::abs(a1);
    for (int a2 = -room; a2 <= room; ++a2) {
      // prefix[r] = max_{|b2| <= r} |f(a2, b2)|
      prefix[0] = at(a2, 0);
      for (int r = 1; r <= R; ++r) prefix[r] = std::max({prefix[r - 1], at(a2, r), at(a2, -r)});
      for (int b1 = -R; b1 <= R; ++b1) best = std::max(best, at(a1, b1) + prefix[R - std::abs(b1)]);
    }
  }
  return best;
}

Json to_json(const UpperTrace& trace) {
  Json j = {{"rule", trace.rule}, {"value", trace.value}};
  if (!trace.children.empty()) {
    Json kids = Json::array();
    for (const auto& c : trace.children) kids.push_back(to_json(c));
    j["children"] = kids;
  }
  return j;
}

Json to_json(const NormCertificate& cert) {
  Json j = {{"lower", cert.lower},
            {"witness", {{"tuple", to_json(cert.witness)}, {"value", cert.witness_value}}},
            {"m", cert.m},
            {"budget", cert.budget},
            {"seed", cert.seed}};
  if (std::isfinite(cert.upper)) {
    j["upper"] = cert.upper;
    j["upper_trace"] = to_json(cert.upper_trace);
  }
  return j;
}

}  // namespace fbl
