#include "seqcover/online.hpp"

#include <algorithm>
#include <cmath>

#include "seqcover/complexity.hpp"
#include "seqcover/one_inclusion.hpp"

namespace seqcover {

OneInclusionPredictor::OneInclusionPredictor(HypothesisClass cls, bool lenient)
    : cls_(std::move(cls)), lenient_(lenient) {
  if (!cls_.binary()) throw Error("one-inclusion predictor needs a binary class");
}

double OneInclusionPredictor::predict(const Feature& x) {
  cls_.check_feature(x);
  if (cls_.kind() == ClassKind::Threshold1D) {
    if (broken_) {
      if (lenient_) return 0;
      throw Error("labels are not realizable by the class");
    }
    return threshold_one_inclusion_predict(max_zero_, min_one_, x.k());
  }
  if (broken_) {
    if (lenient_) return 0;
    throw Error("labels are not realizable by the class");
  }
  xs_.push_back(x);
  const int y = one_inclusion_predict(cls_, xs_, ys_, lenient_);
  xs_.pop_back();
  return y;
}

void OneInclusionPredictor::observe(const Feature& x, double y) {
  const std::uint8_t b = y >= 0.5;
  if (cls_.kind() == ClassKind::Threshold1D) {
    if (b) min_one_ = std::min(min_one_, x.k());
    else max_zero_ = std::max(max_zero_, x.k());
    broken_ = broken_ || max_zero_ >= min_one_;
    return;
  }
  xs_.push_back(x);
  ys_.push_back(b);
}

namespace {

std::int64_t threshold_sl(std::int64_t m, std::int64_t s, int cap) {
  if (s >= 2 || m <= s) return 0;
  std::int64_t g = s + 1, d = -1;
  while (g <= m && d < cap) {
    ++d;
    g = 2 * g + 1;
  }
  return std::max<std::int64_t>(d, 0);
}

}  // namespace

std::int64_t subclass_sl(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen, std::int64_t s,
                         int depth_cap) {
  if (const auto* t = std::get_if<ThresholdVS>(&vs)) return threshold_sl(t->hi - t->lo, s, depth_cap);
  if (const auto* sp = std::get_if<SparseVS>(&vs)) {
    const std::int64_t left = cls.budget() - static_cast<std::int64_t>(sp->ones.size());
    const std::int64_t free = cls.domain_points() - static_cast<std::int64_t>(seen.size());
    if (left < 1 || free <= s) return 0;
    return std::min<std::int64_t>({left - 1, free - s - 1, depth_cap});
  }
  if (std::holds_alternative<IntervalVS>(vs) && s >= 4) return 0;
  // Brute force on the consistent rows of the whole (small) domain.
  if (cls.kind() == ClassKind::AxisRectangle) throw Error("SOA tree search is not available for rectangles");
  const auto table = to_finite_table(cls);
  const auto pts = domain_points(cls);
  PatternSet rows;
  for (const auto& r : table.rows()) {
    bool ok = true;
    for (std::size_t i = 0; i < pts.size() && ok; ++i)
      if (seen.contains(pts[i])) ok = possible_labels(cls, vs, seen, pts[i]) & (r[i] ? kCan1 : kCan0);
    if (ok) rows.push_back(r);
  }
  return sl_of_patterns(rows, s, depth_cap);
}

int soa_star_choice(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen, const Feature& x,
                    std::int64_t s, int depth_cap) {
  const auto can = possible_labels(cls, vs, seen, x);
  if (can == kCan1) return 1;
  if (can != (kCan0 | kCan1)) return 0;
  AnyVS v0 = vs, v1 = vs;
  restrict_vs(cls, v0, seen, x, 0);
  restrict_vs(cls, v1, seen, x, 1);
  SeenSet after = seen;
  after.insert(x);
  const auto sl0 = subclass_sl(cls, v0, after, s, depth_cap), sl1 = subclass_sl(cls, v1, after, s, depth_cap);
  if (sl0 != sl1) return sl1 > sl0;
  if (sl0 != 0) return 0;
  return vs_star(cls, v1, after) > vs_star(cls, v0, after);
}

int soa_star_predict(const HypothesisClass& cls, std::span<const Feature> prefix, std::span<const std::uint8_t> labels,
                     const Feature& x, std::int64_t s) {
  cls.check_feature(x);
  auto lp = build_version_space(cls, prefix, labels);
  return soa_star_choice(cls, lp.vs, lp.seen, x, s, kDepthCap);
}

SoaStarPredictor::SoaStarPredictor(HypothesisClass cls, std::int64_t s, int depth_cap)
    : cls_(std::move(cls)), s_(s), cap_(depth_cap), vs_(make_version_space(cls_)) {}

double SoaStarPredictor::predict(const Feature& x) {
  cls_.check_feature(x);
  if (broken_) return 0;
  return soa_star_choice(cls_, vs_, seen_, x, s_, cap_);
}

void SoaStarPredictor::observe(const Feature& x, double y) {
  const int b = y >= 0.5;
  if (!broken_) {
    if (possible_labels(cls_, vs_, seen_, x) & (b ? kCan1 : kCan0)) restrict_vs(cls_, vs_, seen_, x, b);
    else broken_ = true;
  }
  seen_.insert(x);
}

ClassBayesPredictor::ClassBayesPredictor(HypothesisClass cls)
    : cls_(std::move(cls)), vs_(make_version_space(cls_)), next0_(vs_), next1_(vs_) {}

double ClassBayesPredictor::predict(const Feature& x) {
  cls_.check_feature(x);
  if (broken_) return 0.5;
  can_ = possible_labels(cls_, vs_, seen_, x);
  if (can_ != (kCan0 | kCan1)) return can_ == kCan1 ? 1.0 : 0.0;
  // Both children are counted with x already seen; observe() keeps the matching one.
  next0_ = vs_;
  next1_ = vs_;
  restrict_vs(cls_, next0_, seen_, x, 0);
  restrict_vs(cls_, next1_, seen_, x, 1);
  seen_.insert(x);
  const double c0 = vs_count(cls_, next0_, seen_), c1 = vs_count(cls_, next1_, seen_);
  return c1 / (c0 + c1);
}

void ClassBayesPredictor::observe(const Feature& x, double y) {
  if (broken_) return;
  const int b = y >= 0.5;
  if (can_ == (kCan0 | kCan1)) {
    vs_ = b ? std::move(next1_) : std::move(next0_);
    return;
  }
  if (!(can_ & (b ? kCan1 : kCan0))) {
    broken_ = true;
    return;
  }
  restrict_vs(cls_, vs_, seen_, x, b);
  seen_.insert(x);
}

NmlPredictor::NmlPredictor(const HypothesisClass& cls, std::vector<Feature> xs, double clamp_eps)
    : xs_(std::move(xs)) {
  const std::size_t T = xs_.size();
  if (T > 16) throw Error("fixed-design NML limited to 16 rounds");
  const auto beh = enumerate_behaviors(cls, xs_);
  LossSpec spec{LossKind::Log, clamp_eps};
  mass_.assign(std::size_t{1} << T, 0.0);
  for (std::size_t code = 0; code < mass_.size(); ++code) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& b : beh) {
      double ll = 0;
      for (std::size_t t = 0; t < T; ++t) {
        const double y = static_cast<double>(code >> (T - 1 - t) & 1);
        ll -= loss(spec, cls.levels()[b.labels[t]], y);
      }
      best = std::max(best, ll);
    }
    mass_[code] = std::exp(best);
  }
}

double NmlPredictor::predict(const Feature& x) {
  const std::size_t T = xs_.size();
  if (t_ >= T || !(x == xs_[t_])) throw Error("NML predictor queried off its fixed design");
  const std::size_t width = std::size_t{1} << (T - t_ - 1);
  const std::size_t base0 = static_cast<std::size_t>(code_) * 2 * width;
  double s0 = 0, s1 = 0;
  for (std::size_t i = 0; i < width; ++i) {
    s0 += mass_[base0 + i];
    s1 += mass_[base0 + width + i];
  }
  return s1 / (s0 + s1);
}

void NmlPredictor::observe(const Feature&, double y) {
  code_ = code_ * 2 + (y >= 0.5);
  ++t_;
}

}  // namespace seqcover
