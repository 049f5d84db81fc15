#pragma once

#include <variant>

#include "seqcover/domain.hpp"

namespace seqcover {

// Distinct features revealed so far, sorted. Shared by every version space
// built along the same stream, so it is passed in rather than owned.
class SeenSet {
 public:
  bool contains(const Feature& x) const;
  void insert(const Feature& x);
  std::size_t size() const { return keys_.size(); }
  // Largest seen key < k, or -1; smallest seen key > k, or `none`.
  std::int64_t below(std::int64_t k) const;
  std::int64_t above(std::int64_t k, std::int64_t none) const;
  const std::vector<std::int64_t>& keys() const { return keys_; }

 private:
  std::vector<std::int64_t> keys_;
};

inline constexpr std::uint8_t kCan0 = 1, kCan1 = 2;

// Each version space is the set of hypotheses consistent with one labeled
// prefix. Labels of seen points are implied by the state plus the SeenSet.
// restrict() must be called before x is inserted into the SeenSet.

// Consistent thresholds a in [lo, hi].
struct ThresholdVS {
  std::int64_t lo = 0, hi = 0;
  static ThresholdVS initial(const HypothesisClass& cls) { return {0, cls.grid() + 1}; }
  std::uint8_t possible(const HypothesisClass&, const SeenSet&, const Feature& x) const {
    return static_cast<std::uint8_t>((hi > x.k() ? kCan0 : 0) | (lo <= x.k() ? kCan1 : 0));
  }
  void restrict(const HypothesisClass&, const SeenSet&, const Feature& x, int y) {
    if (y) hi = std::min(hi, x.k());
    else lo = std::max(lo, x.k() + 1);
  }
  Hypothesis witness(const HypothesisClass&, const SeenSet&) const { return {{lo}}; }
  double count(const HypothesisClass&, const SeenSet&) const { return static_cast<double>(hi - lo + 1); }
  std::int64_t star(const HypothesisClass&, const SeenSet&) const { return std::min<std::int64_t>(hi - lo, 2); }
};

// With positives: a in (left, pmin], b in [pmax, right). Without: any interval
// avoiding the seen (all negative) points, or the empty interval.
struct IntervalVS {
  bool has_pos = false;
  std::int64_t pmin = 0, pmax = 0, left = -1, right = 0;
  static IntervalVS initial(const HypothesisClass& cls) { return {false, 0, 0, -1, cls.grid() + 1}; }
  std::uint8_t possible(const HypothesisClass&, const SeenSet& seen, const Feature& x) const;
  void restrict(const HypothesisClass& cls, const SeenSet& seen, const Feature& x, int y);
  Hypothesis witness(const HypothesisClass&, const SeenSet&) const;
  double count(const HypothesisClass& cls, const SeenSet& seen) const;
  std::int64_t star(const HypothesisClass& cls, const SeenSet& seen) const;
};

// Seen points are labeled 1 exactly when they are in `ones`.
struct SparseVS {
  std::vector<std::int64_t> ones;
  static SparseVS initial(const HypothesisClass&) { return {}; }
  std::uint8_t possible(const HypothesisClass& cls, const SeenSet& seen, const Feature& x) const;
  void restrict(const HypothesisClass& cls, const SeenSet& seen, const Feature& x, int y);
  Hypothesis witness(const HypothesisClass&, const SeenSet&) const { return {ones}; }
  double count(const HypothesisClass& cls, const SeenSet& seen) const;
  std::int64_t star(const HypothesisClass& cls, const SeenSet& seen) const;
};

// Explicit list of consistent rows.
struct TableVS {
  std::vector<std::uint32_t> rows;
  static TableVS initial(const HypothesisClass& cls);
  std::uint8_t possible(const HypothesisClass& cls, const SeenSet&, const Feature& x) const;
  void restrict(const HypothesisClass& cls, const SeenSet&, const Feature& x, int y);
  Hypothesis witness(const HypothesisClass&, const SeenSet&) const { return {{rows.front()}}; }
  double count(const HypothesisClass&, const SeenSet&) const { return static_cast<double>(rows.size()); }
  std::int64_t star(const HypothesisClass& cls, const SeenSet&) const;
};

// Labeled points of this path plus the bounding box of the positives.
struct RectVS {
  std::vector<std::pair<Feature, std::uint8_t>> labeled;
  bool has_pos = false;
  std::array<std::int64_t, kMaxDims> lo{}, hi{};
  static RectVS initial(const HypothesisClass&) { return {}; }
  std::uint8_t possible(const HypothesisClass& cls, const SeenSet&, const Feature& x) const;
  void restrict(const HypothesisClass& cls, const SeenSet&, const Feature& x, int y);
  Hypothesis witness(const HypothesisClass& cls, const SeenSet&) const;
  double count(const HypothesisClass&, const SeenSet&) const;
  std::int64_t star(const HypothesisClass& cls, const SeenSet&) const;
};

using AnyVS = std::variant<ThresholdVS, IntervalVS, SparseVS, TableVS, RectVS>;

bool has_version_space(const HypothesisClass& cls);
AnyVS make_version_space(const HypothesisClass& cls);

std::uint8_t possible_labels(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen, const Feature& x);
void restrict_vs(const HypothesisClass& cls, AnyVS& vs, const SeenSet& seen, const Feature& x, int y);
Hypothesis vs_witness(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen);
double vs_count(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen);
std::int64_t vs_star(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen);

// Builds the version space of (prefix, labels); throws if the labels are not realizable.
struct LabeledPrefix {
  AnyVS vs;
  SeenSet seen;
};
LabeledPrefix build_version_space(const HypothesisClass& cls, std::span<const Feature> prefix,
                                  std::span<const std::uint8_t> labels);

// True iff every hypothesis consistent with (prefix, labels) agrees at x.
bool certifies(const HypothesisClass& cls, std::span<const Feature> prefix, std::span<const std::uint8_t> labels,
               const Feature& x);
// Same question answered by behavior enumeration; used as an independent route.
bool certifies_by_enumeration(const HypothesisClass& cls, std::span<const Feature> prefix,
                              std::span<const std::uint8_t> labels, const Feature& x);

// Positions t whose label under h is not certified by the rest of the sample.
std::int64_t non_certified_count(const HypothesisClass& cls, std::span<const Feature> sample, const Hypothesis& h);

}  // namespace seqcover
