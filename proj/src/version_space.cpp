#include "seqcover/version_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqcover/complexity.hpp"

namespace seqcover {

bool SeenSet::contains(const Feature& x) const { return std::binary_search(keys_.begin(), keys_.end(), x.k()); }

void SeenSet::insert(const Feature& x) {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), x.k());
  if (it == keys_.end() || *it != x.k()) keys_.insert(it, x.k());
}

std::int64_t SeenSet::below(std::int64_t k) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
  return it == keys_.begin() ? -1 : *std::prev(it);
}

std::int64_t SeenSet::above(std::int64_t k, std::int64_t none) const {
  auto it = std::upper_bound(keys_.begin(), keys_.end(), k);
  return it == keys_.end() ? none : *it;
}

// ---- intervals ----

std::uint8_t IntervalVS::possible(const HypothesisClass&, const SeenSet& seen, const Feature& x) const {
  const auto k = x.k();
  if (!has_pos) return static_cast<std::uint8_t>(kCan0 | (seen.contains(x) ? 0 : kCan1));
  std::uint8_t r = 0;
  if (left < k && k < right) r |= kCan1;
  if (k < pmin || k > pmax) r |= kCan0;
  return r;
}

void IntervalVS::restrict(const HypothesisClass& cls, const SeenSet& seen, const Feature& x, int y) {
  const auto k = x.k();
  if (y) {
    if (!has_pos) {
      has_pos = true;
      pmin = pmax = k;
      left = seen.below(k);
      right = seen.above(k, cls.grid() + 1);
    } else {
      pmin = std::min(pmin, k);
      pmax = std::max(pmax, k);
    }
  } else if (has_pos) {
    if (k < pmin) left = std::max(left, k);
    if (k > pmax) right = std::min(right, k);
  }
}

Hypothesis IntervalVS::witness(const HypothesisClass&, const SeenSet&) const {
  return has_pos ? Hypothesis{{pmin, pmax}} : Hypothesis{{1, 0}};
}

double IntervalVS::count(const HypothesisClass& cls, const SeenSet& seen) const {
  if (has_pos) return static_cast<double>(pmin - left) * static_cast<double>(right - pmax);
  double c = 1;
  std::int64_t prev = -1;
  auto gap = [&](std::int64_t g) { c += static_cast<double>(g) * static_cast<double>(g + 1) / 2; };
  for (auto k : seen.keys()) {
    gap(k - prev - 1);
    prev = k;
  }
  gap(cls.grid() - prev);
  return c;
}

std::int64_t IntervalVS::star(const HypothesisClass& cls, const SeenSet& seen) const {
  if (has_pos) return std::min<std::int64_t>(pmin - left - 1, 2) + std::min<std::int64_t>(right - pmax - 1, 2);
  return cls.grid() + 1 - static_cast<std::int64_t>(seen.size());
}

// ---- sparse indicators ----

std::uint8_t SparseVS::possible(const HypothesisClass& cls, const SeenSet& seen, const Feature& x) const {
  if (seen.contains(x)) return std::binary_search(ones.begin(), ones.end(), x.k()) ? kCan1 : kCan0;
  return static_cast<std::uint8_t>(kCan0 | (static_cast<int>(ones.size()) < cls.budget() ? kCan1 : 0));
}

void SparseVS::restrict(const HypothesisClass&, const SeenSet& seen, const Feature& x, int y) {
  if (y && !seen.contains(x)) ones.insert(std::lower_bound(ones.begin(), ones.end(), x.k()), x.k());
}

double SparseVS::count(const HypothesisClass& cls, const SeenSet& seen) const {
  const auto free = cls.domain_points() - static_cast<std::int64_t>(seen.size());
  return std::exp(log_binomial_sum(free, cls.budget() - static_cast<std::int64_t>(ones.size())));
}

std::int64_t SparseVS::star(const HypothesisClass& cls, const SeenSet& seen) const {
  return static_cast<int>(ones.size()) < cls.budget() ? cls.domain_points() - static_cast<std::int64_t>(seen.size())
                                                      : 0;
}

// ---- finite tables ----

TableVS TableVS::initial(const HypothesisClass& cls) {
  TableVS vs;
  vs.rows.resize(cls.rows().size());
  std::iota(vs.rows.begin(), vs.rows.end(), 0u);
  return vs;
}

std::uint8_t TableVS::possible(const HypothesisClass& cls, const SeenSet&, const Feature& x) const {
  std::uint8_t r = 0;
  for (auto i : rows) r |= cls.rows()[i][x.k()] ? kCan1 : kCan0;
  return r;
}

void TableVS::restrict(const HypothesisClass& cls, const SeenSet&, const Feature& x, int y) {
  std::erase_if(rows, [&](std::uint32_t i) { return cls.rows()[i][x.k()] != y; });
}

std::int64_t TableVS::star(const HypothesisClass& cls, const SeenSet&) const {
  PatternSet p;
  for (auto i : rows) p.push_back(cls.rows()[i]);
  return star_of_patterns(p);
}

// ---- axis-aligned rectangles ----

std::uint8_t RectVS::possible(const HypothesisClass& cls, const SeenSet&, const Feature& x) const {
  const int d = cls.dims();
  std::uint8_t r = 0;
  bool inside = has_pos;
  for (int i = 0; i < d && inside; ++i) inside = lo[i] <= x.c[i] && x.c[i] <= hi[i];
  if (!inside) r |= kCan0;
  // Label 1 is possible iff the grown box contains no negative point.
  std::array<std::int64_t, kMaxDims> nlo = lo, nhi = hi;
  for (int i = 0; i < d; ++i) {
    nlo[i] = has_pos ? std::min(lo[i], x.c[i]) : x.c[i];
    nhi[i] = has_pos ? std::max(hi[i], x.c[i]) : x.c[i];
  }
  bool ok = true;
  for (const auto& [p, y] : labeled) {
    if (y) continue;
    bool in = true;
    for (int i = 0; i < d && in; ++i) in = nlo[i] <= p.c[i] && p.c[i] <= nhi[i];
    if (in) { ok = false; break; }
  }
  if (ok) r |= kCan1;
  return r;
}

void RectVS::restrict(const HypothesisClass& cls, const SeenSet&, const Feature& x, int y) {
  labeled.emplace_back(x, static_cast<std::uint8_t>(y));
  if (!y) return;
  for (int i = 0; i < cls.dims(); ++i) {
    lo[i] = has_pos ? std::min(lo[i], x.c[i]) : x.c[i];
    hi[i] = has_pos ? std::max(hi[i], x.c[i]) : x.c[i];
  }
  has_pos = true;
}

Hypothesis RectVS::witness(const HypothesisClass& cls, const SeenSet&) const {
  Hypothesis h;
  for (int i = 0; i < cls.dims(); ++i) {
    if (has_pos) h.p.insert(h.p.end(), {lo[i], hi[i]});
    else h.p.insert(h.p.end(), {1, 0});
  }
  return h;
}

double RectVS::count(const HypothesisClass&, const SeenSet&) const {
  throw Error("hypothesis counting is not available for rectangles");
}

std::int64_t RectVS::star(const HypothesisClass& cls, const SeenSet&) const {
  if (cls.declared_star() && *cls.declared_star() == kInfinite) return kInfinite;
  // Small grid: enumerate boxes on the whole grid and keep the consistent ones.
  std::vector<Feature> pts;
  const std::int64_t n = cls.grid() + 1;
  std::int64_t total = 1;
  for (int i = 0; i < cls.dims(); ++i) total *= n;
  if (total > kBruteDomainCap) throw Error("rectangle star number needs a grid of at most 12 points");
  for (std::int64_t code = 0; code < total; ++code) {
    Feature f;
    f.dims = cls.dims();
    std::int64_t c = code;
    for (int i = 0; i < f.dims; ++i, c /= n) f.c[i] = c % n;
    pts.push_back(f);
  }
  PatternSet p;
  for (const auto& b : enumerate_behaviors(cls, pts)) {
    bool ok = true;
    for (const auto& [x, y] : labeled)
      if (cls.level(b.witness, x) != y) { ok = false; break; }
    if (ok) p.push_back(b.labels);
  }
  return star_of_patterns(p);
}

// ---- dispatch ----

bool has_version_space(const HypothesisClass& cls) {
  switch (cls.kind()) {
    case ClassKind::Threshold1D:
    case ClassKind::Interval1D:
    case ClassKind::SparseIndicator:
    case ClassKind::FiniteTable:
    case ClassKind::AxisRectangle:
      return true;
    default:
      return false;
  }
}

AnyVS make_version_space(const HypothesisClass& cls) {
  switch (cls.kind()) {
    case ClassKind::Threshold1D: return ThresholdVS::initial(cls);
    case ClassKind::Interval1D: return IntervalVS::initial(cls);
    case ClassKind::SparseIndicator: return SparseVS::initial(cls);
    case ClassKind::FiniteTable: return TableVS::initial(cls);
    case ClassKind::AxisRectangle: return RectVS::initial(cls);
    default: throw Error("no version space for class " + cls.name());
  }
}

std::uint8_t possible_labels(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen, const Feature& x) {
  return std::visit([&](const auto& v) { return v.possible(cls, seen, x); }, vs);
}

void restrict_vs(const HypothesisClass& cls, AnyVS& vs, const SeenSet& seen, const Feature& x, int y) {
  std::visit([&](auto& v) { v.restrict(cls, seen, x, y); }, vs);
}

Hypothesis vs_witness(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen) {
  return std::visit([&](const auto& v) { return v.witness(cls, seen); }, vs);
}

double vs_count(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen) {
  return std::visit([&](const auto& v) { return v.count(cls, seen); }, vs);
}

std::int64_t vs_star(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen) {
  return std::visit([&](const auto& v) { return v.star(cls, seen); }, vs);
}

LabeledPrefix build_version_space(const HypothesisClass& cls, std::span<const Feature> prefix,
                                  std::span<const std::uint8_t> labels) {
  if (prefix.size() != labels.size()) throw Error("prefix and labels differ in length");
  LabeledPrefix out{make_version_space(cls), {}};
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    cls.check_feature(prefix[i]);
    const auto can = possible_labels(cls, out.vs, out.seen, prefix[i]);
    if (!(can & (labels[i] ? kCan1 : kCan0))) throw Error("labels are not realizable by the class");
    restrict_vs(cls, out.vs, out.seen, prefix[i], labels[i]);
    out.seen.insert(prefix[i]);
  }
  return out;
}

bool certifies(const HypothesisClass& cls, std::span<const Feature> prefix, std::span<const std::uint8_t> labels,
               const Feature& x) {
  if (!has_version_space(cls)) return certifies_by_enumeration(cls, prefix, labels, x);
  cls.check_feature(x);
  auto lp = build_version_space(cls, prefix, labels);
  const auto can = possible_labels(cls, lp.vs, lp.seen, x);
  return can == kCan0 || can == kCan1;
}

bool certifies_by_enumeration(const HypothesisClass& cls, std::span<const Feature> prefix,
                              std::span<const std::uint8_t> labels, const Feature& x) {
  if (prefix.size() != labels.size()) throw Error("prefix and labels differ in length");
  std::vector<Feature> s(prefix.begin(), prefix.end());
  s.push_back(x);
  std::uint8_t seen = 0;
  for (const auto& b : enumerate_behaviors(cls, s))
    if (std::equal(labels.begin(), labels.end(), b.labels.begin())) seen |= b.labels.back() ? kCan1 : kCan0;
  if (!seen) throw Error("labels are not realizable by the class");
  return seen != (kCan0 | kCan1);
}

std::int64_t non_certified_count(const HypothesisClass& cls, std::span<const Feature> sample, const Hypothesis& h) {
  cls.check_hypothesis(h);
  std::int64_t n = 0;
  std::vector<Feature> rest;
  std::vector<std::uint8_t> lab;
  for (std::size_t t = 0; t < sample.size(); ++t) {
    rest.clear();
    lab.clear();
    for (std::size_t j = 0; j < sample.size(); ++j)
      if (j != t) {
        rest.push_back(sample[j]);
        lab.push_back(static_cast<std::uint8_t>(cls.level(h, sample[j])));
      }
    n += !certifies(cls, rest, lab, sample[t]);
  }
  return n;
}

}  // namespace seqcover
