#pragma once

#include <map>

#include "seqcover/domain.hpp"

namespace seqcover {

inline constexpr int kBruteDomainCap = 12;
inline constexpr int kDepthCap = 4;

// Each pattern is one behavior on a fixed list of points (binary labels).
using PatternSet = std::vector<std::vector<std::uint8_t>>;

std::int64_t vc_of_patterns(const PatternSet& patterns);
// Largest star-shattered subset: some center pattern whose single flips on the
// subset are all present (outside the subset everything agrees with the center).
std::int64_t star_of_patterns(const PatternSet& patterns);

std::int64_t vc_dimension(const HypothesisClass& cls);
std::int64_t star_number(const HypothesisClass& cls);  // kInfinite allowed
// SL(s) with the convention that the minimum value is 0.
std::int64_t star_littlestone_dimension(const HypothesisClass& cls, std::int64_t s, int depth_cap = kDepthCap);
// SL(s) of a finite pattern set (rows over a point list), by memoized tree search.
std::int64_t sl_of_patterns(const PatternSet& patterns, std::int64_t s, int depth_cap);

std::int64_t fat_shattering(const HypothesisClass& cls, double alpha);
// Brute force on an explicit real-valued behavior table (values per point).
std::int64_t fat_of_values(const std::vector<std::vector<double>>& values, double alpha);

struct ComplexityReport {
  std::int64_t vc = 0;
  std::int64_t star = 0;
  std::map<std::int64_t, std::int64_t> sl_at_scale;
  std::map<double, std::int64_t> fat;
};

ComplexityReport complexity_report(const HypothesisClass& cls, std::span<const std::int64_t> scales,
                                   std::span<const double> alphas);

}  // namespace seqcover
