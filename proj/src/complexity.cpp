#include "seqcover/complexity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace seqcover {

namespace {

std::vector<std::uint32_t> to_masks(const PatternSet& patterns, int& n) {
  n = patterns.empty() ? 0 : static_cast<int>(patterns.front().size());
  if (n > 24) throw Error("pattern brute force limited to 24 points");
  std::vector<std::uint32_t> m;
  for (const auto& p : patterns) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(p[i] & 1) << i;
    m.push_back(v);
  }
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

std::vector<std::uint32_t> project(const std::vector<std::uint32_t>& masks, std::uint32_t s) {
  std::vector<std::uint32_t> p;
  p.reserve(masks.size());
  for (auto m : masks) p.push_back(m & s);
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

bool star_shattered(const std::vector<std::uint32_t>& masks, std::uint32_t s) {
  auto p = project(masks, s);
  if (p.size() < static_cast<std::size_t>(std::popcount(s)) + 1) return false;
  for (auto c : p) {
    bool all = true;
    for (std::uint32_t b = s; b && all; b &= b - 1)
      all = std::binary_search(p.begin(), p.end(), c ^ (b & -b));
    if (all) return true;
  }
  return false;
}

std::int64_t star_of_masks(const std::vector<std::uint32_t>& masks, int n) {
  if (masks.size() <= 1) return 0;
  // Subsets by decreasing size; the first hit is the answer.
  for (int size = std::min<int>(n, static_cast<int>(masks.size()) - 1); size >= 1; --size) {
    for (std::uint32_t s = 0; s < (1u << n); ++s)
      if (std::popcount(s) == size && star_shattered(masks, s)) return size;
  }
  return 0;
}

PatternSet domain_patterns(const HypothesisClass& cls) {
  if (cls.kind() == ClassKind::FiniteTable) {
    if (cls.domain_points() > kBruteDomainCap) throw Error("brute force limited to 12 domain points");
    return cls.rows();
  }
  if (cls.domain_points() > kBruteDomainCap || cls.kind() == ClassKind::AxisRectangle)
    throw Error("brute force limited to 12 domain points; class " + cls.name() + " is too large");
  return to_finite_table(cls).rows();
}

struct SlSearch {
  std::vector<std::uint32_t> cols;  // cols[x] = bitmask over rows with label 1 at x
  std::int64_t s;
  const PatternSet* rows;
  std::unordered_map<std::uint64_t, std::int64_t> star_memo;
  std::unordered_map<std::uint64_t, int> memo[kDepthCap + 2];

  std::int64_t star(std::uint64_t mask) {
    auto it = star_memo.find(mask);
    if (it != star_memo.end()) return it->second;
    PatternSet sub;
    for (std::uint64_t m = mask; m; m &= m - 1) sub.push_back((*rows)[std::countr_zero(m)]);
    return star_memo[mask] = star_of_patterns(sub);
  }

  // Deepest shattered tree with root class `mask`, or -1 if Star(mask) <= s.
  int depth(std::uint64_t mask, int budget) {
    if (star(mask) <= s) return -1;
    if (budget == 0) return 0;
    auto it = memo[budget].find(mask);
    if (it != memo[budget].end()) return it->second;
    int best = 0;
    for (auto c : cols) {
      const std::uint64_t m1 = mask & c, m0 = mask & ~static_cast<std::uint64_t>(c);
      if (!m1 || !m0) continue;
      const int v = std::min(depth(m0, budget - 1), depth(m1, budget - 1));
      if (v >= 0) best = std::max(best, v + 1);
      if (best == budget) break;
    }
    return memo[budget][mask] = best;
  }
};

}  // namespace

std::int64_t vc_of_patterns(const PatternSet& patterns) {
  int n = 0;
  auto masks = to_masks(patterns, n);
  std::int64_t best = 0;
  for (std::uint32_t s = 1; s < (1u << n); ++s) {
    const int size = std::popcount(s);
    if (size <= best || (std::size_t{1} << size) > masks.size()) continue;
    if (project(masks, s).size() == (std::size_t{1} << size)) best = size;
  }
  return best;
}

std::int64_t star_of_patterns(const PatternSet& patterns) {
  int n = 0;
  auto masks = to_masks(patterns, n);
  return star_of_masks(masks, n);
}

std::int64_t vc_dimension(const HypothesisClass& cls) {
  if (!cls.binary()) throw Error("VC dimension needs a binary class");
  if (auto v = cls.declared_vc()) return *v;
  return vc_of_patterns(domain_patterns(cls));
}

std::int64_t star_number(const HypothesisClass& cls) {
  if (!cls.binary()) throw Error("star number needs a binary class");
  if (auto v = cls.declared_star()) return *v;
  return star_of_patterns(domain_patterns(cls));
}

std::int64_t sl_of_patterns(const PatternSet& patterns, std::int64_t s, int depth_cap) {
  if (depth_cap < 0 || depth_cap > kDepthCap) throw Error("depth cap must be in [0, 4]");
  if (patterns.size() > 32) throw Error("tree search limited to 32 behaviors");
  if (patterns.empty()) return 0;
  if (patterns.front().size() > static_cast<std::size_t>(kBruteDomainCap))
    throw Error("tree search limited to 12 points");
  SlSearch search;
  search.s = s;
  search.rows = &patterns;
  for (std::size_t x = 0; x < patterns.front().size(); ++x) {
    std::uint32_t c = 0;
    for (std::size_t r = 0; r < patterns.size(); ++r) c |= static_cast<std::uint32_t>(patterns[r][x] & 1) << r;
    search.cols.push_back(c);
  }
  const std::uint64_t all = (std::uint64_t{1} << patterns.size()) - 1;
  return std::max(0, search.depth(all, depth_cap));
}

std::int64_t star_littlestone_dimension(const HypothesisClass& cls, std::int64_t s, int depth_cap) {
  if (!cls.binary()) throw Error("Star-Littlestone dimension needs a binary class");
  if (depth_cap < 0 || depth_cap > kDepthCap) throw Error("depth cap must be in [0, 4]");
  const std::int64_t cap = depth_cap;
  switch (cls.kind()) {
    case ClassKind::Threshold1D: {
      // With m uncertain grid points a query leaves m-1 split across two children,
      // and Star is min(m, 2); depth d needs m >= g(d), g(0) = s+1, g(d) = 2g(d-1)+1.
      if (s >= 2) return 0;
      const std::int64_t m = cls.grid() + 1;
      std::int64_t g = s + 1, d = -1;
      while (g <= m && d < cap) {
        ++d;
        g = 2 * g + 1;
      }
      return std::max<std::int64_t>(d, 0);
    }
    case ClassKind::Interval1D:
      // Fixing one label leaves at most two threshold-like sides of star <= 2 each.
      if (s >= 4) return 0;
      break;
    case ClassKind::SparseIndicator: {
      // Star of the consistent class is (#free points) while fewer than d ones are fixed.
      const std::int64_t N = cls.domain_points();
      if (cls.budget() < 1 || N <= s) return 0;
      return std::min<std::int64_t>({cls.budget() - 1, N - s - 1, cap});
    }
    default:
      break;
  }
  return sl_of_patterns(domain_patterns(cls), s, depth_cap);
}

std::int64_t fat_of_values(const std::vector<std::vector<double>>& values, double alpha) {
  if (values.empty()) return 0;
  constexpr double tol = 1e-12;
  const int n = static_cast<int>(values.front().size());
  if (n > kBruteDomainCap) throw Error("fat-shattering brute force limited to 12 points");
  // Witness candidates: s = v - alpha and s = v + alpha over output values v at each point.
  std::vector<std::vector<double>> cand(n);
  for (int t = 0; t < n; ++t) {
    for (const auto& h : values) {
      cand[t].push_back(h[t] - alpha);
      cand[t].push_back(h[t] + alpha);
    }
    std::sort(cand[t].begin(), cand[t].end());
    cand[t].erase(std::unique(cand[t].begin(), cand[t].end()), cand[t].end());
  }
  auto shattered = [&](const std::vector<int>& pts) {
    const int p = static_cast<int>(pts.size());
    std::vector<double> w(p);
    auto check = [&]() {
      std::vector<char> hit(std::size_t{1} << p, 0);
      std::size_t got = 0;
      for (const auto& h : values) {
        std::size_t pat = 0;
        bool ok = true;
        for (int i = 0; i < p && ok; ++i) {
          const double v = h[pts[i]];
          if (v >= w[i] + alpha - tol) pat |= std::size_t{1} << i;
          else if (!(v <= w[i] - alpha + tol)) ok = false;
        }
        if (ok && !hit[pat]) { hit[pat] = 1; ++got; }
      }
      return got == hit.size();
    };
    auto rec = [&](auto&& self, int i) -> bool {
      if (i == p) return check();
      for (double c : cand[pts[i]]) {
        w[i] = c;
        if (self(self, i + 1)) return true;
      }
      return false;
    };
    return rec(rec, 0);
  };
  std::int64_t best = 0;
  for (int size = 1; size <= n; ++size) {
    bool found = false;
    for (std::uint32_t s = 0; s < (1u << n) && !found; ++s) {
      if (std::popcount(s) != size) continue;
      std::vector<int> pts;
      for (int i = 0; i < n; ++i)
        if (s >> i & 1) pts.push_back(i);
      found = shattered(pts);
    }
    if (!found) break;
    best = size;
  }
  return best;
}

std::int64_t fat_shattering(const HypothesisClass& cls, double alpha) {
  if (!(alpha > 0)) throw Error("fat-shattering scale must be positive");
  if (alpha > 0.5) return 0;
  if (cls.binary()) return vc_dimension(cls);
  if (cls.kind() == ClassKind::Monotone1D) {
    // Shattering p ordered points needs a level chain a1 < b1 <= a2 < ... with gaps >= 2 alpha.
    const auto& lv = cls.levels();
    std::int64_t steps = 0;
    double cur = lv.front();
    for (double u : lv)
      if (u >= cur + 2 * alpha - 1e-12) {
        ++steps;
        cur = u;
      }
    return std::min<std::int64_t>(steps, cls.domain_points());
  }
  throw Error("no fat-shattering route for class " + cls.name());
}

ComplexityReport complexity_report(const HypothesisClass& cls, std::span<const std::int64_t> scales,
                                   std::span<const double> alphas) {
  ComplexityReport r;
  if (cls.binary()) {
    r.vc = vc_dimension(cls);
    r.star = star_number(cls);
    for (auto s : scales) r.sl_at_scale[s] = star_littlestone_dimension(cls, s);
  }
  for (double a : alphas) r.fat[a] = fat_shattering(cls, a);
  return r;
}

}  // namespace seqcover
