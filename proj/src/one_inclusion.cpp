#include "seqcover/one_inclusion.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace seqcover {

std::int64_t OneInclusionGraph::max_outdegree() const {
  std::vector<std::int64_t> out(nodes.size(), 0);
  for (const auto& e : edges) ++out[e.head == e.a ? e.b : e.a];
  return out.empty() ? 0 : *std::max_element(out.begin(), out.end());
}

OneInclusionGraph build_one_inclusion_graph(const HypothesisClass& cls, std::span<const Feature> sample) {
  OneInclusionGraph g;
  g.points.assign(sample.begin(), sample.end());
  std::sort(g.points.begin(), g.points.end());
  g.points.erase(std::unique(g.points.begin(), g.points.end()), g.points.end());
  for (auto& b : enumerate_behaviors(cls, g.points)) g.nodes.push_back(std::move(b.labels));
  // Neighbours via lookup of each single flip.
  std::map<std::vector<std::uint8_t>, std::uint32_t> index;
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i], i);
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    auto v = g.nodes[i];
    for (std::uint32_t c = 0; c < v.size(); ++c) {
      if (v[c]) continue;
      v[c] = 1;
      if (auto it = index.find(v); it != index.end()) g.edges.push_back({i, it->second, c, it->second});
      v[c] = 0;
    }
  }
  return g;
}

void orient(OneInclusionGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<std::uint32_t>> inc(n);
  for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
    inc[g.edges[e].a].push_back(e);
    inc[g.edges[e].b].push_back(e);
  }
  auto other = [&](std::uint32_t e, std::uint32_t v) { return g.edges[e].a == v ? g.edges[e].b : g.edges[e].a; };
  // Peeling: the removed vertex points its remaining edges away from itself.
  std::vector<std::size_t> deg(n);
  for (std::size_t v = 0; v < n; ++v) deg[v] = inc[v].size();
  std::vector<char> gone(n, 0);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!gone[v] && (best == n || deg[v] < deg[best])) best = v;
    gone[best] = 1;
    for (auto e : inc[best]) {
      const auto u = other(e, static_cast<std::uint32_t>(best));
      if (gone[u]) continue;
      g.edges[e].head = u;
      --deg[u];
    }
  }
  // Repair: reverse a directed path from a max-out vertex to one with out <= max-2.
  std::vector<std::int64_t> out(n, 0);
  for (const auto& e : g.edges) ++out[other(static_cast<std::uint32_t>(&e - g.edges.data()), e.head)];
  while (true) {
    const auto mx = n ? *std::max_element(out.begin(), out.end()) : 0;
    bool improved = false;
    for (std::size_t s = 0; s < n && !improved; ++s) {
      if (out[s] != mx) continue;
      std::vector<std::int64_t> via(n, -1);
      std::vector<char> seen(n, 0);
      std::deque<std::uint32_t> q{static_cast<std::uint32_t>(s)};
      seen[s] = 1;
      while (!q.empty() && !improved) {
        const auto v = q.front();
        q.pop_front();
        for (auto e : inc[v]) {
          if (g.edges[e].head == v) continue;  // only edges leaving v
          const auto u = g.edges[e].head;
          if (seen[u]) continue;
          seen[u] = 1;
          via[u] = e;
          if (out[u] <= mx - 2) {
            for (auto w = u; w != s;) {
              const auto pe = static_cast<std::uint32_t>(via[w]);
              const auto from = other(pe, w);
              g.edges[pe].head = from;
              ++out[w];
              --out[from];
              w = from;
            }
            improved = true;
            break;
          }
          q.push_back(u);
        }
      }
    }
    if (!improved) break;
  }
}

int threshold_one_inclusion_predict(std::int64_t max_zero, std::int64_t min_one, std::int64_t x) {
  if (x >= min_one) return 1;
  if (x <= max_zero) return 0;
  return 1;
}

int one_inclusion_predict(const HypothesisClass& cls, std::span<const Feature> xs, std::span<const std::uint8_t> labels,
                          bool lenient) {
  if (xs.empty() || labels.size() + 1 != xs.size()) throw Error("one-inclusion needs t points and t-1 labels");
  const Feature& q = xs.back();
  for (const auto& x : xs) cls.check_feature(x);
  auto fail = [&]() -> int {
    if (lenient) return 0;
    throw Error("labels are not realizable by the class");
  };
  // Canonical form: distinct points sorted by feature, with the label each must carry.
  std::map<Feature, int> lab;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    auto [it, fresh] = lab.emplace(xs[i], labels[i]);
    if (!fresh && it->second != labels[i]) return fail();
  }
  if (auto it = lab.find(q); it != lab.end()) {
    // Still check realizability of the history.
    std::vector<Feature> pts;
    for (const auto& [x, y] : lab) pts.push_back(x);
    for (const auto& b : enumerate_behaviors(cls, pts)) {
      bool ok = true;
      std::size_t i = 0;
      for (const auto& [x, y] : lab) ok = ok && b.labels[i++] == y;
      if (ok) return it->second;
    }
    return fail();
  }
  auto g = build_one_inclusion_graph(cls, xs);
  const auto qi = static_cast<std::uint32_t>(std::lower_bound(g.points.begin(), g.points.end(), q) - g.points.begin());
  auto consistent = [&](const std::vector<std::uint8_t>& v) {
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      if (i == qi) continue;
      if (v[i] != lab.at(g.points[i])) return false;
    }
    return true;
  };
  int found = 0;
  std::uint8_t label = 0;
  for (const auto& v : g.nodes)
    if (consistent(v)) {
      ++found;
      label = v[qi];
    }
  if (found == 0) return fail();
  if (found == 1) return label;
  orient(g);
  for (const auto& e : g.edges)
    if (e.coord == qi && consistent(g.nodes[e.a])) return g.nodes[e.head][qi];
  throw Error("one-inclusion edge missing");
}

}  // namespace seqcover
