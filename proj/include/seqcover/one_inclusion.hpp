#pragma once

#include "seqcover/domain.hpp"

namespace seqcover {

// One-inclusion graph on the distinct sorted points of a sample: nodes are the
// behaviors (lexicographic order), edges join behaviors at Hamming distance 1.
struct OneInclusionGraph {
  std::vector<Feature> points;
  std::vector<std::vector<std::uint8_t>> nodes;
  struct Edge {
    std::uint32_t a, b;  // a < b; b has label 1 at `coord`
    std::uint32_t coord;
    std::uint32_t head;  // a or b after orientation
  };
  std::vector<Edge> edges;
  std::int64_t max_outdegree() const;
};

OneInclusionGraph build_one_inclusion_graph(const HypothesisClass& cls, std::span<const Feature> sample);
// Min-degree peeling, then path reversals until no reversal lowers the maximum out-degree.
void orient(OneInclusionGraph& g);

// Prediction at xs.back() given labels of the first t-1 points. Throws on an
// unrealizable history unless `lenient`, in which case it returns 0.
int one_inclusion_predict(const HypothesisClass& cls, std::span<const Feature> xs,
                          std::span<const std::uint8_t> labels, bool lenient = false);

// Threshold specialisation: forced labels are returned, otherwise 1. Agrees with
// the generic graph because peeling a path orients every edge toward more ones.
int threshold_one_inclusion_predict(std::int64_t max_zero, std::int64_t min_one, std::int64_t x);

}  // namespace seqcover
