#pragma once

#include <gmpxx.h>

#include "seqcover/mixing.hpp"
#include "seqcover/version_space.hpp"

namespace seqcover {

// Outcome of building the realization tree of a class on a stream with 2^M
// member indices. Each two-child node halves the index interval of its parent;
// it fails iff a two-child node is reached with an interval of size 1.
struct TreeOutcome {
  bool failed = false;
  std::int64_t max_binary = 0;  // most two-child nodes on one root-to-leaf path
  std::size_t leaves = 0;
  std::optional<Hypothesis> uncovered;  // a hypothesis routed through an empty interval
};

// Starts from (vs, seen) so a tree can hang off a partially labeled prefix.
TreeOutcome realization_tree_check(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen,
                                   std::span<const Feature> stream, std::int64_t M, bool stop_at_failure);
TreeOutcome realization_tree_check(const HypothesisClass& cls, std::span<const Feature> stream, std::int64_t M,
                                   bool stop_at_failure = false);

// Two-child nodes met by the path of one label sequence.
std::int64_t binary_nodes_on_path(const HypothesisClass& cls, AnyVS vs, SeenSet seen, std::span<const Feature> stream,
                                  std::span<const std::uint8_t> labels);

// True iff some member with M bits follows the labels: every two-child node
// past the M-th takes label 0.
bool path_within_budget(const HypothesisClass& cls, AnyVS vs, SeenSet seen, std::span<const Feature> stream,
                        std::span<const std::uint8_t> labels, std::int64_t M);

// Member k of the realization cover: at its j-th two-child node it takes bit
// (M-1-j) of k; once the M bits are spent it always takes label 0.
class RealizationCursor final : public MemberCursor {
 public:
  RealizationCursor(HypothesisClass cls, AnyVS vs, SeenSet seen, std::int64_t M, mpz_class k);
  double next(const Feature& x) override;
  std::unique_ptr<MemberCursor> clone() const override { return std::make_unique<RealizationCursor>(*this); }
  std::int64_t bits_used() const { return used_; }

 private:
  HypothesisClass cls_;
  AnyVS vs_;
  SeenSet seen_;
  std::int64_t M_, used_ = 0;
  mpz_class k_;
};

// All 2^M realization-tree members, grouped by tree node.
std::unique_ptr<ExpertPool> make_realization_pool(const HypothesisClass& cls, std::int64_t M);
// Every hypothesis of the class under a uniform prior over its parameters,
// grouped by behavior so far; shares are ratios of consistent counts.
std::unique_ptr<ExpertPool> make_class_bayes_pool(const HypothesisClass& cls);

}  // namespace seqcover
