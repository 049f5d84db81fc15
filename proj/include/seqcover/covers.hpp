#pragma once

#include <gmpxx.h>

#include <functional>
#include <json.hpp>

#include "seqcover/distribution.hpp"
#include "seqcover/mixing.hpp"
#include "seqcover/realization_tree.hpp"

namespace seqcover {

struct CoverInfo {
  std::string construction;
  std::int64_t T = 0;
  double alpha = 0;  // scale at which the construction claims to cover
  double delta = 0;
  std::int64_t M = 0;
  mpz_class size;            // exact member count, or an upper bound if size_is_bound
  bool size_is_bound = false;
  nlohmann::json params = nlohmann::json::object();
  double log2_size() const;
};

// A finite family of sequential functions with lazy members. Member outputs at
// time t depend on the stream prefix x_1..x_t only.
class CoverSet {
 public:
  virtual ~CoverSet() = default;
  const CoverInfo& info() const { return info_; }
  nlohmann::json manifest() const;

  virtual std::unique_ptr<MemberCursor> cursor(const mpz_class& index) const = 0;
  std::vector<double> member_outputs(const mpz_class& index, std::span<const Feature> prefix) const;

  // Per behavior on the stream: is it matched within alpha at every step by one member?
  virtual std::vector<char> covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                          const std::vector<Behavior>& behaviors, double alpha) const;
  // A hypothesis left uncovered on this stream, if any.
  virtual std::optional<Hypothesis> first_uncovered(const HypothesisClass& cls, std::span<const Feature> stream,
                                                    double alpha) const;
  // Expert pool over all members; explicit enumeration unless overridden.
  virtual std::unique_ptr<ExpertPool> pool() const;

 protected:
  CoverInfo info_;
};

using CoverPtr = std::shared_ptr<const CoverSet>;

// Rank/unrank of subsets of {0..n-1} with at most k elements: by size, then lexicographic.
mpz_class count_small_subsets(std::int64_t n, std::int64_t k);
std::vector<std::int64_t> unrank_small_subset(std::int64_t n, std::int64_t k, mpz_class rank);

// Fixed hypotheses as members. With offline=true the members are, per stream,
// all behaviors on that stream (a non-sequential reference that never fails).
class HypothesisListCover final : public CoverSet {
 public:
  HypothesisListCover(HypothesisClass cls, std::vector<Hypothesis> members, std::int64_t T, bool offline = false);
  std::unique_ptr<MemberCursor> cursor(const mpz_class& index) const override;
  std::vector<char> covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                  const std::vector<Behavior>& behaviors, double alpha) const override;

 private:
  HypothesisClass cls_;
  std::vector<Hypothesis> members_;
  bool offline_;
};

// Members g_I: follow the predictor on its own past outputs, flipping at times in I.
class ErrorPatternCover final : public CoverSet {
 public:
  ErrorPatternCover(std::shared_ptr<const OnlinePredictor> predictor, std::int64_t T, std::int64_t err_budget);
  std::unique_ptr<MemberCursor> cursor(const mpz_class& index) const override;
  std::vector<char> covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                  const std::vector<Behavior>& behaviors, double alpha) const override;
  std::int64_t mistakes_on(std::span<const Feature> stream, std::span<const std::uint8_t> labels) const;

 private:
  std::shared_ptr<const OnlinePredictor> predictor_;
  std::int64_t err_;
};

// ceil((VC + 4 Star) log2 T + log2(1/delta)).
std::int64_t default_index_bits(std::int64_t vc, std::int64_t star, std::int64_t T, double delta);

class RealizationTreeCover final : public CoverSet {
 public:
  RealizationTreeCover(HypothesisClass cls, std::int64_t M, std::int64_t T, double delta);
  static RealizationTreeCover with_default_bits(HypothesisClass cls, std::int64_t T, double delta);
  std::unique_ptr<MemberCursor> cursor(const mpz_class& index) const override;
  std::vector<char> covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                  const std::vector<Behavior>& behaviors, double alpha) const override;
  std::optional<Hypothesis> first_uncovered(const HypothesisClass& cls, std::span<const Feature> stream,
                                            double alpha) const override;
  std::unique_ptr<ExpertPool> pool() const override { return make_realization_pool(cls_, info_.M); }
  const HypothesisClass& cls() const { return cls_; }

 private:
  HypothesisClass cls_;
};

struct RealizationResult {
  bool failed = false;
  std::shared_ptr<RealizationTreeCover> cover;
  TreeOutcome tree;
};
RealizationResult realization_tree_cover(const HypothesisClass& cls, std::span<const Feature> stream, std::int64_t M);

// Union over |I| <= d = SL(s)+1 of two-phase members: SOA with flips at I while
// the consistent class has Star > s, then a realization-tree member.
class StarLittlestoneCover final : public CoverSet {
 public:
  StarLittlestoneCover(HypothesisClass cls, std::int64_t s, int d_cap, std::int64_t T, double delta);
  std::unique_ptr<MemberCursor> cursor(const mpz_class& index) const override;
  std::vector<char> covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                  const std::vector<Behavior>& behaviors, double alpha) const override;
  std::int64_t error_budget() const { return d_; }
  std::int64_t phase2_bits() const { return info_.M; }

 private:
  HypothesisClass cls_;
  std::int64_t s_, d_;
  int cap_;
};

// Greedy sup-norm alpha-cover of the behaviors on a sample; returns witnesses.
std::vector<Hypothesis> local_alpha_cover(const HypothesisClass& cls, std::span<const Feature> sample, double alpha);
// Smallest cover by exhaustive subset search (tiny inputs only).
std::size_t minimum_alpha_cover_size(const HypothesisClass& cls, std::span<const Feature> sample, double alpha);
// log2 of the local cover size bound 2^{d(alpha/4)(log2^2 n + 2 log2^2(1/alpha) + 8)}.
double local_cover_log2_bound(std::int64_t fat_alpha_quarter, std::int64_t n, double alpha);

// Epoch cover for real-valued classes: epoch e spans times 2^{e-1}..2^e-1; in
// each, a greedy local cover on the earlier prefix, patched at <= r_e positions
// with values from the grid K.
class FatShatteringCover final : public CoverSet {
 public:
  FatShatteringCover(HypothesisClass cls, double alpha, std::int64_t T, double delta);
  std::unique_ptr<MemberCursor> cursor(const mpz_class& index) const override;
  std::vector<char> covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                  const std::vector<Behavior>& behaviors, double alpha) const override;
  const std::vector<double>& grid() const { return K_; }
  struct Epoch {
    std::int64_t start, len, r;  // 0-based first time, length, patch budget
    mpz_class bound_f, size;     // member-index range for the local cover, |G_e|
  };
  const std::vector<Epoch>& epochs() const { return epochs_; }

 private:
  HypothesisClass cls_;
  double alpha_;
  std::vector<double> K_;
  std::vector<Epoch> epochs_;
};

// Product-indexed members g = f(g_{j1}, ..., g_{jm}).
class CompositeCover final : public CoverSet {
 public:
  CompositeCover(std::vector<CoverPtr> parts, Combiner f);
  std::unique_ptr<MemberCursor> cursor(const mpz_class& index) const override;
  std::vector<char> covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                  const std::vector<Behavior>& behaviors, double alpha) const override;
  std::unique_ptr<ExpertPool> pool() const override;

 private:
  std::vector<CoverPtr> parts_;
  Combiner f_;
};
CoverPtr compose_covers(std::vector<CoverPtr> covers, Combiner f);

struct VerifyWitness {
  std::size_t trial;
  std::uint64_t seed;
  Hypothesis hypothesis;
};
struct VerifyResult {
  std::size_t trials = 0, failures = 0;
  double failure_rate = 0;
  std::vector<VerifyWitness> witnesses;  // first ten failures by trial index
};
VerifyResult verify_cover(const CoverSet& cover, const HypothesisClass& cls, const DistributionSpec& dist,
                          double alpha, std::size_t trials, std::uint64_t seed, unsigned threads = 1);

}  // namespace seqcover
