#pragma once

#include <gmpxx.h>

#include "seqcover/distribution.hpp"
#include "seqcover/loss.hpp"

namespace seqcover {

struct OracleResult {
  std::string name;
  double measured = 0;
  double bound = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;
};

// Three-sigma binomial slack for an empirical rate around p.
double binomial_slack(double p, std::size_t trials);

// ---- fixed-design regret ----

// ln of the Shtarkov sum for binary experts: ln(#behaviors on the sample).
double shtarkov_logloss_regret(const HypothesisClass& cls, std::span<const Feature> sample);
// The same sum taken literally over all 2^T label vectors (T <= 16), with expert
// likelihoods clamped to [eps, 1-eps]; eps = 0 gives the unclamped sum.
double shtarkov_by_enumeration(const HypothesisClass& cls, std::span<const Feature> sample, double eps);
// Throws unless `small` is a sub-multiset of `large`.
bool monotonicity_check(const HypothesisClass& cls, std::span<const Feature> small, std::span<const Feature> large);

// Minimax regret of the fixed-design log-loss game with predictions and expert
// outputs clamped to [eps, 1-eps], by backward induction over 2^T label paths
// with a golden-section search for each prediction (T <= 16).
double fixed_design_minimax_value(const HypothesisClass& cls, std::span<const Feature> xs, double eps);

// ---- stochastic tails ----

// Fraction of runs whose full-coverage time of [T] exceeds T ln T + c T.
double coupon_collector_tail(std::int64_t T, double c, std::size_t trials, std::uint64_t seed, unsigned threads = 1);

// Fraction of uniformly random orders of `xs` on which the one-inclusion
// predictor makes at least k mistakes on h's labels, for each k in thresholds.
std::vector<double> permutation_error_tail(const HypothesisClass& cls, std::span<const Feature> xs,
                                           const Hypothesis& h, std::size_t trials,
                                           std::span<const std::int64_t> thresholds, std::uint64_t seed);
// Exact tail over all orders (|xs| <= 8).
std::vector<double> permutation_error_tail_exact(const HypothesisClass& cls, std::span<const Feature> xs,
                                                 const Hypothesis& h, std::span<const std::int64_t> thresholds);
// Mistakes of the threshold one-inclusion rule on one order of distinct keys,
// for every cut c in 0..n (labels 1 on the c largest keys).
std::vector<std::int64_t> threshold_mistakes_all_cuts(std::span<const std::int64_t> keys_in_order);

// ---- threshold lower bound ----

// f(1) = 0, f(T) = (2/T^2) sum_{t<T} (t f(t) + t), in exact rationals.
std::vector<mpq_class> threshold_game_value(std::int64_t T_max);

// Mean mistakes of the Bayes rule for a uniform threshold on [0,1] under uniform
// features: predict the side holding more of the consistent interval. With a
// point mass every feature equals that point.
double bayes_threshold_errors(std::int64_t T, std::size_t trials, std::uint64_t seed,
                              std::optional<double> point_mass = std::nullopt, unsigned threads = 1);

// ---- double sampling ----

// A cover under nu: either the whole class (when eps is below every atom of nu,
// distinct functions are already eps apart) or an explicit greedy list.
struct DistributionCover {
  bool whole_class = false;
  std::vector<Hypothesis> members;
};
DistributionCover greedy_distribution_cover(const HypothesisClass& cls, const Marginal& nu, double eps);
// sup_h inf_f sum_t 1{h(x_t) != f(x_t)} on one sample.
std::int64_t sup_inf_mismatches(const HypothesisClass& cls, const DistributionCover& F, std::span<const Feature> xs);
// Monte-Carlo mean of the above over T i.i.d. draws from nu.
double double_sampling_gap(const HypothesisClass& cls, const Marginal& nu, const DistributionCover& F, std::int64_t T,
                           std::size_t trials, std::uint64_t seed, unsigned threads = 1);

// ---- type-k product distributions ----

// Mean over draws of the largest one-inclusion mistake count over behaviors.
double type_k_error_bound(const HypothesisClass& cls, const DistributionSpec& dist, std::int64_t T,
                          std::size_t trials, std::uint64_t seed, unsigned threads = 1);
// k * VC * ln(T / k).
double type_k_reference(std::int64_t k, std::int64_t vc, std::int64_t T);
// Dyadic points of the grid in breadth-first bisection order (first k).
std::vector<Feature> bisection_stream(std::int64_t grid, std::size_t k);

}  // namespace seqcover
