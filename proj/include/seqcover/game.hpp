#pragma once

#include "seqcover/distribution.hpp"
#include "seqcover/loss.hpp"
#include "seqcover/online.hpp"

namespace seqcover {

// Best-in-class cumulative loss on a known feature sequence, updated one
// labeled position at a time; pop() undoes the most recent push().
class Comparator {
 public:
  virtual ~Comparator() = default;
  virtual void push(std::size_t t, double y) = 0;
  virtual void pop() = 0;
  virtual double min_loss() const = 0;
  virtual std::unique_ptr<Comparator> clone() const = 0;
};

// Per-behavior sums; segment tree over cuts for thresholds; top-d savings for sparse classes.
std::unique_ptr<Comparator> make_comparator(const HypothesisClass& cls, std::span<const Feature> xs,
                                            const LossSpec& loss);
std::unique_ptr<Comparator> make_generic_comparator(const HypothesisClass& cls, std::span<const Feature> xs,
                                                    const LossSpec& loss);

struct AdversarySpec {
  enum class Kind { Realizable, Random, Greedy, ExactMinimax } kind = Kind::Realizable;
  std::optional<Hypothesis> target;  // Realizable: fixed h, or drawn from the class when empty
  int depth = 2;                     // Greedy lookahead
  std::string name() const;
};

// What the adversary may look at when choosing y_t: the whole feature
// sequence, the learner after it committed to its prediction, and the game so far.
struct GameView {
  const HypothesisClass& cls;
  std::span<const Feature> xs;
  std::size_t t;
  double prediction;
  const OnlinePredictor& learner;
  Comparator& comparator;  // holds labels 0..t-1; must be left as found
  double learner_loss;
  const LossSpec& loss;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual double label(const GameView& v, Rng& rng) = 0;
  // The hypothesis behind realizable labels, if any.
  virtual std::optional<Hypothesis> target() const { return std::nullopt; }
};

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, const HypothesisClass& cls, Rng& rng);

struct GameTranscript {
  std::vector<Feature> xs;
  std::vector<double> predictions, labels, losses;
  double learner_loss = 0, comparator_loss = 0, regret = 0;
  std::optional<double> target_loss;  // loss of the fixed target, for average-style regret
  std::int64_t mistakes = 0;          // rounds with |yhat - y| >= 1/2
};

GameTranscript run_game(const HypothesisClass& cls, std::span<const Feature> xs, OnlinePredictor& learner,
                        Adversary& adversary, const LossSpec& loss, Rng& rng);

// Largest final regret any label sequence forces on a deterministic learner
// (full search, T <= 12), with the maximizing labels.
struct MinimaxPath {
  double regret;
  std::vector<double> labels;
};
MinimaxPath exact_minimax_regret(const HypothesisClass& cls, std::span<const Feature> xs,
                                 const OnlinePredictor& learner, const LossSpec& loss);

}  // namespace seqcover
