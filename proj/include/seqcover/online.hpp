#pragma once

#include <memory>

#include "seqcover/domain.hpp"
#include "seqcover/loss.hpp"
#include "seqcover/version_space.hpp"

namespace seqcover {

// A learner sees x_t, commits to a prediction, and only then sees y_t.
// predict() must precede observe() for the same round.
class OnlinePredictor {
 public:
  virtual ~OnlinePredictor() = default;
  virtual double predict(const Feature& x) = 0;
  virtual void observe(const Feature& x, double y) = 0;
  virtual std::unique_ptr<OnlinePredictor> clone() const = 0;
  virtual std::string name() const = 0;
};

class ConstantPredictor final : public OnlinePredictor {
 public:
  ConstantPredictor(double p, std::string name) : p_(p), name_(std::move(name)) {}
  double predict(const Feature&) override { return p_; }
  void observe(const Feature&, double) override {}
  std::unique_ptr<OnlinePredictor> clone() const override { return std::make_unique<ConstantPredictor>(*this); }
  std::string name() const override { return name_; }

 private:
  double p_;
  std::string name_;
};

// Realizable-case predictor on binary labels; thresholds take the closed form.
class OneInclusionPredictor final : public OnlinePredictor {
 public:
  explicit OneInclusionPredictor(HypothesisClass cls, bool lenient = true);
  double predict(const Feature& x) override;
  void observe(const Feature& x, double y) override;
  std::unique_ptr<OnlinePredictor> clone() const override { return std::make_unique<OneInclusionPredictor>(*this); }
  std::string name() const override { return "one_inclusion"; }

 private:
  HypothesisClass cls_;
  bool lenient_;
  std::vector<Feature> xs_;
  std::vector<std::uint8_t> ys_;
  std::int64_t max_zero_ = -1, min_one_ = kInfinite;
  bool broken_ = false;
};

// SL of the consistent subclass at star scale s (closed forms or brute force).
std::int64_t subclass_sl(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen, std::int64_t s,
                         int depth_cap);
// Label preferred by the Star-Littlestone SOA rule at x; ties go to 0.
int soa_star_choice(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen, const Feature& x,
                    std::int64_t s, int depth_cap);
int soa_star_predict(const HypothesisClass& cls, std::span<const Feature> prefix, std::span<const std::uint8_t> labels,
                     const Feature& x, std::int64_t s);

class SoaStarPredictor final : public OnlinePredictor {
 public:
  SoaStarPredictor(HypothesisClass cls, std::int64_t s, int depth_cap = 4);
  double predict(const Feature& x) override;
  void observe(const Feature& x, double y) override;
  std::unique_ptr<OnlinePredictor> clone() const override { return std::make_unique<SoaStarPredictor>(*this); }
  std::string name() const override { return "soa"; }

 private:
  HypothesisClass cls_;
  std::int64_t s_;
  int cap_;
  AnyVS vs_;
  SeenSet seen_;
  bool broken_ = false;
};

// Posterior predictive of the uniform prior over the class on realizable
// labels: the fraction of consistent hypotheses labeling x with 1. After an
// unrealizable label it predicts 1/2.
class ClassBayesPredictor final : public OnlinePredictor {
 public:
  explicit ClassBayesPredictor(HypothesisClass cls);
  double predict(const Feature& x) override;
  void observe(const Feature& x, double y) override;
  std::unique_ptr<OnlinePredictor> clone() const override { return std::make_unique<ClassBayesPredictor>(*this); }
  std::string name() const override { return "bayes"; }

 private:
  HypothesisClass cls_;
  AnyVS vs_, next0_, next1_;
  SeenSet seen_;
  std::uint8_t can_ = 0;
  bool broken_ = false;
};

// Fixed-design normalized maximum likelihood for log loss on a known sequence:
// q_t = S_1 / (S_0 + S_1), S_y summing max-likelihoods over all completions.
class NmlPredictor final : public OnlinePredictor {
 public:
  NmlPredictor(const HypothesisClass& cls, std::vector<Feature> xs, double clamp_eps);
  double predict(const Feature& x) override;
  void observe(const Feature& x, double y) override;
  std::unique_ptr<OnlinePredictor> clone() const override { return std::make_unique<NmlPredictor>(*this); }
  std::string name() const override { return "nml"; }

 private:
  std::vector<Feature> xs_;
  std::vector<double> mass_;  // max-likelihood per label sequence, y_1 as the most significant bit
  std::uint32_t code_ = 0;
  std::size_t t_ = 0;
};

}  // namespace seqcover
