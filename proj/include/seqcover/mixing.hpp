#pragma once

#include <memory>

#include "seqcover/loss.hpp"
#include "seqcover/online.hpp"

namespace seqcover {

// Weighted average with weights proportional to exp(-eta * cumulative loss).
double ewa_predict(std::span<const double> predictions, std::span<const double> cumulative_losses, double eta);
// Substitution prediction of the Aggregating Algorithm: the midpoint of the
// exact feasible interval. Throws when the interval is empty.
double aggregating_predict(std::span<const double> predictions, std::span<const double> weights, double eta,
                           const LossSpec& loss);
// Posterior mean of predictions clipped to [alpha, 1 - alpha].
double smooth_truncated_bayes_predict(std::span<const double> predictions, std::span<const double> weights,
                                      double alpha);
double clip(double p, double alpha);

// A finite pool of sequential experts, evaluated in groups: all members of a
// group have made identical predictions so far. Before the first advance there
// is a single root group holding the whole pool.
class ExpertPool {
 public:
  struct Group {
    double prediction;
    std::uint32_t parent;  // index into the previous group list
    double log_share;      // ln(|group| / |parent|)
  };
  virtual ~ExpertPool() = default;
  virtual double log_size() const = 0;  // ln |pool|
  virtual const std::vector<Group>& advance(const Feature& x) = 0;
  // Keep only groups with keep[i] != 0; indices are compacted in order.
  virtual void prune(const std::vector<char>& keep) = 0;
  virtual std::unique_ptr<ExpertPool> clone() const = 0;
  virtual std::string name() const = 0;
};

// Members given explicitly as sequential-function cursors; each is its own group.
class MemberCursor {
 public:
  virtual ~MemberCursor() = default;
  virtual double next(const Feature& x) = 0;  // output at x given all earlier x
  virtual std::unique_ptr<MemberCursor> clone() const = 0;
};

class ExplicitPool final : public ExpertPool {
 public:
  explicit ExplicitPool(std::vector<std::unique_ptr<MemberCursor>> members);
  ExplicitPool(const ExplicitPool& o);
  double log_size() const override { return log_n_; }
  const std::vector<Group>& advance(const Feature& x) override;
  void prune(const std::vector<char>& keep) override;
  std::unique_ptr<ExpertPool> clone() const override { return std::make_unique<ExplicitPool>(*this); }
  std::string name() const override { return "explicit"; }

 private:
  std::vector<std::unique_ptr<MemberCursor>> members_;
  std::vector<Group> groups_;
  double log_n_;
  bool started_ = false;
};

// Groups are tuples of component groups; prediction is the combiner of theirs.
class ProductPool final : public ExpertPool {
 public:
  ProductPool(std::vector<std::unique_ptr<ExpertPool>> parts, Combiner f);
  ProductPool(const ProductPool& o);
  double log_size() const override;
  const std::vector<Group>& advance(const Feature& x) override;
  void prune(const std::vector<char>& keep) override;
  std::unique_ptr<ExpertPool> clone() const override { return std::make_unique<ProductPool>(*this); }
  std::string name() const override { return "product"; }

 private:
  std::vector<std::unique_ptr<ExpertPool>> parts_;
  Combiner f_;
  std::vector<std::vector<std::uint32_t>> tuples_;
  std::vector<std::size_t> part_sizes_;
  std::vector<Group> groups_;
};

enum class MixMode { SmoothTruncatedBayes, Ewa, Aggregating };

// Mixture over a pool with group weights kept normalized. For the truncated
// Bayes mode an extra constant-1/2 expert carries prior mass 1/(N+1); its
// weight relative to the pool is tracked in the log domain.
// prune_log > 0 drops groups far behind in both weight and likelihood. That
// speeds up large pools but voids the per-sequence bound on adversarial labels.
class MixtureLearner final : public OnlinePredictor {
 public:
  MixtureLearner(std::unique_ptr<ExpertPool> pool, MixMode mode, double param, LossSpec loss,
                 double prune_log = 0.0);
  MixtureLearner(const MixtureLearner& o);
  double predict(const Feature& x) override;
  void observe(const Feature& x, double y) override;
  std::unique_ptr<OnlinePredictor> clone() const override { return std::make_unique<MixtureLearner>(*this); }
  std::string name() const override;
  std::size_t groups() const { return w_.size(); }
  double log_pool_size() const { return pool_->log_size(); }

 private:
  std::unique_ptr<ExpertPool> pool_;
  MixMode mode_;
  double param_;
  LossSpec loss_;
  double prune_log_;
  std::vector<double> w_, ll_, pred_;  // ll_: log-likelihood of each group so far
  double log_half_ = 0;  // ln(weight of the 1/2 expert / weight of the pool)
};

}  // namespace seqcover
