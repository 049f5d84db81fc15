#include "seqcover/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqcover {

double clip(double p, double alpha) { return std::clamp(p, alpha, 1 - alpha); }

double ewa_predict(std::span<const double> predictions, std::span<const double> cumulative_losses, double eta) {
  if (predictions.empty() || predictions.size() != cumulative_losses.size()) throw Error("EWA needs matched experts");
  const double lmin = *std::min_element(cumulative_losses.begin(), cumulative_losses.end());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double w = std::exp(-eta * (cumulative_losses[i] - lmin));
    num += w * predictions[i];
    den += w;
  }
  return num / den;
}

double aggregating_predict(std::span<const double> predictions, std::span<const double> weights, double eta,
                           const LossSpec& loss_spec) {
  if (predictions.empty() || predictions.size() != weights.size()) throw Error("AA needs matched experts");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double s0 = 0, s1 = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    s0 += weights[i] / total * std::exp(-eta * loss(loss_spec, predictions[i], 0));
    s1 += weights[i] / total * std::exp(-eta * loss(loss_spec, predictions[i], 1));
  }
  const auto iv = substitution_interval(loss_spec, -std::log(s0) / eta, -std::log(s1) / eta);
  if (iv.lo > iv.hi + 1e-9) throw Error("no substitution prediction: loss is not mixable at this eta");
  return std::clamp((iv.lo + iv.hi) / 2, 0.0, 1.0);
}

double smooth_truncated_bayes_predict(std::span<const double> predictions, std::span<const double> weights,
                                      double alpha) {
  if (!(alpha > 0 && alpha < 0.5)) throw Error("truncation alpha must lie in (0, 1/2)");
  if (predictions.empty() || predictions.size() != weights.size()) throw Error("mixture needs matched experts");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    num += weights[i] * clip(predictions[i], alpha);
    den += weights[i];
  }
  return num / den;
}

// ---- explicit pool ----

ExplicitPool::ExplicitPool(std::vector<std::unique_ptr<MemberCursor>> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error("explicit pool needs at least one member");
  log_n_ = std::log(static_cast<double>(members_.size()));
}

ExplicitPool::ExplicitPool(const ExplicitPool& o) : groups_(o.groups_), log_n_(o.log_n_), started_(o.started_) {
  for (const auto& m : o.members_) members_.push_back(m->clone());
}

const std::vector<ExpertPool::Group>& ExplicitPool::advance(const Feature& x) {
  groups_.resize(members_.size());
  for (std::uint32_t i = 0; i < members_.size(); ++i)
    groups_[i] = {members_[i]->next(x), started_ ? i : 0u, started_ ? 0.0 : -log_n_};
  started_ = true;
  return groups_;
}

void ExplicitPool::prune(const std::vector<char>& keep) {
  if (!started_) return;
  std::size_t j = 0;
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (keep[i]) members_[j++] = std::move(members_[i]);
  members_.resize(j);
}

// ---- product pool ----

ProductPool::ProductPool(std::vector<std::unique_ptr<ExpertPool>> parts, Combiner f)
    : parts_(std::move(parts)), f_(std::move(f)) {
  if (parts_.empty() || static_cast<int>(parts_.size()) != f_.arity) throw Error("product pool arity mismatch");
  tuples_.push_back(std::vector<std::uint32_t>(parts_.size(), 0));
  part_sizes_.assign(parts_.size(), 1);
}

ProductPool::ProductPool(const ProductPool& o)
    : f_(o.f_), tuples_(o.tuples_), part_sizes_(o.part_sizes_), groups_(o.groups_) {
  for (const auto& p : o.parts_) parts_.push_back(p->clone());
}

double ProductPool::log_size() const {
  double s = 0;
  for (const auto& p : parts_) s += p->log_size();
  return s;
}

const std::vector<ExpertPool::Group>& ProductPool::advance(const Feature& x) {
  const std::size_t m = parts_.size();
  std::vector<const std::vector<Group>*> pg(m);
  std::vector<std::vector<std::vector<std::uint32_t>>> kids(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t parents = 0;
    for (const auto& t : tuples_) parents = std::max<std::size_t>(parents, t[i] + 1);
    pg[i] = &parts_[i]->advance(x);
    part_sizes_[i] = pg[i]->size();
    kids[i].resize(parents);
    for (std::uint32_t c = 0; c < pg[i]->size(); ++c) kids[i][(*pg[i])[c].parent].push_back(c);
  }
  std::vector<std::vector<std::uint32_t>> next;
  groups_.clear();
  std::vector<int> bits(m);
  for (std::uint32_t ti = 0; ti < tuples_.size(); ++ti) {
    const auto& t = tuples_[ti];
    std::vector<std::size_t> pick(m, 0);
    bool empty = false;
    for (std::size_t i = 0; i < m; ++i) empty = empty || kids[i][t[i]].empty();
    if (empty) continue;
    while (true) {
      std::vector<std::uint32_t> child(m);
      double share = 0;
      for (std::size_t i = 0; i < m; ++i) {
        child[i] = kids[i][t[i]][pick[i]];
        const auto& g = (*pg[i])[child[i]];
        share += g.log_share;
        bits[i] = g.prediction >= 0.5;
      }
      groups_.push_back({static_cast<double>(f_.apply(bits)), ti, share});
      next.push_back(std::move(child));
      std::size_t i = 0;
      while (i < m && ++pick[i] == kids[i][t[i]].size()) pick[i++] = 0;
      if (i == m) break;
    }
  }
  tuples_ = std::move(next);
  return groups_;
}

void ProductPool::prune(const std::vector<char>& keep) {
  std::vector<std::vector<std::uint32_t>> kept;
  for (std::size_t i = 0; i < tuples_.size(); ++i)
    if (keep[i]) kept.push_back(tuples_[i]);
  tuples_ = std::move(kept);
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    const std::size_t n = part_sizes_[p];
    std::vector<char> used(n, 0);
    for (const auto& t : tuples_) used[t[p]] = 1;
    std::vector<std::uint32_t> remap(n, 0);
    std::uint32_t j = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (used[i]) remap[i] = j++;
    parts_[p]->prune(used);
    part_sizes_[p] = j;
    for (auto& t : tuples_) t[p] = remap[t[p]];
  }
}

// ---- mixture learner ----

MixtureLearner::MixtureLearner(std::unique_ptr<ExpertPool> pool, MixMode mode, double param, LossSpec loss,
                               double prune_log)
    : pool_(std::move(pool)), mode_(mode), param_(param), loss_(loss), prune_log_(prune_log), w_{1.0}, ll_{0.0} {
  if (mode_ == MixMode::SmoothTruncatedBayes && !(param_ > 0 && param_ < 0.5))
    throw Error("truncation alpha must lie in (0, 1/2)");
  if (mode_ != MixMode::SmoothTruncatedBayes && !(param_ > 0)) throw Error("learning rate must be positive");
  log_half_ = -pool_->log_size();
}

MixtureLearner::MixtureLearner(const MixtureLearner& o)
    : OnlinePredictor(o),
      pool_(o.pool_->clone()),
      mode_(o.mode_),
      param_(o.param_),
      loss_(o.loss_),
      prune_log_(o.prune_log_),
      w_(o.w_),
      ll_(o.ll_),
      pred_(o.pred_),
      log_half_(o.log_half_) {}

std::string MixtureLearner::name() const {
  switch (mode_) {
    case MixMode::SmoothTruncatedBayes: return "stb_" + pool_->name();
    case MixMode::Ewa: return "ewa_" + pool_->name();
    case MixMode::Aggregating: return "aa_" + pool_->name();
  }
  return "?";
}

double MixtureLearner::predict(const Feature& x) {
  const auto& g = pool_->advance(x);
  std::vector<double> w(g.size()), ll(g.size());
  pred_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    w[i] = w_[g[i].parent] * std::exp(g[i].log_share);
    ll[i] = ll_[g[i].parent];
    pred_[i] = g[i].prediction;
  }
  w_ = std::move(w);
  ll_ = std::move(ll);
  if (w_.empty()) throw Error("expert pool has no member consistent with this stream");
  switch (mode_) {
    case MixMode::SmoothTruncatedBayes: {
      double num = 0, den = 0;
      for (std::size_t i = 0; i < w_.size(); ++i) {
        num += w_[i] * clip(pred_[i], param_);
        den += w_[i];
      }
      const double h = std::exp(log_half_);
      return (num + 0.5 * h) / (den + h);
    }
    case MixMode::Ewa: {
      double num = 0, den = 0;
      for (std::size_t i = 0; i < w_.size(); ++i) {
        num += w_[i] * pred_[i];
        den += w_[i];
      }
      return num / den;
    }
    case MixMode::Aggregating: return aggregating_predict(pred_, w_, param_, loss_);
  }
  return 0.5;
}

void MixtureLearner::observe(const Feature&, double y) {
  double z = 0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    double f;
    if (mode_ == MixMode::SmoothTruncatedBayes) {
      const double c = clip(pred_[i], param_);
      f = std::pow(c, y) * std::pow(1 - c, 1 - y);
    } else {
      f = std::exp(-param_ * loss(loss_, pred_[i], y));
    }
    w_[i] *= f;
    ll_[i] += std::log(f);
    z += w_[i];
  }
  if (!(z > 0)) throw Error("mixture weights vanished");
  if (mode_ == MixMode::SmoothTruncatedBayes) log_half_ += std::log(0.5) - std::log(z);
  for (auto& v : w_) v /= z;
  if (prune_log_ <= 0) return;
  // A group goes only if both its posterior mass and its likelihood relative to
  // the best group are below e^-prune_log; the most likely group always stays.
  const double cut = std::exp(-prune_log_);
  const double best = *std::max_element(ll_.begin(), ll_.end());
  std::vector<char> keep(w_.size());
  bool any = false;
  double kept = 0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    keep[i] = w_[i] >= cut || ll_[i] >= best - prune_log_;
    if (keep[i]) kept += w_[i];
    else any = true;
  }
  if (!any) return;
  pool_->prune(keep);
  std::size_t j = 0;
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (keep[i]) {
      w_[j] = w_[i] / kept;
      ll_[j] = ll_[i];
      pred_[j] = pred_[i];
      ++j;
    }
  w_.resize(j);
  ll_.resize(j);
  pred_.resize(j);
  if (mode_ == MixMode::SmoothTruncatedBayes) log_half_ -= std::log(kept);
}

}  // namespace seqcover
