#include "seqcover/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace seqcover {

namespace {

class GenericComparator final : public Comparator {
 public:
  GenericComparator(const HypothesisClass& cls, std::span<const Feature> xs, const LossSpec& loss) : loss_(loss) {
    const auto beh = enumerate_behaviors(cls, xs);
    if (static_cast<double>(beh.size()) * static_cast<double>(xs.size() + 1) > 5e7)
      throw Error("comparator over " + std::to_string(beh.size()) + " behaviors is too large");
    for (const auto& b : beh) {
      std::vector<double> v(xs.size());
      for (std::size_t t = 0; t < v.size(); ++t) v[t] = cls.levels()[b.labels[t]];
      vals_.push_back(std::move(v));
    }
    total_.assign(vals_.size(), 0.0);
  }
  void push(std::size_t t, double y) override {
    for (std::size_t i = 0; i < vals_.size(); ++i) total_[i] += loss(loss_, vals_[i][t], y);
    hist_.push_back({t, y});
  }
  void pop() override {
    const auto [t, y] = hist_.back();
    hist_.pop_back();
    for (std::size_t i = 0; i < vals_.size(); ++i) total_[i] -= loss(loss_, vals_[i][t], y);
    if (hist_.empty()) std::fill(total_.begin(), total_.end(), 0.0);
  }
  double min_loss() const override { return *std::min_element(total_.begin(), total_.end()); }
  std::unique_ptr<Comparator> clone() const override { return std::make_unique<GenericComparator>(*this); }

 private:
  LossSpec loss_;
  std::vector<std::vector<double>> vals_;
  std::vector<double> total_;
  std::vector<std::pair<std::size_t, double>> hist_;
};

// Cuts c = 0..m over the distinct sorted keys: cut c labels key j with 1 iff j >= c.
class ThresholdComparator final : public Comparator {
 public:
  ThresholdComparator(std::span<const Feature> xs, const LossSpec& loss) : loss_(loss) {
    std::vector<std::int64_t> keys;
    for (const auto& x : xs) keys.push_back(x.k());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto& x : xs)
      rank_.push_back(static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), x.k()) - keys.begin()));
    n_ = keys.size() + 1;
    size_ = 1;
    while (size_ < n_) size_ *= 2;
    mn_.assign(2 * size_, 0.0);
    lazy_.assign(2 * size_, 0.0);
    for (std::size_t i = n_; i < size_; ++i) mn_[size_ + i] = std::numeric_limits<double>::infinity();
    for (std::size_t i = size_ - 1; i >= 1; --i) mn_[i] = std::min(mn_[2 * i], mn_[2 * i + 1]);
  }
  void push(std::size_t t, double y) override {
    apply(t, y, 1.0);
    hist_.push_back({t, y});
  }
  void pop() override {
    const auto [t, y] = hist_.back();
    hist_.pop_back();
    apply(t, y, -1.0);
  }
  double min_loss() const override { return mn_[1]; }
  std::unique_ptr<Comparator> clone() const override { return std::make_unique<ThresholdComparator>(*this); }

 private:
  void apply(std::size_t t, double y, double sign) {
    const std::size_t r = rank_.at(t);
    add(0, r, sign * loss(loss_, 1.0, y), 1, 0, size_ - 1);
    if (r + 1 < n_) add(r + 1, n_ - 1, sign * loss(loss_, 0.0, y), 1, 0, size_ - 1);
  }
  void add(std::size_t l, std::size_t r, double v, std::size_t node, std::size_t nl, std::size_t nr) {
    if (r < nl || nr < l) return;
    if (l <= nl && nr <= r) {
      mn_[node] += v;
      lazy_[node] += v;
      return;
    }
    const std::size_t mid = (nl + nr) / 2;
    add(l, r, v, 2 * node, nl, mid);
    add(l, r, v, 2 * node + 1, mid + 1, nr);
    mn_[node] = std::min(mn_[2 * node], mn_[2 * node + 1]) + lazy_[node];
  }

  LossSpec loss_;
  std::vector<std::size_t> rank_;
  std::size_t n_ = 0, size_ = 1;
  std::vector<double> mn_, lazy_;
  std::vector<std::pair<std::size_t, double>> hist_;
};

// Loss of S = all-zero loss + sum over x in S of saving(x); the best S takes
// the (at most budget) most negative savings.
class SparseComparator final : public Comparator {
 public:
  SparseComparator(std::span<const Feature> xs, int budget, const LossSpec& loss)
      : xs_(xs.begin(), xs.end()), budget_(budget), loss_(loss) {}
  void push(std::size_t t, double y) override {
    const auto k = xs_.at(t).k();
    auto it = saving_.find(k);
    const bool had = it != saving_.end();
    const double old = had ? it->second : 0.0;
    hist_.push_back({k, had, old, base_});
    if (had) sorted_.erase(sorted_.find(old));
    const double now = old + loss(loss_, 1.0, y) - loss(loss_, 0.0, y);
    saving_[k] = now;
    sorted_.insert(now);
    base_ += loss(loss_, 0.0, y);
  }
  void pop() override {
    const auto h = hist_.back();
    hist_.pop_back();
    sorted_.erase(sorted_.find(saving_[h.key]));
    if (h.had) {
      saving_[h.key] = h.old;
      sorted_.insert(h.old);
    } else {
      saving_.erase(h.key);
    }
    base_ = h.base;
  }
  double min_loss() const override {
    double v = base_;
    int used = 0;
    for (auto it = sorted_.begin(); it != sorted_.end() && used < budget_ && *it < 0; ++it, ++used) v += *it;
    return v;
  }
  std::unique_ptr<Comparator> clone() const override { return std::make_unique<SparseComparator>(*this); }

 private:
  struct Step {
    std::int64_t key;
    bool had;
    double old, base;
  };
  std::vector<Feature> xs_;
  int budget_;
  LossSpec loss_;
  std::map<std::int64_t, double> saving_;
  std::multiset<double> sorted_;
  double base_ = 0;
  std::vector<Step> hist_;
};

// ---- adversaries ----

class RealizableAdversary final : public Adversary {
 public:
  explicit RealizableAdversary(Hypothesis h) : h_(std::move(h)) {}
  double label(const GameView& v, Rng&) override { return evaluate(v.cls, h_, v.xs[v.t]); }
  std::optional<Hypothesis> target() const override { return h_; }

 private:
  Hypothesis h_;
};

class RandomAdversary final : public Adversary {
 public:
  double label(const GameView&, Rng& rng) override { return std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.0; }
};

// Best final regret reachable within `depth` more labels from round t, whose
// prediction p the learner (already past predict) has committed to.
struct Lookahead {
  const HypothesisClass& cls;
  std::span<const Feature> xs;
  Comparator& comp;
  const LossSpec& loss;

  std::pair<double, double> best(std::size_t t, const OnlinePredictor& learner, double p, double L, int depth,
                                 std::vector<double>* path) {
    double best_v = -std::numeric_limits<double>::infinity(), best_y = 1;
    std::vector<double> best_tail, tail;
    for (double y : {1.0, 0.0}) {
      comp.push(t, y);
      const double L1 = L + seqcover::loss(loss, p, y);
      double v;
      tail.clear();
      if (depth <= 1 || t + 1 == xs.size()) {
        v = L1 - comp.min_loss();
      } else {
        auto c = learner.clone();
        c->observe(xs[t], y);
        const double p1 = c->predict(xs[t + 1]);
        v = best(t + 1, *c, p1, L1, depth - 1, path ? &tail : nullptr).first;
      }
      comp.pop();
      if (v > best_v + 1e-12) {  // label 1 is tried first and kept on ties, up to rounding
        best_v = v;
        best_y = y;
        if (path) best_tail = tail;
      }
    }
    if (path) {
      path->assign(1, best_y);
      path->insert(path->end(), best_tail.begin(), best_tail.end());
    }
    return {best_v, best_y};
  }
};

class GreedyAdversary final : public Adversary {
 public:
  explicit GreedyAdversary(int depth) : depth_(depth) {
    if (depth < 1) throw Error("lookahead depth must be positive");
  }
  double label(const GameView& v, Rng&) override {
    Lookahead la{v.cls, v.xs, v.comparator, v.loss};
    return la.best(v.t, v.learner, v.prediction, v.learner_loss, depth_, nullptr).second;
  }

 private:
  int depth_;
};

class ExactMinimaxAdversary final : public Adversary {
 public:
  double label(const GameView& v, Rng&) override {
    if (v.t == 0) {
      if (v.xs.size() > 12) throw Error("exact minimax adversary limited to 12 rounds");
      Lookahead la{v.cls, v.xs, v.comparator, v.loss};
      la.best(0, v.learner, v.prediction, 0.0, static_cast<int>(v.xs.size()), &path_);
    }
    return path_.at(v.t);
  }

 private:
  std::vector<double> path_;
};

}  // namespace

std::unique_ptr<Comparator> make_generic_comparator(const HypothesisClass& cls, std::span<const Feature> xs,
                                                    const LossSpec& loss) {
  return std::make_unique<GenericComparator>(cls, xs, loss);
}

std::unique_ptr<Comparator> make_comparator(const HypothesisClass& cls, std::span<const Feature> xs,
                                            const LossSpec& loss) {
  for (const auto& x : xs) cls.check_feature(x);
  if (cls.kind() == ClassKind::Threshold1D) return std::make_unique<ThresholdComparator>(xs, loss);
  if (cls.kind() == ClassKind::SparseIndicator) return std::make_unique<SparseComparator>(xs, cls.budget(), loss);
  return make_generic_comparator(cls, xs, loss);
}

std::string AdversarySpec::name() const {
  switch (kind) {
    case Kind::Realizable: return "realizable";
    case Kind::Random: return "random";
    case Kind::Greedy: return "greedy";
    case Kind::ExactMinimax: return "exact_minimax";
  }
  return "?";
}

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, const HypothesisClass& cls, Rng& rng) {
  switch (spec.kind) {
    case AdversarySpec::Kind::Realizable: {
      Hypothesis h = spec.target ? *spec.target : random_hypothesis(cls, rng);
      cls.check_hypothesis(h);
      return std::make_unique<RealizableAdversary>(std::move(h));
    }
    case AdversarySpec::Kind::Random: return std::make_unique<RandomAdversary>();
    case AdversarySpec::Kind::Greedy: return std::make_unique<GreedyAdversary>(spec.depth);
    case AdversarySpec::Kind::ExactMinimax: return std::make_unique<ExactMinimaxAdversary>();
  }
  throw Error("unknown adversary");
}

GameTranscript run_game(const HypothesisClass& cls, std::span<const Feature> xs, OnlinePredictor& learner,
                        Adversary& adversary, const LossSpec& loss, Rng& rng) {
  GameTranscript tr;
  tr.xs.assign(xs.begin(), xs.end());
  auto comp = make_comparator(cls, xs, loss);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    double p, y;
    try {
      p = learner.predict(xs[t]);
      const GameView view{cls, xs, t, p, learner, *comp, tr.learner_loss, loss};
      y = adversary.label(view, rng);
      const double l = seqcover::loss(loss, p, y);
      comp->push(t, y);
      learner.observe(xs[t], y);
      tr.predictions.push_back(p);
      tr.labels.push_back(y);
      tr.losses.push_back(l);
      tr.learner_loss += l;
      tr.mistakes += std::abs(p - y) >= 0.5;
    } catch (const Error& e) {
      throw Error("round " + std::to_string(t + 1) + ": " + e.what());
    }
  }
  tr.comparator_loss = xs.empty() ? 0.0 : comp->min_loss();
  tr.regret = tr.learner_loss - tr.comparator_loss;
  if (auto h = adversary.target()) {
    double L = 0;
    for (std::size_t t = 0; t < xs.size(); ++t) L += seqcover::loss(loss, evaluate(cls, *h, xs[t]), tr.labels[t]);
    tr.target_loss = L;
  }
  return tr;
}

MinimaxPath exact_minimax_regret(const HypothesisClass& cls, std::span<const Feature> xs,
                                 const OnlinePredictor& learner, const LossSpec& loss) {
  if (xs.size() > 12) throw Error("exact minimax search limited to 12 rounds");
  MinimaxPath out{0.0, {}};
  if (xs.empty()) return out;
  auto comp = make_comparator(cls, xs, loss);
  auto c = learner.clone();
  const double p = c->predict(xs[0]);
  Lookahead la{cls, xs, *comp, loss};
  out.regret = la.best(0, *c, p, 0.0, static_cast<int>(xs.size()), &out.labels).first;
  return out;
}

}  // namespace seqcover
