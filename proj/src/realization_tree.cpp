#include "seqcover/realization_tree.hpp"

#include <cmath>

namespace seqcover {

namespace {

template <class VS>
struct Node {
  VS vs;
  std::int64_t bits;
};

template <class VS>
TreeOutcome check_impl(const HypothesisClass& cls, const VS& root, SeenSet seen, std::span<const Feature> stream,
                       std::int64_t M, bool stop) {
  TreeOutcome out;
  std::vector<Node<VS>> nodes{{root, 0}};
  for (const auto& x : stream) {
    const std::size_t n = nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
      auto& nd = nodes[i];
      const auto can = nd.vs.possible(cls, seen, x);
      if (can == (kCan0 | kCan1)) {
        if (nd.bits >= M && !out.failed) {
          out.failed = true;
          VS lost = nd.vs;
          lost.restrict(cls, seen, x, 1);
          out.uncovered = lost.witness(cls, seen);
          if (stop) return out;
        }
        Node<VS> zero{nd.vs, nd.bits + 1};
        zero.vs.restrict(cls, seen, x, 0);
        nd.vs.restrict(cls, seen, x, 1);
        ++nd.bits;
        out.max_binary = std::max(out.max_binary, nd.bits);
        nodes.push_back(std::move(zero));
      } else {
        nd.vs.restrict(cls, seen, x, can == kCan1);
      }
    }
    seen.insert(x);
  }
  out.leaves = nodes.size();
  return out;
}

enum class PoolMode { Realization, ClassBayes };

template <class VS>
class FrontierPool final : public ExpertPool {
 public:
  FrontierPool(HypothesisClass cls, VS root, PoolMode mode, std::int64_t M)
      : cls_(std::move(cls)), mode_(mode), M_(M), nodes_{{std::move(root), 0}} {
    log_size_ = mode == PoolMode::Realization ? static_cast<double>(M) * std::log(2.0)
                                              : std::log(nodes_.front().vs.count(cls_, seen_));
  }
  double log_size() const override { return log_size_; }
  std::string name() const override { return mode_ == PoolMode::Realization ? "rt" : "bayes"; }
  std::unique_ptr<ExpertPool> clone() const override { return std::make_unique<FrontierPool>(*this); }

  const std::vector<Group>& advance(const Feature& x) override {
    groups_.clear();
    const std::size_t n = nodes_.size();
    groups_.resize(n);
    split_.clear();
    for (std::size_t i = 0; i < n; ++i) {
      auto& nd = nodes_[i];
      const auto can = nd.vs.possible(cls_, seen_, x);
      const auto idx = static_cast<std::uint32_t>(i);
      if (can == (kCan0 | kCan1)) {
        if (mode_ == PoolMode::Realization && nd.bits >= M_) {
          // Index interval exhausted: the member keeps to label 0.
          nd.vs.restrict(cls_, seen_, x, 0);
          groups_[i] = {0.0, idx, 0.0};
          continue;
        }
        Node<VS> zero{nd.vs, nd.bits + 1};
        zero.vs.restrict(cls_, seen_, x, 0);
        nd.vs.restrict(cls_, seen_, x, 1);
        ++nd.bits;
        groups_[i] = {1.0, idx, -std::log(2.0)};
        groups_.push_back({0.0, idx, -std::log(2.0)});
        nodes_.push_back(std::move(zero));
        split_.push_back(i);
      } else if (can) {
        nd.vs.restrict(cls_, seen_, x, can == kCan1);
        groups_[i] = {can == kCan1 ? 1.0 : 0.0, idx, 0.0};
      } else {
        throw Error("empty version space in frontier");
      }
    }
    seen_.insert(x);
    if (mode_ == PoolMode::ClassBayes) {
      for (std::size_t j = 0; j < split_.size(); ++j) {
        const std::size_t one = split_[j], zero = n + j;
        const double c1 = nodes_[one].vs.count(cls_, seen_), c0 = nodes_[zero].vs.count(cls_, seen_);
        groups_[one].log_share = std::log(c1 / (c0 + c1));
        groups_[zero].log_share = std::log(c0 / (c0 + c1));
      }
    }
    return groups_;
  }

  void prune(const std::vector<char>& keep) override {
    std::size_t j = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (keep[i]) {
        if (i != j) nodes_[j] = std::move(nodes_[i]);
        ++j;
      }
    nodes_.resize(j);
  }

 private:
  HypothesisClass cls_;
  PoolMode mode_;
  std::int64_t M_;
  double log_size_ = 0;
  std::vector<Node<VS>> nodes_;
  SeenSet seen_;
  std::vector<Group> groups_;
  std::vector<std::size_t> split_;
};

std::unique_ptr<ExpertPool> make_frontier(const HypothesisClass& cls, PoolMode mode, std::int64_t M) {
  return std::visit(
      [&](auto root) -> std::unique_ptr<ExpertPool> {
        using VS = decltype(root);
        return std::make_unique<FrontierPool<VS>>(cls, std::move(root), mode, M);
      },
      make_version_space(cls));
}

}  // namespace

TreeOutcome realization_tree_check(const HypothesisClass& cls, const AnyVS& vs, const SeenSet& seen,
                                   std::span<const Feature> stream, std::int64_t M, bool stop_at_failure) {
  for (const auto& x : stream) cls.check_feature(x);
  return std::visit([&](const auto& root) { return check_impl(cls, root, seen, stream, M, stop_at_failure); }, vs);
}

TreeOutcome realization_tree_check(const HypothesisClass& cls, std::span<const Feature> stream, std::int64_t M,
                                   bool stop_at_failure) {
  return realization_tree_check(cls, make_version_space(cls), SeenSet{}, stream, M, stop_at_failure);
}

std::int64_t binary_nodes_on_path(const HypothesisClass& cls, AnyVS vs, SeenSet seen, std::span<const Feature> stream,
                                  std::span<const std::uint8_t> labels) {
  if (labels.size() != stream.size()) throw Error("labels and stream differ in length");
  std::int64_t count = 0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const auto can = possible_labels(cls, vs, seen, stream[t]);
    if (!(can & (labels[t] ? kCan1 : kCan0))) throw Error("label sequence leaves the class");
    count += can == (kCan0 | kCan1);
    restrict_vs(cls, vs, seen, stream[t], labels[t]);
    seen.insert(stream[t]);
  }
  return count;
}

bool path_within_budget(const HypothesisClass& cls, AnyVS vs, SeenSet seen, std::span<const Feature> stream,
                        std::span<const std::uint8_t> labels, std::int64_t M) {
  if (labels.size() != stream.size()) throw Error("labels and stream differ in length");
  std::int64_t used = 0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const auto can = possible_labels(cls, vs, seen, stream[t]);
    if (!(can & (labels[t] ? kCan1 : kCan0))) throw Error("label sequence leaves the class");
    if (can == (kCan0 | kCan1) && used++ >= M && labels[t]) return false;
    restrict_vs(cls, vs, seen, stream[t], labels[t]);
    seen.insert(stream[t]);
  }
  return true;
}

RealizationCursor::RealizationCursor(HypothesisClass cls, AnyVS vs, SeenSet seen, std::int64_t M, mpz_class k)
    : cls_(std::move(cls)), vs_(std::move(vs)), seen_(std::move(seen)), M_(M), k_(std::move(k)) {}

double RealizationCursor::next(const Feature& x) {
  const auto can = possible_labels(cls_, vs_, seen_, x);
  int b;
  if (can == (kCan0 | kCan1)) {
    b = used_ < M_ ? mpz_tstbit(k_.get_mpz_t(), static_cast<mp_bitcnt_t>(M_ - 1 - used_)) : 0;
    ++used_;
  } else {
    b = can == kCan1;
  }
  restrict_vs(cls_, vs_, seen_, x, b);
  seen_.insert(x);
  return b;
}

std::unique_ptr<ExpertPool> make_realization_pool(const HypothesisClass& cls, std::int64_t M) {
  if (M < 0) throw Error("index bits must be nonnegative");
  return make_frontier(cls, PoolMode::Realization, M);
}

std::unique_ptr<ExpertPool> make_class_bayes_pool(const HypothesisClass& cls) {
  if (cls.kind() == ClassKind::AxisRectangle) throw Error("class-Bayes pool is not available for rectangles");
  return make_frontier(cls, PoolMode::ClassBayes, 0);
}

}  // namespace seqcover
