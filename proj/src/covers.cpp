#include "seqcover/covers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "seqcover/complexity.hpp"
#include "seqcover/parallel.hpp"

namespace seqcover {

namespace {

constexpr double kTol = 1e-12;
constexpr double kMaxExplicit = 1e5;
constexpr double kMaxCells = 5e7;

mpz_class pow2(std::int64_t e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(e));
  return r;
}

mpz_class binom(std::int64_t n, std::int64_t k) {
  mpz_class r;
  if (k < 0 || k > n) return 0;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

double to_double(const mpz_class& z) { return z.get_d(); }

std::vector<double> values_of(const HypothesisClass& cls, const Behavior& b) {
  std::vector<double> v(b.labels.size());
  for (std::size_t t = 0; t < v.size(); ++t) v[t] = cls.levels()[b.labels[t]];
  return v;
}

double sup_dist(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t t = 0; t < a.size(); ++t) d = std::max(d, std::abs(a[t] - b[t]));
  return d;
}

double log2_of(double x) { return std::log2(std::max(x, 1.0)); }

class HypothesisCursor final : public MemberCursor {
 public:
  HypothesisCursor(HypothesisClass cls, Hypothesis h) : cls_(std::move(cls)), h_(std::move(h)) {}
  double next(const Feature& x) override { return evaluate(cls_, h_, x); }
  std::unique_ptr<MemberCursor> clone() const override { return std::make_unique<HypothesisCursor>(*this); }

 private:
  HypothesisClass cls_;
  Hypothesis h_;
};

}  // namespace

double CoverInfo::log2_size() const {
  if (size <= 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double m = mpz_get_d_2exp(&exp, size.get_mpz_t());
  return std::log2(m) + static_cast<double>(exp);
}

nlohmann::json CoverSet::manifest() const {
  return {{"construction", info_.construction},
          {"T", info_.T},
          {"alpha", info_.alpha},
          {"delta", info_.delta},
          {"M", info_.M},
          {"size", info_.size.get_str()},
          {"size_is_bound", info_.size_is_bound},
          {"log2_size", info_.log2_size()},
          {"params", info_.params}};
}

std::vector<double> CoverSet::member_outputs(const mpz_class& index, std::span<const Feature> prefix) const {
  auto c = cursor(index);
  std::vector<double> out;
  out.reserve(prefix.size());
  for (const auto& x : prefix) out.push_back(c->next(x));
  return out;
}

std::vector<char> CoverSet::covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                          const std::vector<Behavior>& behaviors, double alpha) const {
  std::vector<char> flags(behaviors.size(), 0);
  if (info_.size == 0 || behaviors.empty()) return flags;
  const double n = to_double(info_.size);
  if (n > kMaxExplicit || n * static_cast<double>(stream.size() + 1) * static_cast<double>(behaviors.size()) >
                              50 * kMaxCells)
    throw Error("cover " + info_.construction + " is too large for a member-by-member coverage check");
  std::vector<std::vector<double>> vals;
  for (const auto& b : behaviors) vals.push_back(values_of(cls, b));
  std::size_t left = behaviors.size();
  for (mpz_class i = 0; i < info_.size && left; ++i) {
    const auto out = member_outputs(i, stream);
    for (std::size_t j = 0; j < vals.size(); ++j)
      if (!flags[j] && sup_dist(out, vals[j]) <= alpha + kTol) {
        flags[j] = 1;
        --left;
      }
  }
  return flags;
}

std::optional<Hypothesis> CoverSet::first_uncovered(const HypothesisClass& cls, std::span<const Feature> stream,
                                                    double alpha) const {
  const auto behaviors = enumerate_behaviors(cls, stream);
  const auto flags = covered_flags(cls, stream, behaviors, alpha);
  for (std::size_t j = 0; j < behaviors.size(); ++j)
    if (!flags[j]) return behaviors[j].witness;
  return std::nullopt;
}

std::unique_ptr<ExpertPool> CoverSet::pool() const {
  if (to_double(info_.size) > kMaxExplicit)
    throw Error("cover " + info_.construction + " has no grouped pool and is too large to enumerate");
  std::vector<std::unique_ptr<MemberCursor>> members;
  for (mpz_class i = 0; i < info_.size; ++i) members.push_back(cursor(i));
  return std::make_unique<ExplicitPool>(std::move(members));
}

// ---- subsets ----

mpz_class count_small_subsets(std::int64_t n, std::int64_t k) {
  mpz_class total = 0;
  for (std::int64_t i = 0; i <= std::min(n, k); ++i) total += binom(n, i);
  return total;
}

std::vector<std::int64_t> unrank_small_subset(std::int64_t n, std::int64_t k, mpz_class rank) {
  if (rank < 0 || rank >= count_small_subsets(n, k)) throw Error("subset rank out of range");
  std::int64_t size = 0;
  for (;; ++size) {
    const mpz_class block = binom(n, size);
    if (rank < block) break;
    rank -= block;
  }
  std::vector<std::int64_t> out;
  std::int64_t c = 0;
  for (std::int64_t j = 0; j < size; ++j, ++c) {
    for (;; ++c) {
      const mpz_class with_c = binom(n - c - 1, size - j - 1);
      if (rank < with_c) break;
      rank -= with_c;
    }
    out.push_back(c);
  }
  return out;
}

// ---- hypothesis list ----

HypothesisListCover::HypothesisListCover(HypothesisClass cls, std::vector<Hypothesis> members, std::int64_t T,
                                         bool offline)
    : cls_(std::move(cls)), members_(std::move(members)), offline_(offline) {
  for (const auto& h : members_) cls_.check_hypothesis(h);
  info_.construction = offline ? "offline_behaviors" : "hypothesis_list";
  info_.T = T;
  info_.size = offline ? 0 : static_cast<unsigned long>(members_.size());
  info_.size_is_bound = offline;
  info_.params = {{"offline", offline}};
}

std::unique_ptr<MemberCursor> HypothesisListCover::cursor(const mpz_class& index) const {
  if (offline_) throw Error("offline cover members depend on the whole stream");
  if (index < 0 || index >= info_.size) throw Error("member index out of range");
  return std::make_unique<HypothesisCursor>(cls_, members_[index.get_ui()]);
}

std::vector<char> HypothesisListCover::covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                                     const std::vector<Behavior>& behaviors, double alpha) const {
  // The offline reference holds every behavior of the stream by definition.
  if (offline_) return std::vector<char>(behaviors.size(), 1);
  return CoverSet::covered_flags(cls, stream, behaviors, alpha);
}

// ---- error patterns ----

namespace {

class ErrorPatternCursor final : public MemberCursor {
 public:
  ErrorPatternCursor(std::unique_ptr<OnlinePredictor> p, std::vector<std::int64_t> flips)
      : p_(std::move(p)), flips_(std::move(flips)) {}
  ErrorPatternCursor(const ErrorPatternCursor& o) : p_(o.p_->clone()), flips_(o.flips_), t_(o.t_), f_(o.f_) {}
  double next(const Feature& x) override {
    int y = p_->predict(x) >= 0.5;
    if (f_ < flips_.size() && flips_[f_] == t_) {
      y ^= 1;
      ++f_;
    }
    p_->observe(x, y);
    ++t_;
    return y;
  }
  std::unique_ptr<MemberCursor> clone() const override { return std::make_unique<ErrorPatternCursor>(*this); }

 private:
  std::unique_ptr<OnlinePredictor> p_;
  std::vector<std::int64_t> flips_;
  std::int64_t t_ = 0;
  std::size_t f_ = 0;
};

}  // namespace

ErrorPatternCover::ErrorPatternCover(std::shared_ptr<const OnlinePredictor> predictor, std::int64_t T,
                                     std::int64_t err_budget)
    : predictor_(std::move(predictor)), err_(err_budget) {
  if (err_budget < 0) throw Error("error budget must be nonnegative");
  if (err_budget >= T) throw Error("error budget must be below the horizon");
  info_.construction = "error_pattern";
  info_.T = T;
  info_.size = count_small_subsets(T, err_budget);
  info_.params = {{"predictor", predictor_->name()}, {"err_budget", err_budget}};
}

std::unique_ptr<MemberCursor> ErrorPatternCover::cursor(const mpz_class& index) const {
  return std::make_unique<ErrorPatternCursor>(predictor_->clone(), unrank_small_subset(info_.T, err_, index));
}

std::int64_t ErrorPatternCover::mistakes_on(std::span<const Feature> stream,
                                            std::span<const std::uint8_t> labels) const {
  auto p = predictor_->clone();
  std::int64_t m = 0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    m += (p->predict(stream[t]) >= 0.5) != (labels[t] != 0);
    p->observe(stream[t], labels[t]);
  }
  return m;
}

std::vector<char> ErrorPatternCover::covered_flags(const HypothesisClass&, std::span<const Feature> stream,
                                                   const std::vector<Behavior>& behaviors, double) const {
  // g_I reproduces the labels exactly when I is the predictor's mistake set on them.
  if (static_cast<std::int64_t>(stream.size()) > info_.T) throw Error("stream longer than the cover horizon");
  std::vector<char> flags(behaviors.size());
  for (std::size_t j = 0; j < behaviors.size(); ++j) flags[j] = mistakes_on(stream, behaviors[j].labels) <= err_;
  return flags;
}

// ---- realization tree ----

std::int64_t default_index_bits(std::int64_t vc, std::int64_t star, std::int64_t T, double delta) {
  if (star == kInfinite) throw Error("realization-tree budget needs a finite star number");
  if (!(delta > 0 && delta < 1)) throw Error("delta must be in (0, 1)");
  const double bits = static_cast<double>(vc + 4 * star) * log2_of(static_cast<double>(T)) + std::log2(1 / delta);
  return static_cast<std::int64_t>(std::ceil(bits - 1e-9));
}

RealizationTreeCover::RealizationTreeCover(HypothesisClass cls, std::int64_t M, std::int64_t T, double delta)
    : cls_(std::move(cls)) {
  if (!cls_.binary()) throw Error("realization trees need a binary class");
  if (M < 0) throw Error("index bits must be nonnegative");
  info_.construction = "realization_tree";
  info_.T = T;
  info_.delta = delta;
  info_.M = M;
  info_.size = pow2(M);
  info_.params = {{"class", cls_.name()}};
}

RealizationTreeCover RealizationTreeCover::with_default_bits(HypothesisClass cls, std::int64_t T, double delta) {
  const auto M = default_index_bits(vc_dimension(cls), star_number(cls), T, delta);
  return RealizationTreeCover(std::move(cls), M, T, delta);
}

std::unique_ptr<MemberCursor> RealizationTreeCover::cursor(const mpz_class& index) const {
  if (index < 0 || index >= info_.size) throw Error("member index out of range");
  return std::make_unique<RealizationCursor>(cls_, make_version_space(cls_), SeenSet{}, info_.M, index);
}

std::vector<char> RealizationTreeCover::covered_flags(const HypothesisClass&, std::span<const Feature> stream,
                                                      const std::vector<Behavior>& behaviors, double) const {
  std::vector<char> flags(behaviors.size());
  const auto root = make_version_space(cls_);
  for (std::size_t j = 0; j < behaviors.size(); ++j)
    flags[j] = path_within_budget(cls_, root, SeenSet{}, stream, behaviors[j].labels, info_.M);
  return flags;
}

std::optional<Hypothesis> RealizationTreeCover::first_uncovered(const HypothesisClass&,
                                                                std::span<const Feature> stream, double) const {
  return realization_tree_check(cls_, stream, info_.M, true).uncovered;
}

RealizationResult realization_tree_cover(const HypothesisClass& cls, std::span<const Feature> stream,
                                         std::int64_t M) {
  RealizationResult r;
  r.tree = realization_tree_check(cls, stream, M, false);
  r.failed = r.tree.failed;
  r.cover = std::make_shared<RealizationTreeCover>(cls, M, static_cast<std::int64_t>(stream.size()), 0.0);
  return r;
}

// ---- Star-Littlestone ----

namespace {

class TwoPhaseCursor final : public MemberCursor {
 public:
  TwoPhaseCursor(HypothesisClass cls, std::int64_t s, int cap, std::vector<std::int64_t> flips, std::int64_t M,
                 mpz_class k)
      : cls_(std::move(cls)), s_(s), cap_(cap), flips_(std::move(flips)), M_(M), k_(std::move(k)),
        vs_(make_version_space(cls_)) {
    maybe_switch();
  }
  TwoPhaseCursor(const TwoPhaseCursor& o)
      : cls_(o.cls_), s_(o.s_), cap_(o.cap_), flips_(o.flips_), M_(o.M_), k_(o.k_), vs_(o.vs_), seen_(o.seen_),
        t_(o.t_), f_(o.f_), phase2_(o.phase2_ ? std::make_unique<RealizationCursor>(*o.phase2_) : nullptr) {}

  double next(const Feature& x) override {
    ++t_;
    if (phase2_) return phase2_->next(x);
    int y = soa_star_choice(cls_, vs_, seen_, x, s_, cap_);
    if (f_ < flips_.size() && flips_[f_] == t_ - 1) {
      y ^= 1;
      ++f_;
    }
    const auto can = possible_labels(cls_, vs_, seen_, x);
    // An impossible output leaves the member off the class; the state follows the forced label.
    restrict_vs(cls_, vs_, seen_, x, (can & (y ? kCan1 : kCan0)) ? y : can == kCan1);
    seen_.insert(x);
    maybe_switch();
    return y;
  }
  std::unique_ptr<MemberCursor> clone() const override { return std::make_unique<TwoPhaseCursor>(*this); }

 private:
  void maybe_switch() {
    if (vs_star(cls_, vs_, seen_) <= s_) phase2_ = std::make_unique<RealizationCursor>(cls_, vs_, seen_, M_, k_);
  }

  HypothesisClass cls_;
  std::int64_t s_;
  int cap_;
  std::vector<std::int64_t> flips_;
  std::int64_t M_;
  mpz_class k_;
  AnyVS vs_;
  SeenSet seen_;
  std::int64_t t_ = 0;
  std::size_t f_ = 0;
  std::unique_ptr<RealizationCursor> phase2_;
};

}  // namespace

StarLittlestoneCover::StarLittlestoneCover(HypothesisClass cls, std::int64_t s, int d_cap, std::int64_t T,
                                           double delta)
    : cls_(std::move(cls)), s_(s), cap_(std::min(d_cap, kDepthCap)) {
  if (!cls_.binary()) throw Error("Star-Littlestone covers need a binary class");
  if (s < 0) throw Error("star scale must be nonnegative");
  if (!(delta > 0 && delta < 1)) throw Error("delta must be in (0, 1)");
  if (star_number(cls_) <= s) {
    d_ = 0;
  } else {
    d_ = star_littlestone_dimension(cls_, s, cap_) + 1;
    if (d_ > d_cap) throw Error("error budget SL(s)+1 exceeds the depth cap");
  }
  const double lt = log2_of(static_cast<double>(T));
  const double bits = static_cast<double>(vc_dimension(cls_) + 4 * s) * lt + static_cast<double>(d_ + 1) * lt +
                      std::log2(1 / delta);
  info_.construction = "star_littlestone";
  info_.T = T;
  info_.delta = delta;
  info_.M = static_cast<std::int64_t>(std::ceil(bits - 1e-9));
  info_.size = count_small_subsets(T, d_) * pow2(info_.M);
  info_.params = {{"class", cls_.name()}, {"s", s}, {"d", d_}, {"d_cap", d_cap}};
}

std::unique_ptr<MemberCursor> StarLittlestoneCover::cursor(const mpz_class& index) const {
  if (index < 0 || index >= info_.size) throw Error("member index out of range");
  const mpz_class block = pow2(info_.M);
  const mpz_class rank = index / block, k = index % block;
  return std::make_unique<TwoPhaseCursor>(cls_, s_, cap_, unrank_small_subset(info_.T, d_, rank), info_.M, k);
}

std::vector<char> StarLittlestoneCover::covered_flags(const HypothesisClass&, std::span<const Feature> stream,
                                                      const std::vector<Behavior>& behaviors, double) const {
  // Covered iff SOA errs at most d times before the star drops to s, and the
  // remainder is followed by some realization member with M bits.
  std::vector<char> flags(behaviors.size());
  for (std::size_t j = 0; j < behaviors.size(); ++j) {
    const auto& y = behaviors[j].labels;
    AnyVS vs = make_version_space(cls_);
    SeenSet seen;
    std::int64_t mistakes = 0;
    std::size_t t = 0;
    for (; t < stream.size() && vs_star(cls_, vs, seen) > s_; ++t) {
      mistakes += soa_star_choice(cls_, vs, seen, stream[t], s_, cap_) != y[t];
      restrict_vs(cls_, vs, seen, stream[t], y[t]);
      seen.insert(stream[t]);
    }
    flags[j] = mistakes <= d_ &&
               path_within_budget(cls_, vs, seen, stream.subspan(t), std::span(y).subspan(t), info_.M);
  }
  return flags;
}

// ---- local alpha covers ----

namespace {

struct LocalBehaviors {
  std::vector<Behavior> all;
  std::vector<std::vector<double>> values;
};

LocalBehaviors local_behaviors(const HypothesisClass& cls, std::span<const Feature> sample) {
  LocalBehaviors lb;
  lb.all = enumerate_behaviors(cls, sample);
  for (const auto& b : lb.all) lb.values.push_back(values_of(cls, b));
  return lb;
}

double min_level_gap(const HypothesisClass& cls) {
  const auto& lv = cls.levels();
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < lv.size(); ++i) g = std::min(g, lv[i] - lv[i - 1]);
  return g;
}

// nb[i] lists the behaviors within alpha of behavior i (sup distance, symmetric).
std::vector<std::vector<std::uint32_t>> neighborhoods(const LocalBehaviors& lb, double alpha) {
  const std::size_t n = lb.all.size();
  if (static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(lb.values.front().size() + 1) > 4e8)
    throw Error("local cover on " + std::to_string(n) + " behaviors is too large");
  std::vector<std::vector<std::uint32_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (sup_dist(lb.values[i], lb.values[j]) <= alpha + kTol) nb[i].push_back(static_cast<std::uint32_t>(j));
  return nb;
}

}  // namespace

std::vector<Hypothesis> local_alpha_cover(const HypothesisClass& cls, std::span<const Feature> sample, double alpha) {
  if (!(alpha >= 0)) throw Error("cover scale must be nonnegative");
  if (alpha >= 1 || sample.empty()) {
    auto w = behavior_witnesses(cls, sample.first(0));
    return {w.front()};
  }
  if (alpha + kTol < min_level_gap(cls)) return behavior_witnesses(cls, sample);
  const auto lb = local_behaviors(cls, sample);
  const auto nb = neighborhoods(lb, alpha);
  // Greedy set cover: most newly covered behaviors first, lowest index on ties.
  std::vector<char> done(lb.all.size(), 0);
  std::size_t left = lb.all.size();
  std::vector<Hypothesis> out;
  while (left) {
    std::size_t best = 0, gain = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      std::size_t g = 0;
      for (auto j : nb[i]) g += !done[j];
      if (g > gain) {
        gain = g;
        best = i;
      }
    }
    for (auto j : nb[best])
      if (!done[j]) {
        done[j] = 1;
        --left;
      }
    out.push_back(lb.all[best].witness);
  }
  return out;
}

std::size_t minimum_alpha_cover_size(const HypothesisClass& cls, std::span<const Feature> sample, double alpha) {
  const auto lb = local_behaviors(cls, sample);
  const std::size_t n = lb.all.size();
  if (n > 1000) throw Error("exact cover search limited to 1000 behaviors");
  const auto nb = neighborhoods(lb, alpha);
  std::vector<std::vector<char>> close(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : nb[i]) close[i][j] = 1;
  // Two behaviors can share a cover member iff some behavior is within alpha of both.
  auto share = [&](std::size_t u, std::size_t v) {
    for (auto c : nb[u])
      if (close[c][v]) return true;
    return false;
  };
  std::size_t best = local_alpha_cover(cls, sample, alpha).size();
  std::size_t nodes = 0;
  std::vector<int> hits(n, 0);
  auto lower_bound = [&]() {
    std::vector<std::size_t> indep;
    for (std::size_t u = 0; u < n; ++u) {
      if (hits[u]) continue;
      bool ok = true;
      for (auto v : indep)
        if (share(u, v)) {
          ok = false;
          break;
        }
      if (ok) indep.push_back(u);
    }
    return indep.size();
  };
  auto dfs = [&](auto&& self, std::size_t used) -> void {
    if (++nodes > 2000000) throw Error("exact cover search exceeded its node budget");
    std::size_t u = n;
    for (std::size_t i = 0; i < n && u == n; ++i)
      if (!hits[i]) u = i;
    if (u == n) {
      best = std::min(best, used);
      return;
    }
    if (used + lower_bound() >= best) return;
    for (auto c : nb[u]) {
      for (auto j : nb[c]) ++hits[j];
      self(self, used + 1);
      for (auto j : nb[c]) --hits[j];
    }
  };
  dfs(dfs, 0);
  return best;
}

double local_cover_log2_bound(std::int64_t fat_alpha_quarter, std::int64_t n, double alpha) {
  const double ln = log2_of(static_cast<double>(n)), la = std::log2(1 / alpha);
  return static_cast<double>(fat_alpha_quarter) * (ln * ln + 2 * la * la + 8);
}

// ---- fat-shattering epochs ----

namespace {

// Member of one epoch: local-cover pick f, patch positions and values.
struct EpochChoice {
  mpz_class f;
  std::vector<std::int64_t> patch_pos;
  std::vector<std::size_t> patch_val;
};

EpochChoice decode_epoch(const FatShatteringCover::Epoch& ep, std::size_t nk, mpz_class idx) {
  EpochChoice c;
  c.f = idx % ep.bound_f;
  mpz_class rest = idx / ep.bound_f;
  mpz_class kpow = 1;
  for (std::int64_t i = 0; i <= ep.r; ++i) {
    const mpz_class block = binom(ep.len, i) * kpow;
    if (rest < block) {
      const mpz_class subset = rest / kpow;
      mpz_class code = rest % kpow;
      c.patch_pos = unrank_small_subset(ep.len, i, count_small_subsets(ep.len, i - 1) + subset);
      for (std::int64_t j = 0; j < i; ++j) {
        const mpz_class digit = code % static_cast<unsigned long>(nk);
        c.patch_val.push_back(digit.get_ui());
        code /= static_cast<unsigned long>(nk);
      }
      return c;
    }
    rest -= block;
    kpow *= static_cast<unsigned long>(nk);
  }
  throw Error("epoch member index out of range");
}

class EpochCursor final : public MemberCursor {
 public:
  EpochCursor(HypothesisClass cls, double alpha, std::vector<double> K, std::vector<FatShatteringCover::Epoch> eps,
              std::vector<mpz_class> idx)
      : cls_(std::move(cls)), alpha_(alpha), K_(std::move(K)), eps_(std::move(eps)), idx_(std::move(idx)) {}
  double next(const Feature& x) override {
    const auto t = static_cast<std::int64_t>(prefix_.size());
    if (e_ < eps_.size() && t == eps_[e_].start) {
      const auto F = local_alpha_cover(cls_, prefix_, alpha_);
      cur_ = decode_epoch(eps_[e_], K_.size(), idx_[e_]);
      const mpz_class pick = cur_.f % static_cast<unsigned long>(F.size());
      f_ = F[pick.get_ui()];
      ++e_;
    }
    prefix_.push_back(x);
    const auto rel = t - eps_[e_ - 1].start;
    const auto it = std::find(cur_.patch_pos.begin(), cur_.patch_pos.end(), rel);
    if (it != cur_.patch_pos.end()) return K_[cur_.patch_val[it - cur_.patch_pos.begin()]];
    return evaluate(cls_, f_, x);
  }
  std::unique_ptr<MemberCursor> clone() const override { return std::make_unique<EpochCursor>(*this); }

 private:
  HypothesisClass cls_;
  double alpha_;
  std::vector<double> K_;
  std::vector<FatShatteringCover::Epoch> eps_;
  std::vector<mpz_class> idx_;
  std::vector<Feature> prefix_;
  std::size_t e_ = 0;
  EpochChoice cur_;
  Hypothesis f_;
};

}  // namespace

FatShatteringCover::FatShatteringCover(HypothesisClass cls, double alpha, std::int64_t T, double delta)
    : cls_(std::move(cls)), alpha_(alpha) {
  if (!(alpha > 0 && alpha < 1)) throw Error("cover scale must be in (0, 1)");
  if (!(delta > 0 && delta < 1)) throw Error("delta must be in (0, 1)");
  if (T < 1) throw Error("horizon must be positive");
  if (cls_.binary()) {
    K_ = {0.0, 1.0};
  } else {
    const auto bins = static_cast<std::int64_t>(std::ceil(1 / (8 * alpha) - 1e-9));
    for (std::int64_t i = 0; i < bins; ++i) K_.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(bins));
  }
  const double la = std::log2(1 / alpha);
  const auto d8 = static_cast<double>(fat_shattering(cls_, alpha / 8));
  const auto d4 = static_cast<double>(fat_shattering(cls_, alpha / 4));
  const double tail = std::log2(std::max(1.0, std::log2(static_cast<double>(T))) / delta);
  mpz_class size = 1;
  for (std::int64_t e = 1;; ++e) {
    const std::int64_t first = std::int64_t{1} << (e - 1);  // 1-based
    if (first > T) break;
    const std::int64_t last = std::min((std::int64_t{1} << e) - 1, T);
    Epoch ep;
    ep.start = first - 1;
    ep.len = last - first + 1;
    const double ee = static_cast<double>(e);
    const double r = std::ceil(2 * d8 * (ee * ee + 2 * la * la + 8) + tail - 1e-9);
    ep.r = std::min<std::int64_t>(ep.len, static_cast<std::int64_t>(std::min(r, 1e15)));
    ep.bound_f = pow2(static_cast<std::int64_t>(std::ceil(d4 * (ee * ee + 2 * la * la) + 8 - 1e-9)));
    mpz_class patches = 0, kpow = 1;
    for (std::int64_t i = 0; i <= ep.r; ++i) {
      patches += binom(ep.len, i) * kpow;
      kpow *= static_cast<unsigned long>(K_.size());
    }
    ep.size = ep.bound_f * patches;
    size *= ep.size;
    epochs_.push_back(std::move(ep));
  }
  info_.construction = "fat_shattering_epochs";
  info_.T = T;
  info_.alpha = cls_.binary() ? 0.0 : 4 * alpha;
  info_.delta = delta;
  info_.size = size;
  info_.size_is_bound = true;
  nlohmann::json eps = nlohmann::json::array();
  for (const auto& ep : epochs_)
    eps.push_back({{"start", ep.start}, {"len", ep.len}, {"r", ep.r}, {"log2_local_bound", ep.bound_f.get_str(2).size() - 1}});
  info_.params = {{"class", cls_.name()}, {"base_alpha", alpha}, {"K", K_}, {"epochs", eps}};
}

std::unique_ptr<MemberCursor> FatShatteringCover::cursor(const mpz_class& index) const {
  if (index < 0 || index >= info_.size) throw Error("member index out of range");
  std::vector<mpz_class> idx;
  mpz_class rest = index;
  for (const auto& ep : epochs_) {
    idx.push_back(rest % ep.size);
    rest /= ep.size;
  }
  return std::make_unique<EpochCursor>(cls_, alpha_, K_, epochs_, std::move(idx));
}

std::vector<char> FatShatteringCover::covered_flags(const HypothesisClass&, std::span<const Feature> stream,
                                                    const std::vector<Behavior>& behaviors, double alpha) const {
  // Epochs are independent coordinates of the member index, so a behavior is
  // covered iff every epoch has some (f, patches) matching it within alpha.
  std::vector<char> flags(behaviors.size(), 1);
  std::vector<std::vector<double>> vals;
  for (const auto& b : behaviors) vals.push_back(values_of(cls_, b));
  auto patchable = [&](double v) {
    for (double k : K_)
      if (std::abs(v - k) <= alpha + kTol) return true;
    return false;
  };
  const auto T = static_cast<std::int64_t>(stream.size());
  for (const auto& ep : epochs_) {
    if (ep.start >= T) break;
    const std::int64_t end = std::min(T, ep.start + ep.len);
    const std::int64_t len = end - ep.start;
    if (ep.r >= len) {
      // Every position may be patched.
      for (std::size_t j = 0; j < vals.size(); ++j)
        for (std::int64_t t = ep.start; t < end && flags[j]; ++t) flags[j] = patchable(vals[j][t]);
      continue;
    }
    const auto F = local_alpha_cover(cls_, stream.first(ep.start), alpha_);
    const std::size_t nf = mpz_class(ep.bound_f) < static_cast<unsigned long>(F.size())
                               ? ep.bound_f.get_ui()
                               : F.size();
    if (static_cast<double>(nf) * static_cast<double>(vals.size()) * static_cast<double>(len) > kMaxCells)
      throw Error("epoch coverage check is too large");
    std::vector<std::vector<double>> fv(nf, std::vector<double>(len));
    for (std::size_t i = 0; i < nf; ++i)
      for (std::int64_t t = 0; t < len; ++t) fv[i][t] = evaluate(cls_, F[i], stream[ep.start + t]);
    for (std::size_t j = 0; j < vals.size(); ++j) {
      if (!flags[j]) continue;
      bool ok = false;
      for (std::size_t i = 0; i < nf && !ok; ++i) {
        std::int64_t need = 0;
        bool fine = true;
        for (std::int64_t t = 0; t < len && fine; ++t) {
          const double v = vals[j][ep.start + t];
          if (std::abs(v - fv[i][t]) <= alpha + kTol) continue;
          fine = patchable(v) && ++need <= ep.r;
        }
        ok = fine;
      }
      flags[j] = ok;
    }
  }
  return flags;
}

// ---- composition ----

CompositeCover::CompositeCover(std::vector<CoverPtr> parts, Combiner f) : parts_(std::move(parts)), f_(std::move(f)) {
  if (parts_.empty()) throw Error("composition needs at least one cover");
  if (static_cast<int>(parts_.size()) != f_.arity) throw Error("combiner arity does not match the cover count");
  info_.construction = "composite";
  info_.T = parts_.front()->info().T;
  info_.size = 1;
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& p : parts_) {
    if (p->info().T != info_.T) throw Error("composed covers must share a horizon");
    if (p->info().alpha != 0) throw Error("composition needs binary covers");
    info_.size *= p->info().size;
    info_.delta += p->info().delta;
    info_.M = std::max(info_.M, p->info().M);
    info_.size_is_bound = info_.size_is_bound || p->info().size_is_bound;
    comps.push_back(p->manifest());
  }
  info_.params = {{"combiner", f_.name}, {"parts", comps}};
}

namespace {

class CompositeCursor final : public MemberCursor {
 public:
  CompositeCursor(std::vector<std::unique_ptr<MemberCursor>> parts, Combiner f)
      : parts_(std::move(parts)), f_(std::move(f)) {}
  CompositeCursor(const CompositeCursor& o) : f_(o.f_) {
    for (const auto& p : o.parts_) parts_.push_back(p->clone());
  }
  double next(const Feature& x) override {
    std::vector<int> bits;
    for (auto& p : parts_) bits.push_back(p->next(x) >= 0.5);
    return f_.apply(bits);
  }
  std::unique_ptr<MemberCursor> clone() const override { return std::make_unique<CompositeCursor>(*this); }

 private:
  std::vector<std::unique_ptr<MemberCursor>> parts_;
  Combiner f_;
};

}  // namespace

std::unique_ptr<MemberCursor> CompositeCover::cursor(const mpz_class& index) const {
  if (index < 0 || index >= info_.size) throw Error("member index out of range");
  std::vector<std::unique_ptr<MemberCursor>> cs;
  mpz_class rest = index;
  for (const auto& p : parts_) {
    cs.push_back(p->cursor(rest % p->info().size));
    rest /= p->info().size;
  }
  return std::make_unique<CompositeCursor>(std::move(cs), f_);
}

std::vector<char> CompositeCover::covered_flags(const HypothesisClass& cls, std::span<const Feature> stream,
                                                const std::vector<Behavior>& behaviors, double) const {
  // Combines the covered behaviors of each component. Members whose outputs
  // leave their component class are not considered, so this can only
  // under-report coverage; realization-tree members never leave the class.
  if (cls.kind() != ClassKind::Composite || cls.parts().size() != parts_.size())
    throw Error("composite coverage needs the matching composite class");
  std::vector<std::vector<std::vector<std::uint8_t>>> covered(parts_.size());
  double combos = 1;
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    const auto& pc = cls.parts()[j];
    auto bs = enumerate_behaviors(pc, stream);
    const auto flags = parts_[j]->covered_flags(pc, stream, bs, 0.0);
    for (std::size_t i = 0; i < bs.size(); ++i)
      if (flags[i]) covered[j].push_back(std::move(bs[i].labels));
    combos *= static_cast<double>(covered[j].size());
  }
  if (combos * static_cast<double>(stream.size() + 1) > kMaxCells) throw Error("composite coverage check is too large");
  std::set<std::vector<std::uint8_t>> reach;
  std::vector<std::size_t> pick(parts_.size(), 0);
  if (combos > 0) {
    std::vector<int> bits(parts_.size());
    for (;;) {
      std::vector<std::uint8_t> lab(stream.size());
      for (std::size_t t = 0; t < stream.size(); ++t) {
        for (std::size_t j = 0; j < parts_.size(); ++j) bits[j] = covered[j][pick[j]][t];
        lab[t] = static_cast<std::uint8_t>(f_.apply(bits));
      }
      reach.insert(std::move(lab));
      std::size_t j = 0;
      while (j < pick.size() && ++pick[j] == covered[j].size()) pick[j++] = 0;
      if (j == pick.size()) break;
    }
  }
  std::vector<char> flags(behaviors.size());
  for (std::size_t i = 0; i < behaviors.size(); ++i) flags[i] = reach.count(behaviors[i].labels) > 0;
  return flags;
}

std::unique_ptr<ExpertPool> CompositeCover::pool() const {
  std::vector<std::unique_ptr<ExpertPool>> ps;
  for (const auto& p : parts_) ps.push_back(p->pool());
  return std::make_unique<ProductPool>(std::move(ps), f_);
}

CoverPtr compose_covers(std::vector<CoverPtr> covers, Combiner f) {
  if (covers.size() == 1 && f.arity == 1 && f.table == Combiner::identity().table) return covers.front();
  return std::make_shared<CompositeCover>(std::move(covers), std::move(f));
}

// ---- verification ----

VerifyResult verify_cover(const CoverSet& cover, const HypothesisClass& cls, const DistributionSpec& dist,
                          double alpha, std::size_t trials, std::uint64_t seed, unsigned threads) {
  VerifyResult r;
  r.trials = trials;
  std::vector<std::optional<Hypothesis>> miss(trials);
  std::vector<std::uint64_t> seeds(trials);
  const auto T = static_cast<std::size_t>(cover.info().T);
  parallel_for(trials, threads, [&](std::size_t i) {
    seeds[i] = derive_seed(seed, i);
    Rng rng(seeds[i]);
    const auto stream = dist.sample(cls, T, rng);
    miss[i] = cover.first_uncovered(cls, stream, alpha);
  });
  for (std::size_t i = 0; i < trials; ++i) {
    if (!miss[i]) continue;
    ++r.failures;
    if (r.witnesses.size() < 10) r.witnesses.push_back({i, seeds[i], *miss[i]});
  }
  r.failure_rate = trials ? static_cast<double>(r.failures) / static_cast<double>(trials) : 0.0;
  return r;
}

}  // namespace seqcover
