#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqcover/complexity.hpp"
#include "seqcover/one_inclusion.hpp"
#include "seqcover/online.hpp"
#include "seqcover/oracles.hpp"

using namespace seqcover;

namespace {

std::vector<Feature> keys(std::initializer_list<std::int64_t> ks) {
  std::vector<Feature> v;
  for (auto k : ks) v.emplace_back(k);
  return v;
}

// P(tau > n) by inclusion-exclusion over the coupons still missing after n draws.
double coupon_tail_exact(int T, double c) {
  const auto n = static_cast<int>(std::floor(T * std::log(static_cast<double>(T)) + c * T));
  double p = 0;
  for (int j = 1; j <= T; ++j) p += (j % 2 ? 1 : -1) * binomial(T, j) * std::pow(1 - static_cast<double>(j) / T, n);
  return p;
}

}  // namespace

TEST_CASE("threshold game recursion against a floating-point route") {
  const auto f = threshold_game_value(512);
  std::vector<double> g(513, 0.0);
  for (int T = 2; T <= 512; ++T) {
    double s = 0;
    for (int t = 1; t < T; ++t) s += t * g[t] + t;
    g[T] = 2 * s / (static_cast<double>(T) * T);
  }
  CHECK(f[1] == 0);
  CHECK(f[2] == mpq_class(1, 2));
  // f(3) = (2/9)(1*0 + 1 + 2*(1/2) + 2) = 8/9.
  CHECK(f[3] == mpq_class(8, 9));
  for (int T = 2; T <= 512; ++T) {
    CHECK(f[T].get_d() == doctest::Approx(g[T]).epsilon(1e-9));
    CHECK(f[T].get_d() >= 0.01 * std::log(static_cast<double>(T)));
  }
}

TEST_CASE("coupon collector tail matches inclusion-exclusion") {
  for (double c : {0.0, 1.0, 2.0}) {
    const double exact = coupon_tail_exact(10, c);
    const std::size_t n = 20000;
    const double mc = coupon_collector_tail(10, c, n, 17);
    CHECK(std::abs(mc - exact) <= 3 * std::sqrt(exact * (1 - exact) / n) + 1e-3);
    CHECK(exact <= std::exp(-c));
  }
}

TEST_CASE("binomial slack") {
  CHECK(binomial_slack(0.05, 400) == doctest::Approx(3 * std::sqrt(0.05 * 0.95 / 400)));
  CHECK(binomial_slack(0.5, 0) >= 1);  // no trials: nothing is resolved
}

TEST_CASE("shtarkov sum equals the behavior count for binary experts") {
  Rng rng(2);
  for (const auto& cls : {HypothesisClass::threshold(50), HypothesisClass::interval(50), toy5_class(),
                          HypothesisClass::sparse(7, 2)}) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<Feature> xs;
      const int T = 1 + static_cast<int>(rng() % 8);
      for (int i = 0; i < T; ++i) xs.push_back(random_feature(cls, rng));
      CHECK(shtarkov_logloss_regret(cls, xs) == doctest::Approx(shtarkov_by_enumeration(cls, xs, 0)));
      CHECK(shtarkov_by_enumeration(cls, xs, 0.01) <= shtarkov_logloss_regret(cls, xs) + 1e-12);
    }
  }
}

TEST_CASE("fixed-design regret grows with the sample") {
  const auto cls = HypothesisClass::interval(20);
  CHECK(monotonicity_check(cls, keys({3, 9}), keys({3, 9, 14})));
  CHECK_THROWS_AS(monotonicity_check(cls, keys({3, 4}), keys({3, 9})), Error);
}

TEST_CASE("fixed-design minimax value is the Shtarkov regret as the clamp vanishes") {
  const auto cls = toy5_class();
  const auto xs = keys({0, 1, 2, 0});
  const double v = fixed_design_minimax_value(cls, xs, 1e-9);
  CHECK(v == doctest::Approx(std::log(5.0)).epsilon(1e-6));
  const auto th = HypothesisClass::threshold(30);
  const auto ys = keys({4, 20, 11, 7, 25});
  CHECK(fixed_design_minimax_value(th, ys, 1e-9) == doctest::Approx(std::log(6.0)).epsilon(1e-6));
}

TEST_CASE("threshold mistakes for every cut match the one-inclusion predictor") {
  Rng rng(4);
  const auto cls = HypothesisClass::threshold(1000);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::int64_t> ks(40);
    std::iota(ks.begin(), ks.end(), 0);
    for (auto& k : ks) k = k * 25 + 3;
    std::shuffle(ks.begin(), ks.end(), rng);
    const auto m = threshold_mistakes_all_cuts(ks);
    REQUIRE(m.size() == 41);
    std::vector<std::int64_t> sorted = ks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t c = 0; c <= 40; ++c) {
      const std::int64_t a = c == 0 ? 1001 : sorted[40 - c];  // c largest keys get label 1
      OneInclusionPredictor p(cls);
      std::int64_t err = 0;
      for (auto k : ks) {
        const int y = k >= a;
        err += static_cast<int>(p.predict(Feature(k))) != y;
        p.observe(Feature(k), y);
      }
      CHECK(m[c] == err);
    }
  }
}

TEST_CASE("permutation tails: exact enumeration and sampling agree") {
  const auto cls = HypothesisClass::interval(30);
  const auto xs = keys({2, 8, 13, 21, 27});
  const Hypothesis h{{8, 21}};
  const std::vector<std::int64_t> ks{0, 1, 2, 3};
  const auto exact = permutation_error_tail_exact(cls, xs, h, ks);
  const auto mc = permutation_error_tail(cls, xs, h, 20000, ks, 5);
  CHECK(exact[0] == 1);
  CHECK(mc[0] == 1);
  for (std::size_t i = 0; i < ks.size(); ++i)
    CHECK(std::abs(mc[i] - exact[i]) <= 3 * std::sqrt(exact[i] * (1 - exact[i]) / 20000) + 1e-3);
  // Labels 0,1,1 on 5,10,15: nothing ever forces 5 to 0, so the rule errs
  // there exactly once in every order and nowhere else.
  const auto th = HypothesisClass::threshold(30);
  const auto t3 = permutation_error_tail_exact(th, keys({5, 10, 15}), {{10}}, std::vector<std::int64_t>{1, 2});
  CHECK(t3[0] == 1);
  CHECK(t3[1] == 0);
}

TEST_CASE("bayes threshold rule") {
  // One round: errs with probability E|x - 1/2| = 1/4.
  const std::size_t n = 40000;
  const double one = bayes_threshold_errors(1, n, 3);
  CHECK(std::abs(one - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / n));
  // A point mass is learned after the first round.
  CHECK(bayes_threshold_errors(50, 2000, 3, 0.3) <= 1.0);
  CHECK(bayes_threshold_errors(0, 10, 3) == 0);
}

TEST_CASE("double sampling with a coarse cover") {
  const auto cls = HypothesisClass::sparse(64, 2);
  Marginal nu;
  // eps below every atom of the uniform marginal: the whole class.
  CHECK(greedy_distribution_cover(cls, nu, 1.0 / 4096).whole_class);
  const DistributionCover zeros{false, {Hypothesis{{}}}};
  Rng rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<Feature> xs;
    for (int i = 0; i < 40; ++i) xs.push_back(nu.sample(cls, rng));
    // Against the all-zero function the worst hypothesis puts its two ones on
    // the two most frequent points.
    std::vector<std::int64_t> cnt(64, 0);
    for (const auto& x : xs) ++cnt[x.k()];
    std::sort(cnt.rbegin(), cnt.rend());
    CHECK(sup_inf_mismatches(cls, zeros, xs) == cnt[0] + cnt[1]);
  }
  const auto F = greedy_distribution_cover(cls, nu, 2.0 / 64);
  CHECK_FALSE(F.whole_class);
  CHECK(double_sampling_gap(cls, nu, F, 32, 50, 1) == double_sampling_gap(cls, nu, F, 32, 50, 1, 2));
}

TEST_CASE("type-k helpers") {
  CHECK(type_k_reference(2, 1, 100) == doctest::Approx(2 * std::log(50.0)));
  const auto b = bisection_stream(16, 7);
  std::vector<std::int64_t> k;
  for (const auto& x : b) k.push_back(x.k());
  CHECK(k == std::vector<std::int64_t>{8, 4, 12, 2, 6, 10, 14});
  CHECK_THROWS_AS(bisection_stream(4, 10), Error);
  // A point mass distribution gives a single point: at most one mistake.
  DistributionSpec d;
  d.kind = DistributionSpec::Kind::ProductTypeK;
  Marginal pm;
  pm.kind = Marginal::Kind::PointMass;
  pm.points = {100};
  d.marginals = {pm};
  CHECK(type_k_error_bound(HypothesisClass::threshold(), d, 64, 20, 1) <= 1.0);
}
