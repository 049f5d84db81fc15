#include <doctest.h>

#include <set>

#include "seqcover/domain.hpp"

using namespace seqcover;

namespace {

std::vector<Feature> keys(std::initializer_list<std::int64_t> ks) {
  std::vector<Feature> v;
  for (auto k : ks) v.emplace_back(k);
  return v;
}

// Distinct label vectors by evaluating every parameter on a tiny grid.
std::size_t brute_behaviors(const HypothesisClass& cls, const std::vector<Hypothesis>& all,
                            std::span<const Feature> xs) {
  std::set<std::vector<int>> seen;
  for (const auto& h : all) {
    std::vector<int> row;
    for (const auto& x : xs) row.push_back(cls.level(h, x));
    seen.insert(row);
  }
  return seen.size();
}

}  // namespace

TEST_CASE("threshold behaviors on t distinct points number t+1") {
  const auto cls = HypothesisClass::threshold();
  Rng rng(3);
  for (int t = 1; t <= 64; ++t) {
    std::set<std::int64_t> ks;
    while (static_cast<int>(ks.size()) < t) ks.insert(static_cast<std::int64_t>(rng() % (kDefaultGrid + 1)));
    std::vector<Feature> xs;
    for (auto k : ks) xs.emplace_back(k);
    std::shuffle(xs.begin(), xs.end(), rng);
    CHECK(enumerate_behaviors(cls, xs).size() == static_cast<std::size_t>(t + 1));
    CHECK(behavior_count(cls, xs) == doctest::Approx(t + 1));
  }
}

TEST_CASE("toy5 table has five behaviors on its three points") {
  const auto cls = toy5_class();
  const auto xs = keys({0, 1, 2});
  const auto bs = enumerate_behaviors(cls, xs);
  REQUIRE(bs.size() == 5);
  const std::vector<std::vector<std::uint8_t>> want{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 1, 0}, {1, 1, 1}};
  for (std::size_t i = 0; i < 5; ++i) CHECK(bs[i].labels == want[i]);
}

TEST_CASE("behavior counts agree with brute force on a small grid") {
  const std::int64_t R = 7;
  SUBCASE("interval") {
    const auto cls = HypothesisClass::interval(R);
    std::vector<Hypothesis> all{{{1, 0}}};
    for (std::int64_t a = 0; a <= R; ++a)
      for (std::int64_t b = a; b <= R; ++b) all.push_back({{a, b}});
    for (auto xs : {keys({0, 3, 5}), keys({1, 1, 2, 7}), keys({0, 1, 2, 3, 4, 5})}) {
      CHECK(enumerate_behaviors(cls, xs).size() == brute_behaviors(cls, all, xs));
      CHECK(behavior_count(cls, xs) == doctest::Approx(brute_behaviors(cls, all, xs)));
    }
  }
  SUBCASE("sparse") {
    const auto cls = HypothesisClass::sparse(6, 2);
    std::vector<Hypothesis> all{{{}}};
    for (std::int64_t a = 0; a < 6; ++a) {
      all.push_back({{a}});
      for (std::int64_t b = a + 1; b < 6; ++b) all.push_back({{a, b}});
    }
    for (auto xs : {keys({0, 3, 5}), keys({1, 1, 2, 4}), keys({0, 1, 2, 3, 4, 5})}) {
      CHECK(enumerate_behaviors(cls, xs).size() == brute_behaviors(cls, all, xs));
      CHECK(behavior_count(cls, xs) == doctest::Approx(brute_behaviors(cls, all, xs)));
    }
  }
  SUBCASE("monotone levels") {
    const auto cls = HypothesisClass::monotone({0, 0.5, 1}, R);
    std::vector<Hypothesis> all;
    for (std::int64_t a = 0; a <= R + 1; ++a)
      for (std::int64_t b = a; b <= R + 1; ++b) all.push_back({{a, b}});
    for (auto xs : {keys({0, 3, 5}), keys({2, 4, 6, 7})})
      CHECK(enumerate_behaviors(cls, xs).size() == brute_behaviors(cls, all, xs));
  }
}

TEST_CASE("repeated points do not add behaviors") {
  const auto cls = HypothesisClass::threshold();
  CHECK(enumerate_behaviors(cls, keys({5, 5, 5, 9})).size() == 3);
}

TEST_CASE("features outside the domain are rejected") {
  CHECK_THROWS_AS(HypothesisClass::threshold(16).check_feature(Feature(17)), Error);
  CHECK_THROWS_AS(HypothesisClass::sparse(4, 1).check_feature(Feature(4)), Error);
  CHECK_THROWS_AS(evaluate(toy5_class(), {{7}}, Feature(0)), Error);
}

TEST_CASE("combiners evaluate their truth tables") {
  const int a[2] = {1, 0}, b[2] = {1, 1};
  CHECK(Combiner::conjunction(2).apply(a) == 0);
  CHECK(Combiner::conjunction(2).apply(b) == 1);
  CHECK(Combiner::disjunction(2).apply(a) == 1);
  CHECK(Combiner::parity(2).apply(b) == 0);
  CHECK(Combiner::and_not().apply(a) == 1);
  CHECK(Combiner::and_not().apply(b) == 0);
}

TEST_CASE("composite hypothesis evaluates its parts") {
  const auto cls = HypothesisClass::composite({HypothesisClass::threshold(8), HypothesisClass::threshold(8)},
                                              Combiner::and_not());
  // x >= 2 and not x >= 5: the interval [2, 4].
  const Hypothesis h{{1, 2, 1, 5}};
  std::vector<int> out;
  for (std::int64_t k = 0; k <= 8; ++k) out.push_back(static_cast<int>(evaluate(cls, h, Feature(k))));
  CHECK(out == std::vector<int>{0, 0, 1, 1, 1, 0, 0, 0, 0});
}

TEST_CASE("binomial helpers") {
  CHECK(binomial(10, 3) == 120);
  CHECK(binomial(3, 5) == 0);
  CHECK(log_binomial_sum(5, 2) == doctest::Approx(std::log(16.0)));
}
