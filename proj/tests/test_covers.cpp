#include <doctest.h>

#include <set>

#include "seqcover/complexity.hpp"
#include "seqcover/covers.hpp"
#include "seqcover/online.hpp"

using namespace seqcover;

namespace {

std::vector<Feature> keys(std::initializer_list<std::int64_t> ks) {
  std::vector<Feature> v;
  for (auto k : ks) v.emplace_back(k);
  return v;
}

std::vector<Feature> iid(const HypothesisClass& cls, std::size_t T, Rng& rng) {
  std::vector<Feature> xs;
  for (std::size_t i = 0; i < T; ++i) xs.push_back(random_feature(cls, rng));
  return xs;
}

// Every member's output sequence on the stream, by direct enumeration.
std::set<std::vector<double>> all_member_outputs(const CoverSet& c, std::span<const Feature> xs) {
  std::set<std::vector<double>> out;
  for (mpz_class i = 0; i < c.info().size; ++i) out.insert(c.member_outputs(i, xs));
  return out;
}

std::vector<double> as_double(const std::vector<std::uint8_t>& y) { return {y.begin(), y.end()}; }

}  // namespace

TEST_CASE("small subsets rank by size then lexicographically") {
  CHECK(count_small_subsets(5, 2) == 16);
  CHECK(count_small_subsets(4, 0) == 1);
  CHECK(unrank_small_subset(5, 2, 0).empty());
  CHECK(unrank_small_subset(5, 2, 1) == std::vector<std::int64_t>{0});
  CHECK(unrank_small_subset(5, 2, 6) == std::vector<std::int64_t>{0, 1});
  CHECK(unrank_small_subset(5, 2, 15) == std::vector<std::int64_t>{3, 4});
  std::set<std::vector<std::int64_t>> seen;
  for (int r = 0; r < 16; ++r) seen.insert(unrank_small_subset(5, 2, r));
  CHECK(seen.size() == 16);
  CHECK_THROWS_AS(unrank_small_subset(5, 2, 16), Error);
}

TEST_CASE("toy5 realization tree: three bits suffice, one does not") {
  const auto cls = toy5_class();
  const auto xs = keys({0, 1, 2});
  CHECK_FALSE(realization_tree_cover(cls, xs, 3).failed);
  CHECK(realization_tree_cover(cls, xs, 1).failed);
  const RealizationTreeCover c(cls, 3, 3, 0.05);
  // Member index -> hypothesis (rows are h1..h5 in order 000,001,010,110,111).
  const std::vector<std::pair<int, std::vector<double>>> want{{0, {0, 0, 0}}, {1, {0, 0, 1}}, {2, {0, 1, 0}},
                                                              {3, {0, 1, 0}}, {4, {1, 1, 0}}, {6, {1, 1, 1}}};
  for (const auto& [k, out] : want) CHECK(c.member_outputs(k, xs) == out);
  CHECK_FALSE(c.first_uncovered(cls, xs, 0).has_value());
  const RealizationTreeCover small(cls, 1, 3, 0.05);
  CHECK(small.first_uncovered(cls, xs, 0).has_value());
}

TEST_CASE("realization tree coverage agrees with enumerating members") {
  Rng rng(1);
  for (const auto& cls : {HypothesisClass::threshold(20), HypothesisClass::interval(12), HypothesisClass::sparse(6, 2)}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto xs = iid(cls, 6, rng);
      const std::int64_t M = 1 + rng() % 5;
      const RealizationTreeCover c(cls, M, 6, 0.05);
      const auto outs = all_member_outputs(c, xs);
      const auto bs = enumerate_behaviors(cls, xs);
      const auto flags = c.covered_flags(cls, xs, bs, 0);
      bool all = true;
      for (std::size_t j = 0; j < bs.size(); ++j) {
        CHECK(static_cast<bool>(flags[j]) == outs.count(as_double(bs[j].labels)) > 0);
        all = all && flags[j];
      }
      CHECK(c.first_uncovered(cls, xs, 0).has_value() == !all);
      CHECK(realization_tree_cover(cls, xs, M).failed == !all);
    }
  }
}

TEST_CASE("realization tree budget") {
  // (VC + 4 Star) log2 T + log2(1/delta) for thresholds at T = 4096: 9 * 12 + log2 20.
  CHECK(default_index_bits(1, 2, 4096, 0.05) == 113);
  CHECK_THROWS_AS(default_index_bits(2, kInfinite, 64, 0.05), Error);
  const auto c = RealizationTreeCover::with_default_bits(HypothesisClass::threshold(), 4096, 0.05);
  CHECK(c.info().M == 113);
  CHECK(c.info().log2_size() == doctest::Approx(113));
}

TEST_CASE("error-pattern cover reproduces the predictor with flips") {
  const auto cls = HypothesisClass::threshold(30);
  auto oi = std::make_shared<OneInclusionPredictor>(cls);
  const ErrorPatternCover c(oi, 6, 2);
  CHECK(c.info().size == count_small_subsets(6, 2));
  Rng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto xs = iid(cls, 6, rng);
    const auto outs = all_member_outputs(c, xs);
    const auto bs = enumerate_behaviors(cls, xs);
    const auto flags = c.covered_flags(cls, xs, bs, 0);
    for (std::size_t j = 0; j < bs.size(); ++j) {
      CHECK(static_cast<bool>(flags[j]) == (c.mistakes_on(xs, bs[j].labels) <= 2));
      if (flags[j]) CHECK(outs.count(as_double(bs[j].labels)) == 1);
    }
  }
  CHECK_THROWS_AS(ErrorPatternCover(oi, 4, 4), Error);
}

TEST_CASE("star-littlestone cover") {
  SUBCASE("star at or below the scale needs no phase-1 errors") {
    const StarLittlestoneCover c(HypothesisClass::threshold(), 2, 1, 64, 0.05);
    CHECK(c.error_budget() == 0);
    // (1 + 8) * 6 + 1 * 6 + log2 20 rounded up.
    CHECK(c.phase2_bits() == 65);
  }
  SUBCASE("toy5 at scale 0: members found by enumeration match the flags") {
    const auto cls = toy5_class();
    const StarLittlestoneCover c(cls, 0, 3, 3, 0.5);
    CHECK(c.error_budget() == star_littlestone_dimension(cls, 0) + 1);
    for (auto xs : {keys({0, 1, 2}), keys({2, 1, 0}), keys({1, 0, 1}), keys({2, 2, 0})}) {
      const auto outs = all_member_outputs(c, xs);
      const auto bs = enumerate_behaviors(cls, xs);
      const auto flags = c.covered_flags(cls, xs, bs, 0);
      for (std::size_t j = 0; j < bs.size(); ++j) {
        CHECK(flags[j]);
        CHECK(outs.count(as_double(bs[j].labels)) == 1);
      }
    }
  }
  CHECK_THROWS_AS(StarLittlestoneCover(HypothesisClass::threshold(), 0, 2, 64, 0.05), Error);
}

TEST_CASE("local alpha covers") {
  const auto cls = HypothesisClass::monotone({0, 0.25, 0.5, 0.75, 1}, 15);
  std::vector<Feature> xs;
  for (std::int64_t k = 0; k < 8; ++k) xs.emplace_back(2 * k);
  const auto greedy = local_alpha_cover(cls, xs, 0.25);
  const auto best = minimum_alpha_cover_size(cls, xs, 0.25);
  CHECK(best <= greedy.size());
  CHECK(best == 9);
  // Every behavior is within alpha of a greedy member.
  for (const auto& b : enumerate_behaviors(cls, xs)) {
    bool ok = false;
    for (const auto& g : greedy) {
      double worst = 0;
      for (std::size_t i = 0; i < xs.size(); ++i)
        worst = std::max(worst, std::abs(cls.levels()[b.labels[i]] - evaluate(cls, g, xs[i])));
      ok = ok || worst <= 0.25 + 1e-12;
    }
    CHECK(ok);
  }
  CHECK(std::log2(static_cast<double>(greedy.size())) <= local_cover_log2_bound(fat_shattering(cls, 0.25 / 4), 8, 0.25));
}

TEST_CASE("fat-shattering cover at scale 4 alpha") {
  const auto cls = HypothesisClass::monotone({0, 0.5, 1}, 63);
  const FatShatteringCover c(cls, 1.0 / 16, 32, 0.05);
  CHECK(c.grid() == std::vector<double>{0.25, 0.75});
  CHECK(c.info().alpha == doctest::Approx(0.25));
  CHECK(c.info().size_is_bound);
  std::int64_t total = 0;
  for (const auto& e : c.epochs()) total += e.len;
  CHECK(total == 32);
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto xs = iid(cls, 32, rng);
    CHECK_FALSE(c.first_uncovered(cls, xs, c.info().alpha).has_value());
  }
}

TEST_CASE("composite cover of two threshold covers") {
  const auto th = HypothesisClass::threshold(40);
  const auto cls = HypothesisClass::composite({th, th}, Combiner::and_not());
  const auto part = std::make_shared<RealizationTreeCover>(th, 12, 16, 0.01);
  const auto c = compose_covers({part, part}, Combiner::and_not());
  CHECK(c->info().size == mpz_class(1) << 24);
  CHECK(c->info().delta == doctest::Approx(0.02));
  Rng rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    const auto xs = iid(cls, 16, rng);
    CHECK_FALSE(c->first_uncovered(cls, xs, 0).has_value());
  }
  CHECK(compose_covers({part}, Combiner::identity()) == part);
}

TEST_CASE("offline list cover never fails and verification is seeded") {
  const auto cls = HypothesisClass::threshold();
  const HypothesisListCover off(cls, {}, 64, true);
  const auto r = verify_cover(off, cls, DistributionSpec::uniform(), 0, 20, 7);
  CHECK(r.failures == 0);
  const HypothesisListCover two(cls, {{{0}}, {{kDefaultGrid + 1}}}, 64);
  const auto a = verify_cover(two, cls, DistributionSpec::uniform(), 0, 20, 7);
  const auto b = verify_cover(two, cls, DistributionSpec::uniform(), 0, 20, 7, 2);
  CHECK(a.failures == 20);
  CHECK(a.failure_rate == b.failure_rate);
  REQUIRE(a.witnesses.size() == b.witnesses.size());
  for (std::size_t i = 0; i < a.witnesses.size(); ++i) CHECK(a.witnesses[i].seed == b.witnesses[i].seed);
  CHECK(off.manifest()["construction"] == "offline_behaviors");
}
