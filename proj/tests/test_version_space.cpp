#include <doctest.h>

#include <numeric>

#include "seqcover/complexity.hpp"
#include "seqcover/version_space.hpp"

using namespace seqcover;

namespace {

std::vector<Feature> random_sample(const HypothesisClass& cls, std::size_t t, Rng& rng) {
  std::vector<Feature> xs;
  for (std::size_t i = 0; i < t; ++i) xs.push_back(random_feature(cls, rng));
  return xs;
}

std::vector<std::uint8_t> labels_of(const HypothesisClass& cls, const Hypothesis& h, std::span<const Feature> xs) {
  std::vector<std::uint8_t> y;
  for (const auto& x : xs) y.push_back(static_cast<std::uint8_t>(cls.level(h, x)));
  return y;
}

}  // namespace

TEST_CASE("certification agrees with behavior enumeration") {
  Rng rng(11);
  const std::vector<HypothesisClass> classes{HypothesisClass::threshold(12), HypothesisClass::interval(12),
                                             HypothesisClass::sparse(8, 2), toy5_class(),
                                             HypothesisClass::rectangle(2, 5)};
  for (const auto& cls : classes) {
    for (int rep = 0; rep < 300; ++rep) {
      const auto t = 1 + rng() % 6;
      const auto xs = random_sample(cls, t, rng);
      const auto h = random_hypothesis(cls, rng);
      const auto y = labels_of(cls, h, xs);
      const auto x = random_feature(cls, rng);
      const std::span<const Feature> prefix(xs.data(), t - 1);
      const std::span<const std::uint8_t> lab(y.data(), t - 1);
      CHECK(certifies(cls, prefix, lab, x) == certifies_by_enumeration(cls, prefix, lab, x));
    }
  }
}

TEST_CASE("version space counts and witnesses stay consistent") {
  Rng rng(5);
  const auto cls = HypothesisClass::threshold(20);
  for (int rep = 0; rep < 100; ++rep) {
    const auto xs = random_sample(cls, 5, rng);
    const auto h = random_hypothesis(cls, rng);
    const auto y = labels_of(cls, h, xs);
    const auto lp = build_version_space(cls, xs, y);
    const auto w = vs_witness(cls, lp.vs, lp.seen);
    CHECK(labels_of(cls, w, xs) == y);
    // Consistent thresholds by direct count.
    double direct = 0;
    for (std::int64_t a = 0; a <= 21; ++a) direct += labels_of(cls, {{a}}, xs) == y;
    CHECK(vs_count(cls, lp.vs, lp.seen) == direct);
  }
}

TEST_CASE("unrealizable labels are rejected") {
  const auto cls = HypothesisClass::threshold(10);
  const std::vector<Feature> xs{Feature(2), Feature(5)};
  const std::vector<std::uint8_t> y{1, 0};
  CHECK_THROWS_AS(build_version_space(cls, xs, y), Error);
}

TEST_CASE("non-certified positions never exceed the star number") {
  SUBCASE("thresholds, every sample of distinct points up to size 8") {
    const auto cls = HypothesisClass::threshold(9);
    const auto star = star_number(cls);
    for (unsigned mask = 1; mask < (1u << 10); ++mask) {
      if (std::popcount(mask) > 8) continue;
      std::vector<Feature> xs;
      for (int k = 0; k < 10; ++k)
        if (mask >> k & 1) xs.emplace_back(k);
      for (std::int64_t a = 0; a <= 10; ++a) CHECK(non_certified_count(cls, xs, {{a}}) <= star);
    }
  }
  SUBCASE("toy5, every sequence over its points up to length 8") {
    const auto cls = toy5_class();
    const auto star = star_number(cls);
    for (int t = 1; t <= 8; ++t) {
      int total = 1;
      for (int i = 0; i < t; ++i) total *= 3;
      for (int code = 0; code < total; ++code) {
        std::vector<Feature> xs;
        for (int i = 0, c = code; i < t; ++i, c /= 3) xs.emplace_back(c % 3);
        for (std::int64_t r = 0; r < 5; ++r) CHECK(non_certified_count(cls, xs, {{r}}) <= star);
      }
    }
  }
}

TEST_CASE("star of a version space shrinks with labels") {
  const auto cls = HypothesisClass::threshold(100);
  auto vs = make_version_space(cls);
  SeenSet seen;
  CHECK(vs_star(cls, vs, seen) == 2);
  restrict_vs(cls, vs, seen, Feature(50), 1);
  seen.insert(Feature(50));
  restrict_vs(cls, vs, seen, Feature(49), 0);
  seen.insert(Feature(49));
  CHECK(vs_count(cls, vs, seen) == 1);
  CHECK(vs_star(cls, vs, seen) == 0);
}
