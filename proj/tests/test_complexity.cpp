#include <doctest.h>

#include "seqcover/complexity.hpp"
#include "seqcover/version_space.hpp"

using namespace seqcover;

TEST_CASE("vc and star of the standard classes") {
  CHECK(vc_dimension(HypothesisClass::threshold()) == 1);
  CHECK(star_number(HypothesisClass::threshold()) == 2);
  CHECK(vc_dimension(HypothesisClass::interval()) == 2);
  CHECK(star_number(HypothesisClass::interval()) == kInfinite);
  CHECK(vc_dimension(HypothesisClass::sparse(64, 2)) == 2);
  CHECK(star_number(HypothesisClass::sparse(64, 2)) == 64);
}

TEST_CASE("declared dimensions match brute force on small domains") {
  for (const auto& cls : {HypothesisClass::threshold(7), HypothesisClass::interval(5), HypothesisClass::sparse(6, 2),
                          HypothesisClass::sparse(5, 1)}) {
    const auto table = to_finite_table(cls);
    CHECK(vc_dimension(table) == vc_dimension(cls));
    CHECK(star_number(table) == star_number(cls));
  }
  // Interval on 6 grid points: one center, every point a satellite.
  CHECK(star_number(to_finite_table(HypothesisClass::interval(5))) == 6);
}

TEST_CASE("toy5 dimensions") {
  const auto cls = toy5_class();
  CHECK(vc_dimension(cls) == 2);
  CHECK(star_number(cls) == 2);
}

TEST_CASE("pattern dimensions on hand-made tables") {
  const PatternSet full{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(vc_of_patterns(full) == 2);
  CHECK(star_of_patterns(full) == 2);
  // Singletons on three points: star 3, vc 1.
  const PatternSet singles{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(vc_of_patterns(singles) == 1);
  CHECK(star_of_patterns(singles) == 3);
  CHECK(vc_of_patterns({{0, 1}}) == 0);
}

TEST_CASE("star-littlestone dimension") {
  // Below the star number scale every tree must already be star-rich; at or
  // above it a class has SL 0.
  const auto th = HypothesisClass::threshold();
  CHECK(star_littlestone_dimension(th, 2) == 0);
  CHECK(star_littlestone_dimension(th, 5) == 0);
  const auto sp = HypothesisClass::sparse(6, 1);
  CHECK(star_littlestone_dimension(sp, 6) == 0);
  // Pattern route agrees with the class route on a small table.
  const auto table = to_finite_table(HypothesisClass::sparse(5, 1));
  PatternSet rows(table.rows().begin(), table.rows().end());
  for (std::int64_t s = 0; s <= 5; ++s)
    CHECK(sl_of_patterns(rows, s, 4) == star_littlestone_dimension(table, s, 4));
}

TEST_CASE("fat shattering of monotone levels") {
  const auto cls = HypothesisClass::monotone({0, 0.25, 0.5, 0.75, 1}, 15);
  // d points need d+1 levels spaced at least 2*alpha apart.
  CHECK(fat_shattering(cls, 0.1) == 4);
  CHECK(fat_shattering(cls, 0.2) == 2);
  CHECK(fat_shattering(cls, 0.3) == 1);
  CHECK(fat_shattering(cls, 0.6) == 0);
  std::vector<std::vector<double>> vals{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(fat_of_values(vals, 0.4) == 2);
  CHECK(fat_of_values(vals, 0.6) == 0);
}
