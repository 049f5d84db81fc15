#include <doctest.h>

#include <cmath>

#include "seqcover/game.hpp"
#include "seqcover/oracles.hpp"

using namespace seqcover;

namespace {

std::vector<Feature> iid(const HypothesisClass& cls, std::size_t T, Rng& rng) {
  std::vector<Feature> xs;
  for (std::size_t i = 0; i < T; ++i) xs.push_back(random_feature(cls, rng));
  return xs;
}

const HypothesisClass& four_class() {
  static const auto cls = HypothesisClass::finite_table({{0, 0, 1, 1}, {0, 1, 0, 1}, {1, 1, 0, 0}, {1, 0, 1, 0}});
  return cls;
}

}  // namespace

TEST_CASE("specialized comparators match per-behavior sums") {
  Rng rng(14);
  const auto loss = LossSpec::by_name("log", 0.01);
  for (const auto& cls : {HypothesisClass::threshold(60), HypothesisClass::sparse(12, 2), HypothesisClass::interval(20)}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto xs = iid(cls, 12, rng);
      auto fast = make_comparator(cls, xs, loss);
      auto slow = make_generic_comparator(cls, xs, loss);
      std::size_t t = 0;
      for (int step = 0; step < 40; ++step) {
        if (t > 0 && rng() % 3 == 0) {
          fast->pop();
          slow->pop();
          --t;
        } else if (t < xs.size()) {
          const double y = static_cast<double>(rng() % 3) / 2;  // soft labels too
          fast->push(t, y);
          slow->push(t, y);
          ++t;
        }
        CHECK(fast->min_loss() == doctest::Approx(slow->min_loss()).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("one-step exact adversary takes the costlier side") {
  const auto cls = HypothesisClass::threshold(10);
  const auto loss = LossSpec::by_name("log", 1e-6);
  const std::vector<Feature> xs{Feature(4)};
  for (double p : {0.2, 0.5, 0.8}) {
    ConstantPredictor c(p, "c");
    Rng rng(1);
    auto adv = make_adversary({AdversarySpec::Kind::ExactMinimax, std::nullopt, 2}, cls, rng);
    const auto tr = run_game(cls, xs, c, *adv, loss, rng);
    CHECK(tr.labels[0] == (p <= 0.5 ? 1.0 : 0.0));
  }
}

TEST_CASE("exact search dominates greedy lookahead") {
  const auto& cls = four_class();
  const auto loss = LossSpec::by_name("log", 1.0 / 8);
  Rng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const auto xs = iid(cls, 8, rng);
    NmlPredictor a(cls, xs, loss.clamp_eps);
    ConstantPredictor half(0.5, "half");
    for (OnlinePredictor* l : {static_cast<OnlinePredictor*>(&a), static_cast<OnlinePredictor*>(&half)}) {
      Rng r1(rep), r2(rep);
      auto l1 = l->clone(), l2 = l->clone();
      auto ex = make_adversary({AdversarySpec::Kind::ExactMinimax, std::nullopt, 2}, cls, r1);
      auto gr = make_adversary({AdversarySpec::Kind::Greedy, std::nullopt, 2}, cls, r2);
      const auto te = run_game(cls, xs, *l1, *ex, loss, r1);
      const auto tg = run_game(cls, xs, *l2, *gr, loss, r2);
      CHECK(te.regret >= tg.regret - 1e-12);
      CHECK(te.regret == doctest::Approx(exact_minimax_regret(cls, xs, *l, loss).regret));
    }
  }
}

TEST_CASE("singleton design against exact minimax equals the backward-induction value") {
  const auto& cls = four_class();
  const auto loss = LossSpec::by_name("log", 1.0 / 8);
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const auto xs = iid(cls, 8, rng);
    NmlPredictor nml(cls, xs, loss.clamp_eps);
    auto adv = make_adversary({AdversarySpec::Kind::ExactMinimax, std::nullopt, 2}, cls, rng);
    const auto tr = run_game(cls, xs, nml, *adv, loss, rng);
    CHECK(tr.regret == doctest::Approx(fixed_design_minimax_value(cls, xs, loss.clamp_eps)).epsilon(1e-9));
  }
}

TEST_CASE("realizable labels follow the target") {
  const auto cls = HypothesisClass::interval(100);
  Rng rng(3);
  const Hypothesis h{{20, 60}};
  auto adv = make_adversary({AdversarySpec::Kind::Realizable, h, 2}, cls, rng);
  const auto xs = iid(cls, 50, rng);
  OneInclusionPredictor p(cls);
  const auto tr = run_game(cls, xs, p, *adv, LossSpec::by_name("absolute", 0), rng);
  for (std::size_t t = 0; t < xs.size(); ++t) CHECK(tr.labels[t] == evaluate(cls, h, xs[t]));
  CHECK(tr.comparator_loss == 0);
  REQUIRE(tr.target_loss.has_value());
  CHECK(*tr.target_loss == 0);
  CHECK(tr.regret >= 0);
}

TEST_CASE("one-inclusion mistakes on thresholds stay within the budget") {
  const auto cls = HypothesisClass::threshold();
  const std::int64_t T = 1024;
  const double budget = 5 * std::log(static_cast<double>(T)) + std::log(20.0);
  int within = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(derive_seed(99, s));
    const auto xs = iid(cls, T, rng);
    OneInclusionPredictor p(cls);
    auto adv = make_adversary({AdversarySpec::Kind::Realizable, std::nullopt, 2}, cls, rng);
    const auto tr = run_game(cls, xs, p, *adv, LossSpec::by_name("absolute", 0), rng);
    within += tr.mistakes <= budget;
  }
  CHECK(within >= 95);
}

TEST_CASE("average-style and worst-case regret separate on a sparse class") {
  // Budget equal to the horizon on a domain much larger than it.
  const std::int64_t T = 32;
  const auto cls = HypothesisClass::sparse(4096, static_cast<int>(T));
  const auto loss = LossSpec::by_name("absolute", 0);
  double avg = 0;
  const int trials = 200;
  for (int s = 0; s < trials; ++s) {
    Rng rng(derive_seed(1, s));
    const auto xs = iid(cls, T, rng);
    ConstantPredictor zero(0, "zero");
    auto adv = make_adversary({AdversarySpec::Kind::Realizable, std::nullopt, 2}, cls, rng);
    const auto tr = run_game(cls, xs, zero, *adv, loss, rng);
    avg += tr.learner_loss - *tr.target_loss;
  }
  // Expected hits of a random size-T set: T * T / N = 0.25.
  CHECK(avg / trials <= 0.5);
  Rng rng(7);
  const auto xs = iid(cls, T, rng);
  ConstantPredictor zero(0, "zero");
  auto adv = make_adversary({AdversarySpec::Kind::Greedy, std::nullopt, 2}, cls, rng);
  const auto tr = run_game(cls, xs, zero, *adv, loss, rng);
  CHECK(tr.regret >= T / 2.0);
}

TEST_CASE("games are deterministic given the seed") {
  const auto cls = HypothesisClass::threshold();
  auto once = [&] {
    Rng rng(42);
    const auto xs = iid(cls, 200, rng);
    OneInclusionPredictor p(cls);
    auto adv = make_adversary({AdversarySpec::Kind::Random, std::nullopt, 2}, cls, rng);
    return run_game(cls, xs, p, *adv, LossSpec::by_name("log", 1e-3), rng).labels;
  };
  CHECK(once() == once());
}

TEST_CASE("exact minimax refuses long horizons") {
  const auto cls = HypothesisClass::threshold();
  Rng rng(1);
  const auto xs = iid(cls, 20, rng);
  ConstantPredictor half(0.5, "half");
  CHECK_THROWS_AS(exact_minimax_regret(cls, xs, half, LossSpec{}), Error);
}
