#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "seqcover/mixing.hpp"

using namespace seqcover;
using testutil::replay_pool;

namespace {

struct Run {
  double learner = 0;
  std::vector<double> experts;
};

Run play(MixtureLearner& m, const std::vector<std::vector<double>>& rows, const std::vector<double>& ys,
         const LossSpec& spec) {
  Run r;
  r.experts.assign(rows.size(), 0);
  for (std::size_t t = 0; t < ys.size(); ++t) {
    const Feature x(static_cast<std::int64_t>(t));
    const double p = m.predict(x);
    r.learner += loss(spec, p, ys[t]);
    for (std::size_t i = 0; i < rows.size(); ++i) r.experts[i] += loss(spec, rows[i][t], ys[t]);
    m.observe(x, ys[t]);
  }
  return r;
}

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t T, Rng& rng, bool binary) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> rows(n, std::vector<double>(T));
  for (auto& r : rows)
    for (auto& v : r) v = binary ? static_cast<double>(rng() & 1) : u(rng);
  return rows;
}

}  // namespace

TEST_CASE("single-expert and uniform mixtures") {
  const std::vector<double> p{0.3};
  const std::vector<double> l{1.7};
  CHECK(ewa_predict(p, l, 0.5) == doctest::Approx(0.3));
  const std::vector<double> ps{0.2, 0.6}, w{1, 1};
  // With log loss and eta = 1 the substitution is the weighted mean.
  CHECK(aggregating_predict(ps, w, 1.0, LossSpec::by_name("log", 1e-9)) == doctest::Approx(0.4));
  const std::vector<double> halves{0.5, 0.5, 0.5}, w3{1, 2, 3};
  CHECK(smooth_truncated_bayes_predict(halves, w3, 0.1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(smooth_truncated_bayes_predict(halves, w3, 0.5), Error);
}

TEST_CASE("square loss substitution at eta 2 satisfies the mixability inequality") {
  const auto sq = LossSpec::by_name("square", 0);
  const std::vector<double> ps{0.0, 1.0}, w{1, 1};
  const double p = aggregating_predict(ps, w, 2.0, sq);
  CHECK(p == doctest::Approx(0.5));
  for (double y : {0.0, 1.0}) {
    const double mix = -0.5 * std::log(0.5 * std::exp(-2 * loss(sq, 0, y)) + 0.5 * std::exp(-2 * loss(sq, 1, y)));
    CHECK(loss(sq, p, y) <= mix + 1e-12);
  }
}

TEST_CASE("truncated expert likelihood uses the clipped value") {
  // Expert 0 predicts 0, expert 1 predicts 1; after y = 1 their weights are 0.1 : 0.9.
  MixtureLearner m(replay_pool({{0, 0}, {1, 1}}), MixMode::SmoothTruncatedBayes, 0.1, LossSpec::by_name("log", 1e-6),
                   0);
  const double p0 = m.predict(Feature(0));
  // Pool halves at 0.1 and 0.9 plus the 1/2 expert: all average 1/2.
  CHECK(p0 == doctest::Approx(0.5));
  m.observe(Feature(0), 1);
  // Weights after the update: pool {0.05, 0.45} over prior 2/3, half {0.5} over 1/3.
  const double num = (2.0 / 3) * (0.5 * 0.1 * 0.1 + 0.5 * 0.9 * 0.9) + (1.0 / 3) * 0.5 * 0.5;
  const double den = (2.0 / 3) * (0.5 * 0.1 + 0.5 * 0.9) + (1.0 / 3) * 0.5;
  CHECK(m.predict(Feature(1)) == doctest::Approx(num / den));
}

TEST_CASE("truncated Bayes regret bound holds per sequence") {
  Rng rng(21);
  const auto spec = LossSpec::by_name("log", 1e-9);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t T = 64, n = 1 + rng() % 16;
    const double alpha = 1.0 / T;
    auto rows = random_rows(n, T, rng, rep % 2 == 0);
    std::vector<double> ys(T);
    for (auto& y : ys) y = static_cast<double>(rng() & 1);
    if (rep % 4 == 0) rows[0] = ys;  // one expert is exactly right
    MixtureLearner m(replay_pool(rows), MixMode::SmoothTruncatedBayes, alpha, spec, 0);
    const auto r = play(m, rows, ys, spec);
    const double best = *std::min_element(r.experts.begin(), r.experts.end());
    CHECK(r.learner - best <= 2 * alpha * T + std::log(n + 1.0) + 1e-9);
    if (rep % 4 == 0) CHECK(r.learner <= 2 + std::log(n + 1.0) + 1e-9);
  }
}

TEST_CASE("EWA and AA regret inequalities on random sequences") {
  Rng rng(8);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t T = 1 + rng() % 50, n = 1 + rng() % 10;
    const auto rows = random_rows(n, T, rng, false);
    std::vector<double> ys(T);
    for (auto& y : ys) y = static_cast<double>(rng() & 1);
    const double ln_n = std::log(static_cast<double>(n));
    {
      const auto abs = LossSpec::by_name("absolute", 0);
      const double eta = std::sqrt(8 * std::max(ln_n, 1e-12) / static_cast<double>(T));
      MixtureLearner m(replay_pool(rows), MixMode::Ewa, eta, abs, 0);
      const auto r = play(m, rows, ys, abs);
      CHECK(r.learner - *std::min_element(r.experts.begin(), r.experts.end()) <=
            std::sqrt(static_cast<double>(T) / 2 * ln_n) + 1e-9);
    }
    for (auto [name, eta] : {std::pair{"log", 1.0}, std::pair{"square", 2.0}}) {
      const auto spec = LossSpec::by_name(name, 1e-12);
      MixtureLearner m(replay_pool(rows), MixMode::Aggregating, eta, spec, 0);
      const auto r = play(m, rows, ys, spec);
      CHECK(r.learner - *std::min_element(r.experts.begin(), r.experts.end()) <= ln_n / eta + 1e-9);
    }
  }
}

TEST_CASE("mixture parameter validation") {
  CHECK_THROWS_AS(MixtureLearner(replay_pool({{0.5}}), MixMode::SmoothTruncatedBayes, 0.0, LossSpec{}), Error);
  CHECK_THROWS_AS(MixtureLearner(replay_pool({{0.5}}), MixMode::Ewa, -1.0, LossSpec{}), Error);
  CHECK_THROWS_AS(replay_pool({}), Error);
}
