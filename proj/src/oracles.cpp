#include "seqcover/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "seqcover/one_inclusion.hpp"
#include "seqcover/online.hpp"
#include "seqcover/parallel.hpp"
#include "seqcover/version_space.hpp"

namespace seqcover {

double binomial_slack(double p, std::size_t trials) {
  if (trials == 0) return 1.0;
  return 3.0 * std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(trials));
}

double shtarkov_logloss_regret(const HypothesisClass& cls, std::span<const Feature> sample) {
  if (!cls.binary()) throw Error("the behavior-count form of the Shtarkov sum needs a binary class");
  return std::log(behavior_count(cls, sample));
}

double shtarkov_by_enumeration(const HypothesisClass& cls, std::span<const Feature> sample, double eps) {
  const std::size_t T = sample.size();
  if (T > 16) throw Error("label enumeration limited to 16 rounds");
  std::vector<Hypothesis> hs = behavior_witnesses(cls, sample);
  const LossSpec spec{LossKind::Log, eps};
  double sum = 0;
  for (std::size_t code = 0; code < (std::size_t{1} << T); ++code) {
    double best = 0;
    for (const auto& h : hs) {
      double lik = 1;
      for (std::size_t t = 0; t < T && lik > 0; ++t) {
        const double p = evaluate(cls, h, sample[t]);
        const int y = code >> t & 1;
        lik *= eps > 0 ? std::exp(-loss(spec, p, y)) : (y ? p : 1 - p);
      }
      best = std::max(best, lik);
    }
    sum += best;
  }
  return std::log(sum);
}

bool monotonicity_check(const HypothesisClass& cls, std::span<const Feature> small, std::span<const Feature> large) {
  std::map<Feature, std::int64_t> count;
  for (const auto& x : large) ++count[x];
  for (const auto& x : small)
    if (--count[x] < 0) throw Error("small sample is not contained in the large one");
  return shtarkov_logloss_regret(cls, small) <= shtarkov_logloss_regret(cls, large) + 1e-12;
}

double fixed_design_minimax_value(const HypothesisClass& cls, std::span<const Feature> xs, double eps) {
  const std::size_t T = xs.size();
  if (T > 16) throw Error("backward induction limited to 16 rounds");
  if (!(eps > 0 && eps < 0.5)) throw Error("clamp must be in (0, 1/2)");
  const auto beh = enumerate_behaviors(cls, xs);
  const LossSpec spec{LossKind::Log, eps};
  // Leaves: minus the best clamped expert loss on each label path (y_1 first bit from the top).
  std::vector<double> v(std::size_t{1} << T);
  for (std::size_t code = 0; code < v.size(); ++code) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : beh) {
      double L = 0;
      for (std::size_t t = 0; t < T; ++t) L += loss(spec, cls.levels()[b.labels[t]], code >> (T - 1 - t) & 1);
      best = std::min(best, L);
    }
    v[code] = -best;
  }
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (std::size_t level = T; level-- > 0;) {
    std::vector<double> up(std::size_t{1} << level);
    for (std::size_t code = 0; code < up.size(); ++code) {
      const double a0 = v[2 * code], a1 = v[2 * code + 1];
      auto g = [&](double q) { return std::max(-std::log(q) + a1, -std::log1p(-q) + a0); };
      double lo = eps, hi = 1 - eps;
      double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
      double gc = g(c), gd = g(d);
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (gc < gd) {
          hi = d;
          d = c;
          gd = gc;
          c = hi - phi * (hi - lo);
          gc = g(c);
        } else {
          lo = c;
          c = d;
          gc = gd;
          d = lo + phi * (hi - lo);
          gd = g(d);
        }
      }
      up[code] = std::min({g(0.5 * (lo + hi)), g(eps), g(1 - eps)});
    }
    v = std::move(up);
  }
  return v.front();
}

double coupon_collector_tail(std::int64_t T, double c, std::size_t trials, std::uint64_t seed, unsigned threads) {
  if (T < 1) throw Error("coupon collector needs T >= 1");
  const double cut = static_cast<double>(T) * std::log(static_cast<double>(T)) + c * static_cast<double>(T);
  std::vector<char> hit(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    std::uniform_int_distribution<std::int64_t> u(0, T - 1);
    std::vector<char> got(static_cast<std::size_t>(T), 0);
    std::int64_t left = T, tau = 0;
    while (left) {
      ++tau;
      auto& g = got[static_cast<std::size_t>(u(rng))];
      if (!g) {
        g = 1;
        --left;
      }
    }
    hit[i] = static_cast<double>(tau) > cut;
  });
  const auto n = std::count(hit.begin(), hit.end(), 1);
  return trials ? static_cast<double>(n) / static_cast<double>(trials) : 0.0;
}

namespace {

std::int64_t mistakes_in_order(const HypothesisClass& cls, std::span<const Feature> order, const Hypothesis& h) {
  OneInclusionPredictor p(cls, false);
  std::int64_t m = 0;
  for (const auto& x : order) {
    const int y = evaluate(cls, h, x) >= 0.5;
    m += (p.predict(x) >= 0.5) != y;
    p.observe(x, y);
  }
  return m;
}

std::vector<double> tails_from_counts(const std::vector<std::int64_t>& mistakes,
                                      std::span<const std::int64_t> thresholds) {
  std::vector<double> out;
  for (auto k : thresholds) {
    const auto n = std::count_if(mistakes.begin(), mistakes.end(), [&](std::int64_t m) { return m >= k; });
    out.push_back(mistakes.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(mistakes.size()));
  }
  return out;
}

}  // namespace

std::vector<double> permutation_error_tail(const HypothesisClass& cls, std::span<const Feature> xs,
                                           const Hypothesis& h, std::size_t trials,
                                           std::span<const std::int64_t> thresholds, std::uint64_t seed) {
  std::vector<std::int64_t> m(trials);
  std::vector<Feature> order(xs.begin(), xs.end());
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(derive_seed(seed, i));
    std::shuffle(order.begin(), order.end(), rng);
    m[i] = mistakes_in_order(cls, order, h);
  }
  return tails_from_counts(m, thresholds);
}

std::vector<double> permutation_error_tail_exact(const HypothesisClass& cls, std::span<const Feature> xs,
                                                 const Hypothesis& h, std::span<const std::int64_t> thresholds) {
  if (xs.size() > 8) throw Error("exact permutation tail limited to 8 points");
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::int64_t> m;
  std::vector<Feature> order(xs.size());
  do {
    for (std::size_t i = 0; i < idx.size(); ++i) order[i] = xs[idx[i]];
    m.push_back(mistakes_in_order(cls, order, h));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return tails_from_counts(m, thresholds);
}

std::vector<std::int64_t> threshold_mistakes_all_cuts(std::span<const std::int64_t> keys_in_order) {
  const std::size_t n = keys_in_order.size();
  std::vector<std::int64_t> sorted(keys_in_order.begin(), keys_in_order.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw Error("keys must be distinct");
  std::vector<std::int64_t> out(n + 1);
  for (std::size_t c = 0; c <= n; ++c) {
    // Labels are 1 exactly on keys >= cut_key.
    const std::int64_t cut_key = c == 0 ? kInfinite : sorted[n - c];
    std::int64_t max_zero = -1, min_one = kInfinite, m = 0;
    for (auto k : keys_in_order) {
      const int y = k >= cut_key;
      m += threshold_one_inclusion_predict(max_zero, min_one, k) != y;
      if (y) min_one = std::min(min_one, k);
      else max_zero = std::max(max_zero, k);
    }
    out[c] = m;
  }
  return out;
}

std::vector<mpq_class> threshold_game_value(std::int64_t T_max) {
  if (T_max < 1) throw Error("T_max must be positive");
  std::vector<mpq_class> f(static_cast<std::size_t>(T_max) + 1, 0);
  mpq_class acc = 0;  // sum_{t < T} (t f(t) + t)
  for (std::int64_t T = 2; T <= T_max; ++T) {
    const auto t = T - 1;
    acc += mpq_class(t) * f[static_cast<std::size_t>(t)] + t;
    f[static_cast<std::size_t>(T)] = mpq_class(2) * acc / (mpq_class(T) * T);
    f[static_cast<std::size_t>(T)].canonicalize();
  }
  return f;
}

double bayes_threshold_errors(std::int64_t T, std::size_t trials, std::uint64_t seed, std::optional<double> point_mass,
                              unsigned threads) {
  std::vector<std::int64_t> m(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    std::uniform_real_distribution<double> u(0, 1);
    const double A = u(rng);
    double L = 0, U = 1;  // A lies in (L, U]
    for (std::int64_t t = 0; t < T; ++t) {
      const double x = point_mass ? *point_mass : u(rng);
      const int y = x >= A;
      int pred;
      if (x <= L) pred = 0;
      else if (x >= U) pred = 1;
      else pred = 2 * x > L + U;
      m[i] += pred != y;
      if (y) U = std::min(U, x);
      else L = std::max(L, x);
    }
  });
  const double total = static_cast<double>(std::accumulate(m.begin(), m.end(), std::int64_t{0}));
  return trials ? total / static_cast<double>(trials) : 0.0;
}

namespace {

// Support points of nu with their masses.
std::vector<std::pair<Feature, double>> atoms(const HypothesisClass& cls, const Marginal& nu) {
  std::vector<std::pair<Feature, double>> out;
  switch (nu.kind) {
    case Marginal::Kind::PointMass:
      out.push_back({Feature(nu.points.at(0)), 1.0});
      break;
    case Marginal::Kind::Discrete: {
      const double total = std::accumulate(nu.weights.begin(), nu.weights.end(), 0.0);
      std::map<std::int64_t, double> w;
      for (std::size_t i = 0; i < nu.points.size(); ++i) w[nu.points[i]] += nu.weights.at(i) / total;
      for (auto [k, p] : w)
        if (p > 0) out.push_back({Feature(k), p});
      break;
    }
    case Marginal::Kind::Uniform: {
      std::int64_t lo = nu.lo, hi = nu.hi;
      if (hi < lo) {
        lo = 0;
        hi = cls.domain_points() - 1;
      }
      if (hi - lo + 1 > 4096) throw Error("distribution cover limited to 4096 support points");
      const double p = 1.0 / static_cast<double>(hi - lo + 1);
      for (std::int64_t k = lo; k <= hi; ++k) out.push_back({Feature(k), p});
      break;
    }
  }
  for (const auto& a : out) cls.check_feature(a.first);
  return out;
}

}  // namespace

DistributionCover greedy_distribution_cover(const HypothesisClass& cls, const Marginal& nu, double eps) {
  if (cls.kind() == ClassKind::AxisRectangle) throw Error("distribution covers need a 1-D class");
  const auto at = atoms(cls, nu);
  double min_mass = 1;
  for (const auto& a : at) min_mass = std::min(min_mass, a.second);
  DistributionCover F;
  if (eps < min_mass) {
    F.whole_class = true;
    return F;
  }
  std::vector<Feature> pts;
  for (const auto& a : at) pts.push_back(a.first);
  const auto beh = enumerate_behaviors(cls, pts);
  const std::size_t n = beh.size();
  if (static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(pts.size()) > 4e8)
    throw Error("distribution cover is too large");
  std::vector<std::vector<std::uint32_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0;
      for (std::size_t t = 0; t < pts.size(); ++t) d += beh[i].labels[t] != beh[j].labels[t] ? at[t].second : 0.0;
      if (d <= eps + 1e-12) nb[i].push_back(static_cast<std::uint32_t>(j));
    }
  std::vector<char> done(n, 0);
  std::size_t left = n;
  while (left) {
    std::size_t best = 0, gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
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
    F.members.push_back(beh[best].witness);
  }
  return F;
}

std::int64_t sup_inf_mismatches(const HypothesisClass& cls, const DistributionCover& F, std::span<const Feature> xs) {
  if (F.whole_class) return 0;
  if (F.members.empty()) throw Error("empty distribution cover");
  // Distinct points with multiplicities; behaviors are compared there.
  std::map<Feature, std::int64_t> mult;
  for (const auto& x : xs) ++mult[x];
  std::vector<Feature> pts;
  std::vector<std::int64_t> w;
  for (const auto& [x, c] : mult) {
    pts.push_back(x);
    w.push_back(c);
  }
  const auto beh = enumerate_behaviors(cls, pts);
  std::vector<std::vector<std::uint8_t>> fl;
  for (const auto& f : F.members) {
    std::vector<std::uint8_t> v(pts.size());
    for (std::size_t t = 0; t < pts.size(); ++t) v[t] = evaluate(cls, f, pts[t]) >= 0.5;
    fl.push_back(std::move(v));
  }
  std::int64_t sup = 0;
  for (const auto& b : beh) {
    std::int64_t inf = std::numeric_limits<std::int64_t>::max();
    for (const auto& v : fl) {
      std::int64_t m = 0;
      for (std::size_t t = 0; t < pts.size() && m < inf; ++t) m += b.labels[t] != v[t] ? w[t] : 0;
      inf = std::min(inf, m);
    }
    sup = std::max(sup, inf);
  }
  return sup;
}

double double_sampling_gap(const HypothesisClass& cls, const Marginal& nu, const DistributionCover& F,
                           std::int64_t T, std::size_t trials, std::uint64_t seed, unsigned threads) {
  std::vector<std::int64_t> v(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    std::vector<Feature> xs;
    for (std::int64_t t = 0; t < T; ++t) xs.push_back(nu.sample(cls, rng));
    v[i] = sup_inf_mismatches(cls, F, xs);
  });
  const double total = static_cast<double>(std::accumulate(v.begin(), v.end(), std::int64_t{0}));
  return trials ? total / static_cast<double>(trials) : 0.0;
}

double type_k_error_bound(const HypothesisClass& cls, const DistributionSpec& dist, std::int64_t T,
                          std::size_t trials, std::uint64_t seed, unsigned threads) {
  std::vector<std::int64_t> v(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const auto xs = dist.sample(cls, static_cast<std::size_t>(T), rng);
    std::int64_t sup = 0;
    for (const auto& h : behavior_witnesses(cls, xs)) sup = std::max(sup, mistakes_in_order(cls, xs, h));
    v[i] = sup;
  });
  const double total = static_cast<double>(std::accumulate(v.begin(), v.end(), std::int64_t{0}));
  return trials ? total / static_cast<double>(trials) : 0.0;
}

double type_k_reference(std::int64_t k, std::int64_t vc, std::int64_t T) {
  return static_cast<double>(k * vc) * std::log(static_cast<double>(T) / static_cast<double>(k));
}

std::vector<Feature> bisection_stream(std::int64_t grid, std::size_t k) {
  // Breadth-first midpoints of (lo, hi) with integer keys.
  std::vector<Feature> out;
  std::vector<std::pair<std::int64_t, std::int64_t>> level{{0, grid}};
  while (out.size() < k && !level.empty()) {
    std::vector<std::pair<std::int64_t, std::int64_t>> next;
    for (auto [lo, hi] : level) {
      if (hi - lo < 2) continue;
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (out.size() < k) out.emplace_back(mid);
      next.push_back({lo, mid});
      next.push_back({mid, hi});
    }
    level = std::move(next);
  }
  if (out.size() < k) throw Error("grid too coarse for the requested bisection stream");
  return out;
}

}  // namespace seqcover
