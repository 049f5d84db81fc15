#pragma once

#include "seqcover/domain.hpp"

namespace seqcover {

// splitmix64 finalizer over (seed, a, b); the per-trial stream of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// A marginal over the feature domain: uniform on an integer key range (every
// coordinate for rectangles), weighted discrete points, or a point mass.
struct Marginal {
  enum class Kind { Uniform, Discrete, PointMass } kind = Kind::Uniform;
  std::int64_t lo = 0, hi = -1;  // inclusive key range; hi < lo means the whole domain
  std::vector<std::int64_t> points;
  std::vector<double> weights;
  Feature sample(const HypothesisClass& cls, Rng& rng) const;
};

struct DistributionSpec {
  enum class Kind { Iid, Exchangeable, ProductTypeK, Singleton } kind = Kind::Iid;
  Marginal marginal;                    // Iid
  std::vector<Feature> multiset;        // Exchangeable: uniform random order of this multiset
  std::vector<Marginal> marginals;      // ProductTypeK
  std::vector<std::size_t> assignment;  // ProductTypeK: marginal index per coordinate (cycled if short)
  std::vector<Feature> sequence;        // Singleton: the one fixed design

  std::vector<Feature> sample(const HypothesisClass& cls, std::size_t T, Rng& rng) const;
  std::string name() const;
  std::size_t type_k() const;

  static DistributionSpec uniform();
  static DistributionSpec singleton(std::vector<Feature> xs);
  static DistributionSpec exchangeable(std::vector<Feature> xs);
};

}  // namespace seqcover
