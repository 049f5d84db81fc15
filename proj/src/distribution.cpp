#include "seqcover/distribution.hpp"

#include <algorithm>
#include <set>

namespace seqcover {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ull));
}

Feature Marginal::sample(const HypothesisClass& cls, Rng& rng) const {
  switch (kind) {
    case Kind::PointMass: {
      if (points.empty()) throw Error("point mass needs a point");
      Feature f(points.front());
      if (cls.kind() == ClassKind::AxisRectangle) {
        f.dims = cls.dims();
        for (int i = 1; i < f.dims; ++i) f.c[i] = points.front();
      }
      cls.check_feature(f);
      return f;
    }
    case Kind::Discrete: {
      if (points.empty() || points.size() != weights.size()) throw Error("discrete marginal needs matched weights");
      std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
      Feature f(points[d(rng)]);
      cls.check_feature(f);
      return f;
    }
    case Kind::Uniform: {
      if (hi < lo) return random_feature(cls, rng);
      std::uniform_int_distribution<std::int64_t> u(lo, hi);
      Feature f;
      f.dims = cls.kind() == ClassKind::AxisRectangle ? cls.dims() : 1;
      for (int i = 0; i < f.dims; ++i) f.c[i] = u(rng);
      cls.check_feature(f);
      return f;
    }
  }
  return {};
}

std::vector<Feature> DistributionSpec::sample(const HypothesisClass& cls, std::size_t T, Rng& rng) const {
  std::vector<Feature> xs;
  xs.reserve(T);
  switch (kind) {
    case Kind::Iid:
      for (std::size_t t = 0; t < T; ++t) xs.push_back(marginal.sample(cls, rng));
      break;
    case Kind::Exchangeable: {
      if (multiset.size() < T) throw Error("exchangeable multiset shorter than the horizon");
      xs = multiset;
      std::shuffle(xs.begin(), xs.end(), rng);
      xs.resize(T);
      break;
    }
    case Kind::ProductTypeK:
      if (marginals.empty()) throw Error("type-k distribution needs marginals");
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t m = assignment.empty() ? 0 : assignment[t % assignment.size()];
        if (m >= marginals.size()) throw Error("type-k assignment out of range");
        xs.push_back(marginals[m].sample(cls, rng));
      }
      break;
    case Kind::Singleton:
      if (sequence.size() < T) throw Error("singleton sequence shorter than the horizon");
      xs.assign(sequence.begin(), sequence.begin() + static_cast<std::ptrdiff_t>(T));
      for (const auto& x : xs) cls.check_feature(x);
      break;
  }
  return xs;
}

std::string DistributionSpec::name() const {
  switch (kind) {
    case Kind::Iid:
      return marginal.kind == Marginal::Kind::Uniform ? "iid_uniform"
             : marginal.kind == Marginal::Kind::Discrete ? "iid_discrete"
                                                          : "iid_point";
    case Kind::Exchangeable: return "exchangeable";
    case Kind::ProductTypeK: return "type_k" + std::to_string(type_k());
    case Kind::Singleton: return "singleton";
  }
  return "?";
}

std::size_t DistributionSpec::type_k() const {
  if (kind != Kind::ProductTypeK) return 1;
  std::set<std::size_t> used(assignment.begin(), assignment.end());
  return std::max<std::size_t>(used.size(), 1);
}

DistributionSpec DistributionSpec::uniform() { return {}; }

DistributionSpec DistributionSpec::singleton(std::vector<Feature> xs) {
  DistributionSpec d;
  d.kind = Kind::Singleton;
  d.sequence = std::move(xs);
  return d;
}

DistributionSpec DistributionSpec::exchangeable(std::vector<Feature> xs) {
  DistributionSpec d;
  d.kind = Kind::Exchangeable;
  d.multiset = std::move(xs);
  return d;
}

}  // namespace seqcover
