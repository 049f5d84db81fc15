#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqcover {

inline constexpr int kMaxDims = 4;
inline constexpr std::int64_t kDefaultGrid = std::int64_t{1} << 20;
inline constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();

using Rng = std::mt19937_64;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point of {0..N-1} or of the grid {k/R : 0 <= k <= R}; rectangles use a d-tuple.
struct Feature {
  std::array<std::int64_t, kMaxDims> c{};
  int dims = 1;

  constexpr Feature() = default;
  constexpr explicit Feature(std::int64_t k) : c{k, 0, 0, 0}, dims(1) {}

  std::int64_t k() const { return c[0]; }

  friend bool operator==(const Feature&, const Feature&) = default;
  friend std::strong_ordering operator<=>(const Feature& a, const Feature& b) {
    if (auto o = a.dims <=> b.dims; o != 0) return o;
    for (int i = 0; i < kMaxDims; ++i)
      if (auto o = a.c[i] <=> b.c[i]; o != 0) return o;
    return std::strong_ordering::equal;
  }
};

Feature make_point(std::span<const std::int64_t> coords);

// Parameters of one hypothesis; the layout depends on the class kind (see domain.cpp).
struct Hypothesis {
  std::vector<std::int64_t> p;
  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

enum class ClassKind {
  FiniteTable,
  Threshold1D,
  Interval1D,
  AxisRectangle,
  SparseIndicator,
  Monotone1D,
  Composite
};

// Boolean combiner applied pointwise to binary component outputs; bit i of the
// table index is the output of component i.
struct Combiner {
  std::string name;
  int arity = 1;
  std::vector<std::uint8_t> table;

  int apply(std::span<const int> bits) const;
  static Combiner identity();
  static Combiner conjunction(int arity);
  static Combiner and_not();
  static Combiner disjunction(int arity);
  static Combiner parity(int arity);
  static Combiner by_name(const std::string& name, int arity);
};

class HypothesisClass {
 public:
  static HypothesisClass finite_table(std::vector<std::vector<std::uint8_t>> rows);
  static HypothesisClass threshold(std::int64_t grid = kDefaultGrid);
  static HypothesisClass interval(std::int64_t grid = kDefaultGrid);
  static HypothesisClass rectangle(int dims, std::int64_t grid = kDefaultGrid);
  static HypothesisClass sparse(std::int64_t domain, int budget);
  static HypothesisClass monotone(std::vector<double> levels, std::int64_t grid = kDefaultGrid);
  static HypothesisClass composite(std::vector<HypothesisClass> parts, Combiner f);

  ClassKind kind() const { return kind_; }
  bool binary() const { return kind_ != ClassKind::Monotone1D; }
  bool on_grid() const;
  // R for grid kinds; grid points are 0..R.
  std::int64_t grid() const { return grid_; }
  // Number of domain points for 1-D kinds (N, or R+1 on the grid).
  std::int64_t domain_points() const;
  int dims() const { return dims_; }
  int budget() const { return budget_; }
  const std::vector<std::vector<std::uint8_t>>& rows() const { return rows_; }
  // Output value of each level; binary classes use {0,1}.
  const std::vector<double>& levels() const { return levels_; }
  const std::vector<HypothesisClass>& parts() const { return *parts_; }
  const Combiner& combiner() const { return combiner_; }

  std::optional<std::int64_t> declared_vc() const;
  std::optional<std::int64_t> declared_star() const;
  std::string name() const;

  void check_feature(const Feature& x) const;
  void check_hypothesis(const Hypothesis& h) const;

  // Level index of h at x (no validation; see evaluate for the checked form).
  int level(const Hypothesis& h, const Feature& x) const;

 private:
  ClassKind kind_ = ClassKind::Threshold1D;
  std::int64_t grid_ = kDefaultGrid;
  std::int64_t domain_ = 0;
  int dims_ = 1;
  int budget_ = 0;
  std::vector<std::vector<std::uint8_t>> rows_;
  std::vector<double> levels_{0.0, 1.0};
  std::shared_ptr<const std::vector<HypothesisClass>> parts_ =
      std::make_shared<const std::vector<HypothesisClass>>();
  Combiner combiner_;
};

struct Behavior {
  std::vector<std::uint8_t> labels;  // level indices, one per sample position
  Hypothesis witness;
};

double evaluate(const HypothesisClass& cls, const Hypothesis& h, const Feature& x);

// Distinct restrictions of the class to the sample, sorted lexicographically by labels.
std::vector<Behavior> enumerate_behaviors(const HypothesisClass& cls,
                                          std::span<const Feature> sample);
// One witness per distinct behavior, without materializing label vectors.
std::vector<Hypothesis> behavior_witnesses(const HypothesisClass& cls,
                                           std::span<const Feature> sample);
// Exact number of behaviors; analytic for parametric kinds.
double behavior_count(const HypothesisClass& cls, std::span<const Feature> sample);

Hypothesis random_hypothesis(const HypothesisClass& cls, Rng& rng);
Feature random_feature(const HypothesisClass& cls, Rng& rng);

// Behaviors on the whole domain as a FiniteTable (1-D kinds with at most 16 points).
HypothesisClass to_finite_table(const HypothesisClass& cls);
std::vector<Feature> domain_points(const HypothesisClass& cls);

// Five-member reference class: hypotheses h1..h5 on x1,x2,x3 (features 0,1,2).
HypothesisClass toy5_class();

double binomial(std::int64_t n, std::int64_t k);
double log_binomial_sum(std::int64_t n, std::int64_t k);  // ln sum_{i<=k} C(n,i)

}  // namespace seqcover
