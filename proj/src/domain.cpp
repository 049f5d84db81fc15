#include "seqcover/domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace seqcover {

namespace {

constexpr double kMaxBehaviorCells = 4e8;

std::vector<std::int64_t> distinct_values(std::span<const Feature> sample) {
  std::vector<std::int64_t> v;
  v.reserve(sample.size());
  for (const auto& x : sample) v.push_back(x.k());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void guard_size(double behaviors, std::size_t t) {
  if (behaviors * static_cast<double>(std::max<std::size_t>(t, 1)) > kMaxBehaviorCells || behaviors > 5e7)
    throw Error("behavior enumeration infeasible: " + std::to_string(behaviors) + " behaviors on " +
                std::to_string(t) + " points");
}

// Lexicographic combinations of {0..m-1} of size <= d.
template <class F>
void for_each_subset(int m, int d, F&& f) {
  std::vector<int> idx;
  f(idx);
  for (int size = 1; size <= std::min(d, m); ++size) {
    idx.resize(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      f(idx);
      int i = size - 1;
      while (i >= 0 && idx[i] == m - size + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

std::vector<Hypothesis> analytic_witnesses(const HypothesisClass& cls, std::span<const Feature> sample) {
  std::vector<Hypothesis> out;
  const std::int64_t R = cls.grid();
  switch (cls.kind()) {
    case ClassKind::Threshold1D: {
      auto v = distinct_values(sample);
      for (std::size_t c = 0; c <= v.size(); ++c) out.push_back({{c < v.size() ? v[c] : R + 1}});
      break;
    }
    case ClassKind::Interval1D: {
      auto v = distinct_values(sample);
      out.push_back({{1, 0}});
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i; j < v.size(); ++j) out.push_back({{v[i], v[j]}});
      break;
    }
    case ClassKind::SparseIndicator: {
      auto v = distinct_values(sample);
      for_each_subset(static_cast<int>(v.size()), cls.budget(), [&](const std::vector<int>& idx) {
        Hypothesis h;
        for (int i : idx) h.p.push_back(v[i]);
        out.push_back(std::move(h));
      });
      break;
    }
    case ClassKind::Monotone1D: {
      auto v = distinct_values(sample);
      const int L = static_cast<int>(cls.levels().size());
      const int m = static_cast<int>(v.size());
      std::vector<int> lev(m, 0);
      // Nondecreasing level sequences over the sorted distinct values.
      auto emit = [&]() {
        Hypothesis h;
        for (int j = 1; j < L; ++j) {
          std::int64_t a = R + 1;
          for (int i = 0; i < m; ++i)
            if (lev[i] >= j) { a = v[i]; break; }
          h.p.push_back(a);
        }
        out.push_back(std::move(h));
      };
      auto rec = [&](auto&& self, int i, int lo) -> void {
        if (i == m) { emit(); return; }
        for (int l = lo; l < L; ++l) { lev[i] = l; self(self, i + 1, l); }
      };
      rec(rec, 0, 0);
      break;
    }
    default:
      throw Error("no analytic enumeration for class " + cls.name());
  }
  return out;
}

bool analytic_kind(ClassKind k) {
  return k == ClassKind::Threshold1D || k == ClassKind::Interval1D || k == ClassKind::SparseIndicator ||
         k == ClassKind::Monotone1D;
}

std::vector<std::uint8_t> labels_of(const HypothesisClass& cls, const Hypothesis& h,
                                    std::span<const Feature> sample) {
  std::vector<std::uint8_t> lab(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) lab[i] = static_cast<std::uint8_t>(cls.level(h, sample[i]));
  return lab;
}

std::vector<Behavior> dedupe(std::map<std::vector<std::uint8_t>, Hypothesis>&& m) {
  std::vector<Behavior> out;
  out.reserve(m.size());
  for (auto& [lab, h] : m) out.push_back({lab, std::move(h)});
  return out;
}

}  // namespace

Feature make_point(std::span<const std::int64_t> coords) {
  if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxDims)) throw Error("bad point arity");
  Feature f;
  f.dims = static_cast<int>(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) f.c[i] = coords[i];
  return f;
}

int Combiner::apply(std::span<const int> bits) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) idx |= static_cast<std::size_t>(bits[i] & 1) << i;
  return table.at(idx);
}

Combiner Combiner::identity() { return {"identity", 1, {0, 1}}; }

Combiner Combiner::conjunction(int arity) {
  Combiner c{"and", arity, std::vector<std::uint8_t>(std::size_t{1} << arity, 0)};
  c.table.back() = 1;
  return c;
}

Combiner Combiner::and_not() { return {"and_not", 2, {0, 1, 0, 0}}; }

Combiner Combiner::disjunction(int arity) {
  Combiner c{"or", arity, std::vector<std::uint8_t>(std::size_t{1} << arity, 1)};
  c.table.front() = 0;
  return c;
}

Combiner Combiner::parity(int arity) {
  Combiner c{"xor", arity, std::vector<std::uint8_t>(std::size_t{1} << arity)};
  for (std::size_t i = 0; i < c.table.size(); ++i) c.table[i] = static_cast<std::uint8_t>(std::popcount(i) & 1);
  return c;
}

Combiner Combiner::by_name(const std::string& name, int arity) {
  if (name == "identity") return identity();
  if (name == "and") return conjunction(arity);
  if (name == "and_not") return and_not();
  if (name == "or") return disjunction(arity);
  if (name == "xor") return parity(arity);
  throw Error("unknown combiner " + name);
}

HypothesisClass HypothesisClass::finite_table(std::vector<std::vector<std::uint8_t>> rows) {
  if (rows.empty()) throw Error("finite table needs at least one row");
  HypothesisClass c;
  c.kind_ = ClassKind::FiniteTable;
  c.domain_ = static_cast<std::int64_t>(rows.front().size());
  std::set<std::vector<std::uint8_t>> seen;
  for (const auto& r : rows) {
    if (static_cast<std::int64_t>(r.size()) != c.domain_) throw Error("finite table rows differ in length");
    for (auto v : r)
      if (v > 1) throw Error("finite table entries must be 0 or 1");
    if (!seen.insert(r).second) throw Error("finite table rows must be distinct");
  }
  c.rows_ = std::move(rows);
  return c;
}

HypothesisClass HypothesisClass::threshold(std::int64_t grid) {
  if (grid < 1) throw Error("grid denominator must be positive");
  HypothesisClass c;
  c.kind_ = ClassKind::Threshold1D;
  c.grid_ = grid;
  return c;
}

HypothesisClass HypothesisClass::interval(std::int64_t grid) {
  auto c = threshold(grid);
  c.kind_ = ClassKind::Interval1D;
  return c;
}

HypothesisClass HypothesisClass::rectangle(int dims, std::int64_t grid) {
  if (dims < 1 || dims > kMaxDims) throw Error("rectangle dimension out of range");
  auto c = threshold(grid);
  c.kind_ = ClassKind::AxisRectangle;
  c.dims_ = dims;
  return c;
}

HypothesisClass HypothesisClass::sparse(std::int64_t domain, int budget) {
  if (domain < 1 || budget < 0) throw Error("sparse class needs N >= 1 and budget >= 0");
  HypothesisClass c;
  c.kind_ = ClassKind::SparseIndicator;
  c.domain_ = domain;
  c.budget_ = budget;
  return c;
}

HypothesisClass HypothesisClass::monotone(std::vector<double> levels, std::int64_t grid) {
  if (levels.size() < 2 || levels.size() > 255) throw Error("monotone class needs 2..255 levels");
  if (!std::is_sorted(levels.begin(), levels.end()) ||
      std::adjacent_find(levels.begin(), levels.end()) != levels.end() || levels.front() < 0 || levels.back() > 1)
    throw Error("monotone levels must be strictly increasing in [0,1]");
  auto c = threshold(grid);
  c.kind_ = ClassKind::Monotone1D;
  c.levels_ = std::move(levels);
  return c;
}

HypothesisClass HypothesisClass::composite(std::vector<HypothesisClass> parts, Combiner f) {
  if (parts.empty() || static_cast<int>(parts.size()) != f.arity) throw Error("combiner arity mismatch");
  for (const auto& p : parts) {
    if (!p.binary()) throw Error("composite parts must be binary");
    if (p.on_grid() != parts.front().on_grid() || p.grid() != parts.front().grid() ||
        p.domain_points() != parts.front().domain_points() || p.dims() != parts.front().dims())
      throw Error("composite parts must share one domain");
  }
  HypothesisClass c;
  c.kind_ = ClassKind::Composite;
  c.grid_ = parts.front().grid();
  c.domain_ = parts.front().on_grid() ? 0 : parts.front().domain_points();
  c.dims_ = parts.front().dims();
  c.parts_ = std::make_shared<const std::vector<HypothesisClass>>(std::move(parts));
  c.combiner_ = std::move(f);
  return c;
}

bool HypothesisClass::on_grid() const {
  switch (kind_) {
    case ClassKind::FiniteTable:
    case ClassKind::SparseIndicator:
      return false;
    case ClassKind::Composite:
      return parts().front().on_grid();
    default:
      return true;
  }
}

std::int64_t HypothesisClass::domain_points() const {
  if (kind_ == ClassKind::Composite) return parts().front().domain_points();
  return on_grid() ? grid_ + 1 : domain_;
}

std::optional<std::int64_t> HypothesisClass::declared_vc() const {
  switch (kind_) {
    case ClassKind::Threshold1D: return std::min<std::int64_t>(1, grid_ + 1);
    case ClassKind::Interval1D: return std::min<std::int64_t>(2, grid_ + 1);
    case ClassKind::AxisRectangle: return grid_ >= 2 ? std::optional<std::int64_t>(2 * dims_) : std::nullopt;
    case ClassKind::SparseIndicator: return std::min<std::int64_t>(budget_, domain_);
    default: return std::nullopt;
  }
}

std::optional<std::int64_t> HypothesisClass::declared_star() const {
  constexpr std::int64_t kContinuum = std::int64_t{1} << 16;
  switch (kind_) {
    case ClassKind::Threshold1D: return std::min<std::int64_t>(2, grid_ + 1);
    case ClassKind::Interval1D: return grid_ >= kContinuum ? kInfinite : grid_ + 1;
    case ClassKind::AxisRectangle:
      return grid_ >= kContinuum ? std::optional<std::int64_t>(kInfinite) : std::nullopt;
    case ClassKind::SparseIndicator: return budget_ >= 1 ? domain_ : 0;
    default: return std::nullopt;
  }
}

std::string HypothesisClass::name() const {
  switch (kind_) {
    case ClassKind::FiniteTable: return "table" + std::to_string(rows_.size()) + "x" + std::to_string(domain_);
    case ClassKind::Threshold1D: return "threshold1d";
    case ClassKind::Interval1D: return "interval1d";
    case ClassKind::AxisRectangle: return "rectangle" + std::to_string(dims_) + "d";
    case ClassKind::SparseIndicator:
      return "sparse_N" + std::to_string(domain_) + "_d" + std::to_string(budget_);
    case ClassKind::Monotone1D: return "monotone1d_L" + std::to_string(levels_.size());
    case ClassKind::Composite: {
      std::string s = combiner_.name + "(";
      for (std::size_t i = 0; i < parts().size(); ++i) s += (i ? "|" : "") + parts()[i].name();
      return s + ")";
    }
  }
  return "?";
}

void HypothesisClass::check_feature(const Feature& x) const {
  if (kind_ == ClassKind::Composite) {
    parts().front().check_feature(x);
    return;
  }
  const int want = kind_ == ClassKind::AxisRectangle ? dims_ : 1;
  if (x.dims != want) throw Error("feature has " + std::to_string(x.dims) + " coordinates, class expects " +
                                  std::to_string(want));
  const std::int64_t hi = on_grid() ? grid_ : domain_ - 1;
  for (int i = 0; i < x.dims; ++i)
    if (x.c[i] < 0 || x.c[i] > hi) throw Error("feature outside domain: " + std::to_string(x.c[i]));
}

void HypothesisClass::check_hypothesis(const Hypothesis& h) const {
  auto bad = [&]() { throw Error("unknown hypothesis for class " + name()); };
  const auto& p = h.p;
  switch (kind_) {
    case ClassKind::FiniteTable:
      if (p.size() != 1 || p[0] < 0 || p[0] >= static_cast<std::int64_t>(rows_.size())) bad();
      break;
    case ClassKind::Threshold1D:
      if (p.size() != 1 || p[0] < 0 || p[0] > grid_ + 1) bad();
      break;
    case ClassKind::Interval1D:
    case ClassKind::AxisRectangle: {
      const std::size_t d = kind_ == ClassKind::Interval1D ? 1 : dims_;
      if (p.size() != 2 * d) bad();
      for (std::size_t i = 0; i < d; ++i)
        if (p[2 * i] < 0 || p[2 * i] > grid_ + 1 || p[2 * i + 1] < -1 || p[2 * i + 1] > grid_) bad();
      break;
    }
    case ClassKind::SparseIndicator:
      if (static_cast<int>(p.size()) > budget_) bad();
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < 0 || p[i] >= domain_ || (i && p[i] <= p[i - 1])) bad();
      break;
    case ClassKind::Monotone1D:
      if (p.size() != levels_.size() - 1) bad();
      for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < 0 || p[i] > grid_ + 1 || (i && p[i] < p[i - 1])) bad();
      break;
    case ClassKind::Composite: {
      std::size_t pos = 0;
      for (const auto& part : parts()) {
        if (pos >= p.size()) bad();
        const auto n = static_cast<std::size_t>(p[pos]);
        if (pos + 1 + n > p.size()) bad();
        part.check_hypothesis({{p.begin() + pos + 1, p.begin() + pos + 1 + n}});
        pos += 1 + n;
      }
      if (pos != p.size()) bad();
      break;
    }
  }
}

int HypothesisClass::level(const Hypothesis& h, const Feature& x) const {
  const auto& p = h.p;
  switch (kind_) {
    case ClassKind::FiniteTable: return rows_[p[0]][x.k()];
    case ClassKind::Threshold1D: return x.k() >= p[0];
    case ClassKind::Interval1D: return p[0] <= x.k() && x.k() <= p[1];
    case ClassKind::AxisRectangle:
      for (int i = 0; i < dims_; ++i)
        if (x.c[i] < p[2 * i] || x.c[i] > p[2 * i + 1]) return 0;
      return 1;
    case ClassKind::SparseIndicator: return std::binary_search(p.begin(), p.end(), x.k());
    case ClassKind::Monotone1D: {
      int l = 0;
      for (auto a : p) l += x.k() >= a;
      return l;
    }
    case ClassKind::Composite: {
      int bits[8];
      std::size_t pos = 0;
      const auto& ps = parts();
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto n = static_cast<std::size_t>(p[pos]);
        Hypothesis sub{{p.begin() + pos + 1, p.begin() + pos + 1 + n}};
        bits[i] = ps[i].level(sub, x);
        pos += 1 + n;
      }
      return combiner_.apply(std::span<const int>(bits, ps.size()));
    }
  }
  return 0;
}

double evaluate(const HypothesisClass& cls, const Hypothesis& h, const Feature& x) {
  cls.check_hypothesis(h);
  cls.check_feature(x);
  return cls.levels()[cls.level(h, x)];
}

std::vector<Behavior> enumerate_behaviors(const HypothesisClass& cls, std::span<const Feature> sample) {
  for (const auto& x : sample) cls.check_feature(x);
  if (analytic_kind(cls.kind())) {
    guard_size(behavior_count(cls, sample), sample.size());
    std::vector<Behavior> out;
    for (auto& h : analytic_witnesses(cls, sample)) {
      auto lab = labels_of(cls, h, sample);
      out.push_back({std::move(lab), std::move(h)});
    }
    std::sort(out.begin(), out.end(), [](const Behavior& a, const Behavior& b) { return a.labels < b.labels; });
    return out;
  }
  std::map<std::vector<std::uint8_t>, Hypothesis> m;
  switch (cls.kind()) {
    case ClassKind::FiniteTable:
      for (std::size_t r = 0; r < cls.rows().size(); ++r) {
        Hypothesis h{{static_cast<std::int64_t>(r)}};
        m.emplace(labels_of(cls, h, sample), h);
      }
      break;
    case ClassKind::AxisRectangle: {
      const int d = cls.dims();
      std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> axis(d);
      double combos = 1;
      for (int i = 0; i < d; ++i) {
        std::vector<std::int64_t> v;
        for (const auto& x : sample) v.push_back(x.c[i]);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (std::size_t a = 0; a < v.size(); ++a)
          for (std::size_t b = a; b < v.size(); ++b) axis[i].emplace_back(v[a], v[b]);
        combos *= static_cast<double>(axis[i].size());
      }
      guard_size(combos, sample.size());
      Hypothesis empty;
      for (int i = 0; i < d; ++i) empty.p.insert(empty.p.end(), {1, 0});
      m.emplace(labels_of(cls, empty, sample), empty);
      if (sample.empty()) break;
      std::vector<std::size_t> pick(d, 0);
      while (true) {
        Hypothesis h;
        for (int i = 0; i < d; ++i) h.p.insert(h.p.end(), {axis[i][pick[i]].first, axis[i][pick[i]].second});
        m.emplace(labels_of(cls, h, sample), std::move(h));
        int i = 0;
        while (i < d && ++pick[i] == axis[i].size()) pick[i++] = 0;
        if (i == d) break;
      }
      break;
    }
    case ClassKind::Composite: {
      std::vector<std::vector<Behavior>> per;
      double combos = 1;
      for (const auto& part : cls.parts()) {
        per.push_back(enumerate_behaviors(part, sample));
        combos *= static_cast<double>(per.back().size());
      }
      guard_size(combos, sample.size());
      std::vector<std::size_t> pick(per.size(), 0);
      std::vector<int> bits(per.size());
      while (true) {
        std::vector<std::uint8_t> lab(sample.size());
        for (std::size_t t = 0; t < sample.size(); ++t) {
          for (std::size_t i = 0; i < per.size(); ++i) bits[i] = per[i][pick[i]].labels[t];
          lab[t] = static_cast<std::uint8_t>(cls.combiner().apply(bits));
        }
        if (!m.count(lab)) {
          Hypothesis h;
          for (std::size_t i = 0; i < per.size(); ++i) {
            const auto& w = per[i][pick[i]].witness.p;
            h.p.push_back(static_cast<std::int64_t>(w.size()));
            h.p.insert(h.p.end(), w.begin(), w.end());
          }
          m.emplace(std::move(lab), std::move(h));
        }
        std::size_t i = 0;
        while (i < per.size() && ++pick[i] == per[i].size()) pick[i++] = 0;
        if (i == per.size()) break;
      }
      break;
    }
    default:
      break;
  }
  return dedupe(std::move(m));
}

std::vector<Hypothesis> behavior_witnesses(const HypothesisClass& cls, std::span<const Feature> sample) {
  for (const auto& x : sample) cls.check_feature(x);
  if (analytic_kind(cls.kind())) {
    if (behavior_count(cls, sample) > 5e7) throw Error("behavior enumeration infeasible");
    return analytic_witnesses(cls, sample);
  }
  std::vector<Hypothesis> out;
  for (auto& b : enumerate_behaviors(cls, sample)) out.push_back(std::move(b.witness));
  return out;
}

double behavior_count(const HypothesisClass& cls, std::span<const Feature> sample) {
  switch (cls.kind()) {
    case ClassKind::Threshold1D: return static_cast<double>(distinct_values(sample).size()) + 1;
    case ClassKind::Interval1D: {
      const double m = static_cast<double>(distinct_values(sample).size());
      return m * (m + 1) / 2 + 1;
    }
    case ClassKind::SparseIndicator: {
      const auto m = static_cast<std::int64_t>(distinct_values(sample).size());
      double s = 0;
      for (std::int64_t i = 0; i <= std::min<std::int64_t>(cls.budget(), m); ++i) s += binomial(m, i);
      return s;
    }
    case ClassKind::Monotone1D: {
      const auto m = static_cast<std::int64_t>(distinct_values(sample).size());
      const auto L = static_cast<std::int64_t>(cls.levels().size());
      return binomial(m + L - 1, L - 1);
    }
    default:
      return static_cast<double>(enumerate_behaviors(cls, sample).size());
  }
}

Feature random_feature(const HypothesisClass& cls, Rng& rng) {
  if (cls.on_grid()) {
    std::uniform_int_distribution<std::int64_t> u(0, cls.grid());
    Feature f;
    f.dims = cls.kind() == ClassKind::AxisRectangle || cls.kind() == ClassKind::Composite ? cls.dims() : 1;
    for (int i = 0; i < f.dims; ++i) f.c[i] = u(rng);
    return f;
  }
  std::uniform_int_distribution<std::int64_t> u(0, cls.domain_points() - 1);
  return Feature(u(rng));
}

Hypothesis random_hypothesis(const HypothesisClass& cls, Rng& rng) {
  const std::int64_t R = cls.grid();
  std::uniform_int_distribution<std::int64_t> coord(0, R);
  switch (cls.kind()) {
    case ClassKind::FiniteTable: {
      std::uniform_int_distribution<std::int64_t> u(0, static_cast<std::int64_t>(cls.rows().size()) - 1);
      return {{u(rng)}};
    }
    case ClassKind::Threshold1D: {
      std::uniform_int_distribution<std::int64_t> u(0, R + 1);
      return {{u(rng)}};
    }
    case ClassKind::Interval1D:
    case ClassKind::AxisRectangle: {
      Hypothesis h;
      const int d = cls.kind() == ClassKind::Interval1D ? 1 : cls.dims();
      for (int i = 0; i < d; ++i) {
        auto a = coord(rng), b = coord(rng);
        h.p.push_back(std::min(a, b));
        h.p.push_back(std::max(a, b));
      }
      return h;
    }
    case ClassKind::SparseIndicator: {
      // Uniform over all subsets of size <= budget.
      const std::int64_t N = cls.domain_points();
      const int dmax = static_cast<int>(std::min<std::int64_t>(cls.budget(), N));
      std::vector<double> w;
      for (int j = 0; j <= dmax; ++j) w.push_back(std::exp(std::lgamma(N + 1.0) - std::lgamma(j + 1.0) -
                                                           std::lgamma(N - j + 1.0)));
      std::discrete_distribution<int> size(w.begin(), w.end());
      const int j = size(rng);
      std::set<std::int64_t> s;
      std::uniform_int_distribution<std::int64_t> u(0, N - 1);
      while (static_cast<int>(s.size()) < j) s.insert(u(rng));
      return {{s.begin(), s.end()}};
    }
    case ClassKind::Monotone1D: {
      std::uniform_int_distribution<std::int64_t> u(0, R + 1);
      Hypothesis h;
      for (std::size_t j = 1; j < cls.levels().size(); ++j) h.p.push_back(u(rng));
      std::sort(h.p.begin(), h.p.end());
      return h;
    }
    case ClassKind::Composite: {
      Hypothesis h;
      for (const auto& part : cls.parts()) {
        auto sub = random_hypothesis(part, rng);
        h.p.push_back(static_cast<std::int64_t>(sub.p.size()));
        h.p.insert(h.p.end(), sub.p.begin(), sub.p.end());
      }
      return h;
    }
  }
  return {};
}

std::vector<Feature> domain_points(const HypothesisClass& cls) {
  if (cls.kind() == ClassKind::AxisRectangle) throw Error("domain listing is 1-D only");
  const std::int64_t n = cls.domain_points();
  if (n > 4096) throw Error("domain too large to list");
  std::vector<Feature> pts;
  for (std::int64_t k = 0; k < n; ++k) pts.emplace_back(k);
  return pts;
}

HypothesisClass to_finite_table(const HypothesisClass& cls) {
  if (cls.kind() == ClassKind::FiniteTable) return cls;
  if (!cls.binary()) throw Error("finite table conversion needs a binary class");
  if (cls.domain_points() > 16) throw Error("finite table conversion limited to 16 domain points");
  auto pts = domain_points(cls);
  std::vector<std::vector<std::uint8_t>> rows;
  for (auto& b : enumerate_behaviors(cls, pts)) rows.push_back(std::move(b.labels));
  return HypothesisClass::finite_table(std::move(rows));
}

HypothesisClass toy5_class() {
  return HypothesisClass::finite_table({{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 1, 0}, {1, 1, 1}});
}

double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  double r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r) == r || r > 1e15 ? r : std::round(r);
}

double log_binomial_sum(std::int64_t n, std::int64_t k) {
  k = std::min(k, n);
  if (k < 0) return -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  for (std::int64_t i = 0; i <= k; ++i)
    terms.push_back(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(static_cast<double>(n - i) + 1.0));
  const double mx = *std::max_element(terms.begin(), terms.end());
  double s = 0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

}  // namespace seqcover
