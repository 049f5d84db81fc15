#pragma once

#include <optional>
#include <string>

namespace seqcover {

enum class LossKind { Log, Absolute, Square };

struct LossSpec {
  LossKind kind = LossKind::Log;
  // Predictions are clamped to [clamp_eps, 1 - clamp_eps] before a log loss is taken.
  double clamp_eps = 1e-6;

  static LossSpec by_name(const std::string& name, double clamp_eps);
  std::string name() const;
  double lipschitz() const;
  std::optional<double> eta_mixable() const;
  double clamp(double yhat) const;
};

// Throws if yhat or y lies outside [0, 1].
double loss(const LossSpec& spec, double yhat, double y);

// Predictions p with loss(p,0) <= g0 and loss(p,1) <= g1; empty when lo > hi.
struct Interval {
  double lo, hi;
  bool empty() const { return lo > hi; }
};
Interval substitution_interval(const LossSpec& spec, double g0, double g1);

// Grid check of eta-mixability over prediction pairs and mixing weights.
bool mixability_check(const LossSpec& spec, double eta, double grid_step);

}  // namespace seqcover
