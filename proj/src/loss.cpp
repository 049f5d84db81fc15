#include "seqcover/loss.hpp"

#include <algorithm>
#include <cmath>

#include "seqcover/domain.hpp"

namespace seqcover {

LossSpec LossSpec::by_name(const std::string& name, double clamp_eps) {
  // The clamp only matters for the log loss; the bounded losses ignore it.
  if (!(clamp_eps >= 0 && clamp_eps < 0.5) || (name == "log" && clamp_eps == 0))
    throw Error("clamp epsilon must lie in (0, 1/2)");
  if (name == "log") return {LossKind::Log, clamp_eps};
  if (name == "absolute" || name == "abs") return {LossKind::Absolute, clamp_eps};
  if (name == "square") return {LossKind::Square, clamp_eps};
  throw Error("unknown loss " + name);
}

std::string LossSpec::name() const {
  switch (kind) {
    case LossKind::Log: return "log";
    case LossKind::Absolute: return "absolute";
    case LossKind::Square: return "square";
  }
  return "?";
}

double LossSpec::lipschitz() const {
  switch (kind) {
    case LossKind::Log: return 1.0 / clamp_eps;
    case LossKind::Absolute: return 1.0;
    case LossKind::Square: return 2.0;
  }
  return 0;
}

std::optional<double> LossSpec::eta_mixable() const {
  switch (kind) {
    case LossKind::Log: return 1.0;
    case LossKind::Square: return 2.0;
    default: return std::nullopt;
  }
}

double LossSpec::clamp(double yhat) const {
  return kind == LossKind::Log ? std::clamp(yhat, clamp_eps, 1 - clamp_eps) : yhat;
}

double loss(const LossSpec& spec, double yhat, double y) {
  if (!(yhat >= 0 && yhat <= 1)) throw Error("prediction outside [0,1]: " + std::to_string(yhat));
  if (!(y >= 0 && y <= 1)) throw Error("label outside [0,1]: " + std::to_string(y));
  switch (spec.kind) {
    case LossKind::Log: {
      const double p = spec.clamp(yhat);
      double v = 0;
      if (y > 0) v -= y * std::log(p);
      if (y < 1) v -= (1 - y) * std::log1p(-p);
      return v;
    }
    case LossKind::Absolute: return std::abs(yhat - y);
    case LossKind::Square: return (yhat - y) * (yhat - y);
  }
  return 0;
}

Interval substitution_interval(const LossSpec& spec, double g0, double g1) {
  g0 = std::max(g0, 0.0);
  g1 = std::max(g1, 0.0);
  switch (spec.kind) {
    case LossKind::Log: return {std::exp(-g1), -std::expm1(-g0)};
    case LossKind::Square: return {1 - std::sqrt(g1), std::sqrt(g0)};
    case LossKind::Absolute: return {1 - g1, g0};
  }
  return {1, 0};
}

bool mixability_check(const LossSpec& spec, double eta, double grid_step) {
  if (!(grid_step > 0) || !(eta > 0)) throw Error("mixability check needs positive eta and grid step");
  const double lo = spec.kind == LossKind::Log ? spec.clamp_eps : 0.0;
  const double hi = 1 - lo;
  std::vector<double> grid;
  for (double p = 0; p <= 1 + 1e-12; p += grid_step)
    if (p >= lo - 1e-12 && p <= hi + 1e-12) grid.push_back(std::clamp(p, lo, hi));
  constexpr double tol = 1e-12;
  for (double p1 : grid)
    for (double p2 : grid) {
      if (p2 <= p1) continue;
      const double a0 = std::exp(-eta * loss(spec, p1, 0)), b0 = std::exp(-eta * loss(spec, p2, 0));
      const double a1 = std::exp(-eta * loss(spec, p1, 1)), b1 = std::exp(-eta * loss(spec, p2, 1));
      for (double w = grid_step; w < 1 - 1e-12; w += grid_step) {
        const double g0 = -std::log(w * a0 + (1 - w) * b0) / eta;
        const double g1 = -std::log(w * a1 + (1 - w) * b1) / eta;
        const auto iv = substitution_interval(spec, g0, g1);
        if (iv.lo > iv.hi + tol) return false;
      }
    }
  return true;
}

}  // namespace seqcover
