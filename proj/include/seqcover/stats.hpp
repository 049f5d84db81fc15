#pragma once

#include <vector>

namespace seqcover {

// Ordinary least squares y ~ X b with classical standard errors.
struct OlsFit {
  std::vector<double> coef, se;
  double residual_variance = 0;
};
OlsFit ols_fit(const std::vector<std::vector<double>>& rows, const std::vector<double>& y);

}  // namespace seqcover
