#include "seqcover/stats.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "seqcover/domain.hpp"

namespace seqcover {

OlsFit ols_fit(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0 || rows.size() != y.size()) throw Error("regression needs matching nonempty rows");
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  if (n <= p) throw Error("regression needs more rows than coefficients");
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rows[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(j));
    Y(i) = y[static_cast<std::size_t>(i)];
  }
  const auto qr = X.colPivHouseholderQr();
  if (qr.rank() < p) throw Error("regression design is rank deficient");
  const Eigen::VectorXd b = qr.solve(Y);
  const Eigen::VectorXd r = Y - X * b;
  OlsFit fit;
  fit.residual_variance = r.squaredNorm() / static_cast<double>(n - p);
  const Eigen::MatrixXd cov = fit.residual_variance * (X.transpose() * X).inverse();
  for (Eigen::Index j = 0; j < p; ++j) {
    fit.coef.push_back(b(j));
    fit.se.push_back(std::sqrt(std::max(cov(j, j), 0.0)));
  }
  return fit;
}

}  // namespace seqcover
