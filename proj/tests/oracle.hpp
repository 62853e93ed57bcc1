#pragma once

// Brute-force Gaussian expectations by the trapezoid rule on a truncated box.
// Deliberately independent of the library's quadrature and closed forms.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double density1(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

/// E g(Z), Z ~ N(0, 1).
inline double expect1(const std::function<double(double)>& g, double half_width = 12.0, int cells = 24000) {
  const double h = 2.0 * half_width / cells;
  double sum = 0.0;
  for (int i = 0; i <= cells; ++i) {
    const double x = -half_width + i * h;
    const double w = (i == 0 || i == cells) ? 0.5 : 1.0;
    sum += w * g(x) * density1(x);
  }
  return sum * h;
}

/// E g(L Z), Z ~ N(0, I_d), d <= 3, where L L^T is the covariance.
inline double expect(const std::function<double(const Eigen::VectorXd&)>& g, const Eigen::MatrixXd& covariance,
                     double half_width = 9.0, int cells = 180) {
  const int d = static_cast<int>(covariance.rows());
  const Eigen::MatrixXd factor = covariance.llt().matrixL();
  const double h = 2.0 * half_width / cells;
  std::vector<double> axis(cells + 1), weight(cells + 1);
  for (int i = 0; i <= cells; ++i) {
    axis[i] = -half_width + i * h;
    weight[i] = ((i == 0 || i == cells) ? 0.5 : 1.0) * h * density1(axis[i]);
  }
  Eigen::VectorXd z(d);
  std::vector<int> idx(d, 0);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      z[j] = axis[idx[j]];
      w *= weight[idx[j]];
    }
    sum += w * g(factor * z);
    int j = 0;
    while (j < d && ++idx[j] > cells) idx[j++] = 0;
    if (j == d) break;
  }
  return sum;
}

inline double expect(const std::function<double(const Eigen::VectorXd&)>& g, int d) {
  return expect(g, Eigen::MatrixXd::Identity(d, d));
}

}  // namespace oracle
