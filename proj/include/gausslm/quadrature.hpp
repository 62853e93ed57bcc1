#pragma once

// Tensor Gauss-Hermite quadrature and batched Monte Carlo against N(0, I_d).
// Both integrate a vector-valued integrand so that functionals built from
// several expectations (entropy, ratios) share one pass.

#include "gausslm/gaussian.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace gausslm {

/// Probabilists' Gauss-Hermite rule: nodes and weights for gamma_1, weights sum to 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Throws std::invalid_argument if nodes < 1.
GaussHermiteRule gauss_hermite(int nodes);

class QuadratureGrid {
 public:
  QuadratureGrid(int nodes_per_axis, int dimension);

  int nodes_per_axis() const { return static_cast<int>(rule_.nodes.size()); }
  int dimension() const { return dimension_; }
  std::int64_t size() const { return size_; }
  const GaussHermiteRule& rule() const { return rule_; }

  /// Writes node `index` (row-major multi-index) into x and returns its weight.
  double point(std::int64_t index, Eigen::Ref<Eigen::VectorXd> x) const;

 private:
  GaussHermiteRule rule_;
  int dimension_;
  std::int64_t size_;
};

/// out = h(z) for a standard normal point z. Must be re-entrant.
using Integrand = std::function<void(const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out)>;

/// Weighted sum of the integrand over the grid. If edge_share is given it
/// receives, per output, the fraction of sum |w h| carried by nodes with an
/// outermost coordinate.
Eigen::VectorXd integrate_grid(const QuadratureGrid& grid, int outputs, const Integrand& integrand,
                               Eigen::VectorXd* edge_share = nullptr);

struct MonteCarloMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // per-draw covariance of the outputs
  std::int64_t count = 0;
  /// max_i h_i^2 / sum_i h_i^2 per output. Stays O(1) when E h^2 is infinite.
  Eigen::VectorXd max_square_share;
};

/// Splits `samples` draws over `batches` child streams of `base` (which
/// must have the integrand's dimension) and pools the batch moments in batch
/// order.
MonteCarloMoments integrate_monte_carlo(const GaussianSampler& base, std::int64_t samples, int batches,
                                        int outputs, const Integrand& integrand);

}  // namespace gausslm
