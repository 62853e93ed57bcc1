#include "gausslm/quadrature.hpp"
#include "gausslm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gausslm {
namespace {

constexpr std::int64_t kChunk = 4096;

/// Orthonormal Hermite values psi_{n-1}(x), psi_n(x) (w.r.t. gamma_1).
std::pair<double, double> hermite_pair(int n, double x) {
  double prev = 0.0;
  double cur = 1.0;
  for (int j = 0; j < n; ++j) {
    const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
    prev = cur;
    cur = next;
  }
  return {prev, cur};
}

}  // namespace

GaussHermiteRule gauss_hermite(int nodes) {
  if (nodes < 1) throw std::invalid_argument("Gauss-Hermite rule needs at least one node");
  // Golub-Welsch: eigenvalues of the Jacobi matrix are the nodes.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(nodes);
  Eigen::VectorXd off(std::max(nodes - 1, 0));
  for (int i = 0; i + 1 < nodes; ++i) off[i] = std::sqrt(i + 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);

  GaussHermiteRule rule;
  rule.nodes.resize(nodes);
  rule.weights.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    double x = solver.eigenvalues()[i];
    for (int it = 0; it < 3; ++it) {  // Newton polish, psi_n' = sqrt(n) psi_{n-1}
      const auto [lower, top] = hermite_pair(nodes, x);
      x -= top / (std::sqrt(static_cast<double>(nodes)) * lower);
    }
    const double lower = hermite_pair(nodes, x).first;
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / (nodes * lower * lower);
  }
  // Enforce the exact symmetry of the rule.
  for (int i = 0; i < nodes / 2; ++i) {
    const int j = nodes - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (nodes % 2 == 1) rule.nodes[nodes / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

QuadratureGrid::QuadratureGrid(int nodes_per_axis, int dimension)
    : rule_(gauss_hermite(nodes_per_axis)), dimension_(dimension), size_(1) {
  if (dimension < 1) throw std::invalid_argument("quadrature grid needs dimension >= 1");
  for (int d = 0; d < dimension; ++d) {
    if (size_ > (std::int64_t{1} << 40) / nodes_per_axis) throw std::invalid_argument("quadrature grid too large");
    size_ *= nodes_per_axis;
  }
}

double QuadratureGrid::point(std::int64_t index, Eigen::Ref<Eigen::VectorXd> x) const {
  const auto m = static_cast<std::int64_t>(rule_.nodes.size());
  double weight = 1.0;
  for (int d = dimension_ - 1; d >= 0; --d) {
    const auto i = static_cast<std::size_t>(index % m);
    index /= m;
    x[d] = rule_.nodes[i];
    weight *= rule_.weights[i];
  }
  return weight;
}

Eigen::VectorXd integrate_grid(const QuadratureGrid& grid, int outputs, const Integrand& integrand,
                               Eigen::VectorXd* edge_share) {
  const std::int64_t chunks = (grid.size() + kChunk - 1) / kChunk;
  const auto m = static_cast<std::int64_t>(grid.nodes_per_axis());
  struct Partial {
    Eigen::VectorXd sum, abs_sum, edge_sum;
  };
  std::vector<Partial> partial(chunks, Partial{Eigen::VectorXd::Zero(outputs), Eigen::VectorXd::Zero(outputs),
                                               Eigen::VectorXd::Zero(outputs)});
  parallel_for(chunks, [&](std::int64_t c) {
    Eigen::VectorXd z(grid.dimension());
    Eigen::VectorXd value(outputs);
    Partial& acc = partial[c];
    const std::int64_t end = std::min(grid.size(), (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      const double w = grid.point(i, z);
      integrand(z, value);
      acc.sum.noalias() += w * value;
      if (!edge_share) continue;
      bool edge = false;
      std::int64_t rest = i;
      for (int d = 0; d < grid.dimension() && !edge; ++d, rest /= m) edge = rest % m == 0 || rest % m == m - 1;
      acc.abs_sum.array() += (w * value.array()).abs();
      if (edge) acc.edge_sum.array() += (w * value.array()).abs();
    }
  });
  Eigen::VectorXd total = Eigen::VectorXd::Zero(outputs);
  Eigen::VectorXd abs_total = Eigen::VectorXd::Zero(outputs), edge_total = Eigen::VectorXd::Zero(outputs);
  for (const auto& p : partial) {
    total += p.sum;
    abs_total += p.abs_sum;
    edge_total += p.edge_sum;
  }
  if (edge_share) {
    edge_share->resize(outputs);
    for (int j = 0; j < outputs; ++j) (*edge_share)[j] = abs_total[j] > 0.0 ? edge_total[j] / abs_total[j] : 0.0;
  }
  return total;
}

MonteCarloMoments integrate_monte_carlo(const GaussianSampler& base, std::int64_t samples, int batches,
                                        int outputs, const Integrand& integrand) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");
  batches = static_cast<int>(std::clamp<std::int64_t>(batches, 1, samples / 2));
  struct Batch {
    Eigen::VectorXd mean;
    Eigen::MatrixXd scatter;  // sum of outer products of deviations
    Eigen::VectorXd sum_sq, max_sq;
    std::int64_t count = 0;
  };
  std::vector<Batch> parts(batches);
  parallel_for(batches, [&](std::int64_t b) {
    const std::int64_t count = samples / batches + (b < samples % batches ? 1 : 0);
    NormalEngine engine = base.split(static_cast<std::uint64_t>(b)).engine();
    Eigen::VectorXd z(base.dimension());
    Eigen::VectorXd value(outputs);
    Batch acc{Eigen::VectorXd::Zero(outputs), Eigen::MatrixXd::Zero(outputs, outputs), Eigen::VectorXd::Zero(outputs),
              Eigen::VectorXd::Zero(outputs), 0};
    for (std::int64_t i = 0; i < count; ++i) {
      engine.fill(z);
      integrand(z, value);
      ++acc.count;
      const Eigen::VectorXd delta = value - acc.mean;
      acc.mean += delta / static_cast<double>(acc.count);
      acc.scatter.noalias() += delta * (value - acc.mean).transpose();
      const Eigen::VectorXd sq = value.array().square();
      acc.sum_sq += sq;
      acc.max_sq = acc.max_sq.cwiseMax(sq);
    }
    parts[b] = std::move(acc);
  });

  Batch total{Eigen::VectorXd::Zero(outputs), Eigen::MatrixXd::Zero(outputs, outputs), Eigen::VectorXd::Zero(outputs),
              Eigen::VectorXd::Zero(outputs), 0};
  for (const auto& part : parts) {
    if (part.count == 0) continue;
    const double n_a = static_cast<double>(total.count);
    const double n_b = static_cast<double>(part.count);
    const double n = n_a + n_b;
    const Eigen::VectorXd delta = part.mean - total.mean;
    total.scatter += part.scatter + delta * delta.transpose() * (n_a * n_b / n);
    total.mean += delta * (n_b / n);
    total.count += part.count;
    total.sum_sq += part.sum_sq;
    total.max_sq = total.max_sq.cwiseMax(part.max_sq);
  }
  const Eigen::MatrixXd covariance = total.scatter / static_cast<double>(total.count - 1);
  const Eigen::VectorXd share =
      (total.sum_sq.array() > 0.0).select(total.max_sq.array() / total.sum_sq.array(), 0.0);
  return MonteCarloMoments{total.mean, 0.5 * (covariance + covariance.transpose()), total.count, share};
}

}  // namespace gausslm
