#pragma once

// Error-qualified estimates of every Gaussian functional used by the checks:
// closed form for the Gauss-exponential family, tensor Gauss-Hermite
// quadrature for small dimension, batched Monte Carlo otherwise.

#include "gausslm/frames.hpp"
#include "gausslm/functions.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>

namespace gausslm {

enum class Method { ClosedForm, Quadrature, MonteCarlo };
enum class Backend { Auto, Closed, Quadrature, MonteCarlo };

const char* to_string(Method method);
const char* to_string(Backend backend);
/// Accepts auto|closed|quad|quadrature|mc|monte_carlo.
Backend backend_from_string(const std::string& name);

struct EstimateWithError {
  double value = 0.0;
  Method method = Method::ClosedForm;
  /// MC: standard error (delta method for nonlinear functionals).
  /// Quadrature: |Q_N - Q_{N/2}|. Closed form: 0.
  double error = 0.0;
  std::int64_t count = 0;  // samples or nodes
};

struct EstimateOptions {
  Backend backend = Backend::Auto;
  int nodes = 64;                        // per axis
  std::int64_t node_budget = 1 << 24;    // total tensor-grid size
  int min_nodes = 8;                     // below this quadrature is refused
  std::int64_t samples = 1'000'000;
  int batches = 100;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Nodes per axis that quadrature would use in `dim` dimensions, or 0 when
/// the budget does not allow at least min_nodes.
int quadrature_nodes(const EstimateOptions& options, int dim);

/// (E f(X)^s)^(1/s). Throws NumericError: Undefined at s = 0, NotIntegrable
/// when I + sA is not positive definite, Divergent for unstable MC.
EstimateWithError moment_M(const FunctionModel& fn, double s, const EstimateOptions& options);
/// E f(sqrt(s) X), s >= 0; exactly f(0) at s = 0.
EstimateWithError scaled_mean_H(const FunctionModel& fn, double s, const EstimateOptions& options);
/// exp(E log f(X)), the s -> 0 limit of M.
EstimateWithError geometric_mean(const FunctionModel& fn, const EstimateOptions& options);
/// M(s) for s != 0 and the geometric mean at s = 0.
EstimateWithError moment_or_geometric(const FunctionModel& fn, double s, const EstimateOptions& options);

/// Ent(f) = E f log f - E f log E f with 0 log 0 = 0.
EstimateWithError entropy(const FunctionModel& fn, const EstimateOptions& options);
/// E<X, grad f(X)>.
EstimateWithError stein_term(const FunctionModel& fn, const EstimateOptions& options);
/// E|grad f(X)|^2.
EstimateWithError dirichlet_term(const FunctionModel& fn, const EstimateOptions& options);
/// E f(X)^2 Lap v(X), f = exp(-v).
EstimateWithError deficit_term(const FunctionModel& fn, const EstimateOptions& options);
/// E Lap f(X).
EstimateWithError laplacian_term(const FunctionModel& fn, const EstimateOptions& options);

/// E prod_i f_i(X_i) with (X_1..X_n) = (U_1 Z, ..., U_n Z). fns.size() must be n.
EstimateWithError correlated_product_mean(std::span<const FunctionModel> fns, const CorrelationFrame& frame, int k,
                                          const EstimateOptions& options);
/// E f((1/n) sum_i X_i) over the same joint law.
EstimateWithError mean_of_average(const FunctionModel& fn, const CorrelationFrame& frame, int k,
                                  const EstimateOptions& options);

/// Both sides of Gaussian integration by parts for Y ~ N(0, covariance):
/// E[Y_j F(Y)] and sum_i Cov(Y_j, Y_i) E[d_i F(Y)]. Computed in one pass.
std::pair<EstimateWithError, EstimateWithError> integration_by_parts_sides(const FunctionModel& fn,
                                                                           const Eigen::MatrixXd& covariance,
                                                                           int coordinate,
                                                                           const EstimateOptions& options);
/// E<Y, grad f(Y)> and E tr(T H_f(Y)) for Y ~ N(0, T).
std::pair<EstimateWithError, EstimateWithError> stein_trace_sides(const FunctionModel& fn,
                                                                  const Eigen::MatrixXd& covariance,
                                                                  const EstimateOptions& options);

}  // namespace gausslm
