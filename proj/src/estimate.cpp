#include "gausslm/estimate.hpp"
#include "gausslm/errors.hpp"
#include "gausslm/gaussian.hpp"
#include "gausslm/linalg.hpp"
#include "gausslm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gausslm {
namespace {

/// Raw vector-valued integral against N(0, I_dim) from one backend.
constexpr std::int64_t kVarianceCheckSamples = 10000;
constexpr double kMaxSquareShare = 0.2;
constexpr double kMaxEdgeShare = 1e-6;

struct RawIntegral {
  Method method = Method::Quadrature;
  Eigen::VectorXd fine;        // quadrature at N nodes, or the MC mean
  Eigen::VectorXd coarse;      // quadrature at N/2 nodes
  Eigen::MatrixXd covariance;  // MC per-draw covariance
  double max_square_share = 0.0;
  double edge_share = 0.0;     // quadrature mass on the outermost nodes
  std::int64_t count = 0;
};

/// Maps the raw expectations to the reported functional.
struct Reducer {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  bool positive = false;  // enables the relative-error divergence test
};

Reducer linear_reducer(Eigen::VectorXd coeffs, bool positive = false) {
  return Reducer{[coeffs](const Eigen::VectorXd& m) { return coeffs.dot(m); },
                 [coeffs](const Eigen::VectorXd&) { return coeffs; }, positive};
}

Reducer first_output(int outputs, bool positive = false) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(outputs);
  c[0] = 1.0;
  return linear_reducer(std::move(c), positive);
}

Method choose_method(const EstimateOptions& options, bool has_closed, int dim) {
  switch (options.backend) {
    case Backend::Closed:
      if (!has_closed) throw std::invalid_argument("no closed form available for this function");
      return Method::ClosedForm;
    case Backend::Quadrature:
      if (quadrature_nodes(options, dim) == 0)
        throw std::invalid_argument("quadrature node budget exceeded in dimension " + std::to_string(dim) +
                                    "; use the Monte Carlo backend");
      return Method::Quadrature;
    case Backend::MonteCarlo:
      return Method::MonteCarlo;
    case Backend::Auto:
      break;
  }
  if (has_closed) return Method::ClosedForm;
  if (quadrature_nodes(options, dim) > 0) return Method::Quadrature;
  return Method::MonteCarlo;
}

RawIntegral integrate(Method method, int dim, int outputs, const Integrand& integrand,
                      const EstimateOptions& options) {
  RawIntegral raw;
  raw.method = method;
  if (method == Method::Quadrature) {
    const int nodes = quadrature_nodes(options, dim);
    const QuadratureGrid grid(nodes, dim);
    Eigen::VectorXd edge;
    raw.fine = integrate_grid(grid, outputs, integrand, &edge);
    raw.edge_share = edge.size() ? edge.maxCoeff() : 0.0;
    raw.coarse = integrate_grid(QuadratureGrid(std::max(1, nodes / 2), dim), outputs, integrand);
    raw.count = grid.size();
  } else {
    const GaussianSampler sampler(options.seed, options.stream, dim);
    const MonteCarloMoments mc = integrate_monte_carlo(sampler, options.samples, options.batches, outputs, integrand);
    raw.fine = mc.mean;
    raw.covariance = mc.covariance;
    raw.max_square_share = mc.max_square_share.size() ? mc.max_square_share.maxCoeff() : 0.0;
    raw.count = mc.count;
  }
  return raw;
}

EstimateWithError reduce(const RawIntegral& raw, const Reducer& reducer) {
  EstimateWithError est;
  est.method = raw.method;
  est.count = raw.count;
  est.value = reducer.value(raw.fine);
  if (raw.method == Method::Quadrature) {
    const double coarse = reducer.value(raw.coarse);
    est.error = coarse == est.value ? 0.0 : std::abs(est.value - coarse);
    if (raw.edge_share > kMaxEdgeShare)
      throw NumericError(NumericErrorKind::Divergent, "quadrature grid does not resolve the integrand (outermost nodes hold " +
                                                          std::to_string(raw.edge_share) + " of the mass)");
  } else {
    const Eigen::VectorXd g = reducer.gradient(raw.fine);
    est.error = std::sqrt(std::max(0.0, g.dot(raw.covariance * g)) / static_cast<double>(raw.count));
    if (reducer.positive && std::isfinite(est.error) && est.error > 0.5 * std::abs(est.value))
      throw NumericError(NumericErrorKind::Divergent, "Monte Carlo relative error above 0.5");
    if (raw.count >= kVarianceCheckSamples && raw.max_square_share > kMaxSquareShare)
      throw NumericError(NumericErrorKind::Divergent, "Monte Carlo variance does not stabilise (one draw holds " +
                                                          std::to_string(raw.max_square_share) +
                                                          " of the second moment)");
  }
  if (!std::isfinite(est.value) || !std::isfinite(est.error))
    throw NumericError(NumericErrorKind::Divergent, "non-finite estimate");
  return est;
}

EstimateWithError closed(double value) { return EstimateWithError{value, Method::ClosedForm, 0.0, 1}; }

void require_admissible(const FunctionModel& fn, double s) {
  if (fn.closed_form && !fn.closed_form->admissible(s))
    throw NumericError(NumericErrorKind::NotIntegrable,
                       "I + " + nlohmann::json(s).dump() + "A is not positive definite for '" + fn.id + "'");
}

void require_dim(const FunctionModel& fn, const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != fn.dim || covariance.cols() != fn.dim)
    throw std::invalid_argument("covariance dimension does not match '" + fn.id + "'");
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::ClosedForm: return "CLOSED_FORM";
    case Method::Quadrature: return "QUADRATURE";
    case Method::MonteCarlo: return "MONTE_CARLO";
  }
  return "UNKNOWN";
}

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::Auto: return "auto";
    case Backend::Closed: return "closed";
    case Backend::Quadrature: return "quad";
    case Backend::MonteCarlo: return "mc";
  }
  return "auto";
}

Backend backend_from_string(const std::string& name) {
  if (name == "auto") return Backend::Auto;
  if (name == "closed" || name == "closed_form") return Backend::Closed;
  if (name == "quad" || name == "quadrature") return Backend::Quadrature;
  if (name == "mc" || name == "monte_carlo") return Backend::MonteCarlo;
  throw std::invalid_argument("unknown backend '" + name + "' (expected closed|quad|mc|auto)");
}

int quadrature_nodes(const EstimateOptions& options, int dim) {
  for (int nodes = options.nodes; nodes >= std::max(1, options.min_nodes); --nodes) {
    std::int64_t total = 1;
    bool fits = true;
    for (int d = 0; d < dim && fits; ++d) {
      total *= nodes;
      fits = total <= options.node_budget;
    }
    if (fits) return nodes;
  }
  return 0;
}

EstimateWithError moment_M(const FunctionModel& fn, double s, const EstimateOptions& options) {
  if (s == 0.0) throw NumericError(NumericErrorKind::Undefined, "M(0) is undefined; use the geometric mean");
  require_admissible(fn, s);
  const Method method = choose_method(options, fn.closed_form.has_value(), fn.dim);
  if (method == Method::ClosedForm) return closed(oracle_moment_M(*fn.closed_form, s));
  const auto raw = integrate(method, fn.dim, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               out[0] = std::pow(fn.value(z), s);
                             },
                             options);
  Reducer r{[s](const Eigen::VectorXd& m) { return std::pow(m[0], 1.0 / s); },
            [s](const Eigen::VectorXd& m) {
              return Eigen::VectorXd::Constant(1, std::pow(m[0], 1.0 / s - 1.0) / s);
            },
            true};
  return reduce(raw, r);
}

EstimateWithError scaled_mean_H(const FunctionModel& fn, double s, const EstimateOptions& options) {
  if (s < 0.0) throw std::invalid_argument("H(s) needs s >= 0");
  if (s == 0.0) return closed(fn.value(Eigen::VectorXd::Zero(fn.dim)));
  require_admissible(fn, s);
  const Method method = choose_method(options, fn.closed_form.has_value(), fn.dim);
  if (method == Method::ClosedForm) return closed(oracle_scaled_mean_H(*fn.closed_form, s));
  const double scale = std::sqrt(s);
  const auto raw = integrate(method, fn.dim, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               out[0] = fn.value(scale * z);
                             },
                             options);
  return reduce(raw, first_output(1, true));
}

EstimateWithError geometric_mean(const FunctionModel& fn, const EstimateOptions& options) {
  const Method method = choose_method(options, fn.closed_form.has_value(), fn.dim);
  if (method == Method::ClosedForm) return closed(oracle_geometric_mean(*fn.closed_form));
  const auto raw = integrate(method, fn.dim, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               out[0] = std::log(fn.value(z));
                             },
                             options);
  if (raw.fine[0] == -INFINITY) return EstimateWithError{0.0, method, 0.0, raw.count};  // f vanishes on a null-free set
  Reducer r{[](const Eigen::VectorXd& m) { return std::exp(m[0]); },
            [](const Eigen::VectorXd& m) { return Eigen::VectorXd::Constant(1, std::exp(m[0])); }, true};
  return reduce(raw, r);
}

EstimateWithError moment_or_geometric(const FunctionModel& fn, double s, const EstimateOptions& options) {
  return s == 0.0 ? geometric_mean(fn, options) : moment_M(fn, s, options);
}

EstimateWithError entropy(const FunctionModel& fn, const EstimateOptions& options) {
  require_admissible(fn, 1.0);
  const Method method = choose_method(options, fn.closed_form.has_value(), fn.dim);
  if (method == Method::ClosedForm) return closed(oracle_entropy(*fn.closed_form));
  const auto raw = integrate(method, fn.dim, 2,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               const double f = fn.value(z);
                               out[0] = f;
                               out[1] = xlogx(f);
                             },
                             options);
  Reducer r{[](const Eigen::VectorXd& m) { return m[1] - xlogx(m[0]); },
            [](const Eigen::VectorXd& m) {
              Eigen::VectorXd g(2);
              g << (m[0] > 0.0 ? -std::log(m[0]) - 1.0 : 0.0), 1.0;
              return g;
            },
            false};
  return reduce(raw, r);
}

EstimateWithError stein_term(const FunctionModel& fn, const EstimateOptions& options) {
  require_admissible(fn, 1.0);
  const Method method = choose_method(options, fn.closed_form.has_value(), fn.dim);
  if (method == Method::ClosedForm) return closed(oracle_stein_term(*fn.closed_form));
  const VectorField grad = gradient(fn);
  const auto raw = integrate(method, fn.dim, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               out[0] = z.dot(grad(z));
                             },
                             options);
  return reduce(raw, first_output(1));
}

EstimateWithError dirichlet_term(const FunctionModel& fn, const EstimateOptions& options) {
  require_admissible(fn, 2.0);
  const Method method = choose_method(options, fn.closed_form.has_value(), fn.dim);
  if (method == Method::ClosedForm) return closed(oracle_dirichlet_term(*fn.closed_form));
  const VectorField grad = gradient(fn);
  const auto raw = integrate(method, fn.dim, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               out[0] = grad(z).squaredNorm();
                             },
                             options);
  return reduce(raw, first_output(1));
}

EstimateWithError deficit_term(const FunctionModel& fn, const EstimateOptions& options) {
  require_admissible(fn, 2.0);
  const Method method = choose_method(options, fn.closed_form.has_value(), fn.dim);
  if (method == Method::ClosedForm) return closed(oracle_deficit_term(*fn.closed_form));
  const ScalarField lap_v = exponent_laplacian(fn);
  const auto raw = integrate(method, fn.dim, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               const double f = fn.value(z);
                               out[0] = f == 0.0 ? 0.0 : f * f * lap_v(z);
                             },
                             options);
  return reduce(raw, first_output(1));
}

EstimateWithError laplacian_term(const FunctionModel& fn, const EstimateOptions& options) {
  require_admissible(fn, 1.0);
  const Method method = choose_method(options, fn.closed_form.has_value(), fn.dim);
  if (method == Method::ClosedForm) return closed(oracle_laplacian_term(*fn.closed_form));
  const ScalarField lap = laplacian(fn);
  const auto raw = integrate(method, fn.dim, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) { out[0] = lap(z); },
                             options);
  return reduce(raw, first_output(1));
}

EstimateWithError correlated_product_mean(std::span<const FunctionModel> fns, const CorrelationFrame& frame, int k,
                                          const EstimateOptions& options) {
  const int n = frame.n;
  if (static_cast<int>(fns.size()) != n)
    throw std::invalid_argument("correlated product needs exactly n = " + std::to_string(n) + " functions");
  bool all_closed = true;
  for (const auto& fn : fns) {
    if (fn.dim != k) throw std::invalid_argument("function '" + fn.id + "' is not defined on R^k");
    all_closed = all_closed && fn.closed_form.has_value();
  }
  const Eigen::MatrixXd mix = lifted_frame_matrix(frame, k);
  const int dim = n * k;
  const Method method = choose_method(options, all_closed, dim);
  if (method == Method::ClosedForm) {
    Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd lin(dim);
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
      quad.block(i * k, i * k, k, k) = fns[i].closed_form->quadratic();
      lin.segment(i * k, k) = fns[i].closed_form->linear();
      c += fns[i].closed_form->constant();
    }
    return closed(gaussian_expectation(GaussExpFunction(quad, lin, c), mix * mix.transpose()));
  }
  const auto raw = integrate(method, dim, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               const Eigen::VectorXd x = mix * z;
                               double prod = 1.0;
                               for (int i = 0; i < n && prod != 0.0; ++i) prod *= fns[i].value(x.segment(i * k, k));
                               out[0] = prod;
                             },
                             options);
  return reduce(raw, first_output(1, true));
}

EstimateWithError mean_of_average(const FunctionModel& fn, const CorrelationFrame& frame, int k,
                                  const EstimateOptions& options) {
  if (fn.dim != k) throw std::invalid_argument("function '" + fn.id + "' is not defined on R^k");
  const int n = frame.n;
  const Eigen::MatrixXd average =
      kron(Eigen::RowVectorXd::Constant(n, 1.0 / n), Eigen::MatrixXd::Identity(k, k)) * lifted_frame_matrix(frame, k);
  const Method method = choose_method(options, fn.closed_form.has_value(), n * k);
  if (method == Method::ClosedForm)
    return closed(gaussian_expectation(*fn.closed_form, average * average.transpose()));
  const auto raw = integrate(method, n * k, 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               out[0] = fn.value(average * z);
                             },
                             options);
  return reduce(raw, first_output(1, true));
}

std::pair<EstimateWithError, EstimateWithError> integration_by_parts_sides(const FunctionModel& fn,
                                                                           const Eigen::MatrixXd& covariance,
                                                                           int coordinate,
                                                                           const EstimateOptions& options) {
  require_dim(fn, covariance);
  const int m = fn.dim;
  if (coordinate < 0 || coordinate >= m) throw std::invalid_argument("coordinate out of range");
  const Method method = choose_method(options, false, m);
  const Eigen::MatrixXd root = psd_sqrt(covariance);
  const VectorField grad = gradient(fn);
  const auto raw = integrate(method, m, m + 1,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               const Eigen::VectorXd y = root * z;
                               out[0] = y[coordinate] * fn.value(y);
                               out.tail(m) = grad(y);
                             },
                             options);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs.tail(m) = covariance.row(coordinate).transpose();
  return {reduce(raw, first_output(m + 1)), reduce(raw, linear_reducer(rhs))};
}

std::pair<EstimateWithError, EstimateWithError> stein_trace_sides(const FunctionModel& fn,
                                                                  const Eigen::MatrixXd& covariance,
                                                                  const EstimateOptions& options) {
  require_dim(fn, covariance);
  const Method method = choose_method(options, false, fn.dim);
  const Eigen::MatrixXd root = psd_sqrt(covariance);
  const VectorField grad = gradient(fn);
  const MatrixField hess = hessian(fn);
  const auto raw = integrate(method, fn.dim, 2,
                             [&](const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
                               const Eigen::VectorXd y = root * z;
                               out[0] = y.dot(grad(y));
                               out[1] = (covariance * hess(y)).trace();
                             },
                             options);
  Eigen::VectorXd second = Eigen::VectorXd::Zero(2);
  second[1] = 1.0;
  return {reduce(raw, first_output(2)), reduce(raw, linear_reducer(second))};
}

}  // namespace gausslm
