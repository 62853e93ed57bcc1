#pragma once

// Function families the inequalities quantify over. The Gauss-exponential
// family f(x) = exp(-x^T A x / 2 + <a, x> + c) has closed-form Gaussian
// functionals and serves as the oracle for everything numeric.

#include <Eigen/Dense>
#include <json.hpp>

#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace gausslm {

/// Shape of log f. Affine means both log-concave and log-convex.
enum class LogShape { Concave, Convex, Affine, Unknown };

const char* to_string(LogShape shape);
LogShape log_shape_from_string(const std::string& name);

/// True when a function of the given shape may be used where `wanted`
/// (Concave or Convex) is required.
bool satisfies(LogShape shape, LogShape wanted);

class GaussExpFunction {
 public:
  /// Throws std::invalid_argument on shape mismatch or asymmetry > 1e-12.
  GaussExpFunction(Eigen::MatrixXd quadratic, Eigen::VectorXd linear, double constant);

  int dim() const { return static_cast<int>(linear_.size()); }
  const Eigen::MatrixXd& quadratic() const { return quadratic_; }
  const Eigen::VectorXd& linear() const { return linear_; }
  double constant() const { return constant_; }

  /// v(x) = x^T A x / 2 - <a, x> - c, so that f = exp(-v).
  double exponent(const Eigen::VectorXd& x) const;
  double operator()(const Eigen::VectorXd& x) const { return std::exp(-exponent(x)); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  double laplacian(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
  double exponent_laplacian() const { return quadratic_.trace(); }

  LogShape shape() const;
  /// I + sA positive definite (min eigenvalue > 1e-10).
  bool admissible(double s) const;
  /// f^s, again in the family.
  GaussExpFunction power(double s) const;

 private:
  Eigen::MatrixXd quadratic_;
  Eigen::VectorXd linear_;
  double constant_;
};

/// E f(Y) for Y ~ N(0, covariance). Throws NumericError(NotIntegrable) when
/// the integral diverges.
double gaussian_expectation(const GaussExpFunction& fn, const Eigen::MatrixXd& covariance);

/// (E f(X)^s)^(1/s), X ~ N(0, I_k).
double oracle_moment_M(const GaussExpFunction& fn, double s);
/// E f(sqrt(s) X); equals f(0) at s = 0.
double oracle_scaled_mean_H(const GaussExpFunction& fn, double s);
/// exp(E log f(X)) = exp(c - tr(A)/2), the s -> 0 limit of M.
double oracle_geometric_mean(const GaussExpFunction& fn);

// Closed forms of the remaining functionals, all for X ~ N(0, I_k).
double oracle_entropy(const GaussExpFunction& fn);          // Ent(f)
double oracle_stein_term(const GaussExpFunction& fn);       // E<X, grad f(X)>
double oracle_dirichlet_term(const GaussExpFunction& fn);   // E|grad f(X)|^2
double oracle_deficit_term(const GaussExpFunction& fn);     // E f(X)^2 Lap v(X)
double oracle_laplacian_term(const GaussExpFunction& fn);   // E Lap f(X)

using ScalarField = std::function<double(const Eigen::VectorXd&)>;
using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MatrixField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// A function on R^dim with optional analytic derivatives. Missing
/// derivatives fall back to central finite differences.
struct FunctionModel {
  std::string id;
  int dim = 1;
  ScalarField value;
  VectorField gradient;
  ScalarField laplacian;
  MatrixField hessian;
  ScalarField exponent_laplacian;  // Lap v for f = exp(-v)

  LogShape shape = LogShape::Unknown;
  double support_radius = std::numeric_limits<double>::infinity();
  bool nonnegative = true;
  /// Derivatives exist classically (a.e. is not enough for the Stein checks).
  bool smooth = true;
  /// First derivatives satisfy |F(x)| exp(-a|x|^2) -> 0 for all a > 0.
  bool growth_certified = false;

  std::optional<GaussExpFunction> closed_form;
  nlohmann::json spec;

  double operator()(const Eigen::VectorXd& x) const { return value(x); }
};

FunctionModel make_model(const GaussExpFunction& fn, std::string id = "gauss_exp");

/// Central-difference step used for gradients: 1e-5 * max(1, |x|).
double gradient_step(const Eigen::VectorXd& x);
/// Step used for second derivatives: 1e-4 * max(1, |x|).
double curvature_step(const Eigen::VectorXd& x);

Eigen::VectorXd fd_gradient(const ScalarField& f, const Eigen::VectorXd& x);
Eigen::MatrixXd fd_hessian(const ScalarField& f, const Eigen::VectorXd& x);
double fd_laplacian(const ScalarField& f, const Eigen::VectorXd& x);

/// Analytic callback when present, finite differences otherwise.
VectorField gradient(const FunctionModel& fn);
ScalarField laplacian(const FunctionModel& fn);
MatrixField hessian(const FunctionModel& fn);
/// Lap v with v = -log f.
ScalarField exponent_laplacian(const FunctionModel& fn);

/// f restricted to the closed centred ball of the given radius. Derivatives
/// vanish outside the ball (the boundary has measure zero). Throws if radius <= 0.
FunctionModel truncate(const FunctionModel& fn, double radius);

/// f^s for s > 0, keeping the shape class.
FunctionModel power(const FunctionModel& fn, double s);

}  // namespace gausslm
