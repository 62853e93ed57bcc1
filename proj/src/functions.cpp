#include "gausslm/functions.hpp"
#include "gausslm/errors.hpp"
#include "gausslm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gausslm {
namespace {

constexpr double kAdmissibility = 1e-10;

/// Tilted Gaussian N(mean, precision^{-1}) proportional to f(x) gamma_k(dx)
/// for f in the Gauss-exponential family; mass = E f(X).
struct Tilt {
  Eigen::MatrixXd covariance;
  Eigen::VectorXd mean;
  double mass;
};

Tilt tilt(const GaussExpFunction& fn) {
  const int k = fn.dim();
  const Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(k, k) + fn.quadratic();
  if (min_eigenvalue(precision) <= kAdmissibility)
    throw NumericError(NumericErrorKind::NotIntegrable, "I + A is not positive definite");
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  const Eigen::VectorXd mean = llt.solve(fn.linear());
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double mass = std::exp(-0.5 * log_det + fn.constant() + 0.5 * fn.linear().dot(mean));
  return Tilt{llt.solve(Eigen::MatrixXd::Identity(k, k)), mean, mass};
}

/// log E f(Y), Y ~ N(0, covariance).
double log_gaussian_expectation(const GaussExpFunction& fn, const Eigen::MatrixXd& covariance) {
  const int k = fn.dim();
  if (covariance.rows() != k || covariance.cols() != k)
    throw std::invalid_argument("covariance dimension does not match the function");
  const Eigen::MatrixXd root = psd_sqrt(covariance);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(k, k) + root * fn.quadratic() * root;
  if (min_eigenvalue(b) <= kAdmissibility)
    throw NumericError(NumericErrorKind::NotIntegrable, "Gaussian integral of exp(-x^T A x/2) diverges");
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  const Eigen::VectorXd shift = root * fn.linear();
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * log_det + fn.constant() + 0.5 * shift.dot(llt.solve(shift));
}

}  // namespace

const char* to_string(LogShape shape) {
  switch (shape) {
    case LogShape::Concave: return "log_concave";
    case LogShape::Convex: return "log_convex";
    case LogShape::Affine: return "log_affine";
    case LogShape::Unknown: return "unknown";
  }
  return "unknown";
}

LogShape log_shape_from_string(const std::string& name) {
  if (name == "log_concave" || name == "concave") return LogShape::Concave;
  if (name == "log_convex" || name == "convex") return LogShape::Convex;
  if (name == "log_affine" || name == "affine") return LogShape::Affine;
  if (name == "unknown") return LogShape::Unknown;
  throw std::invalid_argument("unknown log-shape '" + name + "'");
}

bool satisfies(LogShape shape, LogShape wanted) {
  if (shape == wanted) return true;
  return shape == LogShape::Affine && (wanted == LogShape::Concave || wanted == LogShape::Convex);
}

GaussExpFunction::GaussExpFunction(Eigen::MatrixXd quadratic, Eigen::VectorXd linear, double constant)
    : quadratic_(std::move(quadratic)), linear_(std::move(linear)), constant_(constant) {
  if (linear_.size() < 1) throw std::invalid_argument("Gauss-exponential function needs k >= 1");
  if (quadratic_.rows() != linear_.size() || quadratic_.cols() != linear_.size())
    throw std::invalid_argument("A must be k x k with k = len(a)");
  if (asymmetry(quadratic_) > 1e-12) throw std::invalid_argument("A must be symmetric");
  if (!std::isfinite(constant_) || !quadratic_.allFinite() || !linear_.allFinite())
    throw std::invalid_argument("Gauss-exponential parameters must be finite");
}

double GaussExpFunction::exponent(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(quadratic_ * x) - linear_.dot(x) - constant_;
}

Eigen::VectorXd GaussExpFunction::gradient(const Eigen::VectorXd& x) const {
  return (*this)(x) * (linear_ - quadratic_ * x);
}

double GaussExpFunction::laplacian(const Eigen::VectorXd& x) const {
  return (*this)(x) * ((linear_ - quadratic_ * x).squaredNorm() - quadratic_.trace());
}

Eigen::MatrixXd GaussExpFunction::hessian(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd drift = linear_ - quadratic_ * x;
  return (*this)(x) * (drift * drift.transpose() - quadratic_);
}

LogShape GaussExpFunction::shape() const {
  const Eigen::VectorXd spectrum = symmetric_eigenvalues(quadratic_);
  const bool concave = spectrum.minCoeff() >= -1e-12;
  const bool convex = spectrum.maxCoeff() <= 1e-12;
  if (concave && convex) return LogShape::Affine;
  if (concave) return LogShape::Concave;
  if (convex) return LogShape::Convex;
  return LogShape::Unknown;
}

bool GaussExpFunction::admissible(double s) const {
  const int k = dim();
  return min_eigenvalue(Eigen::MatrixXd::Identity(k, k) + s * quadratic_) > kAdmissibility;
}

GaussExpFunction GaussExpFunction::power(double s) const {
  return GaussExpFunction(s * quadratic_, s * linear_, s * constant_);
}

double gaussian_expectation(const GaussExpFunction& fn, const Eigen::MatrixXd& covariance) {
  return std::exp(log_gaussian_expectation(fn, covariance));
}

double oracle_moment_M(const GaussExpFunction& fn, double s) {
  if (s == 0.0) throw NumericError(NumericErrorKind::Undefined, "M(0) is undefined; use the geometric mean");
  if (!fn.admissible(s)) throw NumericError(NumericErrorKind::NotIntegrable, "I + sA is not positive definite");
  const int k = fn.dim();
  return std::exp(log_gaussian_expectation(fn.power(s), Eigen::MatrixXd::Identity(k, k)) / s);
}

double oracle_scaled_mean_H(const GaussExpFunction& fn, double s) {
  if (s < 0.0) throw std::invalid_argument("H(s) needs s >= 0");
  if (s == 0.0) return std::exp(fn.constant());
  if (!fn.admissible(s)) throw NumericError(NumericErrorKind::NotIntegrable, "I + sA is not positive definite");
  const int k = fn.dim();
  return std::exp(log_gaussian_expectation(fn, s * Eigen::MatrixXd::Identity(k, k)));
}

double oracle_geometric_mean(const GaussExpFunction& fn) {
  return std::exp(fn.constant() - 0.5 * fn.quadratic().trace());
}

double oracle_entropy(const GaussExpFunction& fn) {
  const Tilt w = tilt(fn);
  const Eigen::MatrixXd& a_mat = fn.quadratic();
  const double mean_log_f = -0.5 * ((a_mat * w.covariance).trace() + w.mean.dot(a_mat * w.mean)) +
                            fn.linear().dot(w.mean) + fn.constant();
  return w.mass * mean_log_f - w.mass * std::log(w.mass);
}

double oracle_stein_term(const GaussExpFunction& fn) {
  const Tilt w = tilt(fn);
  const Eigen::MatrixXd& a_mat = fn.quadratic();
  return w.mass * (fn.linear().dot(w.mean) - (a_mat * w.covariance).trace() - w.mean.dot(a_mat * w.mean));
}

double oracle_laplacian_term(const GaussExpFunction& fn) {
  const Tilt w = tilt(fn);
  const Eigen::MatrixXd& a_mat = fn.quadratic();
  const Eigen::VectorXd drift = fn.linear() - a_mat * w.mean;
  return w.mass * (drift.squaredNorm() + (a_mat * w.covariance * a_mat).trace() - a_mat.trace());
}

double oracle_dirichlet_term(const GaussExpFunction& fn) {
  const Tilt w = tilt(fn.power(2.0));
  const Eigen::MatrixXd& a_mat = fn.quadratic();
  const Eigen::VectorXd drift = fn.linear() - a_mat * w.mean;
  return w.mass * (drift.squaredNorm() + (a_mat * w.covariance * a_mat).trace());
}

double oracle_deficit_term(const GaussExpFunction& fn) {
  return fn.quadratic().trace() * tilt(fn.power(2.0)).mass;
}

FunctionModel make_model(const GaussExpFunction& fn, std::string id) {
  FunctionModel m;
  m.id = std::move(id);
  m.dim = fn.dim();
  m.value = [fn](const Eigen::VectorXd& x) { return fn(x); };
  m.gradient = [fn](const Eigen::VectorXd& x) { return fn.gradient(x); };
  m.laplacian = [fn](const Eigen::VectorXd& x) { return fn.laplacian(x); };
  m.hessian = [fn](const Eigen::VectorXd& x) { return fn.hessian(x); };
  const double trace = fn.exponent_laplacian();
  m.exponent_laplacian = [trace](const Eigen::VectorXd&) { return trace; };
  m.shape = fn.shape();
  m.growth_certified = true;
  m.closed_form = fn;
  nlohmann::json a_rows = nlohmann::json::array();
  for (int i = 0; i < fn.dim(); ++i) {
    std::vector<double> row(fn.dim());
    for (int j = 0; j < fn.dim(); ++j) row[j] = fn.quadratic()(i, j);
    a_rows.push_back(row);
  }
  m.spec = {{"kind", "gauss_exp"},
            {"k", fn.dim()},
            {"A", a_rows},
            {"a", std::vector<double>(fn.linear().data(), fn.linear().data() + fn.dim())},
            {"c", fn.constant()}};
  return m;
}

double gradient_step(const Eigen::VectorXd& x) { return 1e-5 * std::max(1.0, x.norm()); }

double curvature_step(const Eigen::VectorXd& x) { return 1e-4 * std::max(1.0, x.norm()); }

Eigen::VectorXd fd_gradient(const ScalarField& f, const Eigen::VectorXd& x) {
  const double h = gradient_step(x);
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const ScalarField& f, const Eigen::VectorXd& x) {
  const double h = curvature_step(x);
  const Eigen::Index k = x.size();
  const double center = f(x);
  Eigen::MatrixXd hess(k, k);
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < k; ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    hess(i, i) = (up - 2.0 * center + down) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      double corner[4];
      int idx = 0;
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          probe[i] = x[i] + si * h;
          probe[j] = x[j] + sj * h;
          corner[idx++] = f(probe);
        }
      probe[i] = x[i];
      probe[j] = x[j];
      hess(i, j) = hess(j, i) = (corner[0] - corner[1] - corner[2] + corner[3]) / (4.0 * h * h);
    }
  }
  return hess;
}

double fd_laplacian(const ScalarField& f, const Eigen::VectorXd& x) {
  const double h = curvature_step(x);
  const double center = f(x);
  double sum = 0.0;
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    sum += (up - 2.0 * center + down) / (h * h);
  }
  return sum;
}

VectorField gradient(const FunctionModel& fn) {
  if (fn.gradient) return fn.gradient;
  return [f = fn.value](const Eigen::VectorXd& x) { return fd_gradient(f, x); };
}

ScalarField laplacian(const FunctionModel& fn) {
  if (fn.laplacian) return fn.laplacian;
  return [f = fn.value](const Eigen::VectorXd& x) { return fd_laplacian(f, x); };
}

MatrixField hessian(const FunctionModel& fn) {
  if (fn.hessian) return fn.hessian;
  return [f = fn.value](const Eigen::VectorXd& x) { return fd_hessian(f, x); };
}

ScalarField exponent_laplacian(const FunctionModel& fn) {
  if (fn.exponent_laplacian) return fn.exponent_laplacian;
  return [f = fn.value](const Eigen::VectorXd& x) {
    return fd_laplacian([&f](const Eigen::VectorXd& y) { return -std::log(f(y)); }, x);
  };
}

FunctionModel truncate(const FunctionModel& fn, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("truncation radius must be positive");
  FunctionModel out = fn;
  out.closed_form.reset();
  out.support_radius = std::min(fn.support_radius, radius);
  out.id = fn.id + "|R=" + nlohmann::json(radius).dump();
  out.spec = {{"kind", "truncate"}, {"radius", radius}, {"of", fn.spec}};

  auto inside = [radius](const Eigen::VectorXd& x) { return x.norm() <= radius; };
  out.value = [f = fn.value, inside](const Eigen::VectorXd& x) { return inside(x) ? f(x) : 0.0; };
  out.gradient = [g = gradient(fn), inside](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return inside(x) ? g(x) : Eigen::VectorXd::Zero(x.size());
  };
  out.laplacian = [l = laplacian(fn), inside](const Eigen::VectorXd& x) { return inside(x) ? l(x) : 0.0; };
  out.hessian = [h = hessian(fn), inside](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return inside(x) ? h(x) : Eigen::MatrixXd::Zero(x.size(), x.size());
  };
  out.exponent_laplacian = [l = exponent_laplacian(fn), inside](const Eigen::VectorXd& x) {
    return inside(x) ? l(x) : 0.0;
  };
  return out;
}

FunctionModel power(const FunctionModel& fn, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("power needs s > 0");
  if (fn.closed_form) {
    FunctionModel out = make_model(fn.closed_form->power(s), fn.id + "^" + nlohmann::json(s).dump());
    return out;
  }
  FunctionModel out;
  out.id = fn.id + "^" + nlohmann::json(s).dump();
  out.dim = fn.dim;
  out.value = [f = fn.value, s](const Eigen::VectorXd& x) { return std::pow(f(x), s); };
  if (fn.exponent_laplacian)
    out.exponent_laplacian = [l = fn.exponent_laplacian, s](const Eigen::VectorXd& x) { return s * l(x); };
  out.shape = fn.shape;
  out.support_radius = fn.support_radius;
  out.smooth = fn.smooth;
  out.growth_certified = fn.growth_certified;
  out.spec = {{"kind", "power"}, {"s", s}, {"of", fn.spec}};
  return out;
}

}  // namespace gausslm
