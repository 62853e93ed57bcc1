#include "gausslm/linalg.hpp"
#include "gausslm/errors.hpp"

#include <cmath>

namespace gausslm {

const char* to_string(NumericErrorKind kind) {
  switch (kind) {
    case NumericErrorKind::NotIntegrable: return "NOT_INTEGRABLE";
    case NumericErrorKind::Divergent: return "DIVERGENT";
    case NumericErrorKind::Undefined: return "UNDEFINED";
  }
  return "UNKNOWN";
}

double asymmetry(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double min_eigenvalue(const Eigen::MatrixXd& m) { return symmetric_eigenvalues(m).minCoeff(); }

double max_eigenvalue(const Eigen::MatrixXd& m) { return symmetric_eigenvalues(m).maxCoeff(); }

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double identity_residual(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

std::vector<EigenvalueCluster> cluster_spectrum(const Eigen::VectorXd& ascending, double tol) {
  std::vector<EigenvalueCluster> out;
  for (Eigen::Index i = 0; i < ascending.size(); ++i) {
    const double v = ascending[i];
    if (!out.empty() && std::abs(v - out.back().value) <= tol) {
      ++out.back().multiplicity;
    } else {
      out.push_back({v, 1});
    }
  }
  return out;
}

}  // namespace gausslm
