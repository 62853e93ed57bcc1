#pragma once

#include <Eigen/Dense>

#include <vector>

namespace gausslm {

/// Max |A - A^T| entry.
double asymmetry(const Eigen::MatrixXd& m);

/// Eigenvalues of a symmetric matrix, ascending.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);

double min_eigenvalue(const Eigen::MatrixXd& m);
double max_eigenvalue(const Eigen::MatrixXd& m);

/// Symmetric square root of a PSD matrix; eigenvalues below zero are clamped.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Max |m - I| entry; m must be square.
double identity_residual(const Eigen::MatrixXd& m);

struct EigenvalueCluster {
  double value;
  int multiplicity;
};

/// Groups ascending eigenvalues that are within `tol` of each other.
std::vector<EigenvalueCluster> cluster_spectrum(const Eigen::VectorXd& ascending,
                                                double tol = 1e-9);

}  // namespace gausslm
