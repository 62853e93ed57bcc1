#pragma once

// Spherico-regular simplices, equiangular correlation frames and the
// decompositions of the identity built from them.

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <vector>

namespace gausslm {

/// Exact-identity tolerance for entries of O(1) magnitude.
inline constexpr double kFrameTolerance = 1e-12;

/// n unit vectors in R^{n-1} with pairwise inner product -1/(n-1) summing to
/// zero. Vertex i is column i of `vertices`.
struct SimplexFrame {
  int n = 0;
  Eigen::MatrixXd vertices;  // (n-1) x n

  Eigen::VectorXd vertex(int i) const { return vertices.col(i); }
};

/// n unit vectors u_i(t) in R^n with <u_i, u_j> = t for i != j.
struct CorrelationFrame {
  int n = 0;
  double t = 0.0;
  double p = 1.0;  // (n-1)t + 1, the largest eigenvalue of the Gram matrix for t >= 0
  double q = 1.0;  // 1 - t
  SimplexFrame simplex;
  Eigen::MatrixXd u;  // n x n, column i is u_i

  Eigen::VectorXd vector(int i) const { return u.col(i); }
  /// Gram matrix [<u_i, u_j>].
  Eigen::MatrixXd gram() const { return u.transpose() * u; }
};

/// One weighted term c * M^T M of a decomposition of the identity.
struct DecompositionTerm {
  double coefficient = 0.0;
  Eigen::MatrixXd rows;  // k x ambient, with rows * rows^T = I_k
  std::string label;     // "u3", "e1", ...
};

struct BlockDecomposition {
  int ambient_dim = 0;
  int block_dim = 1;
  std::vector<DecompositionTerm> terms;

  /// Sum of c_i M_i^T M_i.
  Eigen::MatrixXd assemble() const;
  /// Max entry of |assemble() - I|.
  double residual() const;
  /// Max entry of |M_i M_i^T - I_k| over all terms.
  double orthonormality_residual() const;
};

/// Lower edge of the admissible correlation range, -1/(n-1).
double min_correlation(int n);

/// Throws std::invalid_argument if n < 2.
SimplexFrame build_sr_simplex(int n);

/// Throws std::invalid_argument if t lies outside [-1/(n-1), 1].
CorrelationFrame build_correlation_frame(const SimplexFrame& simplex, double t);

/// t >= 0: terms (1/p, u_i) and (nt/p, e_j), j < n.
/// t < 0:  terms (1/(1-t), u_i) and (-nt/(1-t), e_n).
BlockDecomposition identity_decomposition(const CorrelationFrame& frame);

/// Replaces every term's rows M by M (x) I_k. Throws if k < 1.
BlockDecomposition tensor_lift(const BlockDecomposition& decomp, int k);

/// The k x kn block rows U_i = u_i^T (x) I_k and E_j = e_j^T (x) I_k.
Eigen::MatrixXd lifted_u(const CorrelationFrame& frame, int i, int k);
Eigen::MatrixXd lifted_e(int n, int j, int k);

/// Stack of all U_i, i.e. the kn x kn matrix mapping Z to (X_1, ..., X_n).
Eigen::MatrixXd lifted_frame_matrix(const CorrelationFrame& frame, int k);

/// Residuals of the block identities
///   U_i U_j^T = <u_i,u_j> I_k,
///   U_i E_j^T = sqrt((n-1) q / n) <v_i, e_j> I_k   (j < n),
///   U_i^T = sqrt(p/n) e_n (x) I_k + sqrt((n-1) q / n) v_i (x) I_k.
struct LiftIdentityResiduals {
  double gram = 0.0;
  double cross = 0.0;
  double expansion = 0.0;
  double max() const;
};
LiftIdentityResiduals lift_identity_residuals(const CorrelationFrame& frame, int k);

/// Invariant residuals of a simplex: max over |norm-1|, |<v_i,v_j>+1/(n-1)|, |sum v_i|.
double simplex_residual(const SimplexFrame& simplex);
/// Max over |norm-1| and |<u_i,u_j> - t|.
double frame_residual(const CorrelationFrame& frame);

/// {n, t, vertices, u, terms: [{c, rows}]}; vertices and u are lists of vectors.
nlohmann::json frame_to_json(const CorrelationFrame& frame, const BlockDecomposition& decomp);
/// Rebuilds and validates a frame from its JSON document.
CorrelationFrame frame_from_json(const nlohmann::json& doc);
BlockDecomposition decomposition_from_json(const nlohmann::json& doc);

}  // namespace gausslm
