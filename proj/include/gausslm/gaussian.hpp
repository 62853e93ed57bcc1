#pragma once

// Standard and correlated Gaussian sampling, block covariances and the
// Loewner (PSD) order.

#include "gausslm/frames.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>

namespace gausslm {

/// Covariance of (X_1, ..., X_n), X_i in R^k, with T_ii = I_k and T_ij = t I_k.
struct BlockCovariance {
  int n = 0;
  int k = 0;
  Eigen::MatrixXd matrix;  // kn x kn

  Eigen::MatrixXd block(int i, int j) const { return matrix.block(i * k, j * k, k, k); }
};

/// Random stream of 64-bit words with a polar-method normal transform.
class NormalEngine {
 public:
  NormalEngine(std::uint64_t seed, std::uint64_t stream);

  double uniform();  // in (0, 1)
  double normal();
  void fill(Eigen::Ref<Eigen::VectorXd> out);

 private:
  std::mt19937_64 bits_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Value-type descriptor of a reproducible N(0, I_dimension) stream.
/// Every sampling call starts from the beginning of the stream, so the same
/// (seed, stream, dimension) always yields the same draws.
class GaussianSampler {
 public:
  GaussianSampler(std::uint64_t seed, std::uint64_t stream, int dimension);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  int dimension() const { return dimension_; }

  /// Independent child stream; used for per-batch Monte Carlo streams.
  GaussianSampler split(std::uint64_t child) const;
  GaussianSampler with_dimension(int dimension) const;

  NormalEngine engine() const { return NormalEngine(seed_, stream_); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  int dimension_;
};

/// Correlated draws: column c holds (X_1, ..., X_n) flattened, each X_i in R^k.
struct CorrelatedSample {
  int n = 0;
  int k = 0;
  Eigen::MatrixXd data;  // kn x count

  Eigen::Index count() const { return data.cols(); }
  Eigen::VectorXd component(int i, Eigen::Index draw) const { return data.col(draw).segment(i * k, k); }
};

/// dimension x count matrix of iid N(0, I) columns. Throws if count < 1.
Eigen::MatrixXd sample_standard(const GaussianSampler& sampler, std::int64_t count);

/// X_i = U_i Z with Z ~ N(0, I_kn). The sampler's dimension is ignored; kn is used.
CorrelatedSample sample_correlated_frame(const CorrelationFrame& frame, int k,
                                         const GaussianSampler& sampler, std::int64_t count);

/// X_i = sqrt(t) Z + sqrt(1-t) Z_i with Z, Z_1..Z_n iid N(0, I_k). Rejects t outside [0, 1].
CorrelatedSample sample_correlated_mixture(double t, int n, int k,
                                           const GaussianSampler& sampler, std::int64_t count);

/// Draws of U Z - shift where U is the symmetric square root of `covariance`.
Eigen::MatrixXd sample_affine(const Eigen::MatrixXd& covariance, const Eigen::VectorXd& shift,
                              const GaussianSampler& sampler, std::int64_t count);

/// Rejects t outside [-1/(n-1), 1] and n < 2, k < 1.
BlockCovariance build_block_covariance(int n, int k, double t);

/// Unbiased covariance of the columns of `draws` (mean removed).
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& draws);

/// Standard error of each entry of an empirical covariance of Gaussian data
/// with population covariance `sigma`: sqrt((s_aa s_bb + s_ab^2) / count).
Eigen::MatrixXd covariance_standard_errors(const Eigen::MatrixXd& sigma, std::int64_t count);

enum class PsdOrder { LessEq, GreaterEq, Incomparable, Equal };

const char* to_string(PsdOrder order);

/// Compares symmetric A and B in the Loewner order with eigenvalue tolerance
/// 1e-10. Throws std::invalid_argument on shape mismatch or asymmetry > 1e-12.
PsdOrder psd_order(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// CSV with header X1_1,...,X1_k,X2_1,... and one row per draw.
void write_samples_csv(std::ostream& out, const CorrelatedSample& sample);

}  // namespace gausslm
