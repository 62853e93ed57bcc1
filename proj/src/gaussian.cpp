#include "gausslm/gaussian.hpp"
#include "gausslm/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace gausslm {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

void require_count(std::int64_t count) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
}

}  // namespace

NormalEngine::NormalEngine(std::uint64_t seed, std::uint64_t stream) {
  auto seq = make_seed_seq(seed, stream);
  bits_.seed(seq);
}

double NormalEngine::uniform() {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(bits_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalEngine::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double x, y, r2;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    r2 = x * x + y * y;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = y * factor;
  has_spare_ = true;
  return x * factor;
}

void NormalEngine::fill(Eigen::Ref<Eigen::VectorXd> out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal();
}

GaussianSampler::GaussianSampler(std::uint64_t seed, std::uint64_t stream, int dimension)
    : seed_(seed), stream_(stream), dimension_(dimension) {
  if (dimension < 1) throw std::invalid_argument("sampler dimension must be >= 1");
}

GaussianSampler GaussianSampler::split(std::uint64_t child) const {
  return GaussianSampler(seed_, splitmix64(stream_ ^ splitmix64(child + 1)), dimension_);
}

GaussianSampler GaussianSampler::with_dimension(int dimension) const {
  return GaussianSampler(seed_, stream_, dimension);
}

Eigen::MatrixXd sample_standard(const GaussianSampler& sampler, std::int64_t count) {
  require_count(count);
  NormalEngine engine = sampler.engine();
  Eigen::MatrixXd out(sampler.dimension(), count);
  for (std::int64_t c = 0; c < count; ++c) engine.fill(out.col(c));
  return out;
}

CorrelatedSample sample_correlated_frame(const CorrelationFrame& frame, int k,
                                         const GaussianSampler& sampler, std::int64_t count) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const Eigen::MatrixXd mix = lifted_frame_matrix(frame, k);
  const Eigen::MatrixXd z = sample_standard(sampler.with_dimension(frame.n * k), count);
  return CorrelatedSample{frame.n, k, mix * z};
}

CorrelatedSample sample_correlated_mixture(double t, int n, int k,
                                           const GaussianSampler& sampler, std::int64_t count) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("mixture construction needs t in [0, 1]; use the frame construction");
  if (n < 1 || k < 1) throw std::invalid_argument("n and k must be >= 1");
  const Eigen::MatrixXd z = sample_standard(sampler.with_dimension((n + 1) * k), count);
  const double shared = std::sqrt(t);
  const double own = std::sqrt(1.0 - t);
  CorrelatedSample out{n, k, Eigen::MatrixXd(n * k, count)};
  for (int i = 0; i < n; ++i)
    out.data.middleRows(i * k, k) = shared * z.topRows(k) + own * z.middleRows((i + 1) * k, k);
  return out;
}

Eigen::MatrixXd sample_affine(const Eigen::MatrixXd& covariance, const Eigen::VectorXd& shift,
                              const GaussianSampler& sampler, std::int64_t count) {
  if (covariance.rows() != shift.size()) throw std::invalid_argument("covariance and shift disagree on dimension");
  const Eigen::MatrixXd root = psd_sqrt(covariance);
  Eigen::MatrixXd out = root * sample_standard(sampler.with_dimension(static_cast<int>(shift.size())), count);
  out.colwise() -= shift;
  return out;
}

BlockCovariance build_block_covariance(int n, int k, double t) {
  if (n < 2 || k < 1) throw std::invalid_argument("block covariance needs n >= 2 and k >= 1");
  const double lo = min_correlation(n);
  if (!(t >= lo && t <= 1.0)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "t outside [%g, 1]", lo);
    throw std::invalid_argument(msg);
  }
  Eigen::MatrixXd pattern = Eigen::MatrixXd::Constant(n, n, t);
  pattern.diagonal().setOnes();
  return BlockCovariance{n, k, kron(pattern, Eigen::MatrixXd::Identity(k, k))};
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& draws) {
  const Eigen::Index count = draws.cols();
  if (count < 2) throw std::invalid_argument("empirical covariance needs at least two draws");
  const Eigen::VectorXd mean = draws.rowwise().mean();
  const Eigen::MatrixXd centered = draws.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(count - 1);
}

Eigen::MatrixXd covariance_standard_errors(const Eigen::MatrixXd& sigma, std::int64_t count) {
  Eigen::MatrixXd se(sigma.rows(), sigma.cols());
  for (Eigen::Index a = 0; a < sigma.rows(); ++a)
    for (Eigen::Index b = 0; b < sigma.cols(); ++b)
      se(a, b) = std::sqrt((sigma(a, a) * sigma(b, b) + sigma(a, b) * sigma(a, b)) / static_cast<double>(count));
  return se;
}

const char* to_string(PsdOrder order) {
  switch (order) {
    case PsdOrder::LessEq: return "LESS_EQ";
    case PsdOrder::GreaterEq: return "GREATER_EQ";
    case PsdOrder::Incomparable: return "INCOMPARABLE";
    case PsdOrder::Equal: return "EQUAL";
  }
  return "UNKNOWN";
}

PsdOrder psd_order(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw std::invalid_argument("psd_order needs square matrices of equal size");
  if (asymmetry(a) > 1e-12 || asymmetry(b) > 1e-12) throw std::invalid_argument("psd_order needs symmetric matrices");
  constexpr double tol = 1e-10;
  const Eigen::VectorXd spectrum = symmetric_eigenvalues(b - a);
  const bool b_above = spectrum.minCoeff() >= -tol;
  const bool a_above = -spectrum.maxCoeff() >= -tol;
  if (a_above && b_above) return PsdOrder::Equal;
  if (b_above) return PsdOrder::LessEq;
  if (a_above) return PsdOrder::GreaterEq;
  return PsdOrder::Incomparable;
}

void write_samples_csv(std::ostream& out, const CorrelatedSample& sample) {
  for (int i = 0; i < sample.n; ++i)
    for (int r = 0; r < sample.k; ++r) out << (i || r ? "," : "") << 'X' << i + 1 << '_' << r + 1;
  out << '\n';
  char buf[32];
  for (Eigen::Index c = 0; c < sample.count(); ++c) {
    for (Eigen::Index r = 0; r < sample.data.rows(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", sample.data(r, c));
      out << (r ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace gausslm
