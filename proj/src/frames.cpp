#include "gausslm/frames.hpp"
#include "gausslm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gausslm {
namespace {

Eigen::VectorXd basis_vector(int n, int j) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e[j] = 1.0;
  return e;
}

nlohmann::json matrix_columns(const Eigen::MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    out.push_back(std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows()));
  return out;
}

nlohmann::json matrix_rows(const Eigen::MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd rows_from_json(const nlohmann::json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.at(0).size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows.at(i).size()) != c)
      throw std::invalid_argument("ragged matrix in frame document");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
  }
  return m;
}

}  // namespace

Eigen::MatrixXd BlockDecomposition::assemble() const {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(ambient_dim, ambient_dim);
  for (const auto& term : terms) sum.noalias() += term.coefficient * term.rows.transpose() * term.rows;
  return sum;
}

double BlockDecomposition::residual() const { return identity_residual(assemble()); }

double BlockDecomposition::orthonormality_residual() const {
  double worst = 0.0;
  for (const auto& term : terms)
    worst = std::max(worst, identity_residual(term.rows * term.rows.transpose()));
  return worst;
}

double min_correlation(int n) { return -1.0 / static_cast<double>(n - 1); }

SimplexFrame build_sr_simplex(int n) {
  if (n < 2) throw std::invalid_argument("SR-simplex needs n >= 2");
  const double nd = n;
  // Gram matrix of the simplex: 1 on the diagonal, -1/(n-1) off it. Rank n-1,
  // the kernel is spanned by the all-ones vector.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Constant(n, n, -1.0 / (nd - 1.0));
  gram.diagonal().setConstant(1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const Eigen::MatrixXd basis = solver.eigenvectors().rightCols(n - 1);
  const Eigen::VectorXd scale = solver.eigenvalues().tail(n - 1).cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd v = scale.asDiagonal() * basis.transpose();

  // The eigenspace basis is arbitrary; rotate so that v_1 = e_1 and v_j lies
  // in span(e_1..e_j) with a positive j-th coordinate.
  const Eigen::MatrixXd lead = v.leftCols(n - 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(lead);
  const Eigen::MatrixXd q = qr.householderQ();
  v = q.transpose() * v;
  for (int r = 0; r < n - 1; ++r)
    if (v(r, r) < 0.0) v.row(r) *= -1.0;
  for (int j = 0; j < n; ++j) {
    for (int r = j + 1; r < n - 1 && j < n - 1; ++r) v(r, j) = 0.0;
    v.col(j).normalize();
  }
  return SimplexFrame{n, std::move(v)};
}

CorrelationFrame build_correlation_frame(const SimplexFrame& simplex, double t) {
  const int n = simplex.n;
  const double lo = min_correlation(n);
  if (!(t >= lo && t <= 1.0)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "t outside [%g, 1]", lo);
    throw std::invalid_argument(msg);
  }
  const double nd = n;
  const double along = std::sqrt(std::max(0.0, (t * (nd - 1.0) + 1.0) / nd));
  const double across = std::sqrt(std::max(0.0, (nd - 1.0) / nd * (1.0 - t)));

  CorrelationFrame frame;
  frame.n = n;
  frame.t = t;
  frame.p = (nd - 1.0) * t + 1.0;
  frame.q = 1.0 - t;
  frame.simplex = simplex;
  frame.u = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    frame.u.col(i).head(n - 1) = across * simplex.vertices.col(i);
    frame.u(n - 1, i) = along;
  }
  return frame;
}

BlockDecomposition identity_decomposition(const CorrelationFrame& frame) {
  const int n = frame.n;
  const double t = frame.t;
  BlockDecomposition out;
  out.ambient_dim = n;
  out.block_dim = 1;
  const double u_weight = t >= 0.0 ? 1.0 / frame.p : 1.0 / (1.0 - t);
  for (int i = 0; i < n; ++i)
    out.terms.push_back({u_weight, frame.u.col(i).transpose(), "u" + std::to_string(i + 1)});
  if (t >= 0.0) {
    const double e_weight = n * t / frame.p;
    for (int j = 0; j < n - 1; ++j)
      out.terms.push_back({e_weight, basis_vector(n, j).transpose(), "e" + std::to_string(j + 1)});
  } else {
    out.terms.push_back({-n * t / (1.0 - t), basis_vector(n, n - 1).transpose(), "e" + std::to_string(n)});
  }
  return out;
}

BlockDecomposition tensor_lift(const BlockDecomposition& decomp, int k) {
  if (k < 1) throw std::invalid_argument("tensor lift needs k >= 1");
  const Eigen::MatrixXd ik = Eigen::MatrixXd::Identity(k, k);
  BlockDecomposition out;
  out.ambient_dim = decomp.ambient_dim * k;
  out.block_dim = decomp.block_dim * k;
  out.terms.reserve(decomp.terms.size());
  for (const auto& term : decomp.terms) out.terms.push_back({term.coefficient, kron(term.rows, ik), term.label});
  return out;
}

Eigen::MatrixXd lifted_u(const CorrelationFrame& frame, int i, int k) {
  return kron(frame.u.col(i).transpose(), Eigen::MatrixXd::Identity(k, k));
}

Eigen::MatrixXd lifted_e(int n, int j, int k) {
  return kron(basis_vector(n, j).transpose(), Eigen::MatrixXd::Identity(k, k));
}

Eigen::MatrixXd lifted_frame_matrix(const CorrelationFrame& frame, int k) {
  return kron(frame.u.transpose(), Eigen::MatrixXd::Identity(k, k));
}

double LiftIdentityResiduals::max() const { return std::max({gram, cross, expansion}); }

LiftIdentityResiduals lift_identity_residuals(const CorrelationFrame& frame, int k) {
  const int n = frame.n;
  const Eigen::MatrixXd ik = Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd g = frame.gram();
  const double across = std::sqrt((n - 1.0) / n * frame.q);
  const double along = std::sqrt(frame.p / n);

  std::vector<Eigen::MatrixXd> us;
  for (int i = 0; i < n; ++i) us.push_back(lifted_u(frame, i, k));

  LiftIdentityResiduals res;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      res.gram = std::max(res.gram, (us[i] * us[j].transpose() - g(i, j) * ik).cwiseAbs().maxCoeff());
    for (int j = 0; j < n - 1; ++j) {
      const Eigen::MatrixXd expected = across * frame.simplex.vertices(j, i) * ik;
      res.cross = std::max(res.cross, (us[i] * lifted_e(n, j, k).transpose() - expected).cwiseAbs().maxCoeff());
    }
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
    padded.head(n - 1) = frame.simplex.vertices.col(i);
    const Eigen::MatrixXd expansion =
        along * kron(basis_vector(n, n - 1), ik) + across * kron(padded, ik);
    res.expansion = std::max(res.expansion, (us[i].transpose() - expansion).cwiseAbs().maxCoeff());
  }
  return res;
}

double simplex_residual(const SimplexFrame& simplex) {
  const int n = simplex.n;
  const Eigen::MatrixXd g = simplex.vertices.transpose() * simplex.vertices;
  double worst = simplex.vertices.rowwise().sum().cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double expected = i == j ? 1.0 : -1.0 / (n - 1.0);
      worst = std::max(worst, std::abs(g(i, j) - expected));
    }
  return worst;
}

double frame_residual(const CorrelationFrame& frame) {
  const Eigen::MatrixXd g = frame.gram();
  double worst = 0.0;
  for (int i = 0; i < frame.n; ++i)
    for (int j = 0; j < frame.n; ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : frame.t)));
  return worst;
}

nlohmann::json frame_to_json(const CorrelationFrame& frame, const BlockDecomposition& decomp) {
  nlohmann::json doc;
  doc["n"] = frame.n;
  doc["t"] = frame.t;
  doc["k"] = decomp.block_dim;
  doc["vertices"] = matrix_columns(frame.simplex.vertices);
  doc["u"] = matrix_columns(frame.u);
  auto terms = nlohmann::json::array();
  for (const auto& term : decomp.terms)
    terms.push_back({{"c", term.coefficient}, {"label", term.label}, {"rows", matrix_rows(term.rows)}});
  doc["terms"] = std::move(terms);
  return doc;
}

CorrelationFrame frame_from_json(const nlohmann::json& doc) {
  const int n = doc.at("n").get<int>();
  const double t = doc.at("t").get<double>();
  if (n < 2) throw std::invalid_argument("frame document: n < 2");
  SimplexFrame simplex{n, rows_from_json(doc.at("vertices")).transpose()};
  if (simplex.vertices.rows() != n - 1 || simplex.vertices.cols() != n)
    throw std::invalid_argument("frame document: vertices have the wrong shape");
  if (simplex_residual(simplex) > kFrameTolerance)
    throw std::invalid_argument("frame document: vertices are not an SR-simplex");
  CorrelationFrame frame = build_correlation_frame(simplex, t);
  if (doc.contains("u")) {
    const Eigen::MatrixXd u = rows_from_json(doc.at("u")).transpose();
    if (u.rows() != n || u.cols() != n || (u - frame.u).cwiseAbs().maxCoeff() > kFrameTolerance)
      throw std::invalid_argument("frame document: u does not match the vertices");
  }
  return frame;
}

BlockDecomposition decomposition_from_json(const nlohmann::json& doc) {
  BlockDecomposition out;
  out.block_dim = doc.value("k", 1);
  for (const auto& term : doc.at("terms")) {
    DecompositionTerm dt{term.at("c").get<double>(), rows_from_json(term.at("rows")), term.value("label", "")};
    if (out.ambient_dim == 0) out.ambient_dim = static_cast<int>(dt.rows.cols());
    if (dt.rows.cols() != out.ambient_dim) throw std::invalid_argument("decomposition terms disagree on dimension");
    out.terms.push_back(std::move(dt));
  }
  return out;
}

}  // namespace gausslm
