#include "gausslm/catalog.hpp"
#include "gausslm/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace gausslm {
namespace {

Eigen::VectorXd vector_from_json(const nlohmann::json& doc) {
  if (doc.is_number()) return Eigen::VectorXd::Constant(1, doc.get<double>());
  const auto values = doc.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/// A may be a scalar (times I_k), a diagonal list, or a list of rows.
Eigen::MatrixXd quadratic_from_json(const nlohmann::json& doc, int k) {
  if (doc.is_number()) return doc.get<double>() * Eigen::MatrixXd::Identity(k, k);
  if (!doc.is_array()) throw std::invalid_argument("A must be a number, a list or a matrix");
  if (doc.empty() || doc.at(0).is_number()) return vector_from_json(doc).asDiagonal();
  Eigen::MatrixXd m(doc.size(), doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (doc.at(i).size() != doc.size()) throw std::invalid_argument("A must be square");
    for (std::size_t j = 0; j < doc.size(); ++j) m(i, j) = doc.at(i).at(j).get<double>();
  }
  return m;
}

int infer_dim(const nlohmann::json& doc) {
  if (doc.contains("k")) return doc.at("k").get<int>();
  if (doc.contains("a") && doc.at("a").is_array()) return static_cast<int>(doc.at("a").size());
  if (doc.contains("A") && doc.at("A").is_array()) return static_cast<int>(doc.at("A").size());
  return 1;
}

GaussExpFunction gauss_exp_from_json(const nlohmann::json& doc) {
  const int k = infer_dim(doc);
  if (k < 1) throw std::invalid_argument("gauss_exp needs k >= 1");
  Eigen::MatrixXd quad = doc.contains("A") ? quadratic_from_json(doc.at("A"), k) : Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(k);
  if (doc.contains("a")) {
    lin = vector_from_json(doc.at("a"));
    if (lin.size() == 1 && k > 1 && doc.at("a").is_number()) lin = Eigen::VectorXd::Constant(k, lin[0]);
  }
  return GaussExpFunction(std::move(quad), std::move(lin), doc.value("c", 0.0));
}

FunctionModel builtin_from_json(const std::string& name, const nlohmann::json& params) {
  if (name == "half_space_indicator")
    return half_space_indicator(vector_from_json(params.at("w")), params.value("b", 0.0));
  if (name == "convex_potential_power")
    return convex_potential_power(params.value("k", 1), params.value("beta", 2.0));
  if (name == "logistic") return logistic(vector_from_json(params.at("w")), params.value("b", 0.0));
  if (name == "cosh") return cosh_ridge(vector_from_json(params.at("w")), params.value("b", 0.0));
  if (name == "monomial") return monomial(params.at("powers").get<std::vector<int>>(), params.value("coef", 1.0));
  throw std::invalid_argument("unknown builtin function '" + name + "'");
}

double stable_sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace

FunctionModel half_space_indicator(const Eigen::VectorXd& w, double b) {
  FunctionModel m;
  m.id = "half_space_indicator";
  m.dim = static_cast<int>(w.size());
  m.value = [w, b](const Eigen::VectorXd& x) { return w.dot(x) <= b ? 1.0 : 0.0; };
  m.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.size()); };
  m.laplacian = [](const Eigen::VectorXd&) { return 0.0; };
  m.hessian = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(x.size(), x.size()); };
  m.exponent_laplacian = [](const Eigen::VectorXd&) { return 0.0; };
  m.shape = LogShape::Concave;
  m.smooth = false;
  m.growth_certified = false;
  m.spec = {{"kind", "builtin"},
            {"name", m.id},
            {"params", {{"w", std::vector<double>(w.data(), w.data() + w.size())}, {"b", b}}}};
  return m;
}

FunctionModel convex_potential_power(int k, double beta) {
  if (k < 1) throw std::invalid_argument("convex_potential_power needs k >= 1");
  if (!(beta >= 1.0)) throw std::invalid_argument("convex_potential_power needs beta >= 1");
  FunctionModel m;
  m.id = "convex_potential_power";
  m.dim = k;
  // r^(beta-2) with the r = 0 limit.
  auto radial = [beta](double r) {
    if (r > 0.0) return std::pow(r, beta - 2.0);
    if (beta > 2.0) return 0.0;
    return beta == 2.0 ? 1.0 : INFINITY;
  };
  m.value = [beta](const Eigen::VectorXd& x) { return std::exp(-std::pow(x.norm(), beta) / beta); };
  m.gradient = [beta, radial](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double r = x.norm();
    if (r == 0.0) return Eigen::VectorXd::Zero(x.size());
    return -std::exp(-std::pow(r, beta) / beta) * radial(r) * x;
  };
  m.laplacian = [beta, k, radial](const Eigen::VectorXd& x) {
    const double r = x.norm();
    const double f = std::exp(-std::pow(r, beta) / beta);
    const double grad_sq = r > 0.0 ? std::pow(r, 2.0 * beta - 2.0) : 0.0;
    return f * (grad_sq - (beta + k - 2.0) * radial(r));
  };
  m.hessian = [beta, radial](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const Eigen::Index k = x.size();
    const double r = x.norm();
    const double f = std::exp(-std::pow(r, beta) / beta);
    if (r == 0.0) return -f * radial(r) * Eigen::MatrixXd::Identity(k, k);
    const Eigen::VectorXd grad_v = radial(r) * x;
    const Eigen::MatrixXd hess_v =
        radial(r) * (Eigen::MatrixXd::Identity(k, k) + (beta - 2.0) * x * x.transpose() / (r * r));
    return f * (grad_v * grad_v.transpose() - hess_v);
  };
  m.exponent_laplacian = [beta, k, radial](const Eigen::VectorXd& x) { return (beta + k - 2.0) * radial(x.norm()); };
  m.shape = LogShape::Concave;
  m.smooth = beta > 1.0;
  m.growth_certified = true;
  m.spec = {{"kind", "builtin"}, {"name", m.id}, {"params", {{"k", k}, {"beta", beta}}}};
  return m;
}

FunctionModel logistic(const Eigen::VectorXd& w, double b) {
  FunctionModel m;
  m.id = "logistic";
  m.dim = static_cast<int>(w.size());
  const double w2 = w.squaredNorm();
  m.value = [w, b](const Eigen::VectorXd& x) { return stable_sigmoid(w.dot(x) + b); };
  m.gradient = [w, b](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double s = stable_sigmoid(w.dot(x) + b);
    return s * (1.0 - s) * w;
  };
  m.laplacian = [w, b, w2](const Eigen::VectorXd& x) {
    const double s = stable_sigmoid(w.dot(x) + b);
    return w2 * s * (1.0 - s) * (1.0 - 2.0 * s);
  };
  m.hessian = [w, b](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const double s = stable_sigmoid(w.dot(x) + b);
    return s * (1.0 - s) * (1.0 - 2.0 * s) * w * w.transpose();
  };
  m.exponent_laplacian = [w, b, w2](const Eigen::VectorXd& x) {
    const double s = stable_sigmoid(w.dot(x) + b);
    return w2 * s * (1.0 - s);
  };
  m.shape = LogShape::Concave;
  m.growth_certified = true;
  m.spec = {{"kind", "builtin"},
            {"name", m.id},
            {"params", {{"w", std::vector<double>(w.data(), w.data() + w.size())}, {"b", b}}}};
  return m;
}

FunctionModel cosh_ridge(const Eigen::VectorXd& w, double b) {
  FunctionModel m;
  m.id = "cosh";
  m.dim = static_cast<int>(w.size());
  const double w2 = w.squaredNorm();
  m.value = [w, b](const Eigen::VectorXd& x) { return std::cosh(w.dot(x) + b); };
  m.gradient = [w, b](const Eigen::VectorXd& x) -> Eigen::VectorXd { return std::sinh(w.dot(x) + b) * w; };
  m.laplacian = [w, b, w2](const Eigen::VectorXd& x) { return w2 * std::cosh(w.dot(x) + b); };
  m.hessian = [w, b](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return std::cosh(w.dot(x) + b) * w * w.transpose();
  };
  m.exponent_laplacian = [w, b, w2](const Eigen::VectorXd& x) {
    const double sech = 1.0 / std::cosh(w.dot(x) + b);
    return -w2 * sech * sech;
  };
  m.shape = LogShape::Convex;
  m.growth_certified = true;
  m.spec = {{"kind", "builtin"},
            {"name", m.id},
            {"params", {{"w", std::vector<double>(w.data(), w.data() + w.size())}, {"b", b}}}};
  return m;
}

FunctionModel monomial(const std::vector<int>& powers, double coef) {
  if (powers.empty()) throw std::invalid_argument("monomial needs at least one coordinate");
  bool even = coef >= 0.0;
  for (int p : powers) {
    if (p < 0) throw std::invalid_argument("monomial powers must be >= 0");
    even = even && p % 2 == 0;
  }
  FunctionModel m;
  m.id = "monomial";
  m.dim = static_cast<int>(powers.size());
  // d^order/dx^order of x^p.
  auto deriv = [](double x, int p, int order) {
    double c = 1.0;
    for (int o = 0; o < order; ++o) c *= p - o;
    return p < order ? 0.0 : c * std::pow(x, p - order);
  };
  auto product = [powers, coef, deriv](const Eigen::VectorXd& x, const std::vector<int>& orders) {
    double out = coef;
    for (std::size_t i = 0; i < powers.size(); ++i) out *= deriv(x[i], powers[i], orders[i]);
    return out;
  };
  const std::size_t k = powers.size();
  m.value = [product, k](const Eigen::VectorXd& x) { return product(x, std::vector<int>(k, 0)); };
  m.gradient = [product, k](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd g(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<int> orders(k, 0);
      orders[i] = 1;
      g[i] = product(x, orders);
    }
    return g;
  };
  m.hessian = [product, k](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd h(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        std::vector<int> orders(k, 0);
        ++orders[i];
        ++orders[j];
        h(i, j) = product(x, orders);
      }
    return h;
  };
  m.laplacian = [h = m.hessian](const Eigen::VectorXd& x) { return h(x).trace(); };
  m.shape = LogShape::Unknown;
  m.nonnegative = even;
  m.growth_certified = true;
  m.spec = {{"kind", "builtin"}, {"name", m.id}, {"params", {{"powers", powers}, {"coef", coef}}}};
  return m;
}

std::vector<GaussExpFunction> random_gauss_exp(const RandomGaussExpOptions& options) {
  if (options.count < 0 || options.k_min < 1 || options.k_max < options.k_min)
    throw std::invalid_argument("invalid random_gauss_exp options");
  NormalEngine engine(options.seed, 0x5eed);
  std::vector<GaussExpFunction> out;
  out.reserve(options.count);
  for (int idx = 0; idx < options.count; ++idx) {
    const int span = options.k_max - options.k_min + 1;
    const int k = options.k_min + std::min(span - 1, static_cast<int>(engine.uniform() * span));

    Eigen::MatrixXd gauss(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) gauss(i, j) = engine.normal();
    const Eigen::MatrixXd rotation = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();
    Eigen::VectorXd eig(k);
    for (int i = 0; i < k; ++i) eig[i] = options.eig_lo + (options.eig_hi - options.eig_lo) * engine.uniform();
    Eigen::MatrixXd quad = rotation * eig.asDiagonal() * rotation.transpose();
    quad = 0.5 * (quad + quad.transpose()).eval();
    if (idx < options.affine) quad.setZero();

    Eigen::VectorXd dir(k);
    for (int i = 0; i < k; ++i) dir[i] = engine.normal();
    const double radius = options.a_max * std::pow(engine.uniform(), 1.0 / k);
    const Eigen::VectorXd lin = radius * dir.normalized();
    const double c = options.c_max * (2.0 * engine.uniform() - 1.0);
    out.emplace_back(std::move(quad), lin, c);
  }
  return out;
}

FunctionModel model_from_json(const nlohmann::json& doc) {
  const std::string kind = doc.value("kind", "gauss_exp");
  FunctionModel m;
  if (kind == "gauss_exp") {
    m = make_model(gauss_exp_from_json(doc), "gauss_exp");
  } else if (kind == "builtin") {
    m = builtin_from_json(doc.at("name").get<std::string>(), doc.value("params", nlohmann::json::object()));
  } else if (kind == "truncate") {
    m = truncate(model_from_json(doc.at("of")), doc.at("radius").get<double>());
  } else {
    throw std::invalid_argument("unknown function kind '" + kind + "'");
  }
  if (doc.contains("id")) m.id = doc.at("id").get<std::string>();
  return m;
}

std::vector<FunctionModel> expand_catalog(const nlohmann::json& entries) {
  std::vector<FunctionModel> out;
  if (entries.is_null()) return out;
  if (!entries.is_array()) throw std::invalid_argument("catalog must be an array");
  for (const auto& doc : entries) {
    if (doc.value("kind", "") != "random_gauss_exp") {
      out.push_back(model_from_json(doc));
      continue;
    }
    RandomGaussExpOptions opt;
    opt.count = doc.value("count", 1);
    opt.seed = doc.value("seed", std::uint64_t{0});
    opt.k_min = doc.value("k_min", opt.k_min);
    opt.k_max = doc.value("k_max", opt.k_max);
    opt.eig_lo = doc.value("eig_lo", opt.eig_lo);
    opt.eig_hi = doc.value("eig_hi", opt.eig_hi);
    opt.a_max = doc.value("a_max", opt.a_max);
    opt.c_max = doc.value("c_max", opt.c_max);
    opt.affine = doc.value("affine", 0);
    opt.id_prefix = doc.value("id_prefix", std::string("rnd"));
    int idx = 0;
    for (const auto& fn : random_gauss_exp(opt)) out.push_back(make_model(fn, opt.id_prefix + std::to_string(idx++)));
  }
  return out;
}

}  // namespace gausslm
