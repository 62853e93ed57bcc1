#include "gausslm/catalog.hpp"
#include "gausslm/errors.hpp"
#include "gausslm/functions.hpp"
#include "gausslm/gaussian.hpp"

#include <doctest.h>
#include <oracle.hpp>

#include <cmath>
#include <random>

using namespace gausslm;

namespace {

GaussExpFunction scalar_gauss(double A, double a = 0.0, double c = 0.0) {
  return GaussExpFunction(Eigen::MatrixXd::Constant(1, 1, A), Eigen::VectorXd::Constant(1, a), c);
}

Eigen::VectorXd point(std::mt19937_64& rng, int k, double scale = 1.5) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::VectorXd x(k);
  for (int i = 0; i < k; ++i) x[i] = nd(rng);
  return x;
}

NumericErrorKind kind_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const NumericError& e) {
    return e.kind();
  }
  FAIL("expected NumericError");
  return NumericErrorKind::Undefined;
}

std::vector<GaussExpFunction> small_family() {
  RandomGaussExpOptions opt;
  opt.count = 6;
  opt.seed = 99;
  opt.k_max = 2;
  opt.eig_lo = -0.3;
  opt.eig_hi = 2.0;
  opt.a_max = 1.0;
  opt.affine = 1;
  return random_gauss_exp(opt);
}

}  // namespace

TEST_CASE("moment M examples") {
  const GaussExpFunction f = scalar_gauss(1.0);
  CHECK(oracle_moment_M(f, 3.0) == doctest::Approx(std::pow(4.0, -1.0 / 6.0)).epsilon(1e-14));
  CHECK(oracle_moment_M(f, 3.0) == doctest::Approx(0.79370).epsilon(1e-5));
  const GaussExpFunction g = scalar_gauss(-0.5);
  CHECK(oracle_moment_M(g, 0.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  const double mean = oracle::expect1([&](double x) { return f(Eigen::VectorXd::Constant(1, x)); });
  CHECK(oracle_moment_M(f, 1.0) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("moment M errors") {
  CHECK(kind_of([] { oracle_moment_M(scalar_gauss(1.0), 0.0); }) == NumericErrorKind::Undefined);
  CHECK(kind_of([] { oracle_moment_M(scalar_gauss(-0.5), 2.0); }) == NumericErrorKind::NotIntegrable);
  CHECK(kind_of([] { oracle_scaled_mean_H(scalar_gauss(-1.0), 1.0); }) == NumericErrorKind::NotIntegrable);
}

TEST_CASE("scaled mean H examples") {
  CHECK(oracle_scaled_mean_H(scalar_gauss(1.0), 3.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(oracle_scaled_mean_H(scalar_gauss(-0.5), 0.5) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-14));
  CHECK(oracle_scaled_mean_H(scalar_gauss(1.0, 0.4, 0.7), 0.0) == doctest::Approx(std::exp(0.7)));
  for (const auto& f : small_family())
    CHECK(oracle_scaled_mean_H(f, 1.0) == doctest::Approx(oracle_moment_M(f, 1.0)).epsilon(1e-13));
}

TEST_CASE("geometric mean examples") {
  CHECK(oracle_geometric_mean(scalar_gauss(0.0, 1.7)) == doctest::Approx(1.0));
  CHECK(oracle_geometric_mean(scalar_gauss(1.0)) == doctest::Approx(0.60653).epsilon(1e-5));
  const GaussExpFunction f(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 1.0);
  CHECK(oracle_geometric_mean(f) == doctest::Approx(1.0));
  for (const auto& g : small_family()) {
    const double log_mean = g.dim() == 1
                                ? oracle::expect1([&](double x) { return std::log(g(Eigen::VectorXd::Constant(1, x))); })
                                : oracle::expect([&](const Eigen::VectorXd& x) { return std::log(g(x)); }, 2);
    CHECK(oracle_geometric_mean(g) == doctest::Approx(std::exp(log_mean)).epsilon(1e-10));
  }
}

TEST_CASE("closed forms agree with brute-force integration") {
  for (const auto& f : small_family()) {
    const int k = f.dim();
    auto E = [&](const std::function<double(const Eigen::VectorXd&)>& g) { return oracle::expect(g, k); };
    const double mass = E([&](const Eigen::VectorXd& x) { return f(x); });
    const double flogf = E([&](const Eigen::VectorXd& x) { return f(x) * -f.exponent(x); });
    CHECK(oracle_entropy(f) == doctest::Approx(flogf - mass * std::log(mass)).epsilon(1e-9));
    CHECK(oracle_stein_term(f) ==
          doctest::Approx(E([&](const Eigen::VectorXd& x) { return x.dot(f.gradient(x)); })).epsilon(1e-9));
    CHECK(oracle_dirichlet_term(f) ==
          doctest::Approx(E([&](const Eigen::VectorXd& x) { return f.gradient(x).squaredNorm(); })).epsilon(1e-9));
    CHECK(oracle_deficit_term(f) ==
          doctest::Approx(E([&](const Eigen::VectorXd& x) { return f(x) * f(x) * f.exponent_laplacian(); }))
              .epsilon(1e-9));
    CHECK(oracle_laplacian_term(f) ==
          doctest::Approx(E([&](const Eigen::VectorXd& x) { return f.laplacian(x); })).epsilon(1e-9));
    for (double s : {0.5, 2.0}) {
      if (!f.admissible(s)) continue;
      const double ms = E([&](const Eigen::VectorXd& x) { return std::pow(f(x), s); });
      CHECK(oracle_moment_M(f, s) == doctest::Approx(std::pow(ms, 1.0 / s)).epsilon(1e-9));
      const double hs = E([&](const Eigen::VectorXd& x) { return f(std::sqrt(s) * x); });
      CHECK(oracle_scaled_mean_H(f, s) == doctest::Approx(hs).epsilon(1e-9));
    }
  }
}

TEST_CASE("Gaussian expectation under a general covariance") {
  const Eigen::MatrixXd A = (Eigen::MatrixXd(2, 2) << 1.0, 0.3, 0.3, 0.5).finished();
  const GaussExpFunction f(A, Eigen::Vector2d(0.4, -0.2), 0.1);
  const Eigen::MatrixXd cov = (Eigen::MatrixXd(2, 2) << 1.0, 0.5, 0.5, 1.0).finished();
  const double brute = oracle::expect([&](const Eigen::VectorXd& x) { return f(x); }, cov);
  CHECK(gaussian_expectation(f, cov) == doctest::Approx(brute).epsilon(1e-10));
  const Eigen::MatrixXd singular = Eigen::MatrixXd::Constant(2, 2, 1.0);
  const double along = oracle::expect1([&](double z) { return f(Eigen::Vector2d(z, z)); });
  CHECK(gaussian_expectation(f, singular) == doctest::Approx(along).epsilon(1e-10));
}

TEST_CASE("entropy of the half Gaussian square") {
  const GaussExpFunction f2 = scalar_gauss(2.0);
  const double expected = std::pow(3.0, -0.5) * (-1.0 / 3.0 + std::log(3.0) / 2.0);
  CHECK(oracle_entropy(f2) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(oracle_entropy(f2) == doctest::Approx(0.12469).epsilon(1e-4));
  CHECK(oracle_entropy(scalar_gauss(0.0, 0.0, 1.3)) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("derivatives of exp(-x^2/2) at x = 2") {
  const GaussExpFunction f = scalar_gauss(1.0);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 2.0);
  CHECK(f.gradient(x)[0] == doctest::Approx(-2.0 * std::exp(-2.0)));
  CHECK(f.laplacian(x) == doctest::Approx(3.0 * std::exp(-2.0)));
  const GaussExpFunction lin = scalar_gauss(0.0, 0.8, 0.1);
  CHECK(lin.gradient(x)[0] == doctest::Approx(0.8 * lin(x)));
  CHECK(lin.exponent_laplacian() == 0.0);
}

TEST_CASE("chain rule f Lap f = |grad f|^2 - f^2 Lap v") {
  std::mt19937_64 rng(5);
  const auto family = small_family();
  for (int i = 0; i < 100; ++i) {
    const GaussExpFunction& f = family[i % family.size()];
    const Eigen::VectorXd x = point(rng, f.dim());
    const double lhs = f(x) * f.laplacian(x);
    const double rhs = f.gradient(x).squaredNorm() - f(x) * f(x) * f.exponent_laplacian();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max({std::abs(lhs), f.gradient(x).squaredNorm(), 1e-300}));
  }
}

TEST_CASE("analytic derivatives match finite differences") {
  std::mt19937_64 rng(17);
  std::vector<FunctionModel> models;
  for (const auto& f : small_family()) models.push_back(make_model(f));
  models.push_back(convex_potential_power(2, 3.0));
  models.push_back(convex_potential_power(1, 2.0));
  models.push_back(logistic(Eigen::Vector2d(1.0, -0.5), 0.2));
  models.push_back(cosh_ridge(Eigen::VectorXd::Constant(1, 0.7), 0.1));
  models.push_back(monomial({3, 1}));
  for (const auto& m : models) {
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd x = point(rng, m.dim, 1.0);
      const Eigen::VectorXd g = m.gradient(x);
      const Eigen::VectorXd fd = fd_gradient(m.value, x);
      CHECK((g - fd).norm() <= 1e-4 * std::max(1e-8, g.norm()) + 1e-9);
      if (m.laplacian) {
        const double lap = m.laplacian(x);
        CHECK(std::abs(lap - fd_laplacian(m.value, x)) <= 1e-4 * std::max(1.0, std::abs(lap)));
      }
    }
  }
}

TEST_CASE("shape classification") {
  CHECK(scalar_gauss(1.0).shape() == LogShape::Concave);
  CHECK(scalar_gauss(-0.2).shape() == LogShape::Convex);
  CHECK(scalar_gauss(0.0, 1.0).shape() == LogShape::Affine);
  const GaussExpFunction mixed(Eigen::Vector2d(1.0, -1.0).asDiagonal(), Eigen::VectorXd::Zero(2), 0.0);
  CHECK(mixed.shape() == LogShape::Unknown);
  CHECK(satisfies(LogShape::Affine, LogShape::Concave));
  CHECK(satisfies(LogShape::Affine, LogShape::Convex));
  CHECK_FALSE(satisfies(LogShape::Convex, LogShape::Concave));
}

TEST_CASE("classified shapes satisfy the midpoint inequality") {
  std::mt19937_64 rng(23);
  RandomGaussExpOptions opt;
  opt.count = 20;
  opt.seed = 4;
  const auto family = random_gauss_exp(opt);
  for (const auto& f : family) {
    const LogShape shape = f.shape();
    if (shape == LogShape::Unknown) continue;
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXd x = point(rng, f.dim()), y = point(rng, f.dim());
      const double mid = std::pow(f(0.5 * (x + y)), 2);
      const double ends = f(x) * f(y);
      if (satisfies(shape, LogShape::Concave)) CHECK(mid >= ends * (1.0 - 1e-10));
      if (satisfies(shape, LogShape::Convex)) CHECK(mid <= ends * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("asymmetric quadratic part is rejected") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  A(0, 1) = 0.5;
  CHECK_THROWS_AS(GaussExpFunction(A, Eigen::VectorXd::Zero(2), 0.0), std::invalid_argument);
}

TEST_CASE("truncation") {
  const FunctionModel f = make_model(scalar_gauss(1.0));
  const FunctionModel f1 = truncate(f, 1.0);
  CHECK(f1(Eigen::VectorXd::Constant(1, 2.0)) == 0.0);
  CHECK(f1(Eigen::VectorXd::Constant(1, 0.5)) == f(Eigen::VectorXd::Constant(1, 0.5)));
  CHECK(f1.support_radius == 1.0);
  CHECK_FALSE(f1.closed_form.has_value());
  CHECK(f1.gradient(Eigen::VectorXd::Constant(1, 3.0)).norm() == 0.0);
  const FunctionModel f2 = truncate(f, 2.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = point(rng, 1, 2.0);
    CHECK(f2(x) >= f1(x));
  }
  double previous = 0.0;
  for (double r : {1.0, 2.0, 4.0, 8.0}) {
    const double mass = oracle::expect1([&](double x) { return std::abs(x) <= r ? std::exp(-0.5 * x * x) : 0.0; });
    CHECK(mass > previous);
    previous = mass;
  }
  CHECK(previous == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
  CHECK_THROWS(truncate(f, 0.0));
}

TEST_CASE("power keeps the closed form") {
  const FunctionModel f = make_model(scalar_gauss(1.0, 0.3, 0.2));
  const FunctionModel g = power(f, 2.0);
  REQUIRE(g.closed_form.has_value());
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.7);
  CHECK(g(x) == doctest::Approx(f(x) * f(x)));
  CHECK(g.closed_form->quadratic()(0, 0) == doctest::Approx(2.0));
  const FunctionModel h = power(truncate(f, 2.0), 0.5);
  CHECK(h(x) == doctest::Approx(std::sqrt(f(x))));
  CHECK(h(Eigen::VectorXd::Constant(1, 3.0)) == 0.0);
}

TEST_CASE("catalog JSON") {
  const FunctionModel g = model_from_json({{"kind", "gauss_exp"}, {"A", {1, 2}}, {"a", {0.5, 0}}, {"c", 0.1}});
  CHECK(g.dim == 2);
  REQUIRE(g.closed_form.has_value());
  CHECK(g.closed_form->quadratic()(1, 1) == 2.0);
  const FunctionModel m = model_from_json({{"kind", "gauss_exp"}, {"k", 3}, {"A", 1}});
  CHECK(m.dim == 3);
  CHECK(m.closed_form->quadratic().isIdentity());
  const FunctionModel b = model_from_json(
      {{"kind", "builtin"}, {"id", "pot"}, {"name", "convex_potential_power"}, {"params", {{"k", 2}, {"beta", 1.5}}}});
  CHECK(b.id == "pot");
  CHECK(b.dim == 2);
  CHECK(b.shape == LogShape::Concave);
  const FunctionModel t = model_from_json({{"kind", "truncate"}, {"radius", 3}, {"of", {{"A", 1}}}});
  CHECK(t.support_radius == 3.0);
  CHECK_THROWS(model_from_json({{"kind", "nope"}}));
  CHECK_THROWS(model_from_json({{"kind", "builtin"}, {"name", "convex_potential_power"}, {"params", {{"beta", 0.5}}}}));
  const auto expanded = expand_catalog(nlohmann::json::array(
      {{{"kind", "random_gauss_exp"}, {"count", 4}, {"seed", 3}, {"id_prefix", "r"}}, {{"A", 1}, {"id", "g"}}}));
  REQUIRE(expanded.size() == 5);
  CHECK(expanded[4].id == "g");
  CHECK(expanded[0].id != expanded[1].id);
}

TEST_CASE("builtin catalog values") {
  const FunctionModel half = half_space_indicator(Eigen::Vector2d(1.0, 0.0), 0.5);
  CHECK(half(Eigen::Vector2d(0.4, 3.0)) == 1.0);
  CHECK(half(Eigen::Vector2d(0.6, 3.0)) == 0.0);
  CHECK_FALSE(half.smooth);
  const FunctionModel pot = convex_potential_power(1, 3.0);
  CHECK(pot(Eigen::VectorXd::Constant(1, 1.5)) == doctest::Approx(std::exp(-std::pow(1.5, 3) / 3)));
  CHECK(pot.exponent_laplacian(Eigen::VectorXd::Constant(1, 1.5)) == doctest::Approx(2.0 * 1.5));
  const FunctionModel cubic = monomial({3});
  CHECK(cubic(Eigen::VectorXd::Constant(1, -2.0)) == -8.0);
  CHECK_FALSE(cubic.nonnegative);
  CHECK(cosh_ridge(Eigen::VectorXd::Constant(1, 1.0), 0.0).shape == LogShape::Convex);
  CHECK(logistic(Eigen::VectorXd::Constant(1, 1.0), 0.0).shape == LogShape::Concave);
}

TEST_CASE("random family is deterministic and respects its ranges") {
  RandomGaussExpOptions opt;
  opt.count = 30;
  opt.seed = 8;
  opt.affine = 3;
  const auto a = random_gauss_exp(opt);
  const auto b = random_gauss_exp(opt);
  for (int i = 0; i < opt.count; ++i) {
    CHECK((a[i].quadratic().array() == b[i].quadratic().array()).all());
    CHECK(a[i].dim() >= 1);
    CHECK(a[i].dim() <= 3);
    CHECK(a[i].linear().norm() <= 2.0 + 1e-12);
    CHECK(std::abs(a[i].constant()) <= 1.0);
    if (i < 3) CHECK(a[i].quadratic().isZero());
    else {
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a[i].quadratic()).eigenvalues();
      CHECK(ev.minCoeff() >= -0.45 - 1e-12);
      CHECK(ev.maxCoeff() <= 3.0 + 1e-12);
    }
  }
}
