#pragma once

// Catalog of concrete function families and their JSON specifications:
//   {"kind": "gauss_exp", "k": 2, "A": [[1,0],[0,2]], "a": [0,0], "c": 0}
//   {"kind": "builtin", "name": "logistic", "params": {"w": [1], "b": 0}}
//   {"kind": "truncate", "radius": 4, "of": {...}}
//   {"kind": "random_gauss_exp", "count": 25, "seed": 1, "eig_lo": 0, "eig_hi": 3, ...}
// Every entry may carry an "id"; ids default to the kind (or a numbered prefix).

#include "gausslm/functions.hpp"

#include <cstdint>
#include <vector>

namespace gausslm {

/// 1{<w, x> <= b}; log-concave, not differentiable across the boundary.
FunctionModel half_space_indicator(const Eigen::VectorXd& w, double b);
/// exp(-|x|^beta / beta) on R^k, beta >= 1; log-concave.
FunctionModel convex_potential_power(int k, double beta);
/// 1 / (1 + exp(-(<w, x> + b))); log-concave.
FunctionModel logistic(const Eigen::VectorXd& w, double b);
/// cosh(<w, x> + b); log-convex.
FunctionModel cosh_ridge(const Eigen::VectorXd& w, double b);
/// coef * prod_i x_i^{p_i}; a test field for integration by parts, not necessarily >= 0.
FunctionModel monomial(const std::vector<int>& powers, double coef = 1.0);

struct RandomGaussExpOptions {
  int count = 1;
  std::uint64_t seed = 0;
  int k_min = 1;
  int k_max = 3;
  double eig_lo = -0.45;
  double eig_hi = 3.0;
  double a_max = 2.0;
  double c_max = 1.0;
  int affine = 0;  // number of leading members with A = 0
  std::string id_prefix = "rnd";
};

/// Deterministic random members of the Gauss-exponential family: A = Q diag(l) Q^T
/// with l uniform in [eig_lo, eig_hi] and Q a random rotation, |a| <= a_max, |c| <= c_max.
std::vector<GaussExpFunction> random_gauss_exp(const RandomGaussExpOptions& options);

/// Parses a single (non-generator) function document.
FunctionModel model_from_json(const nlohmann::json& doc);
/// Expands a catalog array; generator entries produce several models.
std::vector<FunctionModel> expand_catalog(const nlohmann::json& entries);

}  // namespace gausslm
