#pragma once

// Executable versions of the moment and entropy inequalities. Each check
// evaluates both sides with error bars and classifies the outcome.

#include "gausslm/estimate.hpp"
#include "gausslm/gaussian.hpp"

#include <json.hpp>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace gausslm {

enum class Relation { Leq, Geq, Eq };
enum class Status { Holds, Violated, Indeterminate, Vacuous, Error };

const char* to_string(Relation relation);
const char* to_string(Status status);

struct InequalityVerdict {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  EstimateWithError lhs;
  EstimateWithError rhs;
  Relation relation = Relation::Leq;
  double slack = 0.0;  // signed margin in the asserted direction
  double tolerance = 0.0;
  Status status = Status::Holds;
  std::string note;    // reason for VACUOUS / ERROR
};

/// 1e-9 (1 + |lhs| + |rhs|) + 4 sqrt(err_lhs^2 + err_rhs^2).
double combined_tolerance(const EstimateWithError& lhs, const EstimateWithError& rhs);

/// Computes slack, tolerance and status for "lhs <relation> rhs". A failure is
/// VIOLATED only when neither side comes from Monte Carlo; otherwise INDETERMINATE.
InequalityVerdict make_verdict(std::string check, nlohmann::json params, const EstimateWithError& lhs,
                               const EstimateWithError& rhs, Relation relation);
InequalityVerdict vacuous_verdict(std::string check, nlohmann::json params, Relation relation, std::string reason);
InequalityVerdict error_verdict(std::string check, nlohmann::json params, std::string reason);

/// Product of independent-looking estimates with first-order error propagation.
EstimateWithError product(std::span<const EstimateWithError> factors);

/// H(s) = E f(sqrt(s) X) against M(s) = (E f^s)^(1/s); at s = 0 f(0) against
/// the geometric mean. Direction: H >= M for (concave, s <= 1) and (convex, s >= 1),
/// H <= M otherwise. The declared concavity is not checked against the function.
InequalityVerdict check_sqrt_moment(const FunctionModel& fn, double s, LogShape concavity,
                                    const EstimateOptions& options);

/// E prod f(X_i)^(1/n) <= (E f^(p/n))^(n/p) <= E f(mean X_i), t in [0, 1].
std::array<InequalityVerdict, 2> check_chain(const FunctionModel& fn, int n, double t, int k,
                                             const EstimateOptions& options);

/// prod ||f_i||_q <= E prod f_i(X_i) <= prod ||f_i||_p for t >= 0, with p and q
/// swapped for t < 0. The Loewner relation between T and pI is recorded.
std::array<InequalityVerdict, 2> check_block_holder(std::span<const FunctionModel> fns, int n, double t, int k,
                                                    const EstimateOptions& options);

/// Ent(f) >= E<X, grad f>/2 (log-concave), <= (log-convex).
InequalityVerdict check_entropy_stein(const FunctionModel& fn, LogShape concavity, const EstimateOptions& options);
/// Ent(f) >= E Lap f / 2 (log-concave), <= (log-convex).
InequalityVerdict check_entropy_laplacian(const FunctionModel& fn, LogShape concavity,
                                          const EstimateOptions& options);

/// One equality verdict per coordinate j, E[Y_j F(Y)] = sum_i T_ji E d_i F(Y),
/// plus E<Y, grad F(Y)> = E tr(T H_F(Y)) when F is smooth.
std::vector<InequalityVerdict> check_integration_by_parts(const FunctionModel& fn, const Eigen::MatrixXd& covariance,
                                                          const EstimateOptions& options);
std::vector<InequalityVerdict> check_integration_by_parts(const FunctionModel& fn, const BlockCovariance& covariance,
                                                          const EstimateOptions& options);

/// 2E|grad f|^2 - E f^2 Lap v <= Ent(f^2) <= 2E|grad f|^2. Both verdicts carry
/// the log-Sobolev deficit 2E|grad f|^2 - Ent(f^2) in params["deficit_gap"].
std::array<InequalityVerdict, 2> check_log_sobolev_sandwich(const FunctionModel& fn, const EstimateOptions& options);

}  // namespace gausslm
