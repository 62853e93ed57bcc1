#include "gausslm/verify.hpp"
#include "gausslm/errors.hpp"
#include "gausslm/frames.hpp"
#include "gausslm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gausslm {
namespace {

EstimateOptions substream(const EstimateOptions& options, std::uint64_t index) {
  EstimateOptions out = options;
  out.stream = (options.stream << 4) + index;
  return out;
}

EstimateWithError scaled(EstimateWithError est, double factor) {
  est.value *= factor;
  est.error *= std::abs(factor);
  return est;
}

/// a + sign * b with independent errors.
EstimateWithError combine(const EstimateWithError& a, const EstimateWithError& b, double sign) {
  EstimateWithError out;
  out.value = a.value + sign * b.value;
  out.error = std::hypot(a.error, b.error);
  out.method = std::max(a.method, b.method);
  out.count = a.count + b.count;
  return out;
}

bool deterministic(const EstimateWithError& e) { return e.method != Method::MonteCarlo; }

LogShape direction_of(LogShape concavity) {
  if (concavity == LogShape::Affine) return LogShape::Concave;
  if (concavity != LogShape::Concave && concavity != LogShape::Convex)
    throw std::invalid_argument("concavity must be log_concave or log_convex");
  return concavity;
}

nlohmann::json base_params(const FunctionModel& fn) {
  return {{"function", fn.id}, {"k", fn.dim}, {"certified_shape", to_string(fn.shape)}};
}

}  // namespace

const char* to_string(Relation relation) {
  switch (relation) {
    case Relation::Leq: return "LEQ";
    case Relation::Geq: return "GEQ";
    case Relation::Eq: return "EQ";
  }
  return "LEQ";
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Holds: return "HOLDS";
    case Status::Violated: return "VIOLATED";
    case Status::Indeterminate: return "INDETERMINATE";
    case Status::Vacuous: return "VACUOUS";
    case Status::Error: return "ERROR";
  }
  return "ERROR";
}

double combined_tolerance(const EstimateWithError& lhs, const EstimateWithError& rhs) {
  return 1e-9 * (1.0 + std::abs(lhs.value) + std::abs(rhs.value)) + 4.0 * std::hypot(lhs.error, rhs.error);
}

InequalityVerdict make_verdict(std::string check, nlohmann::json params, const EstimateWithError& lhs,
                               const EstimateWithError& rhs, Relation relation) {
  InequalityVerdict v;
  v.check = std::move(check);
  v.params = std::move(params);
  v.lhs = lhs;
  v.rhs = rhs;
  v.relation = relation;
  switch (relation) {
    case Relation::Leq: v.slack = rhs.value - lhs.value; break;
    case Relation::Geq: v.slack = lhs.value - rhs.value; break;
    case Relation::Eq: v.slack = -std::abs(lhs.value - rhs.value); break;
  }
  v.tolerance = combined_tolerance(lhs, rhs);
  if (v.slack >= -v.tolerance)
    v.status = Status::Holds;
  else if (deterministic(lhs) && deterministic(rhs))
    v.status = Status::Violated;
  else
    v.status = Status::Indeterminate;
  return v;
}

InequalityVerdict vacuous_verdict(std::string check, nlohmann::json params, Relation relation, std::string reason) {
  InequalityVerdict v;
  v.check = std::move(check);
  v.params = std::move(params);
  v.relation = relation;
  v.status = Status::Vacuous;
  v.note = std::move(reason);
  return v;
}

InequalityVerdict error_verdict(std::string check, nlohmann::json params, std::string reason) {
  InequalityVerdict v;
  v.check = std::move(check);
  v.params = std::move(params);
  v.status = Status::Error;
  v.note = std::move(reason);
  return v;
}

EstimateWithError product(std::span<const EstimateWithError> factors) {
  EstimateWithError out{1.0, Method::ClosedForm, 0.0, 0};
  double variance = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    double others = 1.0;
    for (std::size_t j = 0; j < factors.size(); ++j)
      if (j != i) others *= factors[j].value;
    variance += std::pow(factors[i].error * others, 2);
    out.value *= factors[i].value;
    out.method = std::max(out.method, factors[i].method);
    out.count += factors[i].count;
  }
  out.error = std::sqrt(variance);
  return out;
}

InequalityVerdict check_sqrt_moment(const FunctionModel& fn, double s, LogShape concavity,
                                    const EstimateOptions& options) {
  if (s < 0.0) throw std::invalid_argument("sqrt-moment check needs s >= 0");
  const LogShape dir = direction_of(concavity);
  nlohmann::json params = base_params(fn);
  params["s"] = s;
  params["concavity"] = to_string(dir);
  const bool concave = dir == LogShape::Concave;
  const Relation rel = (concave && s <= 1.0) || (!concave && s >= 1.0) ? Relation::Geq : Relation::Leq;
  try {
    const EstimateWithError h = scaled_mean_H(fn, s, substream(options, 1));
    const EstimateWithError m = s == 0.0 ? geometric_mean(fn, substream(options, 2))
                                         : moment_M(fn, s, substream(options, 2));
    return make_verdict("sqrt-moment", std::move(params), h, m, rel);
  } catch (const NumericError& e) {
    return vacuous_verdict("sqrt-moment", std::move(params), rel, std::string(to_string(e.kind())) + ": " + e.what());
  }
}

std::array<InequalityVerdict, 2> check_chain(const FunctionModel& fn, int n, double t, int k,
                                             const EstimateOptions& options) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("chain check needs t in [0, 1]");
  if (fn.dim != k) throw std::invalid_argument("function '" + fn.id + "' is not defined on R^k");
  const CorrelationFrame frame = build_correlation_frame(build_sr_simplex(n), t);
  nlohmann::json params = base_params(fn);
  params.update({{"n", n}, {"t", t}, {"p", frame.p}});
  try {
    const std::vector<FunctionModel> roots(n, power(fn, 1.0 / n));
    const EstimateWithError left = correlated_product_mean(roots, frame, k, substream(options, 1));
    const EstimateWithError middle = moment_M(fn, frame.p / n, substream(options, 2));
    const EstimateWithError right = mean_of_average(fn, frame, k, substream(options, 3));
    return {make_verdict("chain-left", params, left, middle, Relation::Leq),
            make_verdict("chain-right", params, middle, right, Relation::Leq)};
  } catch (const NumericError& e) {
    const std::string reason = std::string(to_string(e.kind())) + ": " + e.what();
    return {vacuous_verdict("chain-left", params, Relation::Leq, reason),
            vacuous_verdict("chain-right", params, Relation::Leq, reason)};
  }
}

std::array<InequalityVerdict, 2> check_block_holder(std::span<const FunctionModel> fns, int n, double t, int k,
                                                    const EstimateOptions& options) {
  if (static_cast<int>(fns.size()) != n) throw std::invalid_argument("block-holder check needs n functions");
  const CorrelationFrame frame = build_correlation_frame(build_sr_simplex(n), t);
  const BlockCovariance cov = build_block_covariance(n, k, t);
  const int dim = n * k;
  const PsdOrder order = psd_order(cov.matrix, frame.p * Eigen::MatrixXd::Identity(dim, dim));
  const bool expected = t >= 0.0 ? (order == PsdOrder::LessEq || order == PsdOrder::Equal)
                                 : (order == PsdOrder::GreaterEq || order == PsdOrder::Equal);

  nlohmann::json params = {{"n", n}, {"t", t}, {"k", k}, {"p", frame.p}, {"q", frame.q}};
  std::vector<std::string> ids;
  for (const auto& fn : fns) ids.push_back(fn.id);
  params["functions"] = ids;
  params["T_vs_pI"] = to_string(order);
  params["precondition_ok"] = expected;
  try {
    std::vector<EstimateWithError> by_p, by_q;
    for (std::size_t i = 0; i < fns.size(); ++i) {
      by_p.push_back(moment_or_geometric(fns[i], frame.p, substream(options, 2 + 2 * i)));
      by_q.push_back(moment_or_geometric(fns[i], frame.q, substream(options, 3 + 2 * i)));
    }
    const EstimateWithError middle = correlated_product_mean(fns, frame, k, substream(options, 1));
    const EstimateWithError norm_p = product(by_p);
    const EstimateWithError norm_q = product(by_q);
    const EstimateWithError& low = t >= 0.0 ? norm_q : norm_p;
    const EstimateWithError& high = t >= 0.0 ? norm_p : norm_q;
    return {make_verdict("block-holder-lower", params, low, middle, Relation::Leq),
            make_verdict("block-holder-upper", params, middle, high, Relation::Leq)};
  } catch (const NumericError& e) {
    const std::string reason = std::string(to_string(e.kind())) + ": " + e.what();
    return {vacuous_verdict("block-holder-lower", params, Relation::Leq, reason),
            vacuous_verdict("block-holder-upper", params, Relation::Leq, reason)};
  }
}

namespace {

InequalityVerdict entropy_check(const std::string& id, const FunctionModel& fn, LogShape concavity,
                                const EstimateOptions& options, bool use_laplacian) {
  const LogShape dir = direction_of(concavity);
  nlohmann::json params = base_params(fn);
  params["concavity"] = to_string(dir);
  const Relation rel = dir == LogShape::Concave ? Relation::Geq : Relation::Leq;
  if (!fn.smooth) return vacuous_verdict(id, std::move(params), rel, "function is not differentiable");
  if (use_laplacian && !fn.growth_certified)
    return vacuous_verdict(id, std::move(params), rel, "growth condition not certified");
  try {
    const EstimateWithError ent = entropy(fn, substream(options, 1));
    const EstimateWithError term =
        use_laplacian ? laplacian_term(fn, substream(options, 2)) : stein_term(fn, substream(options, 2));
    return make_verdict(id, std::move(params), ent, scaled(term, 0.5), rel);
  } catch (const NumericError& e) {
    return vacuous_verdict(id, std::move(params), rel, std::string(to_string(e.kind())) + ": " + e.what());
  }
}

}  // namespace

InequalityVerdict check_entropy_stein(const FunctionModel& fn, LogShape concavity, const EstimateOptions& options) {
  return entropy_check("entropy-stein", fn, concavity, options, false);
}

InequalityVerdict check_entropy_laplacian(const FunctionModel& fn, LogShape concavity,
                                          const EstimateOptions& options) {
  return entropy_check("entropy-laplacian", fn, concavity, options, true);
}

std::vector<InequalityVerdict> check_integration_by_parts(const FunctionModel& fn, const Eigen::MatrixXd& covariance,
                                                          const EstimateOptions& options) {
  if (covariance.rows() != fn.dim || covariance.cols() != fn.dim)
    throw std::invalid_argument("covariance dimension does not match '" + fn.id + "'");
  if (min_eigenvalue(covariance) < -1e-10) throw std::invalid_argument("covariance is not positive semi-definite");
  std::vector<InequalityVerdict> out;
  for (int j = 0; j <= fn.dim; ++j) {
    const bool trace_form = j == fn.dim;
    nlohmann::json params = base_params(fn);
    params["form"] = trace_form ? "trace" : "coordinate";
    if (!trace_form) params["coordinate"] = j;
    const std::string id = trace_form ? "integration-by-parts-trace" : "integration-by-parts";
    if (!fn.growth_certified || !fn.smooth) {
      out.push_back(vacuous_verdict(id, std::move(params), Relation::Eq, "growth condition not certified"));
      continue;
    }
    try {
      const auto [lhs, rhs] = trace_form ? stein_trace_sides(fn, covariance, substream(options, 1 + j))
                                         : integration_by_parts_sides(fn, covariance, j, substream(options, 1 + j));
      out.push_back(make_verdict(id, std::move(params), lhs, rhs, Relation::Eq));
    } catch (const NumericError& e) {
      out.push_back(
          vacuous_verdict(id, std::move(params), Relation::Eq, std::string(to_string(e.kind())) + ": " + e.what()));
    }
  }
  return out;
}

std::vector<InequalityVerdict> check_integration_by_parts(const FunctionModel& fn, const BlockCovariance& covariance,
                                                          const EstimateOptions& options) {
  return check_integration_by_parts(fn, covariance.matrix, options);
}

std::array<InequalityVerdict, 2> check_log_sobolev_sandwich(const FunctionModel& fn, const EstimateOptions& options) {
  nlohmann::json params = base_params(fn);
  if (!fn.smooth) {
    return {vacuous_verdict("log-sobolev-lower", params, Relation::Leq, "function is not differentiable"),
            vacuous_verdict("log-sobolev-upper", params, Relation::Leq, "function is not differentiable")};
  }
  try {
    const EstimateWithError ent = entropy(power(fn, 2.0), substream(options, 1));
    const EstimateWithError upper = scaled(dirichlet_term(fn, substream(options, 2)), 2.0);
    const EstimateWithError lower = combine(upper, deficit_term(fn, substream(options, 3)), -1.0);
    params["deficit_gap"] = upper.value - ent.value;
    return {make_verdict("log-sobolev-lower", params, lower, ent, Relation::Leq),
            make_verdict("log-sobolev-upper", params, ent, upper, Relation::Leq)};
  } catch (const NumericError& e) {
    const std::string reason = std::string(to_string(e.kind())) + ": " + e.what();
    return {vacuous_verdict("log-sobolev-lower", params, Relation::Leq, reason),
            vacuous_verdict("log-sobolev-upper", params, Relation::Leq, reason)};
  }
}

}  // namespace gausslm
