#pragma once

// JSON-lines and CSV serialization of verdicts.

#include "gausslm/verify.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace gausslm {

nlohmann::json estimate_to_json(const EstimateWithError& estimate);

/// {check, params, relation, lhs, rhs, slack, tol, status[, note]}.
nlohmann::json verdict_to_json(const InequalityVerdict& verdict);

/// One compact JSON document per line, in the given order.
void write_jsonl(std::ostream& out, const std::vector<InequalityVerdict>& verdicts);

/// Single header line {"timestamp": ...}. Not part of the deterministic body.
void write_timestamp_header(std::ostream& out);

/// check,params,slack,status with params as quoted compact JSON.
void write_csv_summary(std::ostream& out, const std::vector<InequalityVerdict>& verdicts);

/// Short multi-line summary for terminals.
std::string describe(const InequalityVerdict& verdict);

}  // namespace gausslm
