#pragma once

// Parameter sweeps over the verify checks.

#include "gausslm/functions.hpp"
#include "gausslm/verify.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gausslm {

struct SweepCheck {
  std::string check;
  std::vector<std::string> functions;  // empty: every catalog entry
  std::vector<double> s, t;
  std::vector<int> n, k;
  std::optional<LogShape> concavity;   // unset: the function's certified shape
};

struct SweepPlan {
  std::uint64_t seed = 0;
  Backend backend = Backend::Auto;
  std::int64_t mc_samples = 1'000'000;
  int quad_nodes = 64;
  std::string output;                  // JSON-lines path; CSV goes next to it
  std::vector<FunctionModel> catalog;
  std::vector<SweepCheck> checks;
};

/// Parses a plan document. An empty or null document gives an empty plan.
SweepPlan plan_from_json(const nlohmann::json& doc);
SweepPlan load_plan(const std::string& path);

/// Runs every (check, function, grid point) in plan order. Tasks may run
/// concurrently; each uses its task index as the random stream. Errors become
/// ERROR verdicts instead of aborting.
std::vector<InequalityVerdict> run_sweep(const SweepPlan& plan);

std::map<Status, int> count_status(const std::vector<InequalityVerdict>& verdicts);

/// Check ids understood by sweeps and the CLI.
const std::vector<std::string>& known_checks();

}  // namespace gausslm
