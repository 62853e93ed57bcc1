#include "gausslm/sweep.hpp"
#include "gausslm/catalog.hpp"
#include "gausslm/frames.hpp"
#include "gausslm/parallel.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace gausslm {
namespace {

template <typename T>
std::vector<T> values(const nlohmann::json& grid, const char* key) {
  if (!grid.contains(key)) return {};
  const auto& v = grid.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

using Task = std::function<std::vector<InequalityVerdict>(const EstimateOptions&)>;

struct PlannedTask {
  std::string check;
  nlohmann::json params;
  Task run;
};

LogShape resolve_concavity(const SweepCheck& check, const FunctionModel& fn) {
  if (check.concavity) return *check.concavity;
  return fn.shape;
}

std::vector<PlannedTask> expand(const SweepCheck& check, const std::vector<const FunctionModel*>& fns) {
  std::vector<PlannedTask> tasks;
  const std::vector<double> s_grid = check.s.empty() ? std::vector<double>{1.0} : check.s;
  const std::vector<double> t_grid = check.t.empty() ? std::vector<double>{0.0} : check.t;
  const std::vector<int> n_grid = check.n.empty() ? std::vector<int>{2} : check.n;

  for (const FunctionModel* fn : fns) {
    const nlohmann::json base = {{"function", fn->id}};
    const std::string& id = check.check;
    if (id == "sqrt-moment") {
      for (double s : s_grid) {
        nlohmann::json params = base;
        params["s"] = s;
        tasks.push_back({id, params, [fn, s, shape = resolve_concavity(check, *fn)](const EstimateOptions& o) {
                           return std::vector<InequalityVerdict>{check_sqrt_moment(*fn, s, shape, o)};
                         }});
      }
    } else if (id == "chain" || id == "block-holder") {
      for (int n : n_grid)
        for (double t : t_grid) {
          nlohmann::json params = base;
          params["n"] = n;
          params["t"] = t;
          tasks.push_back({id, params, [fn, n, t, id](const EstimateOptions& o) {
                             if (id == "chain") {
                               const auto pair = check_chain(*fn, n, t, fn->dim, o);
                               return std::vector<InequalityVerdict>(pair.begin(), pair.end());
                             }
                             const std::vector<FunctionModel> copies(n, *fn);
                             const auto pair = check_block_holder(copies, n, t, fn->dim, o);
                             return std::vector<InequalityVerdict>(pair.begin(), pair.end());
                           }});
        }
    } else if (id == "entropy-stein" || id == "entropy-laplacian") {
      tasks.push_back({id, base, [fn, id, shape = resolve_concavity(check, *fn)](const EstimateOptions& o) {
                         return std::vector<InequalityVerdict>{id == "entropy-stein"
                                                                   ? check_entropy_stein(*fn, shape, o)
                                                                   : check_entropy_laplacian(*fn, shape, o)};
                       }});
    } else if (id == "integration-by-parts") {
      const bool blocked = !check.t.empty();
      for (int n : n_grid)
        for (double t : t_grid) {
          nlohmann::json params = base;
          if (blocked) params.update({{"n", n}, {"t", t}});
          tasks.push_back({id, params, [fn, n, t, blocked](const EstimateOptions& o) {
                             if (!blocked)
                               return check_integration_by_parts(*fn, Eigen::MatrixXd::Identity(fn->dim, fn->dim), o);
                             if (fn->dim % n != 0)
                               throw std::invalid_argument("function dimension is not a multiple of n");
                             auto out = check_integration_by_parts(*fn, build_block_covariance(n, fn->dim / n, t), o);
                             for (auto& v : out) v.params.update({{"n", n}, {"t", t}});
                             return out;
                           }});
          if (!blocked) break;
        }
    } else if (id == "log-sobolev") {
      tasks.push_back({id, base, [fn](const EstimateOptions& o) {
                         const auto pair = check_log_sobolev_sandwich(*fn, o);
                         return std::vector<InequalityVerdict>(pair.begin(), pair.end());
                       }});
    } else {
      throw std::invalid_argument("unknown check '" + id + "'");
    }
  }
  return tasks;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> ids = {"sqrt-moment",       "chain",
                                               "block-holder",      "entropy-stein",
                                               "entropy-laplacian", "integration-by-parts",
                                               "log-sobolev"};
  return ids;
}

SweepPlan plan_from_json(const nlohmann::json& doc) {
  SweepPlan plan;
  if (doc.is_null() || doc.empty()) return plan;
  if (!doc.is_object()) throw std::invalid_argument("plan must be a JSON object");
  plan.seed = doc.value("seed", std::uint64_t{0});
  plan.backend = backend_from_string(doc.value("backend", std::string("auto")));
  plan.output = doc.value("output", std::string());
  if (doc.contains("budgets")) {
    const auto& b = doc.at("budgets");
    plan.mc_samples = b.value("mc_samples", plan.mc_samples);
    plan.quad_nodes = b.value("quad_nodes", plan.quad_nodes);
  }
  if (plan.mc_samples < 100 || plan.quad_nodes < 2) throw std::invalid_argument("budgets are too small");
  if (doc.contains("catalog")) plan.catalog = expand_catalog(doc.at("catalog"));

  for (const auto& entry : doc.value("checks", nlohmann::json::array())) {
    SweepCheck check;
    check.check = entry.at("check").get<std::string>();
    const auto& ids = known_checks();
    if (std::find(ids.begin(), ids.end(), check.check) == ids.end())
      throw std::invalid_argument("unknown check '" + check.check + "'");
    const nlohmann::json functions = entry.value("functions", nlohmann::json("all"));
    if (functions.is_array()) check.functions = functions.get<std::vector<std::string>>();
    else if (functions != "all") check.functions = {functions.get<std::string>()};
    const nlohmann::json grid = entry.value("grid", nlohmann::json::object());
    check.s = values<double>(grid, "s");
    check.t = values<double>(grid, "t");
    check.n = values<int>(grid, "n");
    check.k = values<int>(grid, "k");
    const std::string concavity = entry.value("concavity", std::string("auto"));
    if (concavity != "auto") check.concavity = log_shape_from_string(concavity);
    for (double s : check.s)
      if (s < 0.0) throw std::invalid_argument("grid value s must be >= 0");
    for (int n : check.n)
      if (n < 2) throw std::invalid_argument("grid value n must be >= 2");
    plan.checks.push_back(std::move(check));
  }
  return plan;
}

SweepPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open plan '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  return plan_from_json(nlohmann::json::parse(text));
}

std::vector<InequalityVerdict> run_sweep(const SweepPlan& plan) {
  std::vector<PlannedTask> tasks;
  for (const auto& check : plan.checks) {
    std::vector<const FunctionModel*> fns;
    if (check.functions.empty()) {
      for (const auto& fn : plan.catalog) fns.push_back(&fn);
    } else {
      for (const auto& name : check.functions) {
        auto it = std::find_if(plan.catalog.begin(), plan.catalog.end(),
                               [&](const FunctionModel& fn) { return fn.id == name; });
        if (it == plan.catalog.end()) {
          tasks.push_back({check.check, {{"function", name}}, [name](const EstimateOptions&) -> std::vector<InequalityVerdict> {
                             throw std::invalid_argument("function '" + name + "' is not in the catalog");
                           }});
          continue;
        }
        fns.push_back(&*it);
      }
    }
    for (auto& task : expand(check, fns)) tasks.push_back(std::move(task));
  }

  std::vector<std::vector<InequalityVerdict>> results(tasks.size());
  parallel_for(static_cast<std::int64_t>(tasks.size()), [&](std::int64_t i) {
    EstimateOptions options;
    options.backend = plan.backend;
    options.seed = plan.seed;
    options.stream = static_cast<std::uint64_t>(i);
    options.samples = plan.mc_samples;
    options.nodes = plan.quad_nodes;
    try {
      results[i] = tasks[i].run(options);
    } catch (const std::exception& e) {
      results[i] = {error_verdict(tasks[i].check, tasks[i].params, e.what())};
    }
  });

  std::vector<InequalityVerdict> out;
  for (auto& r : results)
    for (auto& v : r) out.push_back(std::move(v));
  return out;
}

std::map<Status, int> count_status(const std::vector<InequalityVerdict>& verdicts) {
  std::map<Status, int> counts;
  for (Status s : {Status::Holds, Status::Violated, Status::Indeterminate, Status::Vacuous, Status::Error})
    counts[s] = 0;
  for (const auto& v : verdicts) ++counts[v.status];
  return counts;
}

}  // namespace gausslm
