#include "gausslm/cli.hpp"
#include "gausslm/catalog.hpp"
#include "gausslm/frames.hpp"
#include "gausslm/gaussian.hpp"
#include "gausslm/linalg.hpp"
#include "gausslm/report.hpp"
#include "gausslm/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gausslm {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Splits on commas outside brackets.
std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) parts.push_back(current);
  return parts;
}

/// A JSON matrix, or whitespace separated rows of numbers.
nlohmann::json matrix_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
  }
  nlohmann::json rows = nlohmann::json::array();
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::vector<double> row;
    double x;
    while (cells >> x) row.push_back(x);
    if (!row.empty()) rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("matrix file '" + path + "' is empty");
  return rows;
}

nlohmann::json parse_value(const std::string& text) {
  if (!text.empty() && text[0] == '@') return matrix_file(text.substr(1));
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    return text;
  }
}

std::vector<std::pair<std::string, nlohmann::json>> key_values(const std::vector<std::string>& parts,
                                                               const std::string& spec) {
  std::vector<std::pair<std::string, nlohmann::json>> out;
  for (const auto& part : parts) {
    const auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("malformed function spec '" + spec + "'");
    out.emplace_back(part.substr(0, eq), parse_value(part.substr(eq + 1)));
  }
  return out;
}

Backend parse_backend(const std::string& name) { return backend_from_string(name); }

void print_matrix_columns(std::ostream& out, const std::string& label, const Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out << "  " << label << c + 1 << " = (";
    for (Eigen::Index r = 0; r < m.rows(); ++r) out << (r ? ", " : "") << std::fixed << std::setprecision(5) << m(r, c);
    out << ")\n";
  }
  out.unsetf(std::ios::fixed);
}

std::string spectrum_text(const std::vector<EigenvalueCluster>& clusters) {
  std::ostringstream s;
  s << '{';
  for (std::size_t i = clusters.size(); i-- > 0;) {
    s << std::setprecision(10) << clusters[i].value << " (x" << clusters[i].multiplicity << ")";
    if (i) s << ", ";
  }
  s << '}';
  return s.str();
}

int cmd_frames(int n, double t, int k, bool json, std::ostream& out) {
  const CorrelationFrame frame = build_correlation_frame(build_sr_simplex(n), t);
  const BlockDecomposition decomp = identity_decomposition(frame);
  const BlockDecomposition lifted = tensor_lift(decomp, k);
  const BlockCovariance cov = build_block_covariance(n, k, t);
  const double residual = std::max({simplex_residual(frame.simplex), frame_residual(frame), decomp.residual(),
                                    lifted.residual(), lifted.orthonormality_residual(),
                                    lift_identity_residuals(frame, k).max()});
  const auto clusters = cluster_spectrum(symmetric_eigenvalues(cov.matrix));
  if (json) {
    nlohmann::json doc = frame_to_json(frame, decomp);
    doc["k"] = k;
    doc["residual"] = residual;
    nlohmann::json spectrum = nlohmann::json::array();
    for (auto it = clusters.rbegin(); it != clusters.rend(); ++it)
      spectrum.push_back({{"value", it->value}, {"multiplicity", it->multiplicity}});
    doc["spectrum"] = spectrum;
    out << doc.dump(2) << '\n';
  } else {
    out << "correlation frame n=" << n << " t=" << t << " k=" << k << " (p=" << frame.p << ", q=" << frame.q << ")\n";
    out << "simplex vertices:\n";
    print_matrix_columns(out, "v", frame.simplex.vertices);
    out << "frame vectors:\n";
    print_matrix_columns(out, "u", frame.u);
    out << "decomposition of the identity:\n";
    for (const auto& term : decomp.terms) out << "  " << std::setprecision(10) << term.coefficient << " * " << term.label << '\n';
    out << "residual: " << std::setprecision(3) << residual << '\n';
    out << "spectrum of T: " << spectrum_text(clusters) << '\n';
  }
  return residual < kFrameTolerance ? kExitHolds : kExitViolated;
}

int cmd_sample(int n, double t, int k, std::int64_t count, std::uint64_t seed, const std::string& method,
               const std::string& path, std::ostream& out) {
  const GaussianSampler sampler(seed, 0, n * k);
  CorrelatedSample sample;
  if (method == "frame")
    sample = sample_correlated_frame(build_correlation_frame(build_sr_simplex(n), t), k, sampler, count);
  else if (method == "mixture")
    sample = sample_correlated_mixture(t, n, k, sampler, count);
  else
    throw std::invalid_argument("unknown sampling method '" + method + "'");
  if (path.empty()) {
    write_samples_csv(out, sample);
    return kExitHolds;
  }
  std::ofstream file(path);
  if (!file) throw std::invalid_argument("cannot write '" + path + "'");
  write_samples_csv(file, sample);
  return kExitHolds;
}

struct CheckArgs {
  std::string id;
  std::vector<std::string> fns;
  std::optional<double> s, q, t;
  int n = 2;
  std::optional<int> k;
  std::string concavity = "auto";
};

std::vector<InequalityVerdict> run_check(const CheckArgs& args, const EstimateOptions& options) {
  if (args.fns.empty()) throw std::invalid_argument("--fn is required");
  std::vector<FunctionModel> fns;
  for (const auto& spec : args.fns) fns.push_back(parse_function_spec(spec));
  const FunctionModel& fn = fns.front();
  if (args.k && *args.k != fn.dim)
    throw std::invalid_argument("--k does not match the dimension of '" + fn.id + "'");
  const LogShape shape = args.concavity == "auto" ? fn.shape : log_shape_from_string(args.concavity);
  const double t = args.t.value_or(0.0);

  if (args.id == "sqrt-moment") {
    if (args.s && args.q) throw std::invalid_argument("give only one of --s and --q");
    const double s = args.s ? *args.s : args.q.value_or(1.0);
    return {check_sqrt_moment(fn, s, shape, options)};
  }
  if (args.id == "chain") {
    const auto pair = check_chain(fn, args.n, t, fn.dim, options);
    return {pair.begin(), pair.end()};
  }
  if (args.id == "block-holder") {
    if (fns.size() == 1) fns.assign(args.n, fn);
    for (const auto& f : fns)
      if (f.dim != fn.dim) throw std::invalid_argument("block-holder functions must share a dimension");
    const auto pair = check_block_holder(fns, args.n, t, fn.dim, options);
    return {pair.begin(), pair.end()};
  }
  if (args.id == "entropy-stein") return {check_entropy_stein(fn, shape, options)};
  if (args.id == "entropy-laplacian") return {check_entropy_laplacian(fn, shape, options)};
  if (args.id == "integration-by-parts") {
    if (!args.t) return check_integration_by_parts(fn, Eigen::MatrixXd::Identity(fn.dim, fn.dim), options);
    if (fn.dim % args.n != 0) throw std::invalid_argument("function dimension is not a multiple of --n");
    return check_integration_by_parts(fn, build_block_covariance(args.n, fn.dim / args.n, t), options);
  }
  if (args.id == "log-sobolev") {
    const auto pair = check_log_sobolev_sandwich(fn, options);
    return {pair.begin(), pair.end()};
  }
  throw std::invalid_argument("unknown check '" + args.id + "'");
}

std::string csv_path_for(const std::string& jsonl) {
  std::filesystem::path p(jsonl);
  p.replace_extension(".csv");
  return p.string();
}

int cmd_sweep(SweepPlan plan, bool timestamp, std::ostream& out, std::ostream& err) {
  const std::vector<InequalityVerdict> verdicts = run_sweep(plan);
  if (plan.output.empty()) {
    if (timestamp) write_timestamp_header(out);
    write_jsonl(out, verdicts);
  } else {
    std::ofstream report(plan.output);
    if (!report) throw std::invalid_argument("cannot write '" + plan.output + "'");
    if (timestamp) write_timestamp_header(report);
    write_jsonl(report, verdicts);
    std::ofstream csv(csv_path_for(plan.output));
    write_csv_summary(csv, verdicts);
  }
  const auto counts = count_status(verdicts);
  err << "verdicts: " << verdicts.size();
  for (const auto& [status, count] : counts) err << ", " << to_string(status) << ' ' << count;
  err << '\n';
  for (const auto& v : verdicts)
    if (v.status == Status::Violated) err << "VIOLATED " << v.check << ' ' << v.params.dump() << '\n';
  return counts.at(Status::Violated) > 0 ? kExitViolated : kExitHolds;
}

}  // namespace

int exit_code(const std::vector<InequalityVerdict>& verdicts) {
  auto any = [&](Status s) {
    return std::any_of(verdicts.begin(), verdicts.end(), [s](const InequalityVerdict& v) { return v.status == s; });
  };
  if (any(Status::Error)) return kExitInvalid;
  if (any(Status::Violated)) return kExitViolated;
  if (any(Status::Indeterminate)) return kExitIndeterminate;
  if (any(Status::Vacuous)) return kExitVacuous;
  return kExitHolds;
}

FunctionModel parse_function_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = colon == std::string::npos ? "" : spec.substr(0, colon);
  if (head == "gauss") {
    nlohmann::json doc = {{"kind", "gauss_exp"}};
    for (auto& [key, value] : key_values(split_top_level(spec.substr(colon + 1)), spec)) {
      if (key != "A" && key != "a" && key != "c" && key != "k")
        throw std::invalid_argument("unknown key '" + key + "' in '" + spec + "'");
      doc[key] = value;
    }
    FunctionModel m = model_from_json(doc);
    m.id = spec;
    return m;
  }
  if (head == "builtin") {
    std::vector<std::string> parts = split_top_level(spec.substr(colon + 1));
    if (parts.empty()) throw std::invalid_argument("builtin spec needs a name");
    const std::string name = parts.front();
    parts.erase(parts.begin());
    nlohmann::json params = nlohmann::json::object();
    for (auto& [key, value] : key_values(parts, spec)) params[key] = value;
    FunctionModel m = model_from_json({{"kind", "builtin"}, {"name", name}, {"params", params}});
    m.id = spec;
    return m;
  }
  const std::string path = !spec.empty() && spec[0] == '@' ? spec.substr(1) : spec;
  if (!std::filesystem::exists(path)) throw std::invalid_argument("unrecognised function spec '" + spec + "'");
  const auto doc = nlohmann::json::parse(read_file(path));
  return model_from_json(doc);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks of Gaussian moment and entropy inequalities", "gausslm"};
  app.require_subcommand(1);

  int n = 2, k = 1;
  double t = 0.0;
  bool json = false;

  auto* frames = app.add_subcommand("frames", "Build a correlation frame and its decomposition of the identity");
  frames->add_option("--n", n, "Number of frame vectors")->required();
  frames->add_option("--t", t, "Pairwise correlation");
  frames->add_option("--k", k, "Block dimension");
  frames->add_flag("--json", json, "Print the frame as JSON");

  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  std::string method = "frame", out_path;
  auto* sample = app.add_subcommand("sample", "Draw correlated Gaussian vectors as CSV");
  sample->add_option("--n", n)->required();
  sample->add_option("--t", t);
  sample->add_option("--k", k);
  sample->add_option("--samples", samples);
  sample->add_option("--seed", seed);
  sample->add_option("--method", method, "frame or mixture");
  sample->add_option("--out", out_path);

  CheckArgs check_args;
  std::string backend = "auto";
  std::optional<std::int64_t> mc_samples;
  std::optional<int> nodes;
  auto* check = app.add_subcommand("check", "Run one inequality check");
  check->add_option("id", check_args.id, "sqrt-moment, chain, block-holder, entropy-stein, entropy-laplacian, "
                                         "integration-by-parts or log-sobolev")
      ->required();
  check->add_option("--fn", check_args.fns, "Function spec (repeatable for block-holder)");
  check->add_option("--s", check_args.s);
  check->add_option("--q", check_args.q, "Same as --s");
  check->add_option("--t", check_args.t);
  check->add_option("--n", check_args.n);
  check->add_option("--k", check_args.k);
  check->add_option("--concavity", check_args.concavity, "auto, log_concave or log_convex");
  check->add_option("--backend", backend, "auto, closed, quad or mc");
  check->add_option("--seed", seed);
  check->add_option("--samples", mc_samples);
  check->add_option("--nodes", nodes);
  check->add_flag("--json", json, "Print JSON lines");
  check->add_option("--out", out_path, "Also write JSON lines here");

  std::string plan_path;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<std::string> sweep_backend;
  bool timestamp = false;
  auto* sweep = app.add_subcommand("sweep", "Run a sweep plan");
  sweep->add_option("plan", plan_path)->required();
  sweep->add_option("--out", out_path, "JSON-lines report path (overrides the plan)");
  sweep->add_option("--seed", sweep_seed);
  sweep->add_option("--backend", sweep_backend);
  sweep->add_option("--samples", mc_samples);
  sweep->add_option("--nodes", nodes);
  sweep->add_flag("--timestamp", timestamp, "Prefix the report with a timestamp line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (*frames) return cmd_frames(n, t, k, json, out);
    if (*sample) return cmd_sample(n, t, k, samples, seed, method, out_path, out);
    if (*check) {
      EstimateOptions options;
      options.backend = parse_backend(backend);
      options.seed = seed;
      if (mc_samples) options.samples = *mc_samples;
      if (nodes) options.nodes = *nodes;
      const auto verdicts = run_check(check_args, options);
      if (json) {
        write_jsonl(out, verdicts);
      } else {
        for (const auto& v : verdicts) out << describe(v);
      }
      if (!out_path.empty()) {
        std::ofstream file(out_path);
        if (!file) throw std::invalid_argument("cannot write '" + out_path + "'");
        write_jsonl(file, verdicts);
      }
      for (const auto& v : verdicts)
        if (v.status == Status::Error) err << v.check << ": " << v.note << '\n';
      return exit_code(verdicts);
    }
    if (*sweep) {
      SweepPlan plan = load_plan(plan_path);
      if (!out_path.empty()) plan.output = out_path;
      if (sweep_seed) plan.seed = *sweep_seed;
      if (sweep_backend) plan.backend = parse_backend(*sweep_backend);
      if (mc_samples) plan.mc_samples = *mc_samples;
      if (nodes) plan.quad_nodes = *nodes;
      return cmd_sweep(std::move(plan), timestamp, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace gausslm
