#include "gausslm/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace gausslm {
namespace {

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string csv_quote(const std::string& field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json estimate_to_json(const EstimateWithError& estimate) {
  return {{"value", number(estimate.value)}, {"err", number(estimate.error)}, {"method", to_string(estimate.method)}};
}

nlohmann::json verdict_to_json(const InequalityVerdict& verdict) {
  nlohmann::json doc;
  doc["check"] = verdict.check;
  doc["params"] = verdict.params;
  doc["relation"] = to_string(verdict.relation);
  const bool evaluated = verdict.status != Status::Vacuous && verdict.status != Status::Error;
  doc["lhs"] = evaluated ? estimate_to_json(verdict.lhs) : nlohmann::json();
  doc["rhs"] = evaluated ? estimate_to_json(verdict.rhs) : nlohmann::json();
  doc["slack"] = evaluated ? number(verdict.slack) : nlohmann::json();
  doc["tol"] = evaluated ? number(verdict.tolerance) : nlohmann::json();
  doc["status"] = to_string(verdict.status);
  if (!verdict.note.empty()) doc["note"] = verdict.note;
  return doc;
}

void write_jsonl(std::ostream& out, const std::vector<InequalityVerdict>& verdicts) {
  for (const auto& v : verdicts) out << verdict_to_json(v).dump() << '\n';
}

void write_timestamp_header(std::ostream& out) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  out << nlohmann::json{{"timestamp", stamp.str()}}.dump() << '\n';
}

void write_csv_summary(std::ostream& out, const std::vector<InequalityVerdict>& verdicts) {
  out << "check,params,slack,status\n";
  for (const auto& v : verdicts) {
    out << v.check << ',' << csv_quote(v.params.dump()) << ',';
    if (v.status != Status::Vacuous && v.status != Status::Error) out << std::setprecision(17) << v.slack;
    out << ',' << to_string(v.status) << '\n';
  }
}

std::string describe(const InequalityVerdict& verdict) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << verdict.check << ": " << to_string(verdict.status) << '\n';
  out << "  params: " << verdict.params.dump() << '\n';
  if (verdict.status == Status::Vacuous || verdict.status == Status::Error) {
    out << "  reason: " << verdict.note << '\n';
    return out.str();
  }
  out << "  lhs " << verdict.lhs.value << " +- " << verdict.lhs.error << " (" << to_string(verdict.lhs.method) << ")\n";
  out << "  " << to_string(verdict.relation) << '\n';
  out << "  rhs " << verdict.rhs.value << " +- " << verdict.rhs.error << " (" << to_string(verdict.rhs.method) << ")\n";
  out << "  slack " << verdict.slack << ", tol " << verdict.tolerance << '\n';
  return out.str();
}

}  // namespace gausslm
