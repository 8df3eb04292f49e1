#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "aitk/continuation.hpp"
#include "aitk/core.hpp"

namespace aitk::io {

/// 17 significant digits, '.' separator (round-trips doubles exactly).
std::string format_double(double v);

/// CSV with header "t,s,xi", one row per index, LF line endings.
std::string orbit_csv(const SymbolSequence& word, const OrbitSequence& xi);

/// Throws when any residual component reaches tol (audit before emission).
void audit_residual(const StructuralParams& p, double sigma, double delta,
                    double eps, const OrbitSequence& xi, double tol = 1e-11);

/// Marks the accepted points bracketing each event with its kind.
void apply_event_flags(BranchRecord& rec);

nlohmann::ordered_json branch_record_json(const BranchRecord& rec);

struct RunRecord {
  std::string command;
  std::string preset;
  nlohmann::ordered_json params;
  std::string word;
  nlohmann::ordered_json options;
  std::vector<std::string> outputs;
  std::string termination;
  std::string started_at;
  std::string finished_at;

  bool operator==(const RunRecord&) const = default;
};

nlohmann::ordered_json run_record_json(const RunRecord& rec);
RunRecord parse_run_record(const nlohmann::json& j);

std::string timestamp_now();

}  // namespace aitk::io
