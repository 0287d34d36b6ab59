#pragma once

// File formats: scenarios and solutions as JSON, convergence traces as CSV,
// comparison reports as JSON. Output is byte-for-byte reproducible: fixed key
// order, fixed float formatting.

#include "peakramp/async_admm.hpp"
#include "peakramp/metrics.hpp"
#include "peakramp/model.hpp"
#include "peakramp/sync_admm.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace peakramp::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSyncTraceHeader = "iter,sim_time,objective,primal_residual,dual_residual";
inline constexpr const char* kAsyncTraceHeader = "event,sim_time,prosumer,objective,fp_residual";

/// Energies are written with 9 significant digits.
Json scenario_to_json(const Scenario& scenario);

/// Throws InvalidInput naming the offending key on a missing field, a wrong
/// type or an array of the wrong length; then validates the scenario.
Scenario scenario_from_json(const Json& doc);

struct SolutionStatus {
  std::string kind;  // "central", "sync" or "async"
  bool converged = true;
  long steps = 0;    // IPM iterations, ADMM iterations or arrival events
};

Json solution_to_json(const SystemSolution& solution, const SolutionStatus& status);
SystemSolution solution_from_json(const Json& doc);

std::string sync_trace_csv(const std::vector<SyncRecord>& trace);
std::string async_trace_csv(const std::vector<AsyncRecord>& trace);

/// Throws InvalidInput on a wrong header or a malformed row.
std::vector<SyncRecord> parse_sync_trace(const std::string& text);
std::vector<AsyncRecord> parse_async_trace(const std::string& text);

Json report_to_json(const ComparisonReport& report, const std::optional<EnergyAccounting>& energy);

/// Throws InvalidInput when the file cannot be read.
std::string read_text(const std::filesystem::path& path);

/// Throws std::runtime_error when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Parses JSON, turning syntax errors into InvalidInput.
Json parse_json(const std::string& text, const std::string& source);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& doc);

}  // namespace peakramp::io
