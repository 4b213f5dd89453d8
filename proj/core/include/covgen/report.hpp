#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covgen/analysis.hpp"
#include "covgen/exec.hpp"

namespace covgen {

inline constexpr const char* kVersion = "0.1.0";

struct ReportTestCase {
  std::map<std::string, Int> inputs;
  std::vector<std::string> path;
  std::vector<std::string> r_true;
  std::string replay;  // "feasible" or "blocked"

  bool operator==(const ReportTestCase&) const = default;
};

struct ReportStats {
  std::size_t queries = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t timeouts = 0;
  double time_ms = 0;
  bool incomplete = false;

  bool operator==(const ReportStats&) const = default;
};

struct ReportDocument {
  std::string version = kVersion;
  AnalysisConfig config;
  std::vector<std::string> covered;
  std::vector<std::string> uncovered;
  std::vector<ReportTestCase> test_cases;
  ReportStats stats;
  std::optional<SummaryTable> summaries;
  std::vector<RefinementLog> refinements;

  bool operator==(const ReportDocument&) const;
};

ReportDocument make_report(const AnalysisResult& result, const AnalysisConfig& config);

/// Pretty-printed JSON with a fixed key order. Integers that fit in 64 bits
/// are numbers, larger ones decimal strings.
std::string serialize_report(const ReportDocument& doc);
/// Inverse of serialize_report; throws std::invalid_argument on bad input.
ReportDocument parse_report(const std::string& json);

std::string summaries_to_json(const SummaryTable& table);
std::string oracle_to_json(const OracleResult& result);

}  // namespace covgen
