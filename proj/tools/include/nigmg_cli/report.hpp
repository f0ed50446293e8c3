#pragma once

// report.json: schema-versioned summary written by denoise and fanova.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nigmg/nodemodel.hpp"

namespace nigmg::cli {

inline constexpr int kReportSchemaVersion = 1;

struct NodeEntry {
  int j = 0;
  int k = 0;
  double baseline = 0.0;     // P(S = 1 | D)
  std::vector<double> pmap;  // one per factor
};

struct FactorDecision {
  std::string factor;
  double pjap = 0.0;
  double target_fdr = 0.0;
  double delta = 0.0;
  bool no_calls = true;
  std::vector<std::pair<int, int>> called;  // (j, k)
  double nfp = 0.0;
  double fdr = 0.0;
};

struct Report {
  int schema_version = kReportSchemaVersion;
  std::string command;
  std::string wavelet;
  std::size_t length = 0;
  std::size_t observations = 0;
  std::vector<std::string> factors;
  std::vector<std::vector<std::string>> levels;
  std::string fit_mode;
  HyperParams hyperparams;
  double log_evidence = 0.0;
  double initial_log_evidence = 0.0;
  bool converged = true;
  std::optional<double> prior_pjap;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<double> pjap;  // per factor
  std::vector<NodeEntry> nodes;
  std::vector<FactorDecision> decisions;
  std::map<std::string, std::string> outputs;  // name -> path relative to the report
};

nlohmann::ordered_json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// Pretty-printed JSON with a trailing newline; byte-stable for equal reports.
std::string emit_report(const Report& r);
Report parse_report(const std::string& text);

}  // namespace nigmg::cli
