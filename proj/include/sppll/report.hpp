#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sppll/types.hpp"

namespace sppll {

/// Per-method cross-validation outcome inside a run report.
struct MethodReport {
  std::string name;  // "sp-pll" | "m3pl" | "pl-knn"
  double mean_accuracy = 0;
  double std_accuracy = 0;
  std::vector<double> fold_accuracies;
  double seconds = 0;  // wall clock; the only non-deterministic field
  std::vector<std::string> trace_files;
};

/// Machine-readable run summary: the full effective configuration plus one
/// entry per requested method. Round-trips through its JSON encoding.
struct RunReport {
  nlohmann::ordered_json config;
  std::vector<MethodReport> methods;
};

nlohmann::ordered_json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const nlohmann::json& j);

// Sweep table: header plus one row per grid point, tab-separated.
std::string sweep_tsv_header();
std::string sweep_tsv_row(const std::string& param, double value, double mean, double std_dev,
                          double seconds);

}  // namespace sppll
