#include "sppll/report.hpp"

#include <cstdio>

namespace sppll {

nlohmann::ordered_json to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["config"] = report.config;
  j["methods"] = nlohmann::ordered_json::array();
  for (const MethodReport& m : report.methods) {
    nlohmann::ordered_json mj;
    mj["name"] = m.name;
    mj["mean_accuracy"] = m.mean_accuracy;
    mj["std_accuracy"] = m.std_accuracy;
    mj["fold_accuracies"] = m.fold_accuracies;
    mj["seconds"] = m.seconds;
    mj["trace_files"] = m.trace_files;
    j["methods"].push_back(std::move(mj));
  }
  return j;
}

RunReport run_report_from_json(const nlohmann::ordered_json& j) {
  RunReport report;
  report.config = j.at("config");
  for (const auto& mj : j.at("methods")) {
    MethodReport m;
    m.name = mj.at("name").get<std::string>();
    m.mean_accuracy = mj.at("mean_accuracy").get<double>();
    m.std_accuracy = mj.at("std_accuracy").get<double>();
    m.fold_accuracies = mj.at("fold_accuracies").get<std::vector<double>>();
    m.seconds = mj.at("seconds").get<double>();
    m.trace_files = mj.at("trace_files").get<std::vector<std::string>>();
    report.methods.push_back(std::move(m));
  }
  return report;
}

nlohmann::ordered_json config_to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["C_init"] = c.C_init;
  j["C_max"] = c.C_max;
  j["Delta"] = c.Delta;
  j["lambda0"] = c.lambda0;
  j["mu"] = c.mu;
  j["lambda_max"] = c.lambda_max;
  j["delta_ofv"] = c.delta_ofv;
  j["bigM"] = c.bigM;
  j["svm_tol"] = c.svm_tol;
  j["svm_max_iter"] = c.svm_max_iter;
  j["seed"] = c.seed;
  j["self_paced"] = c.self_paced;
  j["standardize"] = c.standardize;
  j["warm_start"] = c.warm_start;
  j["reset_pace_per_c_stage"] = c.reset_pace_per_c_stage;
  j["inner_max_iter"] = c.inner_max_iter;
  return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.C_init = j.at("C_init").get<double>();
  c.C_max = j.at("C_max").get<double>();
  c.Delta = j.at("Delta").get<double>();
  c.lambda0 = j.at("lambda0").get<double>();
  c.mu = j.at("mu").get<double>();
  c.lambda_max = j.at("lambda_max").get<double>();
  c.delta_ofv = j.at("delta_ofv").get<double>();
  c.bigM = j.at("bigM").get<double>();
  c.svm_tol = j.at("svm_tol").get<double>();
  c.svm_max_iter = j.at("svm_max_iter").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.self_paced = j.at("self_paced").get<bool>();
  c.standardize = j.at("standardize").get<bool>();
  c.warm_start = j.at("warm_start").get<bool>();
  c.reset_pace_per_c_stage = j.at("reset_pace_per_c_stage").get<bool>();
  c.inner_max_iter = j.at("inner_max_iter").get<int>();
  return c;
}

std::string sweep_tsv_header() { return "param\tvalue\tmean\tstd\tseconds"; }

std::string sweep_tsv_row(const std::string& param, double value, double mean, double std_dev,
                          double seconds) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s\t%.17g\t%.6f\t%.6f\t%.3f", param.c_str(), value, mean,
                std_dev, seconds);
  return buf;
}

}  // namespace sppll
