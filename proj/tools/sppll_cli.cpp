// Command-line harness around the sppll library: dataset conversion and
// corruption, training, shared-fold cross-validation, and one-parameter
// sensitivity sweeps. Machine-readable output goes to stdout or files;
// diagnostics go to stderr.
//
// Exit codes: 0 success, 2 bad arguments, 3 I/O or malformed data,
// 4 dataset lacks ground truth.

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sppll/baselines.hpp"
#include "sppll/data_io.hpp"
#include "sppll/label_assignment.hpp"
#include "sppll/report.hpp"
#include "sppll/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoTruth = 4;

struct CliError {
  int code;
  std::string message;
};

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double parse_grid_token(const std::string& tok) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw CliError{kExitArgs, "bad grid value '" + tok + "'"};
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

sppll::PartialLabelDataset load_or_die(const std::string& path) {
  try {
    return sppll::load_dataset(path);
  } catch (const sppll::Error& e) {
    throw CliError{kExitIo, std::string("failed to load '") + path + "': " + e.what()};
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitIo, "cannot open '" + path + "' for writing"};
  out << content;
  if (!out) throw CliError{kExitIo, "write to '" + path + "' failed"};
}

// Options shared by train/cv/sweep.
struct TrainOpts {
  sppll::TrainConfig config;
  void attach(CLI::App* cmd) {
    cmd->add_option("--cinit", config.C_init, "initial loss-term scale C");
    cmd->add_option("--cmax", config.C_max, "final loss-term scale C");
    cmd->add_option("--delta", config.Delta, "C growth factor increment");
    cmd->add_option("--lambda0", config.lambda0, "initial pace threshold");
    cmd->add_option("--mu", config.mu, "pace growth factor");
    cmd->add_option("--lambda-max", config.lambda_max, "final pace threshold");
    cmd->add_option("--delta-ofv", config.delta_ofv, "inner-loop improvement cutoff");
    cmd->add_option("--big-m", config.bigM, "non-candidate assignment cost");
    cmd->add_option("--svm-tol", config.svm_tol, "margin solver tolerance");
    cmd->add_option("--svm-max-iter", config.svm_max_iter, "margin solver sweep budget");
    cmd->add_flag("--no-standardize", "disable per-run feature standardization");
    cmd->add_flag("--no-warm-start", "cold-start the margin solver every iteration");
    cmd->add_flag("--carry-pace", "carry lambda and v across C stages instead of resetting");
  }
  void finalize(const CLI::App* cmd) {
    if (cmd->count("--no-standardize") > 0) config.standardize = false;
    if (cmd->count("--no-warm-start") > 0) config.warm_start = false;
    if (cmd->count("--carry-pace") > 0) config.reset_pace_per_c_stage = false;
  }
};

sppll::FoldTrainer make_fold_trainer(const std::string& method, const sppll::TrainConfig& base,
                                     int knn_k) {
  if (method == "sp-pll" || method == "m3pl") {
    const bool self_paced = method == "sp-pll";
    return [base, self_paced](const sppll::PartialLabelDataset& train, std::uint64_t fold_seed) {
      sppll::TrainConfig cfg = base;
      cfg.seed = fold_seed;
      cfg.self_paced = self_paced;
      sppll::FitResult fitted = sppll::fit(train, cfg);
      return sppll::Predictor(
          [model = std::move(fitted.model)](const Eigen::Ref<const sppll::Vector>& x) {
            return sppll::predict(model, x);
          });
    };
  }
  if (method == "pl-knn") {
    return [knn_k](const sppll::PartialLabelDataset& train, std::uint64_t) {
      sppll::KnnIndex index = sppll::build_knn_index(train, std::min(knn_k, train.n()));
      return sppll::Predictor([index = std::move(index)](const Eigen::Ref<const sppll::Vector>& x) {
        return sppll::plknn_predict(index, x);
      });
    };
  }
  throw CliError{kExitArgs, "unknown method '" + method + "' (expected sp-pll, m3pl or pl-knn)"};
}

int cmd_convert(const std::string& in_path, const std::string& out_path, bool skip_header) {
  std::ifstream in(in_path);
  if (!in) throw CliError{kExitIo, "cannot open '" + in_path + "' for reading"};

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (skip_header && lineno == 1) continue;
    const auto tokens = split_csv(line);
    if (tokens.size() < 2) {
      throw CliError{kExitIo, "line " + std::to_string(lineno) + ": need features and a label"};
    }
    std::vector<double> feats;
    feats.reserve(tokens.size() - 1);
    for (std::size_t j = 0; j + 1 < tokens.size(); ++j) {
      double value = 0;
      auto [ptr, ec] =
          std::from_chars(tokens[j].data(), tokens[j].data() + tokens[j].size(), value);
      if (ec != std::errc() || ptr != tokens[j].data() + tokens[j].size()) {
        throw CliError{kExitIo, "line " + std::to_string(lineno) + ": bad feature '" +
                                    tokens[j] + "'"};
      }
      feats.push_back(value);
    }
    if (!rows.empty() && feats.size() != rows.front().size()) {
      throw CliError{kExitIo, "line " + std::to_string(lineno) + ": inconsistent column count"};
    }
    rows.push_back(std::move(feats));
    labels.push_back(tokens.back());
  }
  if (rows.empty()) throw CliError{kExitIo, "no data rows in '" + in_path + "'"};

  // Distinct label tokens map to 1..q in lexicographic order.
  std::vector<std::string> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  sppll::PartialLabelDataset ds;
  ds.q = static_cast<int>(distinct.size());
  ds.features.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  std::vector<int> truth(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), labels[i]);
    truth[i] = static_cast<int>(it - distinct.begin()) + 1;
    ds.candidates.push_back({truth[i]});
  }
  ds.truth = std::move(truth);

  try {
    sppll::save_dataset(ds, out_path);
  } catch (const sppll::Error& e) {
    throw CliError{kExitIo, e.what()};
  }

  nlohmann::ordered_json mapping;
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    mapping[distinct[k]] = static_cast<int>(k) + 1;
  }
  std::cerr << "converted " << rows.size() << " rows, " << ds.d() << " features, q=" << ds.q
            << "; label map " << mapping.dump() << "\n";
  return kExitOk;
}

int cmd_corrupt(const std::string& in_path, const std::string& out_path, double p, int r,
                std::uint64_t seed) {
  const sppll::PartialLabelDataset ds = load_or_die(in_path);
  if (!(p >= 0.0 && p <= 1.0)) throw CliError{kExitArgs, "p must be in [0,1]"};
  if (r < 0) throw CliError{kExitArgs, "r must be >= 0"};
  try {
    const sppll::PartialLabelDataset corrupted = sppll::corrupt_labels(ds, p, r, seed);
    sppll::save_dataset(corrupted, out_path);
  } catch (const sppll::RTooLarge&) {
    throw CliError{kExitArgs, "r must be <= q-1"};
  } catch (const sppll::NotSupervised& e) {
    throw CliError{kExitArgs, e.what()};
  } catch (const sppll::IoError& e) {
    throw CliError{kExitIo, e.what()};
  }
  std::cerr << "corrupted " << std::llround(p * ds.n()) << " of " << ds.n() << " instances (r="
            << r << ", seed=" << seed << ")\n";
  return kExitOk;
}

int cmd_train(const std::string& data_path, const std::string& method,
              const sppll::TrainConfig& config, const std::string& model_path,
              const std::string& trace_path) {
  const sppll::PartialLabelDataset ds = load_or_die(data_path);
  sppll::TrainConfig cfg = config;
  if (method != "sp-pll" && method != "m3pl") {
    throw CliError{kExitArgs, "method must be sp-pll or m3pl"};
  }
  cfg.self_paced = method == "sp-pll";

  const double t0 = now_seconds();
  const sppll::FitResult fitted = sppll::fit(ds, cfg);
  const double seconds = now_seconds() - t0;

  nlohmann::ordered_json meta;
  meta["C"] = cfg.C_max;
  meta["seed"] = cfg.seed;
  meta["solver"] = "cs-dual";
  meta["method"] = method;
  meta["config"] = sppll::config_to_json(cfg);
  meta["standardized"] = fitted.standardization.has_value();
  if (fitted.standardization) {
    const auto& s = *fitted.standardization;
    meta["feature_mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
    meta["feature_scale"] = std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size());
  }

  const nlohmann::ordered_json model_json = sppll::model_to_json(fitted.model, meta);
  if (model_path == "-") {
    std::cout << model_json.dump(2) << "\n";
  } else {
    write_file(model_path, model_json.dump(2) + "\n");
  }
  if (!trace_path.empty()) write_file(trace_path, sppll::trace_to_jsonl(fitted.trace));

  std::cerr << "trained " << method << " on " << ds.n() << " instances in " << seconds << " s ("
            << fitted.trace.stages.size() << " stages)\n";
  if (ds.truth) std::cerr << "training accuracy " << sppll::accuracy(fitted.model, ds) << "\n";
  return kExitOk;
}

int cmd_cv(const std::string& data_path, const std::string& methods_csv, int folds,
           std::uint64_t seed, const sppll::TrainConfig& config, int knn_k,
           const std::string& out_path, bool parallel) {
  const sppll::PartialLabelDataset ds = load_or_die(data_path);
  if (!ds.truth) throw CliError{kExitNoTruth, "dataset lacks ground truth"};
  if (folds < 2) throw CliError{kExitArgs, "folds must be >= 2"};
  if (ds.n() < folds) throw CliError{kExitArgs, "need at least as many instances as folds"};

  const std::vector<std::string> methods = split_csv(methods_csv);
  if (methods.empty()) throw CliError{kExitArgs, "--methods must name at least one method"};

  sppll::RunReport report;
  report.config["data"] = data_path;
  report.config["folds"] = folds;
  report.config["seed"] = seed;
  report.config["knn_k"] = knn_k;
  report.config["methods"] = methods;
  report.config["train"] = sppll::config_to_json(config);

  for (const std::string& method : methods) {
    const sppll::FoldTrainer trainer = make_fold_trainer(method, config, knn_k);
    const double t0 = now_seconds();
    sppll::CvResult cv;
    try {
      cv = sppll::cross_validate_with(ds, folds, seed, trainer, parallel);
    } catch (const sppll::NoGroundTruth& e) {
      throw CliError{kExitNoTruth, e.what()};
    }
    sppll::MethodReport mr;
    mr.name = method;
    mr.mean_accuracy = cv.mean_accuracy;
    mr.std_accuracy = cv.std_accuracy;
    mr.fold_accuracies = cv.fold_accuracies;
    mr.seconds = now_seconds() - t0;
    report.methods.push_back(std::move(mr));
    std::cerr << method << ": " << cv.mean_accuracy << " +/- " << cv.std_accuracy << "\n";
  }

  const std::string text = sppll::to_json(report).dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) write_file(out_path, text);
  return kExitOk;
}

int cmd_sweep(const std::string& data_path, const std::string& param, const std::string& grid_csv,
              const std::string& method, int folds, std::uint64_t seed,
              const sppll::TrainConfig& config, const std::string& out_path) {
  if (param != "lambda0" && param != "cmax") {
    throw CliError{kExitArgs, "--param must be lambda0 or cmax (exactly one parameter per sweep)"};
  }
  const sppll::PartialLabelDataset ds = load_or_die(data_path);
  if (!ds.truth) throw CliError{kExitNoTruth, "dataset lacks ground truth"};

  std::vector<double> grid;
  for (const std::string& tok : split_csv(grid_csv)) grid.push_back(parse_grid_token(tok));
  if (grid.empty()) throw CliError{kExitArgs, "--grid must name at least one value"};

  struct Row {
    double value, mean, std_dev, seconds;
  };
  const auto run_point = [&](double value) {
    sppll::TrainConfig cfg = config;
    if (param == "lambda0") {
      cfg.lambda0 = value;
    } else {
      cfg.C_max = value;
      cfg.C_init = std::min(cfg.C_init, value);
    }
    cfg.self_paced = method == "sp-pll";
    const double t0 = now_seconds();
    const sppll::FoldTrainer trainer = make_fold_trainer(method, cfg, 10);
    const sppll::CvResult cv = sppll::cross_validate_with(ds, folds, seed, trainer, false);
    return Row{value, cv.mean_accuracy, cv.std_accuracy, now_seconds() - t0};
  };

  // Grid points run as parallel workers; rows are emitted in grid order.
  std::vector<std::future<Row>> futures;
  futures.reserve(grid.size());
  for (double value : grid) {
    futures.push_back(std::async(std::launch::async, run_point, value));
  }

  std::ostringstream table;
  table << sppll::sweep_tsv_header() << "\n";
  for (auto& fut : futures) {
    const Row row = fut.get();
    table << sppll::sweep_tsv_row(param, row.value, row.mean, row.std_dev, row.seconds) << "\n";
  }

  std::cout << table.str();
  if (!out_path.empty()) write_file(out_path, table.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-paced partial-label learning toolkit"};
  app.require_subcommand(1);

  // convert
  auto* convert = app.add_subcommand("convert", "CSV (last column = label) to supervised PLC");
  std::string conv_in, conv_out;
  bool conv_skip_header = false;
  convert->add_option("--in", conv_in, "input CSV")->required();
  convert->add_option("--out", conv_out, "output PLC")->required();
  convert->add_flag("--skip-header", conv_skip_header, "ignore the first CSV line");

  // corrupt
  auto* corrupt = app.add_subcommand("corrupt", "add false candidate labels to a supervised PLC");
  std::string cor_in, cor_out;
  double cor_p = 0;
  int cor_r = 1;
  std::uint64_t cor_seed = 0;
  corrupt->add_option("--in", cor_in, "input PLC (supervised)")->required();
  corrupt->add_option("--out", cor_out, "output PLC")->required();
  corrupt->add_option("--p", cor_p, "proportion of corrupted instances")->required();
  corrupt->add_option("--r", cor_r, "false labels per corrupted instance")->required();
  corrupt->add_option("--seed", cor_seed, "generator seed");

  // train
  auto* train = app.add_subcommand("train", "train one method on a PLC file");
  std::string train_data, train_method = "sp-pll", train_model = "-", train_trace;
  TrainOpts train_opts;
  std::uint64_t train_seed = 0;
  train->add_option("--data", train_data, "input PLC")->required();
  train->add_option("--method", train_method, "sp-pll | m3pl");
  train->add_option("--out-model", train_model, "model JSON path, '-' for stdout");
  train->add_option("--out-trace", train_trace, "trace JSONL path");
  train->add_option("--seed", train_seed, "run seed");
  train_opts.attach(train);

  // cv
  auto* cv = app.add_subcommand("cv", "shared-fold cross-validation of one or more methods");
  std::string cv_data, cv_methods = "sp-pll", cv_out;
  int cv_folds = 10, cv_knn_k = 10;
  std::uint64_t cv_seed = 0;
  bool cv_serial = false;
  TrainOpts cv_opts;
  cv->add_option("--data", cv_data, "input PLC with ground truth")->required();
  cv->add_option("--methods", cv_methods, "comma-separated: sp-pll,m3pl,pl-knn");
  cv->add_option("--folds", cv_folds, "number of folds");
  cv->add_option("--seed", cv_seed, "fold-split and per-fold seed");
  cv->add_option("--knn-k", cv_knn_k, "neighbours for pl-knn");
  cv->add_option("--out", cv_out, "also write the report JSON here");
  cv->add_flag("--serial", cv_serial, "run folds sequentially");
  cv_opts.attach(cv);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sensitivity sweep over one parameter");
  std::string sw_data, sw_param, sw_grid, sw_method = "sp-pll", sw_out;
  int sw_folds = 10;
  std::uint64_t sw_seed = 0;
  TrainOpts sw_opts;
  sweep->add_option("--data", sw_data, "input PLC with ground truth")->required();
  sweep->add_option("--param", sw_param, "lambda0 | cmax")->required();
  sweep->add_option("--grid", sw_grid, "comma-separated values")->required();
  sweep->add_option("--method", sw_method, "sp-pll | m3pl");
  sweep->add_option("--folds", sw_folds, "number of folds");
  sweep->add_option("--seed", sw_seed, "fold-split and per-fold seed");
  sweep->add_option("--out", sw_out, "also write the TSV here");
  sw_opts.attach(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitArgs;
  }

  try {
    if (convert->parsed()) return cmd_convert(conv_in, conv_out, conv_skip_header);
    if (corrupt->parsed()) return cmd_corrupt(cor_in, cor_out, cor_p, cor_r, cor_seed);
    if (train->parsed()) {
      train_opts.finalize(train);
      train_opts.config.seed = train_seed;
      return cmd_train(train_data, train_method, train_opts.config, train_model, train_trace);
    }
    if (cv->parsed()) {
      cv_opts.finalize(cv);
      cv_opts.config.seed = cv_seed;
      return cmd_cv(cv_data, cv_methods, cv_folds, cv_seed, cv_opts.config, cv_knn_k, cv_out,
                    !cv_serial);
    }
    if (sweep->parsed()) {
      sw_opts.finalize(sweep);
      sw_opts.config.seed = sw_seed;
      if (sw_folds < 2) throw CliError{kExitArgs, "folds must be >= 2"};
      if (sw_method != "sp-pll" && sw_method != "m3pl") {
        throw CliError{kExitArgs, "method must be sp-pll or m3pl"};
      }
      return cmd_sweep(sw_data, sw_param, sw_grid, sw_method, sw_folds, sw_seed, sw_opts.config,
                       sw_out);
    }
  } catch (const CliError& e) {
    std::cerr << e.message << "\n";
    return e.code;
  } catch (const sppll::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitArgs;
  } catch (const sppll::NoGroundTruth& e) {
    std::cerr << e.what() << "\n";
    return kExitNoTruth;
  } catch (const sppll::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  }
  return kExitArgs;
}
