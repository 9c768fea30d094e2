// karst: reproducible spring-discharge forecasting runs
//
// Subcommands: generate, train, evaluate, sweep, report. Every run
// resolves its full configuration, writes a manifest first, then its
// artifacts. Exit codes: 0 ok, 1 validation error, 2 runtime failure.

#include "karst/config.hpp"
#include "karst/data.hpp"
#include "karst/experiment.hpp"
#include "karst/metrics.hpp"
#include "karst/model_io.hpp"
#include "karst/optim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace karst;

namespace {

std::string timestamp_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  localtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path resolve_out_dir(std::string out_flag, const std::string& subcommand) {
  fs::path dir;
  if (!out_flag.empty()) {
    dir = out_flag;
  } else {
    const char* root = std::getenv("KARST_OUT_ROOT");
    fs::path base = root && *root ? fs::path(root) : fs::path("runs");
    dir = base / (timestamp_now() + "-" + subcommand);
    int suffix = 1;
    while (fs::exists(dir)) {
      dir = base / (timestamp_now() + "-" + subcommand + "-" +
                    std::to_string(suffix++));
    }
  }
  fs::create_directories(dir);
  return dir;
}

struct SourceInfo {
  TableSource source;
  ordered_json desc;
};

bool looks_like_csv(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
}

ordered_json spec_json(const SyntheticSpec& spec) {
  ordered_json j;
  j["months"] = spec.months;
  j["seed"] = spec.seed;
  j["start"] = spec.start.str();
  j["seasonal_amplitude"] = spec.seasonal_amplitude;
  j["autocorrelation"] = spec.autocorrelation;
  j["noise_level"] = spec.noise_level;
  j["discharge_min"] = spec.discharge_min;
  j["discharge_max"] = spec.discharge_max;
  j["station_annual_means"] = spec.station_annual_means;
  return j;
}

SourceInfo resolve_data_flag(const std::string& data_flag) {
  SourceInfo info;
  if (looks_like_csv(data_flag)) {
    info.source = fs::path(data_flag);
    info.desc["kind"] = "csv";
    info.desc["path"] = data_flag;
    info.desc["fingerprint"] = fingerprint_file(data_flag);
  } else {
    SyntheticSpec spec = load_synthetic_spec(data_flag);
    info.source = spec;
    info.desc["kind"] = "synthetic";
    info.desc["config_path"] = data_flag;
    info.desc["fingerprint"] = fingerprint_bytes(synthetic_spec_text(spec));
    info.desc["spec"] = spec_json(spec);
  }
  return info;
}

ordered_json manifest_skeleton(const std::string& subcommand) {
  ordered_json m;
  m["tool"] = "karst";
  m["tool_version"] = kToolVersion;
  m["subcommand"] = subcommand;
  m["created"] = timestamp_now();
  return m;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_history_csv(const TrainingHistory& history, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "epoch,loss,lr\n";
  char buf[64];
  for (size_t e = 0; e < history.epoch_loss.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g", e,
                  history.epoch_loss[e], history.learning_rate[e]);
    out << buf << '\n';
  }
}

ordered_json train_config_json(const TrainConfig& config) {
  ordered_json j;
  j["epochs"] = config.epochs;
  j["batch_size"] = config.batch_size;
  j["initial_rate"] = config.schedule.initial_rate;
  j["decay_rate"] = config.schedule.decay_rate;
  j["decay_steps"] = config.schedule.decay_steps;
  j["shuffle_each_epoch"] = config.shuffle_each_epoch;
  j["sequence_length"] = config.sequence_length;
  j["seed"] = config.seed;
  return j;
}

ordered_json svr_config_json(const SvrConfig& config) {
  ordered_json j;
  j["c"] = config.c;
  j["epsilon"] = config.epsilon;
  j["kernel"] = kernel_name(config.kernel.kind);
  j["degree"] = config.kernel.degree;
  j["gamma"] = config.kernel.gamma;
  j["coef0"] = config.kernel.coef0;
  j["tolerance"] = config.tolerance;
  j["max_passes"] = config.max_passes;
  return j;
}

ordered_json metrics_json(const Metrics& m) {
  ordered_json j;
  j["mse"] = m.mse;
  j["mae"] = m.mae;
  j["rmse"] = m.rmse;
  return j;
}

ordered_json eval_report_json(const EvalReport& report) {
  ordered_json j;
  j["model"] = report.model_id;
  j["structure"] = report.label;
  j["train"] = metrics_json(report.train);
  j["test"] = metrics_json(report.test);
  if (report.train_physical) {
    j["train_physical"] = metrics_json(*report.train_physical);
    j["test_physical"] = metrics_json(*report.test_physical);
  }
  return j;
}

ReportTable single_row_table(const EvalReport& report) {
  ReportTable table;
  table.method = report.model_id;
  SweepRow row;
  row.structure = report.label;
  row.train = report.train;
  row.test = report.test;
  table.rows.push_back(row);
  table.best_index = 0;
  return table;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string out;
  std::string config;
  int months = -1;
  std::int64_t seed = -1;
  double amplitude = -1.0;
  double autocorr = -1.0;
  double noise = -1.0;
  double discharge_min = 0.0;
  double discharge_max = 0.0;
  std::string start;
};

int run_generate(const GenerateArgs& args) {
  SyntheticSpec spec;
  if (!args.config.empty()) spec = load_synthetic_spec(args.config);
  if (args.months >= 0) spec.months = args.months;
  if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);
  if (args.amplitude >= 0.0) spec.seasonal_amplitude = args.amplitude;
  if (args.autocorr >= 0.0) spec.autocorrelation = args.autocorr;
  if (args.noise >= 0.0) spec.noise_level = args.noise;
  if (args.discharge_min > 0.0) spec.discharge_min = args.discharge_min;
  if (args.discharge_max > 0.0) spec.discharge_max = args.discharge_max;
  if (!args.start.empty()) spec.start = YearMonth::parse(args.start);
  spec.validate();

  fs::path out = args.out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  ordered_json manifest = manifest_skeleton("generate");
  manifest["data"]["kind"] = "synthetic";
  manifest["data"]["spec"] = spec_json(spec);
  manifest["data"]["fingerprint"] = fingerprint_bytes(synthetic_spec_text(spec));
  manifest["artifacts"] = {out.string()};
  fs::path manifest_path = out;
  manifest_path += ".manifest.json";
  write_json_file(manifest_path, manifest);

  TimeSeriesTable table = generate_synthetic(spec);
  save_csv(table, out);
  std::cout << "wrote " << table.rows() << " months to " << out.string()
            << '\n';
  return 0;
}

// ------------------------------------------------------------------- train

struct ModelArgs {
  std::string method = "mlp";
  int hidden = 32;
  int layers = 1;
  int seq_len = 1;
  TrainConfig train;
  bool batch_size_set = false;
  SvrConfig svr;
  std::string kernel = "linear";
};

void finish_model_args(ModelArgs& args) {
  if (!args.batch_size_set) {
    args.train.batch_size = args.method == "lstm" ? 1 : 16;
  }
  args.train.sequence_length = args.seq_len;
  args.svr.kernel.kind = kernel_from_name(args.kernel);
}

struct TrainArgs {
  ModelArgs model;
  std::string data;
  Index train_len = 311;
  std::int64_t seed = 7;
  std::string out;
  bool physical = false;
};

int run_train(TrainArgs& args) {
  finish_model_args(args.model);
  SourceInfo source = resolve_data_flag(args.data);
  fs::path dir = resolve_out_dir(args.out, "train");

  ordered_json manifest = manifest_skeleton("train");
  manifest["method"] = args.model.method;
  manifest["data"] = source.desc;
  manifest["train_len"] = args.train_len;
  manifest["seed"] = args.seed;
  args.model.train.seed = static_cast<std::uint64_t>(args.seed);
  if (args.model.method == "svr") {
    manifest["svr"] = svr_config_json(args.model.svr);
  } else {
    manifest["hidden"] = args.model.hidden;
    manifest["layers"] = args.model.layers;
    manifest["train_config"] = train_config_json(args.model.train);
  }
  manifest["artifacts"] = {(dir / "model.txt").string(),
                           (dir / "history.csv").string(),
                           (dir / "eval.json").string()};
  write_json_file(dir / "manifest.json", manifest);

  PreparedData data = prepare_pipeline(source.source, 1, 1, args.train_len);
  EvalReport report;
  if (args.model.method == "mlp") {
    RngStream rng(static_cast<std::uint64_t>(args.seed));
    MlpModel model =
        MlpModel::init(data.train.feature_width(), args.model.hidden, rng);
    TrainingHistory history = train(model, data.train, args.model.train);
    write_history_csv(history, dir / "history.csv");
    save_model(model, dir / "model.txt");
    report = evaluate(model, data.train, data.test,
                      structure_label(data.train.feature_width(),
                                      args.model.hidden),
                      args.physical);
  } else if (args.model.method == "lstm") {
    RngStream rng(static_cast<std::uint64_t>(args.seed));
    LstmModel model = LstmModel::init(data.train.feature_width(),
                                      args.model.hidden, args.model.layers, rng);
    TrainingHistory history = train(model, data.train, args.model.train);
    write_history_csv(history, dir / "history.csv");
    save_model(model, dir / "model.txt");
    report = evaluate(model, data.train, data.test,
                      structure_label(data.train.feature_width(),
                                      args.model.hidden),
                      args.physical, args.model.seq_len);
  } else {
    SvrModel model =
        svr_fit(data.train.inputs, data.train.targets, args.model.svr);
    model.norm_ref = data.norm;
    save_model(model, dir / "model.txt");
    report = evaluate(model, data.train, data.test,
                      kernel_name(model.kernel.kind), args.physical);
  }

  write_json_file(dir / "eval.json", eval_report_json(report));
  std::cout << "model: " << (dir / "model.txt").string() << '\n'
            << "train MSE " << report.train.mse << "  test MSE "
            << report.test.mse << "  test RMSE " << report.test.rmse << '\n';
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string model;
  std::string data;
  Index train_len = 311;
  int seq_len = 1;
  bool physical = false;
  std::string out;
};

int run_evaluate(const EvaluateArgs& args) {
  AnyModel any = load_model(args.model);
  SourceInfo source = resolve_data_flag(args.data);
  fs::path dir = resolve_out_dir(args.out, "evaluate");

  ordered_json manifest = manifest_skeleton("evaluate");
  manifest["model_file"] = args.model;
  manifest["model_fingerprint"] = fingerprint_file(args.model);
  manifest["data"] = source.desc;
  manifest["train_len"] = args.train_len;
  manifest["artifacts"] = {(dir / "eval.json").string(),
                           (dir / "eval.csv").string()};
  write_json_file(dir / "manifest.json", manifest);

  PreparedData data = prepare_pipeline(source.source, 1, 1, args.train_len);
  EvalReport report = std::visit(
      [&](const auto& model) -> EvalReport {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, MlpModel>) {
          return evaluate(model, data.train, data.test,
                          structure_label(model.input_dim(),
                                          static_cast<int>(model.hidden_size())),
                          args.physical);
        } else if constexpr (std::is_same_v<T, LstmModel>) {
          return evaluate(model, data.train, data.test,
                          structure_label(model.input_dim(),
                                          static_cast<int>(model.hidden_size())),
                          args.physical, args.seq_len);
        } else {
          return evaluate(model, data.train, data.test,
                          kernel_name(model.kernel.kind), args.physical);
        }
      },
      any);

  write_json_file(dir / "eval.json", eval_report_json(report));
  export_report(single_row_table(report), ReportFormat::kCsv, dir / "eval.csv");
  std::cout << render_report(single_row_table(report), ReportFormat::kCsv);
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  ModelArgs model;
  std::string data;
  std::vector<int> hidden = {32, 64, 128, 256};
  std::vector<std::string> kernels = {"linear", "polynomial", "rbf", "sigmoid"};
  Index train_len = 311;
  std::int64_t seed = 7;
  std::string out;
  bool show_reference = false;
};

int run_sweep_cmd(SweepArgs& args) {
  finish_model_args(args.model);
  SourceInfo source = resolve_data_flag(args.data);
  fs::path dir = resolve_out_dir(args.out, "sweep");

  ExperimentSpec spec;
  spec.method = method_from_name(args.model.method);
  spec.hidden_sizes = args.hidden;
  spec.kernels.clear();
  for (const std::string& name : args.kernels) {
    Kernel k = args.model.svr.kernel;
    k.kind = kernel_from_name(name);
    spec.kernels.push_back(k);
  }
  spec.train = args.model.train;
  spec.svr = args.model.svr;
  spec.source = source.source;
  spec.train_len = args.train_len;
  spec.lstm_layers = args.model.layers;
  spec.seed = static_cast<std::uint64_t>(args.seed);
  spec.train.sequence_length = args.model.seq_len;

  ordered_json manifest = manifest_skeleton("sweep");
  manifest["method"] = args.model.method;
  manifest["data"] = source.desc;
  manifest["train_len"] = args.train_len;
  manifest["seed"] = args.seed;
  if (spec.method == Method::kSvr) {
    manifest["kernels"] = args.kernels;
    manifest["svr"] = svr_config_json(args.model.svr);
  } else {
    manifest["hidden_sizes"] = args.hidden;
    manifest["train_config"] = train_config_json(spec.train);
  }
  manifest["artifacts"] = {(dir / "report.csv").string(),
                           (dir / "report.json").string(),
                           (dir / "report.md").string()};
  write_json_file(dir / "manifest.json", manifest);

  ReportTable table = run_sweep(spec);
  export_report(table, ReportFormat::kCsv, dir / "report.csv");
  export_report(table, ReportFormat::kJson, dir / "report.json");
  export_report(table, ReportFormat::kMarkdown, dir / "report.md");

  std::cout << render_report(table, ReportFormat::kCsv);
  if (table.best_index >= 0) {
    std::cout << "best: "
              << table.rows[static_cast<size_t>(table.best_index)].structure
              << '\n';
  }
  if (args.show_reference) {
    std::cout << "published reference tables:\n" << paper_reference_json()
              << '\n';
  }
  std::cout << "report: " << (dir / "report.csv").string() << '\n';
  return 0;
}

// ------------------------------------------------------------------ report

struct ReportArgs {
  std::string table;
  std::string format = "markdown";
  std::string out;
  bool reference = false;
  std::vector<std::string> compare;
  bool plot_data = false;
  std::string model;
  std::string data;
  Index train_len = 311;
  int seq_len = 1;
  std::string split = "test";
};

ReportFormat format_from_name(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw ValidationError("unknown report format '" + name + "'");
}

int run_report(const ReportArgs& args) {
  if (args.plot_data) {
    if (args.model.empty() || args.data.empty()) {
      throw ValidationError("report --plot-data needs --model and --data");
    }
    if (args.split != "train" && args.split != "test") {
      throw ValidationError("split must be train or test");
    }
    AnyModel any = load_model(args.model);
    SourceInfo source = resolve_data_flag(args.data);
    fs::path dir = resolve_out_dir(args.out, "report");

    ordered_json manifest = manifest_skeleton("report");
    manifest["mode"] = "plot-data";
    manifest["model_file"] = args.model;
    manifest["data"] = source.desc;
    manifest["split"] = args.split;
    manifest["train_len"] = args.train_len;
    fs::path prefix = dir / args.split;
    manifest["artifacts"] = {prefix.string() + "_hydrograph.csv",
                             prefix.string() + "_scatter.csv"};
    write_json_file(dir / "manifest.json", manifest);

    PreparedData data = prepare_pipeline(source.source, 1, 1, args.train_len);
    const SupervisedDataset& split =
        args.split == "train" ? data.train : data.test;
    std::visit(
        [&](const auto& model) {
          using T = std::decay_t<decltype(model)>;
          if constexpr (std::is_same_v<T, LstmModel>) {
            if (!model.trained) {
              throw ValidationError("emit_plot_data: model not trained");
            }
            emit_plot_data(predict_all(model, split.inputs, args.seq_len),
                           split, prefix);
          } else {
            emit_plot_data(model, split, prefix);
          }
        },
        any);
    std::cout << "plot data: " << prefix.string()
              << "_{hydrograph,scatter}.csv\n";
    return 0;
  }

  if (!args.compare.empty()) {
    if (args.compare.size() < 2) {
      throw ValidationError("report --compare needs at least 2 tables");
    }
    std::vector<ReportTable> tables;
    for (const std::string& path : args.compare) {
      tables.push_back(load_report(path));
    }
    std::string text = format_comparison(compare_methods(tables));
    std::cout << text;
    if (!args.out.empty()) {
      std::ofstream out(args.out);
      if (!out) throw IoError("cannot write '" + args.out + "'");
      out << text;
    }
    return 0;
  }

  if (args.table.empty()) {
    throw ValidationError("report needs --table, --compare, or --plot-data");
  }
  ReportTable table = load_report(args.table);
  std::string text = render_report(table, format_from_name(args.format));
  if (args.out.empty()) {
    std::cout << text;
  } else {
    fs::path out = args.out;
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    std::ofstream file(out);
    if (!file) throw IoError("cannot write '" + args.out + "'");
    file << text;
  }
  if (args.reference) {
    std::cout << "published reference tables:\n" << paper_reference_json()
              << '\n';
  }
  return 0;
}

void add_model_flags(CLI::App* cmd, ModelArgs& args, bool sweep) {
  cmd->add_option("--method", args.method, "mlp, lstm, or svr")
      ->check(CLI::IsMember({"mlp", "lstm", "svr"}));
  if (!sweep) cmd->add_option("--hidden", args.hidden, "hidden units");
  cmd->add_option("--layers", args.layers, "stacked LSTM layers");
  cmd->add_option("--seq-len", args.seq_len, "LSTM input sequence length");
  cmd->add_option("--epochs", args.train.epochs, "training epochs");
  cmd->add_option("--batch-size", args.train.batch_size,
                  "batch size (default 16 mlp, 1 lstm)")
      ->each([&args](const std::string&) { args.batch_size_set = true; });
  cmd->add_option("--lr", args.train.schedule.initial_rate,
                  "initial learning rate");
  cmd->add_option("--decay-rate", args.train.schedule.decay_rate,
                  "lr decay factor");
  cmd->add_option("--decay-steps", args.train.schedule.decay_steps,
                  "epochs per decay application");
  cmd->add_flag("--shuffle", args.train.shuffle_each_epoch,
                "reshuffle batches each epoch");
  if (!sweep) {
    cmd->add_option("--kernel", args.kernel, "svr kernel")
        ->check(CLI::IsMember({"linear", "polynomial", "rbf", "sigmoid"}));
  }
  cmd->add_option("--c", args.svr.c, "svr penalty C");
  cmd->add_option("--epsilon", args.svr.epsilon, "svr tube half-width");
  cmd->add_option("--degree", args.svr.kernel.degree, "polynomial degree");
  cmd->add_option("--gamma", args.svr.kernel.gamma,
                  "kernel gamma (<= 0 selects 1/(dim*var))");
  cmd->add_option("--coef0", args.svr.kernel.coef0, "poly/sigmoid offset");
  cmd->add_option("--svr-tol", args.svr.tolerance, "solver KKT tolerance");
  cmd->add_option("--max-passes", args.svr.max_passes, "solver pass budget");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"karst spring discharge forecasting toolkit"};
  app.set_version_flag("--version", std::string("karst ") + kToolVersion);
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "write a synthetic CSV");
  generate->add_option("--out", gen.out, "output CSV path")->required();
  generate->add_option("--config", gen.config, "synthetic spec key-value file");
  generate->add_option("--months", gen.months, "number of months");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--amplitude", gen.amplitude, "seasonal amplitude");
  generate->add_option("--autocorr", gen.autocorr, "lag-1 autocorrelation");
  generate->add_option("--noise", gen.noise, "noise level (0 disables)");
  generate->add_option("--discharge-min", gen.discharge_min,
                       "discharge lower bound");
  generate->add_option("--discharge-max", gen.discharge_max,
                       "discharge upper bound");
  generate->add_option("--start", gen.start, "first month, YYYY-MM");

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand("train", "train one model");
  train_cmd->add_option("--data", tr.data, "CSV path or synthetic config")
      ->required();
  train_cmd->add_option("--train-len", tr.train_len, "training rows");
  train_cmd->add_option("--seed", tr.seed, "init/shuffle seed");
  train_cmd->add_option("--out", tr.out, "output directory");
  train_cmd->add_flag("--physical", tr.physical,
                      "also report physical-scale metrics");
  add_model_flags(train_cmd, tr.model, false);

  EvaluateArgs ev;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "evaluate a saved model against a split");
  evaluate_cmd->add_option("--model", ev.model, "model file")->required();
  evaluate_cmd->add_option("--data", ev.data, "CSV path or synthetic config")
      ->required();
  evaluate_cmd->add_option("--train-len", ev.train_len, "training rows");
  evaluate_cmd->add_option("--seq-len", ev.seq_len, "LSTM sequence length");
  evaluate_cmd->add_flag("--physical", ev.physical,
                         "also report physical-scale metrics");
  evaluate_cmd->add_option("--out", ev.out, "output directory");

  SweepArgs sw;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "structure or kernel sweep with report");
  sweep_cmd->add_option("--data", sw.data, "CSV path or synthetic config")
      ->required();
  sweep_cmd->add_option("--hidden", sw.hidden, "hidden sizes to sweep")
      ->delimiter(',');
  sweep_cmd->add_option("--kernels", sw.kernels, "kernels to sweep")
      ->delimiter(',');
  sweep_cmd->add_option("--train-len", sw.train_len, "training rows");
  sweep_cmd->add_option("--seed", sw.seed, "master seed");
  sweep_cmd->add_option("--out", sw.out, "output directory");
  sweep_cmd->add_flag("--show-reference", sw.show_reference,
                      "print the published tables alongside");
  add_model_flags(sweep_cmd, sw.model, true);

  ReportArgs rp;
  CLI::App* report_cmd = app.add_subcommand(
      "report", "re-export tables, compare methods, or emit plot data");
  report_cmd->add_option("--table", rp.table, "report.json to re-export");
  report_cmd->add_option("--format", rp.format, "csv, json, or markdown");
  report_cmd->add_option("--out", rp.out, "output file or directory");
  report_cmd->add_flag("--reference", rp.reference,
                       "print the published tables");
  report_cmd->add_option("--compare", rp.compare, "report.json files to rank")
      ->delimiter(',');
  report_cmd->add_flag("--plot-data", rp.plot_data,
                       "emit hydrograph/scatter CSVs for a model");
  report_cmd->add_option("--model", rp.model, "model file (plot-data)");
  report_cmd->add_option("--data", rp.data, "CSV path or synthetic config");
  report_cmd->add_option("--train-len", rp.train_len, "training rows");
  report_cmd->add_option("--seq-len", rp.seq_len, "LSTM sequence length");
  report_cmd->add_option("--split", rp.split, "train or test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*train_cmd) return run_train(tr);
    if (*evaluate_cmd) return run_evaluate(ev);
    if (*sweep_cmd) return run_sweep_cmd(sw);
    if (*report_cmd) return run_report(rp);
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 2;
  }
}
