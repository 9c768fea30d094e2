#include "karst/experiment.hpp"

#include "karst/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <future>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace karst {

using ordered_json = nlohmann::ordered_json;

std::string method_name(Method method) {
  switch (method) {
    case Method::kMlp: return "mlp";
    case Method::kLstm: return "lstm";
    case Method::kSvr: return "svr";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "mlp") return Method::kMlp;
  if (name == "lstm") return Method::kLstm;
  if (name == "svr") return Method::kSvr;
  throw ValidationError("unknown method '" + name + "'");
}

std::string structure_label(Index input_dim, int hidden) {
  return std::to_string(input_dim) + "-" + std::to_string(hidden) + "-1";
}

void ExperimentSpec::validate() const {
  if (method == Method::kSvr) {
    if (kernels.empty()) throw ValidationError("sweep: kernel list is empty");
  } else if (hidden_sizes.empty()) {
    throw ValidationError("sweep: hidden size list is empty");
  }
  if (train_len < 1) throw ValidationError("sweep: train_len must be >= 1");
  if (lag_n < 1 || lag_m < 1) throw ValidationError("sweep: lags must be >= 1");
  if (lstm_layers < 1) throw ValidationError("sweep: lstm_layers must be >= 1");
  train.validate();
  svr.validate();
}

TimeSeriesTable resolve_source(const TableSource& source) {
  if (std::holds_alternative<SyntheticSpec>(source)) {
    return generate_synthetic(std::get<SyntheticSpec>(source));
  }
  return load_csv(std::get<std::filesystem::path>(source));
}

PreparedData prepare_pipeline(const TableSource& source, int lag_n, int lag_m,
                              Index train_len) {
  PreparedData data;
  data.table = resolve_source(source);
  const Index max_lag = std::max(lag_n, lag_m);
  const Index train_block = train_len + max_lag;
  if (train_block > data.table.rows()) {
    throw ValidationError("train_len " + std::to_string(train_len) +
                          " exceeds the table's " +
                          std::to_string(data.table.rows()) + " rows");
  }
  data.norm = fit_normalizer(data.table, 0, train_block);
  data.full = make_supervised(data.table, lag_n, lag_m, data.norm);
  auto [train, test] = split_contiguous(data.full, train_len);
  data.train = std::move(train);
  data.test = std::move(test);
  return data;
}

namespace {

Metrics nan_metrics() {
  double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan, nan};
}

int variant_size(const ExperimentSpec& spec, size_t v) {
  return spec.method == Method::kSvr ? static_cast<int>(v)
                                     : spec.hidden_sizes[v];
}

void pick_best(ReportTable& table, const ExperimentSpec& spec) {
  table.best_index = -1;
  for (size_t v = 0; v < table.rows.size(); ++v) {
    if (!table.rows[v].ok) continue;
    if (table.best_index < 0) {
      table.best_index = static_cast<int>(v);
      continue;
    }
    const SweepRow& best = table.rows[static_cast<size_t>(table.best_index)];
    const SweepRow& row = table.rows[v];
    auto key = [&](const SweepRow& r, size_t idx) {
      return std::make_tuple(r.test.mse, r.test.rmse,
                             variant_size(spec, idx));
    };
    if (key(row, v) < key(best, static_cast<size_t>(table.best_index))) {
      table.best_index = static_cast<int>(v);
    }
  }
}

}  // namespace

ReportTable run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  PreparedData data =
      prepare_pipeline(spec.source, spec.lag_n, spec.lag_m, spec.train_len);

  const size_t n_variants = spec.method == Method::kSvr
                                ? spec.kernels.size()
                                : spec.hidden_sizes.size();

  // Each variant owns its model, gradients, and RNG; the prepared data
  // is shared read-only, so variants can run concurrently.
  auto run_variant = [&](size_t v) -> SweepRow {
    SweepRow row;
    try {
      if (spec.method == Method::kSvr) {
        SvrConfig config = spec.svr;
        config.kernel = spec.kernels[v];
        row.structure = kernel_name(config.kernel.kind);
        SvrModel model = svr_fit(data.train.inputs, data.train.targets, config);
        model.norm_ref = data.norm;
        EvalReport report =
            evaluate(model, data.train, data.test, row.structure);
        row.train = report.train;
        row.test = report.test;
      } else {
        TrainConfig config = spec.train;
        config.seed = derive_seed(spec.seed, v);
        const int hidden = spec.hidden_sizes[v];
        row.structure = structure_label(data.train.feature_width(), hidden);
        RngStream rng(config.seed);
        if (spec.method == Method::kMlp) {
          MlpModel model =
              MlpModel::init(data.train.feature_width(), hidden, rng);
          train(model, data.train, config);
          EvalReport report =
              evaluate(model, data.train, data.test, row.structure);
          row.train = report.train;
          row.test = report.test;
        } else {
          LstmModel model = LstmModel::init(data.train.feature_width(), hidden,
                                            spec.lstm_layers, rng);
          train(model, data.train, config);
          EvalReport report =
              evaluate(model, data.train, data.test, row.structure, false,
                       config.sequence_length);
          row.train = report.train;
          row.test = report.test;
        }
      }
    } catch (const ConvergenceError& e) {
      row.ok = false;
      row.status = std::string("failed: ") + e.what();
      row.train = nan_metrics();
      row.test = nan_metrics();
    }
    return row;
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(n_variants);
  for (size_t v = 0; v < n_variants; ++v) {
    futures.push_back(std::async(std::launch::async, run_variant, v));
  }

  ReportTable table;
  table.method = method_name(spec.method);
  for (auto& f : futures) table.rows.push_back(f.get());
  pick_best(table, spec);
  return table;
}

MethodComparison compare_methods(const std::vector<ReportTable>& tables) {
  if (tables.size() < 2) {
    throw ValidationError("compare_methods: need at least 2 report tables");
  }
  MethodComparison cmp;
  for (const ReportTable& table : tables) {
    if (table.best_index < 0) {
      throw ValidationError("compare_methods: table '" + table.method +
                            "' has no successful variant");
    }
    const SweepRow& best = table.rows[static_cast<size_t>(table.best_index)];
    cmp.ranking.push_back({table.method, best.structure, best.test});
  }
  std::stable_sort(cmp.ranking.begin(), cmp.ranking.end(),
                   [](const MethodRank& a, const MethodRank& b) {
                     return a.best_test.mse < b.best_test.mse;
                   });
  for (size_t i = 0; i + 1 < cmp.ranking.size(); ++i) {
    if (cmp.ranking[i].best_test.mse == cmp.ranking[i + 1].best_test.mse) {
      cmp.tie = true;
    }
  }
  const Index n = static_cast<Index>(cmp.ranking.size());
  cmp.rmse_ratio.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      cmp.rmse_ratio(i, j) = cmp.ranking[static_cast<size_t>(i)].best_test.rmse /
                             cmp.ranking[static_cast<size_t>(j)].best_test.rmse;
    }
  }
  return cmp;
}

std::string format_comparison(const MethodComparison& cmp) {
  std::ostringstream out;
  out << "ranking by best testing MSE:\n";
  char buf[160];
  for (size_t i = 0; i < cmp.ranking.size(); ++i) {
    const MethodRank& r = cmp.ranking[i];
    std::snprintf(buf, sizeof(buf),
                  "  %zu. %-5s %-12s test MSE %.6f  RMSE %.6f  MAE %.6f\n",
                  i + 1, r.method.c_str(), r.best_label.c_str(), r.best_test.mse,
                  r.best_test.rmse, r.best_test.mae);
    out << buf;
  }
  if (cmp.tie) out << "  note: tie on best testing MSE\n";
  out << "pairwise testing-RMSE ratios (row / column):\n";
  out << "        ";
  for (const MethodRank& r : cmp.ranking) {
    std::snprintf(buf, sizeof(buf), "%8s", r.method.c_str());
    out << buf;
  }
  out << '\n';
  for (size_t i = 0; i < cmp.ranking.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%8s", cmp.ranking[i].method.c_str());
    out << buf;
    for (size_t j = 0; j < cmp.ranking.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%8.4f",
                    cmp.rmse_ratio(static_cast<Index>(i), static_cast<Index>(j)));
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ordered_json metrics_json(const Metrics& m, bool ok) {
  if (!ok) return nullptr;
  ordered_json j;
  j["mse"] = m.mse;
  j["mae"] = m.mae;
  j["rmse"] = m.rmse;
  return j;
}

Metrics metrics_from_json(const ordered_json& j) {
  if (j.is_null()) return nan_metrics();
  Metrics m;
  m.mse = j.at("mse").get<double>();
  m.mae = j.at("mae").get<double>();
  m.rmse = j.at("rmse").get<double>();
  return m;
}

}  // namespace

std::string render_report(const ReportTable& table, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    std::ostringstream out;
    out << "structure,train_mse,train_mae,train_rmse,test_mse,test_mae,"
           "test_rmse,status\n";
    for (const SweepRow& row : table.rows) {
      out << row.structure << ',' << fmt6(row.train.mse) << ','
          << fmt6(row.train.mae) << ',' << fmt6(row.train.rmse) << ','
          << fmt6(row.test.mse) << ',' << fmt6(row.test.mae) << ','
          << fmt6(row.test.rmse) << ',' << row.status << '\n';
    }
    return out.str();
  }
  if (format == ReportFormat::kJson) {
    ordered_json j;
    j["method"] = table.method;
    j["best_index"] = table.best_index;
    j["rows"] = ordered_json::array();
    for (const SweepRow& row : table.rows) {
      ordered_json r;
      r["structure"] = row.structure;
      r["train"] = metrics_json(row.train, row.ok);
      r["test"] = metrics_json(row.test, row.ok);
      r["status"] = row.status;
      j["rows"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
  }
  // markdown, Tables 1-3 layout: three training and three testing columns
  std::ostringstream out;
  out << "| Structure | Train MSE | Train MAE | Train RMSE | Test MSE | "
         "Test MAE | Test RMSE |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (size_t v = 0; v < table.rows.size(); ++v) {
    const SweepRow& row = table.rows[v];
    out << "| " << row.structure
        << (static_cast<int>(v) == table.best_index ? " (best)" : "");
    if (row.ok) {
      out << " | " << fmt6(row.train.mse) << " | " << fmt6(row.train.mae)
          << " | " << fmt6(row.train.rmse) << " | " << fmt6(row.test.mse)
          << " | " << fmt6(row.test.mae) << " | " << fmt6(row.test.rmse)
          << " |\n";
    } else {
      out << " | " << row.status << " | | | | | |\n";
    }
  }
  return out.str();
}

void export_report(const ReportTable& table, ReportFormat format,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report '" + path.string() + "'");
  out << render_report(table, format);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ReportTable report_from_json(const std::string& json_text) {
  ordered_json j = ordered_json::parse(json_text);
  ReportTable table;
  table.method = j.at("method").get<std::string>();
  table.best_index = j.at("best_index").get<int>();
  for (const ordered_json& r : j.at("rows")) {
    SweepRow row;
    row.structure = r.at("structure").get<std::string>();
    row.status = r.at("status").get<std::string>();
    row.ok = row.status == "ok";
    row.train = metrics_from_json(r.at("train"));
    row.test = metrics_from_json(r.at("test"));
    table.rows.push_back(std::move(row));
  }
  return table;
}

ReportTable load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

void emit_plot_data(const Vector& predictions_norm,
                    const SupervisedDataset& split,
                    const std::filesystem::path& out_prefix) {
  if (predictions_norm.size() != split.rows() || split.rows() == 0) {
    throw ValidationError("emit_plot_data: prediction/split size mismatch");
  }
  const Index q = NormalizationParams::kDischargeCol;
  std::filesystem::path hydro = out_prefix;
  hydro += "_hydrograph.csv";
  std::filesystem::path scatter = out_prefix;
  scatter += "_scatter.csv";

  std::ofstream h(hydro);
  std::ofstream s(scatter);
  if (!h || !s) {
    throw IoError("cannot write plot data at prefix '" + out_prefix.string() +
                  "'");
  }
  h << "month,observed,predicted\n";
  s << "observed,predicted\n";
  char buf[80];
  for (Index k = 0; k < split.rows(); ++k) {
    const double obs = denormalize(split.targets[k], split.norm, q);
    const double pred = denormalize(predictions_norm[k], split.norm, q);
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f", obs, pred);
    h << split.first_target.plus_months(static_cast<int>(k)).str() << ','
      << buf << '\n';
    s << buf << '\n';
  }
}

void emit_plot_data(const MlpModel& model, const SupervisedDataset& split,
                    const std::filesystem::path& out_prefix) {
  if (!model.trained) throw ValidationError("emit_plot_data: model not trained");
  emit_plot_data(predict_all(model, split.inputs), split, out_prefix);
}

void emit_plot_data(const LstmModel& model, const SupervisedDataset& split,
                    const std::filesystem::path& out_prefix) {
  if (!model.trained) throw ValidationError("emit_plot_data: model not trained");
  emit_plot_data(predict_all(model, split.inputs), split, out_prefix);
}

void emit_plot_data(const SvrModel& model, const SupervisedDataset& split,
                    const std::filesystem::path& out_prefix) {
  if (!model.trained) throw ValidationError("emit_plot_data: model not fitted");
  emit_plot_data(svr_predict_all(model, split.inputs), split, out_prefix);
}

const char* paper_reference_json() {
  // Tables 1-3 of the source publication, for display only. The 10-64-1
  // testing MAE value 0.257 is reproduced verbatim from the original.
  return R"({
  "mlp": [
    {"structure": "10-256-1", "train": {"mse": 0.0037, "mae": 0.0321, "rmse": 0.0610}, "test": {"mse": 0.0014, "mae": 0.0267, "rmse": 0.0368}},
    {"structure": "10-128-1", "train": {"mse": 0.0037, "mae": 0.0317, "rmse": 0.0611}, "test": {"mse": 0.0012, "mae": 0.0271, "rmse": 0.0352}},
    {"structure": "10-64-1",  "train": {"mse": 0.0037, "mae": 0.0317, "rmse": 0.0607}, "test": {"mse": 0.0011, "mae": 0.257,  "rmse": 0.0326}},
    {"structure": "10-32-1",  "train": {"mse": 0.0034, "mae": 0.0317, "rmse": 0.0582}, "test": {"mse": 0.0010, "mae": 0.0254, "rmse": 0.0318}}
  ],
  "lstm": [
    {"structure": "10-256-1", "train": {"mse": 0.0041, "mae": 0.0318, "rmse": 0.0641}, "test": {"mse": 0.0011, "mae": 0.0268, "rmse": 0.0336}},
    {"structure": "10-128-1", "train": {"mse": 0.0041, "mae": 0.0319, "rmse": 0.0643}, "test": {"mse": 0.0011, "mae": 0.0268, "rmse": 0.0335}},
    {"structure": "10-64-1",  "train": {"mse": 0.0044, "mae": 0.0338, "rmse": 0.0661}, "test": {"mse": 0.0010, "mae": 0.0272, "rmse": 0.0329}},
    {"structure": "10-32-1",  "train": {"mse": 0.0041, "mae": 0.0319, "rmse": 0.0642}, "test": {"mse": 0.0011, "mae": 0.0269, "rmse": 0.0336}}
  ],
  "svr": [
    {"structure": "linear",     "train": {"mse": 0.0910, "mae": 0.1852, "rmse": 0.3017}, "test": {"mse": 0.0431, "mae": 0.1770, "rmse": 0.2076}},
    {"structure": "polynomial", "train": {"mse": 0.4842, "mae": 0.5612, "rmse": 0.6958}, "test": {"mse": 0.2528, "mae": 0.4366, "rmse": 0.5028}},
    {"structure": "rbf",        "train": {"mse": 0.1005, "mae": 0.2089, "rmse": 0.3171}, "test": {"mse": 0.5570, "mae": 0.2032, "rmse": 0.2360}},
    {"structure": "sigmoid",    "train": {"mse": 0.1110, "mae": 0.2295, "rmse": 0.3332}, "test": {"mse": 0.5594, "mae": 0.2074, "rmse": 0.2365}}
  ]
})";
}

}  // namespace karst
