#pragma once

#include "karst/data.hpp"
#include "karst/metrics.hpp"
#include "karst/optim.hpp"
#include "karst/svr.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace karst {

enum class Method { kMlp, kLstm, kSvr };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

/// "10-32-1" style label used throughout the report tables.
std::string structure_label(Index input_dim, int hidden);

using TableSource = std::variant<std::filesystem::path, SyntheticSpec>;

/// One sweep: a method, its variant axis (hidden sizes or kernels), the
/// training protocol, the data source, and the master seed. Variant v
/// trains from derive_seed(seed, v) so each row is reproducible alone.
struct ExperimentSpec {
  Method method = Method::kMlp;
  std::vector<int> hidden_sizes = {32, 64, 128, 256};
  std::vector<Kernel> kernels = {{KernelKind::kLinear},
                                 {KernelKind::kPolynomial},
                                 {KernelKind::kRbf},
                                 {KernelKind::kSigmoid}};
  TrainConfig train;
  SvrConfig svr;
  TableSource source = SyntheticSpec{};
  Index train_len = 311;
  int lag_n = 1;
  int lag_m = 1;
  int lstm_layers = 1;
  std::uint64_t seed = 7;

  void validate() const;
};

struct SweepRow {
  std::string structure;
  Metrics train;
  Metrics test;
  bool ok = true;
  std::string status = "ok";  // or "failed: <diagnostic>"
};

struct ReportTable {
  std::string method;
  std::vector<SweepRow> rows;
  int best_index = -1;  // argmin test MSE; ties by test RMSE, then size
};

/// Loads or synthesizes the table, fits the normalizer on the training
/// block (the first train_len + max lag rows), windows, and splits.
struct PreparedData {
  TimeSeriesTable table;
  NormalizationParams norm;
  SupervisedDataset full;
  SupervisedDataset train;
  SupervisedDataset test;
};

TimeSeriesTable resolve_source(const TableSource& source);
PreparedData prepare_pipeline(const TableSource& source, int lag_n, int lag_m,
                              Index train_len);

/// Trains and evaluates every variant; a diverging variant is flagged
/// in its row and the sweep continues.
ReportTable run_sweep(const ExperimentSpec& spec);

/// Methods ranked by their best variant's testing MSE, plus the matrix
/// of pairwise testing-RMSE ratios (ranking order).
struct MethodRank {
  std::string method;
  std::string best_label;
  Metrics best_test;
};

struct MethodComparison {
  std::vector<MethodRank> ranking;
  Matrix rmse_ratio;
  bool tie = false;
};

MethodComparison compare_methods(const std::vector<ReportTable>& tables);
std::string format_comparison(const MethodComparison& comparison);

enum class ReportFormat { kCsv, kJson, kMarkdown };

std::string render_report(const ReportTable& table, ReportFormat format);
void export_report(const ReportTable& table, ReportFormat format,
                   const std::filesystem::path& path);
ReportTable report_from_json(const std::string& json_text);
ReportTable load_report(const std::filesystem::path& path);

/// Writes <prefix>_hydrograph.csv (month, observed, predicted) and
/// <prefix>_scatter.csv (observed, predicted), in physical units.
void emit_plot_data(const Vector& predictions_norm,
                    const SupervisedDataset& split,
                    const std::filesystem::path& out_prefix);
void emit_plot_data(const MlpModel& model, const SupervisedDataset& split,
                    const std::filesystem::path& out_prefix);
void emit_plot_data(const LstmModel& model, const SupervisedDataset& split,
                    const std::filesystem::path& out_prefix);
void emit_plot_data(const SvrModel& model, const SupervisedDataset& split,
                    const std::filesystem::path& out_prefix);

/// The published comparison tables, bundled for side-by-side display
/// next to locally produced results. Never used as assertion targets.
const char* paper_reference_json();

}  // namespace karst
