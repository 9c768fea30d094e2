#pragma once

#include "karst/data.hpp"
#include "karst/lstm.hpp"
#include "karst/mlp.hpp"
#include "karst/svr.hpp"
#include "karst/types.hpp"

#include <optional>
#include <string>

namespace karst {

struct Metrics {
  double mse = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

/// MSE, MAE, RMSE in one pass; RMSE is the square root of the same sum.
Metrics compute_metrics(const Vector& predicted, const Vector& observed);

/// One prediction per supervised row.
Vector predict_all(const MlpModel& model, const Matrix& inputs);
Vector predict_all(const LstmModel& model, const Matrix& inputs,
                   int sequence_length = 1);

/// Train/test evaluation of a fitted model, normalized scale; physical
/// scale (denormalized discharge) filled in when requested.
struct EvalReport {
  std::string model_id;  // mlp / lstm / svr
  std::string label;     // structure or kernel, e.g. "10-32-1"
  Metrics train;
  Metrics test;
  std::optional<Metrics> train_physical;
  std::optional<Metrics> test_physical;
};

/// Metrics of predictions against a split's targets. Throws
/// ValidationError on an untrained model or empty split.
Metrics evaluate_split(const Vector& predictions, const SupervisedDataset& split);

/// Same residual statistics after mapping both series back to m^3/s.
Metrics evaluate_split_physical(const Vector& predictions,
                                const SupervisedDataset& split);

EvalReport evaluate(const MlpModel& model, const SupervisedDataset& train,
                    const SupervisedDataset& test, const std::string& label,
                    bool physical = false);
EvalReport evaluate(const LstmModel& model, const SupervisedDataset& train,
                    const SupervisedDataset& test, const std::string& label,
                    bool physical = false, int sequence_length = 1);
EvalReport evaluate(const SvrModel& model, const SupervisedDataset& train,
                    const SupervisedDataset& test, const std::string& label,
                    bool physical = false);

}  // namespace karst
