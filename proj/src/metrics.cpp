#include "karst/metrics.hpp"

#include "karst/optim.hpp"

#include <cmath>

namespace karst {

Metrics compute_metrics(const Vector& predicted, const Vector& observed) {
  if (predicted.size() != observed.size() || predicted.size() == 0) {
    throw ValidationError("compute_metrics: vectors must have equal nonzero length");
  }
  const double n = static_cast<double>(predicted.size());
  double sq_sum = 0.0;
  double abs_sum = 0.0;
  for (Index i = 0; i < predicted.size(); ++i) {
    const double r = predicted[i] - observed[i];
    sq_sum += r * r;
    abs_sum += std::abs(r);
  }
  Metrics m;
  m.mse = sq_sum / n;
  m.mae = abs_sum / n;
  m.rmse = std::sqrt(m.mse);
  return m;
}

Vector predict_all(const MlpModel& model, const Matrix& inputs) {
  Vector out(inputs.rows());
  for (Index r = 0; r < inputs.rows(); ++r) {
    out[r] = mlp_forward(model, inputs.row(r).transpose());
  }
  return out;
}

Vector predict_all(const LstmModel& model, const Matrix& inputs,
                   int sequence_length) {
  if (sequence_length < 1) {
    throw ValidationError("predict_all: sequence_length must be >= 1");
  }
  Vector out(inputs.rows());
  for (Index r = 0; r < inputs.rows(); ++r) {
    out[r] = lstm_forward(model, lstm_input_sequence(inputs, r, sequence_length));
  }
  return out;
}

Metrics evaluate_split(const Vector& predictions, const SupervisedDataset& split) {
  return compute_metrics(predictions, split.targets);
}

Metrics evaluate_split_physical(const Vector& predictions,
                                const SupervisedDataset& split) {
  const Index q = NormalizationParams::kDischargeCol;
  Vector pred_phys(predictions.size());
  Vector obs_phys(split.targets.size());
  for (Index i = 0; i < predictions.size(); ++i) {
    pred_phys[i] = denormalize(predictions[i], split.norm, q);
    obs_phys[i] = denormalize(split.targets[i], split.norm, q);
  }
  return compute_metrics(pred_phys, obs_phys);
}

namespace {

template <class PredictFn>
EvalReport evaluate_impl(const PredictFn& predict, const std::string& model_id,
                         const SupervisedDataset& train,
                         const SupervisedDataset& test, const std::string& label,
                         bool physical) {
  if (train.rows() == 0 || test.rows() == 0) {
    throw ValidationError("evaluate: empty split");
  }
  EvalReport report;
  report.model_id = model_id;
  report.label = label;
  Vector train_pred = predict(train.inputs);
  Vector test_pred = predict(test.inputs);
  report.train = evaluate_split(train_pred, train);
  report.test = evaluate_split(test_pred, test);
  if (physical) {
    report.train_physical = evaluate_split_physical(train_pred, train);
    report.test_physical = evaluate_split_physical(test_pred, test);
  }
  return report;
}

}  // namespace

EvalReport evaluate(const MlpModel& model, const SupervisedDataset& train,
                    const SupervisedDataset& test, const std::string& label,
                    bool physical) {
  if (!model.trained) throw ValidationError("evaluate: model has not been trained");
  return evaluate_impl([&](const Matrix& x) { return predict_all(model, x); },
                       "mlp", train, test, label, physical);
}

EvalReport evaluate(const LstmModel& model, const SupervisedDataset& train,
                    const SupervisedDataset& test, const std::string& label,
                    bool physical, int sequence_length) {
  if (!model.trained) throw ValidationError("evaluate: model has not been trained");
  return evaluate_impl(
      [&](const Matrix& x) { return predict_all(model, x, sequence_length); },
      "lstm", train, test, label, physical);
}

EvalReport evaluate(const SvrModel& model, const SupervisedDataset& train,
                    const SupervisedDataset& test, const std::string& label,
                    bool physical) {
  if (!model.trained) throw ValidationError("evaluate: model has not been fitted");
  return evaluate_impl([&](const Matrix& x) { return svr_predict_all(model, x); },
                       "svr", train, test, label, physical);
}

}  // namespace karst
