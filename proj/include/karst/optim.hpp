#pragma once

#include "karst/data.hpp"
#include "karst/lstm.hpp"
#include "karst/mlp.hpp"
#include "karst/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace karst {

/// Mean of squared differences (Eq. of the MSE metric, used as the
/// training loss).
double mse_loss(const Vector& predictions, const Vector& observations);

/// dL/dpred_i = 2 (pred_i - obs_i) / n.
Vector mse_grad(const Vector& predictions, const Vector& observations);

/// Exponential decay: rate(e) = initial * decay ^ floor(e / steps).
struct LrSchedule {
  double initial_rate = 1e-4;
  double decay_rate = 0.99;
  int decay_steps = 1;

  void validate() const;
};

double lr_at(const LrSchedule& schedule, int epoch);

/// Adam accumulators, one flat array per parameter tensor.
struct AdamState {
  std::vector<Array> m;
  std::vector<Array> v;
  long step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState like(const std::vector<Eigen::Map<Array>>& params);
};

/// One bias-corrected Adam update, in place:
///   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;  t <- t+1
///   theta <- theta - rate * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
void adam_step(std::vector<Eigen::Map<Array>>& params,
               const std::vector<Eigen::Map<const Array>>& grads,
               AdamState& state, double rate);

struct TrainConfig {
  int epochs = 1000;
  int batch_size = 16;  // paper protocol: 16 for MLP, 1 for LSTM
  LrSchedule schedule;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = false;  // default keeps time order
  int sequence_length = 1;          // LSTM input window, in supervised rows

  void validate() const;
};

struct TrainingHistory {
  std::vector<double> epoch_loss;    // mean training MSE per epoch
  std::vector<double> learning_rate; // rate used in each epoch
  double wall_seconds = 0.0;
  int best_epoch = 0;                // epoch of the retained snapshot
};

/// Called once per batch with that batch's predictions and targets.
using BatchObserver =
    std::function<void(int epoch, int batch, const Vector& predictions,
                       const Vector& targets)>;

/// Mini-batch Adam training for exactly config.epochs epochs; the model
/// is left at its best-epoch-loss snapshot. Throws ConvergenceError
/// (naming epoch and batch) if the loss turns non-finite.
TrainingHistory train(MlpModel& model, const SupervisedDataset& train_set,
                      const TrainConfig& config,
                      const BatchObserver& observer = {});
TrainingHistory train(LstmModel& model, const SupervisedDataset& train_set,
                      const TrainConfig& config,
                      const BatchObserver& observer = {});

/// Batch MSE loss plus accumulated analytic gradients; shared by the
/// trainer and the gradient tests.
double mlp_batch_gradient(const MlpModel& model, const Matrix& x,
                          const Vector& y, MlpGrads& grads);
double lstm_batch_gradient(const LstmModel& model,
                           const std::vector<std::vector<Vector>>& sequences,
                           const Vector& y, LstmGrads& grads);

/// Central finite differences (L(t+d) - L(t-d)) / 2d over every
/// parameter viewed by `params`; `loss` re-evaluates the full loss.
std::vector<Array> finite_difference(std::vector<Eigen::Map<Array>> params,
                                     const std::function<double()>& loss,
                                     double step);

/// Finite-difference oracle at the model level: gradients of the batch
/// MSE, in param_views order.
std::vector<Array> finite_diff_grad(MlpModel& model, const Matrix& x,
                                    const Vector& y, double step);
std::vector<Array> finite_diff_grad(LstmModel& model,
                                    const std::vector<std::vector<Vector>>& sequences,
                                    const Vector& y, double step);

/// Rows [row - seq_len + 1, row] as step vectors, truncated at the top
/// of the matrix.
std::vector<Vector> lstm_input_sequence(const Matrix& inputs, Index row,
                                        int seq_len);

}  // namespace karst
