#include "karst/optim.hpp"

#include "karst/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace karst {

double mse_loss(const Vector& predictions, const Vector& observations) {
  if (predictions.size() != observations.size() || predictions.size() == 0) {
    throw ValidationError("mse_loss: vectors must have equal nonzero length");
  }
  return (predictions - observations).squaredNorm() /
         static_cast<double>(predictions.size());
}

Vector mse_grad(const Vector& predictions, const Vector& observations) {
  if (predictions.size() != observations.size() || predictions.size() == 0) {
    throw ValidationError("mse_grad: vectors must have equal nonzero length");
  }
  return 2.0 / static_cast<double>(predictions.size()) *
         (predictions - observations);
}

void LrSchedule::validate() const {
  if (initial_rate <= 0.0) throw ValidationError("lr schedule: initial_rate must be > 0");
  if (decay_rate <= 0.0 || decay_rate > 1.0) {
    throw ValidationError("lr schedule: decay_rate must be in (0, 1]");
  }
  if (decay_steps < 1) throw ValidationError("lr schedule: decay_steps must be >= 1");
}

double lr_at(const LrSchedule& schedule, int epoch) {
  schedule.validate();
  if (epoch < 0) throw ValidationError("lr_at: epoch must be >= 0");
  return schedule.initial_rate *
         std::pow(schedule.decay_rate, epoch / schedule.decay_steps);
}

AdamState AdamState::like(const std::vector<Eigen::Map<Array>>& params) {
  AdamState state;
  for (const auto& p : params) {
    state.m.push_back(Array::Zero(p.size()));
    state.v.push_back(Array::Zero(p.size()));
  }
  return state;
}

void adam_step(std::vector<Eigen::Map<Array>>& params,
               const std::vector<Eigen::Map<const Array>>& grads,
               AdamState& state, double rate) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ValidationError("adam_step: parameter/gradient/state count mismatch");
  }
  if (rate <= 0.0) throw ValidationError("adam_step: rate must be > 0");
  state.step_count += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, state.step_count);
  const double bias2 = 1.0 - std::pow(state.beta2, state.step_count);
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size() ||
        params[i].size() != state.m[i].size()) {
      throw ValidationError("adam_step: shape mismatch at tensor " +
                            std::to_string(i));
    }
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] =
        state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i].square();
    params[i] -= rate * (state.m[i] / bias1) /
                 ((state.v[i] / bias2).sqrt() + state.epsilon);
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("train config: epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("train config: batch_size must be >= 1");
  if (sequence_length < 1) {
    throw ValidationError("train config: sequence_length must be >= 1");
  }
  schedule.validate();
}

std::vector<Vector> lstm_input_sequence(const Matrix& inputs, Index row,
                                        int seq_len) {
  Index first = std::max<Index>(0, row - seq_len + 1);
  std::vector<Vector> seq;
  seq.reserve(row - first + 1);
  for (Index t = first; t <= row; ++t) {
    seq.push_back(inputs.row(t).transpose());
  }
  return seq;
}

double mlp_batch_gradient(const MlpModel& model, const Matrix& x,
                          const Vector& y, MlpGrads& grads) {
  if (x.rows() != y.size() || x.rows() == 0) {
    throw ValidationError("mlp_batch_gradient: batch shape mismatch");
  }
  Vector preds(x.rows());
  std::vector<MlpCache> caches(x.rows());
  for (Index k = 0; k < x.rows(); ++k) {
    preds[k] = mlp_forward(model, x.row(k).transpose(), &caches[k]);
  }
  Vector dl = mse_grad(preds, y);
  for (Index k = 0; k < x.rows(); ++k) {
    mlp_backward(model, caches[k], dl[k], grads);
  }
  return mse_loss(preds, y);
}

double lstm_batch_gradient(const LstmModel& model,
                           const std::vector<std::vector<Vector>>& sequences,
                           const Vector& y, LstmGrads& grads) {
  if (static_cast<Index>(sequences.size()) != y.size() || sequences.empty()) {
    throw ValidationError("lstm_batch_gradient: batch shape mismatch");
  }
  Vector preds(y.size());
  std::vector<LstmCache> caches(sequences.size());
  for (size_t k = 0; k < sequences.size(); ++k) {
    preds[static_cast<Index>(k)] = lstm_forward(model, sequences[k], &caches[k]);
  }
  Vector dl = mse_grad(preds, y);
  for (size_t k = 0; k < sequences.size(); ++k) {
    lstm_backward(model, caches[k], dl[static_cast<Index>(k)], grads);
  }
  return mse_loss(preds, y);
}

namespace {

// Shared epoch/batch/Adam loop. `forward` evaluates one sample and
// stashes whatever backward needs; `backward` accumulates gradients for
// the sample with upstream dL/dy.
template <class Model, class Grads>
TrainingHistory train_core(
    Model& model, Grads& grads, const SupervisedDataset& data,
    const TrainConfig& config, std::vector<Index> samples,
    const std::function<double(Index sample, size_t slot)>& forward,
    const std::function<void(size_t slot, double dl, Grads&)>& backward,
    const BatchObserver& observer) {
  config.validate();
  if (data.rows() == 0) throw ValidationError("train: empty training set");
  if (samples.empty()) {
    throw ValidationError("train: no usable samples (sequence_length " +
                          std::to_string(config.sequence_length) +
                          " exceeds dataset rows)");
  }

  auto t0 = std::chrono::steady_clock::now();
  auto views = param_views(model);
  AdamState adam = AdamState::like(views);
  RngStream rng(config.seed);

  TrainingHistory history;
  history.epoch_loss.reserve(config.epochs);
  history.learning_rate.reserve(config.epochs);

  Model best_model = model;
  double best_loss = std::numeric_limits<double>::infinity();

  const Index n_samples = static_cast<Index>(samples.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) {
      for (Index i = n_samples - 1; i > 0; --i) {
        Index j = static_cast<Index>(rng.index_below(i + 1));
        std::swap(samples[i], samples[j]);
      }
    }
    const double rate = lr_at(config.schedule, epoch);
    double sq_error_sum = 0.0;

    int batch_index = 0;
    for (Index begin = 0; begin < n_samples; begin += config.batch_size) {
      const Index count = std::min<Index>(config.batch_size, n_samples - begin);
      Vector preds(count);
      Vector targets(count);
      for (Index k = 0; k < count; ++k) {
        const Index row = samples[begin + k];
        preds[k] = forward(row, static_cast<size_t>(k));
        targets[k] = data.targets[row];
      }
      const double batch_loss = mse_loss(preds, targets);
      if (!std::isfinite(batch_loss)) {
        throw ConvergenceError("training diverged: non-finite loss at epoch " +
                               std::to_string(epoch) + ", batch " +
                               std::to_string(batch_index));
      }
      if (observer) observer(epoch, batch_index, preds, targets);
      sq_error_sum += batch_loss * static_cast<double>(count);

      Vector dl = mse_grad(preds, targets);
      grads.set_zero();
      for (Index k = 0; k < count; ++k) {
        backward(static_cast<size_t>(k), dl[k], grads);
      }
      auto gviews = grad_views(grads);
      adam_step(views, gviews, adam, rate);
      ++batch_index;
    }

    const double epoch_loss = sq_error_sum / static_cast<double>(n_samples);
    history.epoch_loss.push_back(epoch_loss);
    history.learning_rate.push_back(rate);
    if (epoch_loss < best_loss) {
      best_loss = epoch_loss;
      best_model = model;
      history.best_epoch = epoch;
    }
  }

  model = best_model;
  model.trained = true;
  history.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return history;
}

}  // namespace

TrainingHistory train(MlpModel& model, const SupervisedDataset& train_set,
                      const TrainConfig& config, const BatchObserver& observer) {
  if (train_set.feature_width() != model.input_dim()) {
    throw ValidationError("train: dataset width " +
                          std::to_string(train_set.feature_width()) +
                          " does not match model input " +
                          std::to_string(model.input_dim()));
  }
  std::vector<Index> samples(train_set.rows());
  std::iota(samples.begin(), samples.end(), Index{0});

  std::vector<MlpCache> caches(config.batch_size);
  MlpGrads grads = MlpGrads::zeros_like(model);
  auto forward = [&](Index row, size_t slot) {
    return mlp_forward(model, train_set.inputs.row(row).transpose(),
                       &caches[slot]);
  };
  auto backward = [&](size_t slot, double dl, MlpGrads& g) {
    mlp_backward(model, caches[slot], dl, g);
  };
  return train_core<MlpModel, MlpGrads>(model, grads, train_set, config,
                                        std::move(samples), forward, backward,
                                        observer);
}

TrainingHistory train(LstmModel& model, const SupervisedDataset& train_set,
                      const TrainConfig& config, const BatchObserver& observer) {
  if (train_set.feature_width() != model.input_dim()) {
    throw ValidationError("train: dataset width " +
                          std::to_string(train_set.feature_width()) +
                          " does not match model input " +
                          std::to_string(model.input_dim()));
  }
  // rows with a full input window
  std::vector<Index> samples;
  for (Index row = config.sequence_length - 1; row < train_set.rows(); ++row) {
    samples.push_back(row);
  }

  std::vector<LstmCache> caches(config.batch_size);
  LstmGrads grads = LstmGrads::zeros_like(model);
  auto forward = [&](Index row, size_t slot) {
    auto seq = lstm_input_sequence(train_set.inputs, row, config.sequence_length);
    return lstm_forward(model, seq, &caches[slot]);
  };
  auto backward = [&](size_t slot, double dl, LstmGrads& g) {
    lstm_backward(model, caches[slot], dl, g);
  };
  return train_core<LstmModel, LstmGrads>(model, grads, train_set, config,
                                          std::move(samples), forward, backward,
                                          observer);
}

std::vector<Array> finite_difference(std::vector<Eigen::Map<Array>> params,
                                     const std::function<double()>& loss,
                                     double step) {
  if (step <= 0.0) throw ValidationError("finite_difference: step must be > 0");
  std::vector<Array> grads;
  grads.reserve(params.size());
  for (auto& p : params) {
    Array g(p.size());
    for (Index i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + step;
      const double up = loss();
      p[i] = saved - step;
      const double down = loss();
      p[i] = saved;
      g[i] = (up - down) / (2.0 * step);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

std::vector<Array> finite_diff_grad(MlpModel& model, const Matrix& x,
                                    const Vector& y, double step) {
  auto loss = [&]() {
    Vector preds(x.rows());
    for (Index k = 0; k < x.rows(); ++k) {
      preds[k] = mlp_forward(model, x.row(k).transpose());
    }
    return mse_loss(preds, y);
  };
  return finite_difference(param_views(model), loss, step);
}

std::vector<Array> finite_diff_grad(
    LstmModel& model, const std::vector<std::vector<Vector>>& sequences,
    const Vector& y, double step) {
  auto loss = [&]() {
    Vector preds(y.size());
    for (size_t k = 0; k < sequences.size(); ++k) {
      preds[static_cast<Index>(k)] = lstm_forward(model, sequences[k]);
    }
    return mse_loss(preds, y);
  };
  return finite_difference(param_views(model), loss, step);
}

}  // namespace karst
