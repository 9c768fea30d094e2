#pragma once

#include "karst/rng.hpp"
#include "karst/types.hpp"

#include <vector>

namespace karst {

/// One-hidden-layer perceptron: y = w2 * relu(w1 * x + b1) + b2.
struct MlpModel {
  Matrix w1;  // h x in
  Vector b1;  // h
  Matrix w2;  // 1 x h
  double b2 = 0.0;
  bool trained = false;

  Index input_dim() const { return w1.cols(); }
  Index hidden_size() const { return w1.rows(); }

  /// He-normal input weights, Xavier-normal output weights, zero biases.
  static MlpModel init(Index input_dim, Index hidden, RngStream& rng);
};

struct MlpCache {
  Vector x;  // input
  Vector z;  // hidden pre-activation
  Vector a;  // hidden activation
};

struct MlpGrads {
  Matrix w1;
  Vector b1;
  Matrix w2;
  double b2 = 0.0;

  static MlpGrads zeros_like(const MlpModel& model);
  void set_zero();
};

/// Feeds x through the model; fills `cache` (when given) for backprop.
double mlp_forward(const MlpModel& model, const Vector& x,
                   MlpCache* cache = nullptr);

/// Accumulates parameter gradients for a scalar upstream dL/dy into
/// `grads`. The cache must come from a forward pass of this model.
void mlp_backward(const MlpModel& model, const MlpCache& cache,
                  double dloss_dy, MlpGrads& grads);

/// Flat elementwise views over all parameters, in a fixed order shared
/// with grad_views; this is what the optimizer walks.
std::vector<Eigen::Map<Array>> param_views(MlpModel& model);
std::vector<Eigen::Map<const Array>> grad_views(const MlpGrads& grads);

}  // namespace karst
