#include "karst/mlp.hpp"

#include "karst/activations.hpp"
#include "karst/init.hpp"

namespace karst {

MlpModel MlpModel::init(Index input_dim, Index hidden, RngStream& rng) {
  if (input_dim < 1 || hidden < 1) {
    throw ValidationError("MlpModel::init: dimensions must be >= 1");
  }
  MlpModel m;
  m.w1 = init_weights(InitScheme::kHe, hidden, input_dim, rng);
  m.b1 = Vector::Zero(hidden);
  m.w2 = init_weights(InitScheme::kXavier, 1, hidden, rng);
  m.b2 = 0.0;
  return m;
}

MlpGrads MlpGrads::zeros_like(const MlpModel& model) {
  MlpGrads g;
  g.w1 = Matrix::Zero(model.w1.rows(), model.w1.cols());
  g.b1 = Vector::Zero(model.b1.size());
  g.w2 = Matrix::Zero(model.w2.rows(), model.w2.cols());
  g.b2 = 0.0;
  return g;
}

void MlpGrads::set_zero() {
  w1.setZero();
  b1.setZero();
  w2.setZero();
  b2 = 0.0;
}

double mlp_forward(const MlpModel& model, const Vector& x, MlpCache* cache) {
  if (x.size() != model.input_dim()) {
    throw ValidationError("mlp_forward: input has " + std::to_string(x.size()) +
                          " features, model expects " +
                          std::to_string(model.input_dim()));
  }
  Vector z = model.w1 * x + model.b1;
  Vector a = apply_activation(Activation::kRelu, z);
  double y = model.w2.row(0).dot(a) + model.b2;  // identity output
  if (cache) {
    cache->x = x;
    cache->z = std::move(z);
    cache->a = std::move(a);
  }
  return y;
}

void mlp_backward(const MlpModel& model, const MlpCache& cache,
                  double dloss_dy, MlpGrads& grads) {
  if (cache.x.size() != model.input_dim() ||
      cache.z.size() != model.hidden_size() ||
      cache.a.size() != model.hidden_size()) {
    throw ValidationError("mlp_backward: cache does not match model shape");
  }
  if (grads.w1.rows() != model.w1.rows() || grads.w1.cols() != model.w1.cols()) {
    throw ValidationError("mlp_backward: gradient buffer shape mismatch");
  }
  grads.w2.row(0) += dloss_dy * cache.a.transpose();
  grads.b2 += dloss_dy;
  Vector da = dloss_dy * model.w2.row(0).transpose();
  Vector dz = da.cwiseProduct(activation_grad(Activation::kRelu, cache.z));
  grads.w1 += dz * cache.x.transpose();
  grads.b1 += dz;
}

std::vector<Eigen::Map<Array>> param_views(MlpModel& model) {
  std::vector<Eigen::Map<Array>> views;
  views.emplace_back(model.w1.data(), model.w1.size());
  views.emplace_back(model.b1.data(), model.b1.size());
  views.emplace_back(model.w2.data(), model.w2.size());
  views.emplace_back(&model.b2, 1);
  return views;
}

std::vector<Eigen::Map<const Array>> grad_views(const MlpGrads& grads) {
  std::vector<Eigen::Map<const Array>> views;
  views.emplace_back(grads.w1.data(), grads.w1.size());
  views.emplace_back(grads.b1.data(), grads.b1.size());
  views.emplace_back(grads.w2.data(), grads.w2.size());
  views.emplace_back(&grads.b2, 1);
  return views;
}

}  // namespace karst
