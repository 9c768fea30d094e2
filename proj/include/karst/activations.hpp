#pragma once

#include "karst/types.hpp"

#include <cmath>

namespace karst {

enum class Activation { kRelu, kIdentity, kTanh, kSigmoid };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Elementwise sigmoid, expression-friendly.
template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& z) {
  return 1.0 / (1.0 + (-z).exp());
}

inline Vector apply_activation(Activation kind, const Vector& z) {
  switch (kind) {
    case Activation::kRelu:
      return z.array().max(0.0).matrix();
    case Activation::kIdentity:
      return z;
    case Activation::kTanh:
      return z.array().tanh().matrix();
    case Activation::kSigmoid:
      return sigmoid(z.array()).matrix();
  }
  throw ValidationError("unknown activation kind");
}

/// Derivative with respect to the pre-activation z.
/// The ReLU subgradient at exactly 0 is taken as 0.
inline Vector activation_grad(Activation kind, const Vector& z) {
  switch (kind) {
    case Activation::kRelu:
      return (z.array() > 0.0).cast<double>().matrix();
    case Activation::kIdentity:
      return Vector::Ones(z.size());
    case Activation::kTanh:
      return (1.0 - z.array().tanh().square()).matrix();
    case Activation::kSigmoid: {
      Array s = sigmoid(z.array());
      return (s * (1.0 - s)).matrix();
    }
  }
  throw ValidationError("unknown activation kind");
}

}  // namespace karst
