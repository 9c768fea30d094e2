#pragma once

#include "karst/rng.hpp"
#include "karst/types.hpp"

#include <cmath>

namespace karst {

enum class InitScheme { kHe, kXavier, kZeros };

/// Weight initializer for a (rows x cols) map of a cols-vector to a
/// rows-vector, so fan_in = cols and fan_out = rows.
///   he:     N(0, 2 / fan_in)
///   xavier: N(0, 2 / (fan_in + fan_out))
inline Matrix init_weights(InitScheme scheme, Index rows, Index cols,
                           RngStream& rng) {
  if (rows <= 0 || cols <= 0) {
    throw ValidationError("init_weights: shape dimensions must be positive");
  }
  if (scheme == InitScheme::kZeros) return Matrix::Zero(rows, cols);
  double variance = scheme == InitScheme::kHe
                        ? 2.0 / static_cast<double>(cols)
                        : 2.0 / static_cast<double>(rows + cols);
  double stddev = std::sqrt(variance);
  Matrix w(rows, cols);
  // fixed traversal order keeps the draw sequence reproducible
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      w(r, c) = stddev * rng.normal();
    }
  }
  return w;
}

}  // namespace karst
