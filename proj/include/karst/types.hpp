#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace karst {

// 64-bit floating point everywhere; gradient-check tolerances depend on it.
using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Array = Eigen::ArrayXd;
using Index = Eigen::Index;

inline constexpr const char* kToolVersion = "0.1.0";

/// Bad input data, malformed file, or violated precondition.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver or training failure (divergence, tolerance not reached).
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Calendar month. The time axis of every series; step is always one month.
struct YearMonth {
  int year = 1987;
  int month = 1;  // 1..12

  YearMonth plus_months(int k) const {
    int idx = year * 12 + (month - 1) + k;
    // floor division so negative offsets work too
    int y = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
    return {y, idx - y * 12 + 1};
  }

  YearMonth next() const { return plus_months(1); }

  /// Signed number of months from `other` to `*this`.
  int months_since(const YearMonth& other) const {
    return (year - other.year) * 12 + (month - other.month);
  }

  bool operator==(const YearMonth&) const = default;

  std::string str() const;

  /// Parses strict "YYYY-MM". Throws ValidationError otherwise.
  static YearMonth parse(const std::string& text);
};

}  // namespace karst
