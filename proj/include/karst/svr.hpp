#pragma once

#include "karst/data.hpp"
#include "karst/types.hpp"

#include <optional>
#include <string>

namespace karst {

enum class KernelKind { kLinear, kPolynomial, kRbf, kSigmoid };

std::string kernel_name(KernelKind kind);
KernelKind kernel_from_name(const std::string& name);

struct Kernel {
  KernelKind kind = KernelKind::kLinear;
  int degree = 3;      // polynomial
  double gamma = 0.0;  // <= 0 resolves to 1 / (dim * Var(X)) at fit time
  double coef0 = 0.0;  // polynomial / sigmoid offset

  void validate() const;
};

///   linear:     x . x'
///   polynomial: (gamma x . x' + coef0) ^ degree
///   rbf:        exp(-gamma |x - x'|^2)
///   sigmoid:    tanh(gamma x . x' + coef0)
double kernel_eval(const Kernel& kernel, const Vector& a, const Vector& b);

/// epsilon-insensitive loss: 0 inside the tube, |z| - epsilon outside.
double eps_loss(double z, double epsilon);

struct SvrConfig {
  double c = 1.0;
  double epsilon = 0.01;  // tube half-width, normalized units
  Kernel kernel;
  double tolerance = 1e-6;  // max KKT violation at convergence
  int max_passes = 100000;  // iteration budget, in sweeps of N pair updates

  void validate() const;
};

/// Fitted model: f(x) = sum_i coeff_i K(x_i, x) + bias, with
/// coeff_i = alpha_i - alpha*_i in [-C, C].
struct SvrModel {
  Matrix support_x;  // training inputs, one row per coefficient
  Vector coeff;
  double bias = 0.0;
  Kernel kernel;  // gamma resolved
  double epsilon = 0.0;
  double c = 0.0;
  std::optional<NormalizationParams> norm_ref;
  bool trained = false;

  Index support_count() const;  // rows with nonzero coefficient
};

/// Solves the dual of min 1/2|w|^2 + C sum eps_loss(f(x_i) - y_i) by
/// maximal-violating-pair coordinate steps with an exact per-pair line
/// search. Throws ConvergenceError (with the residual KKT violation and
/// duality gap) if the tolerance is not met within the pass budget.
SvrModel svr_fit(const Matrix& x, const Vector& y, const SvrConfig& config);

double svr_predict(const SvrModel& model, const Vector& x);
Vector svr_predict_all(const SvrModel& model, const Matrix& x);

/// Brute-force reference solver: enumerates every bound/sign pattern of
/// the dual coefficients and solves each reduced KKT system. Exact on
/// small problems; refuses N > 10. Test oracle only.
SvrModel qp_oracle_fit(const Matrix& x, const Vector& y,
                       const SvrConfig& config);

/// Dual objective 1/2 b^T K b - y^T b + epsilon |b|_1 of a coefficient
/// vector; lower is better, comparable across solvers.
double svr_dual_objective(const Matrix& x, const Vector& y,
                          const SvrConfig& config, const Vector& coeff);

/// gamma = 1 / (dim * Var(X)) with Var over all matrix entries.
double auto_gamma(const Matrix& x);

}  // namespace karst
