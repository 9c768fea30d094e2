#include "karst/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace karst {

std::string kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::kLinear: return "linear";
    case KernelKind::kPolynomial: return "polynomial";
    case KernelKind::kRbf: return "rbf";
    case KernelKind::kSigmoid: return "sigmoid";
  }
  return "?";
}

KernelKind kernel_from_name(const std::string& name) {
  if (name == "linear") return KernelKind::kLinear;
  if (name == "polynomial" || name == "poly") return KernelKind::kPolynomial;
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "sigmoid") return KernelKind::kSigmoid;
  throw ValidationError("unknown kernel '" + name + "'");
}

void Kernel::validate() const {
  if (degree < 1) throw ValidationError("kernel: degree must be >= 1");
}

void SvrConfig::validate() const {
  if (c <= 0.0) throw ValidationError("svr config: C must be > 0");
  if (epsilon < 0.0) throw ValidationError("svr config: epsilon must be >= 0");
  if (tolerance <= 0.0) throw ValidationError("svr config: tolerance must be > 0");
  if (max_passes < 1) throw ValidationError("svr config: max_passes must be >= 1");
  kernel.validate();
}

double kernel_eval(const Kernel& kernel, const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ValidationError("kernel_eval: vectors have different dimensions");
  }
  switch (kernel.kind) {
    case KernelKind::kLinear:
      return a.dot(b);
    case KernelKind::kPolynomial: {
      if (kernel.gamma <= 0.0) throw ValidationError("kernel_eval: gamma must be > 0");
      return std::pow(kernel.gamma * a.dot(b) + kernel.coef0, kernel.degree);
    }
    case KernelKind::kRbf: {
      if (kernel.gamma <= 0.0) throw ValidationError("kernel_eval: gamma must be > 0");
      return std::exp(-kernel.gamma * (a - b).squaredNorm());
    }
    case KernelKind::kSigmoid: {
      if (kernel.gamma <= 0.0) throw ValidationError("kernel_eval: gamma must be > 0");
      return std::tanh(kernel.gamma * a.dot(b) + kernel.coef0);
    }
  }
  throw ValidationError("kernel_eval: unknown kernel kind");
}

double eps_loss(double z, double epsilon) {
  if (epsilon < 0.0) throw ValidationError("eps_loss: epsilon must be >= 0");
  double a = std::abs(z);
  return a <= epsilon ? 0.0 : a - epsilon;
}

double auto_gamma(const Matrix& x) {
  const double n = static_cast<double>(x.size());
  const double mean = x.sum() / n;
  const double var = (x.array() - mean).square().sum() / n;
  const double dim = static_cast<double>(x.cols());
  if (var <= 0.0) return 1.0 / dim;
  return 1.0 / (dim * var);
}

Index SvrModel::support_count() const {
  Index n = 0;
  for (Index i = 0; i < coeff.size(); ++i) {
    if (coeff[i] != 0.0) ++n;
  }
  return n;
}

namespace {

Kernel resolve_kernel(const Kernel& kernel, const Matrix& x) {
  Kernel k = kernel;
  if (k.kind != KernelKind::kLinear && k.gamma <= 0.0) k.gamma = auto_gamma(x);
  return k;
}

Matrix gram_matrix(const Kernel& kernel, const Matrix& x) {
  const Index n = x.rows();
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      double v = kernel_eval(kernel, x.row(i).transpose(), x.row(j).transpose());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

// Objective along beta_i += d, beta_j -= d, relative to d = 0:
//   (g_i - g_j) d + eta d^2 / 2
//   + eps (|b_i + d| - |b_i|) + eps (|b_j - d| - |b_j|)
double pair_delta_objective(double d, double gi, double gj, double eta,
                            double eps, double bi, double bj) {
  return (gi - gj) * d + 0.5 * eta * d * d +
         eps * (std::abs(bi + d) - std::abs(bi)) +
         eps * (std::abs(bj - d) - std::abs(bj));
}

// Bias from the final gradient. Unbounded support vectors pin it
// exactly; otherwise take the midpoint of the KKT-feasible interval.
double bias_from_gradient(const Vector& beta, const Vector& g, double c,
                          double eps) {
  double sum = 0.0;
  int count = 0;
  for (Index i = 0; i < beta.size(); ++i) {
    if (beta[i] > 0.0 && beta[i] < c) {
      sum += -g[i] - eps;
      ++count;
    } else if (beta[i] < 0.0 && beta[i] > -c) {
      sum += -g[i] + eps;
      ++count;
    }
  }
  if (count > 0) return sum / count;

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < beta.size(); ++i) {
    if (beta[i] >= c) {
      hi = std::min(hi, -g[i] - eps);
    } else if (beta[i] <= -c) {
      lo = std::max(lo, -g[i] + eps);
    } else {  // beta[i] == 0
      lo = std::max(lo, -g[i] - eps);
      hi = std::min(hi, -g[i] + eps);
    }
  }
  if (!std::isfinite(lo)) return hi;
  if (!std::isfinite(hi)) return lo;
  return 0.5 * (lo + hi);
}

double primal_objective(const Matrix& k, const Vector& beta, const Vector& y,
                        double bias, double c, double eps) {
  double reg = 0.5 * beta.dot(k * beta);
  double loss = 0.0;
  Vector f = k * beta;
  for (Index i = 0; i < beta.size(); ++i) {
    loss += eps_loss(f[i] + bias - y[i], eps);
  }
  return reg + c * loss;
}

double dual_objective(const Matrix& k, const Vector& beta, const Vector& y,
                      double eps) {
  return 0.5 * beta.dot(k * beta) - y.dot(beta) + eps * beta.lpNorm<1>();
}

}  // namespace

double svr_dual_objective(const Matrix& x, const Vector& y,
                          const SvrConfig& config, const Vector& coeff) {
  if (coeff.size() != x.rows() || y.size() != x.rows()) {
    throw ValidationError("svr_dual_objective: size mismatch");
  }
  Kernel kernel = resolve_kernel(config.kernel, x);
  return dual_objective(gram_matrix(kernel, x), coeff, y, config.epsilon);
}

SvrModel svr_fit(const Matrix& x, const Vector& y, const SvrConfig& config) {
  config.validate();
  const Index n = x.rows();
  if (n < 2) throw ValidationError("svr_fit: need at least 2 training points");
  if (y.size() != n) throw ValidationError("svr_fit: X/y row mismatch");

  const double c = config.c;
  const double eps = config.epsilon;
  Kernel kernel = resolve_kernel(config.kernel, x);
  const Matrix k = gram_matrix(kernel, x);

  Vector beta = Vector::Zero(n);
  Vector g = -y;  // gradient of the smooth part, K beta - y
  const long max_iters = static_cast<long>(config.max_passes) * n;
  double violation = std::numeric_limits<double>::infinity();

  for (long iter = 0; iter < max_iters; ++iter) {
    // maximal violating pair: i may move up, j may move down
    Index i = -1, j = -1;
    double d_up = std::numeric_limits<double>::infinity();
    double d_low = -std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      if (beta[t] < c) {
        double d = g[t] + (beta[t] >= 0.0 ? eps : -eps);
        if (d < d_up) {
          d_up = d;
          i = t;
        }
      }
      if (beta[t] > -c) {
        double d = g[t] + (beta[t] > 0.0 ? eps : -eps);
        if (d > d_low) {
          d_low = d;
          j = t;
        }
      }
    }
    violation = d_low - d_up;
    if (violation <= config.tolerance || i < 0 || j < 0 || i == j) break;

    const double eta = k(i, i) + k(j, j) - 2.0 * k(i, j);
    const double d_max = std::min(c - beta[i], beta[j] + c);

    // candidate steps: box edge, sign breakpoints, per-piece minima
    struct Candidate {
      double delta;
      int snap;  // 0 none, 1 beta_i -> 0, 2 beta_j -> 0, 3 beta_i -> C, 4 beta_j -> -C
    };
    std::vector<Candidate> candidates;
    candidates.push_back({d_max, c - beta[i] <= beta[j] + c ? 3 : 4});
    if (beta[i] < 0.0 && -beta[i] < d_max) candidates.push_back({-beta[i], 1});
    if (beta[j] > 0.0 && beta[j] < d_max) candidates.push_back({beta[j], 2});
    if (eta > 0.0) {
      // stationary point of each linear piece of the |.| terms
      for (double si : {-1.0, 1.0}) {
        for (double sj : {-1.0, 1.0}) {
          double d = -(g[i] - g[j] + eps * si - eps * sj) / eta;
          if (d <= 0.0 || d >= d_max) continue;
          if ((beta[i] + d >= 0.0 ? 1.0 : -1.0) != si) continue;
          if ((beta[j] - d >= 0.0 ? 1.0 : -1.0) != sj) continue;
          candidates.push_back({d, 0});
        }
      }
    }

    double best_obj = 0.0;
    int best = -1;
    for (size_t idx = 0; idx < candidates.size(); ++idx) {
      double obj = pair_delta_objective(candidates[idx].delta, g[i], g[j], eta,
                                        eps, beta[i], beta[j]);
      if (obj < best_obj) {
        best_obj = obj;
        best = static_cast<int>(idx);
      }
    }
    if (best < 0) break;  // no descent step; numerically stalled

    const Candidate& chosen = candidates[static_cast<size_t>(best)];
    double new_i = beta[i] + chosen.delta;
    if (chosen.snap == 1) new_i = 0.0;
    if (chosen.snap == 3) new_i = c;
    if (chosen.snap == 2) new_i = beta[i] + beta[j];
    const double delta = new_i - beta[i];
    beta[i] = std::clamp(new_i, -c, c);
    beta[j] = std::clamp(chosen.snap == 2 ? 0.0 : beta[j] - delta, -c, c);
    g += delta * (k.col(i) - k.col(j));
  }

  if (violation > config.tolerance) {
    double bias = bias_from_gradient(beta, g, c, eps);
    double gap = primal_objective(k, beta, y, bias, c, eps) +
                 dual_objective(k, beta, y, eps);
    throw ConvergenceError(
        "svr_fit: KKT violation " + std::to_string(violation) +
        " above tolerance after " + std::to_string(config.max_passes) +
        " passes (duality gap " + std::to_string(gap) + ")");
  }

  SvrModel model;
  model.support_x = x;
  model.coeff = beta;
  model.bias = bias_from_gradient(beta, g, c, eps);
  model.kernel = kernel;
  model.epsilon = eps;
  model.c = c;
  model.trained = true;
  return model;
}

double svr_predict(const SvrModel& model, const Vector& x) {
  if (!model.trained) throw ValidationError("svr_predict: model not fitted");
  if (x.size() != model.support_x.cols()) {
    throw ValidationError("svr_predict: input dimension mismatch");
  }
  double sum = model.bias;
  for (Index i = 0; i < model.coeff.size(); ++i) {
    if (model.coeff[i] == 0.0) continue;
    sum += model.coeff[i] *
           kernel_eval(model.kernel, model.support_x.row(i).transpose(), x);
  }
  return sum;
}

Vector svr_predict_all(const SvrModel& model, const Matrix& x) {
  Vector out(x.rows());
  for (Index r = 0; r < x.rows(); ++r) {
    out[r] = svr_predict(model, x.row(r).transpose());
  }
  return out;
}

SvrModel qp_oracle_fit(const Matrix& x, const Vector& y,
                       const SvrConfig& config) {
  config.validate();
  const Index n = x.rows();
  if (n > 10) {
    throw ValidationError("qp_oracle_fit: refusing N > 10 (combinatorial cost)");
  }
  if (n < 2 || y.size() != n) throw ValidationError("qp_oracle_fit: bad problem size");

  const double c = config.c;
  const double eps = config.epsilon;
  Kernel kernel = resolve_kernel(config.kernel, x);
  const Matrix k = gram_matrix(kernel, x);

  // states per coefficient: -C, free negative, 0, free positive, +C
  enum State { kLower, kNegFree, kZero, kPosFree, kUpper };
  std::vector<int> state(n, 0);
  long total = 1;
  for (Index i = 0; i < n; ++i) total *= 5;

  Vector best_beta;
  double best_obj = std::numeric_limits<double>::infinity();

  std::vector<Index> free_idx;
  for (long code = 0; code < total; ++code) {
    long rem = code;
    for (Index i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rem % 5);
      rem /= 5;
    }

    free_idx.clear();
    Vector beta = Vector::Zero(n);
    double fixed_sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (state[i] == kLower) beta[i] = -c;
      if (state[i] == kUpper) beta[i] = c;
      if (state[i] == kNegFree || state[i] == kPosFree) free_idx.push_back(i);
      fixed_sum += beta[i];
    }

    if (free_idx.empty()) {
      if (std::abs(fixed_sum) > 1e-12 * c * n) continue;  // balance violated
    } else {
      // stationarity on the free set plus the balance constraint:
      // [K_FF 1; 1' 0] [beta_F; b] = [y_F - eps s_F - K_FB beta_B; -sum(beta_B)]
      const Index f = static_cast<Index>(free_idx.size());
      Matrix a = Matrix::Zero(f + 1, f + 1);
      Vector rhs(f + 1);
      for (Index p = 0; p < f; ++p) {
        for (Index q = 0; q < f; ++q) a(p, q) = k(free_idx[p], free_idx[q]);
        a(p, f) = 1.0;
        a(f, p) = 1.0;
        double s = state[free_idx[p]] == kPosFree ? 1.0 : -1.0;
        double bound_term = 0.0;
        for (Index i = 0; i < n; ++i) {
          if (state[i] == kLower || state[i] == kUpper) {
            bound_term += k(free_idx[p], i) * beta[i];
          }
        }
        rhs[p] = y[free_idx[p]] - eps * s - bound_term;
      }
      rhs[f] = -fixed_sum;

      Eigen::FullPivLU<Matrix> lu(a);
      if (!lu.isInvertible()) continue;
      Vector sol = lu.solve(rhs);

      bool ok = true;
      for (Index p = 0; p < f; ++p) {
        double v = sol[p];
        if (state[free_idx[p]] == kPosFree && (v < -1e-9 || v > c + 1e-9)) ok = false;
        if (state[free_idx[p]] == kNegFree && (v > 1e-9 || v < -c - 1e-9)) ok = false;
      }
      if (!ok) continue;
      for (Index p = 0; p < f; ++p) {
        beta[free_idx[p]] = std::clamp(sol[p], -c, c);
      }
    }

    double obj = dual_objective(k, beta, y, eps);
    if (obj < best_obj) {
      best_obj = obj;
      best_beta = beta;
    }
  }

  Vector g = k * best_beta - y;
  SvrModel model;
  model.support_x = x;
  model.coeff = best_beta;
  model.bias = bias_from_gradient(best_beta, g, c, eps);
  model.kernel = kernel;
  model.epsilon = eps;
  model.c = c;
  model.trained = true;
  return model;
}

}  // namespace karst
