#pragma once

#include "karst/rng.hpp"
#include "karst/types.hpp"

#include <vector>

namespace karst {

/// Gate parameters of one LSTM layer. U_* act on the step input, V_* on
/// the previous hidden state, b_* are biases; g/i/f/o are the cell
/// input, input gate, forget gate, and output gate.
struct LstmLayer {
  Matrix u_g, u_i, u_f, u_o;  // h x in
  Matrix v_g, v_i, v_f, v_o;  // h x h
  Vector b_g, b_i, b_f, b_o;  // h

  Index input_dim() const { return u_g.cols(); }
  Index hidden_size() const { return u_g.rows(); }
};

/// Stacked LSTM with a dense scalar readout y = w_d * h_n + b_d from
/// the last step of the last layer. Layer l > 0 consumes layer l-1's
/// hidden sequence.
struct LstmModel {
  std::vector<LstmLayer> layers;
  Matrix w_d;  // 1 x h
  double b_d = 0.0;
  bool trained = false;

  Index input_dim() const { return layers.front().input_dim(); }
  Index hidden_size() const { return layers.front().hidden_size(); }
  int num_layers() const { return static_cast<int>(layers.size()); }

  /// Xavier-normal weights everywhere, zero biases.
  static LstmModel init(Index input_dim, Index hidden, int num_layers,
                        RngStream& rng);
};

struct LstmStepCache {
  Vector x, h_prev, c_prev;
  Vector g, i, f, o;  // gate values
  Vector c, h;        // new cell and hidden state
};

struct LstmCache {
  // steps[layer][t]
  std::vector<std::vector<LstmStepCache>> steps;
};

struct LstmGrads {
  struct LayerGrads {
    Matrix u_g, u_i, u_f, u_o;
    Matrix v_g, v_i, v_f, v_o;
    Vector b_g, b_i, b_f, b_o;
  };
  std::vector<LayerGrads> layers;
  Matrix w_d;
  double b_d = 0.0;

  static LstmGrads zeros_like(const LstmModel& model);
  void set_zero();
};

/// One cell step:
///   g = tanh(U_g x + V_g h_prev + b_g)
///   i = sigma(U_i x + V_i h_prev + b_i)
///   f = sigma(U_f x + V_f h_prev + b_f)
///   c = c_prev (.) f + g (.) i
///   o = sigma(U_o x + V_o h_prev + b_o)
///   h = tanh(c) (.) o
void lstm_cell_step(const LstmLayer& layer, const Vector& x,
                    const Vector& h_prev, const Vector& c_prev,
                    LstmStepCache& out);

/// Runs the whole sequence from h0 = c0 = 0 and applies the dense
/// readout to the final hidden state.
double lstm_forward(const LstmModel& model, const std::vector<Vector>& sequence,
                    LstmCache* cache = nullptr);

/// Backpropagation through time over all layers and steps; accumulates
/// into `grads`.
void lstm_backward(const LstmModel& model, const LstmCache& cache,
                   double dloss_dy, LstmGrads& grads);

std::vector<Eigen::Map<Array>> param_views(LstmModel& model);
std::vector<Eigen::Map<const Array>> grad_views(const LstmGrads& grads);

}  // namespace karst
