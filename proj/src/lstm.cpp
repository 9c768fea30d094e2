#include "karst/lstm.hpp"

#include "karst/activations.hpp"
#include "karst/init.hpp"

namespace karst {

LstmModel LstmModel::init(Index input_dim, Index hidden, int num_layers,
                          RngStream& rng) {
  if (input_dim < 1 || hidden < 1 || num_layers < 1) {
    throw ValidationError("LstmModel::init: dimensions must be >= 1");
  }
  LstmModel m;
  for (int l = 0; l < num_layers; ++l) {
    Index in = l == 0 ? input_dim : hidden;
    LstmLayer layer;
    layer.u_g = init_weights(InitScheme::kXavier, hidden, in, rng);
    layer.u_i = init_weights(InitScheme::kXavier, hidden, in, rng);
    layer.u_f = init_weights(InitScheme::kXavier, hidden, in, rng);
    layer.u_o = init_weights(InitScheme::kXavier, hidden, in, rng);
    layer.v_g = init_weights(InitScheme::kXavier, hidden, hidden, rng);
    layer.v_i = init_weights(InitScheme::kXavier, hidden, hidden, rng);
    layer.v_f = init_weights(InitScheme::kXavier, hidden, hidden, rng);
    layer.v_o = init_weights(InitScheme::kXavier, hidden, hidden, rng);
    layer.b_g = Vector::Zero(hidden);
    layer.b_i = Vector::Zero(hidden);
    layer.b_f = Vector::Zero(hidden);
    layer.b_o = Vector::Zero(hidden);
    m.layers.push_back(std::move(layer));
  }
  m.w_d = init_weights(InitScheme::kXavier, 1, hidden, rng);
  m.b_d = 0.0;
  return m;
}

LstmGrads LstmGrads::zeros_like(const LstmModel& model) {
  LstmGrads g;
  for (const LstmLayer& layer : model.layers) {
    LayerGrads lg;
    lg.u_g = Matrix::Zero(layer.u_g.rows(), layer.u_g.cols());
    lg.u_i = lg.u_g;
    lg.u_f = lg.u_g;
    lg.u_o = lg.u_g;
    lg.v_g = Matrix::Zero(layer.v_g.rows(), layer.v_g.cols());
    lg.v_i = lg.v_g;
    lg.v_f = lg.v_g;
    lg.v_o = lg.v_g;
    lg.b_g = Vector::Zero(layer.b_g.size());
    lg.b_i = lg.b_g;
    lg.b_f = lg.b_g;
    lg.b_o = lg.b_g;
    g.layers.push_back(std::move(lg));
  }
  g.w_d = Matrix::Zero(model.w_d.rows(), model.w_d.cols());
  g.b_d = 0.0;
  return g;
}

void LstmGrads::set_zero() {
  for (LayerGrads& lg : layers) {
    lg.u_g.setZero(); lg.u_i.setZero(); lg.u_f.setZero(); lg.u_o.setZero();
    lg.v_g.setZero(); lg.v_i.setZero(); lg.v_f.setZero(); lg.v_o.setZero();
    lg.b_g.setZero(); lg.b_i.setZero(); lg.b_f.setZero(); lg.b_o.setZero();
  }
  w_d.setZero();
  b_d = 0.0;
}

void lstm_cell_step(const LstmLayer& layer, const Vector& x,
                    const Vector& h_prev, const Vector& c_prev,
                    LstmStepCache& out) {
  const Index h_size = layer.hidden_size();
  if (x.size() != layer.input_dim() || h_prev.size() != h_size ||
      c_prev.size() != h_size) {
    throw ValidationError("lstm_cell_step: shape mismatch with layer");
  }
  out.x = x;
  out.h_prev = h_prev;
  out.c_prev = c_prev;
  out.g = (layer.u_g * x + layer.v_g * h_prev + layer.b_g).array().tanh();
  out.i = sigmoid((layer.u_i * x + layer.v_i * h_prev + layer.b_i).array());
  out.f = sigmoid((layer.u_f * x + layer.v_f * h_prev + layer.b_f).array());
  out.c = c_prev.cwiseProduct(out.f) + out.g.cwiseProduct(out.i);
  out.o = sigmoid((layer.u_o * x + layer.v_o * h_prev + layer.b_o).array());
  out.h = out.c.array().tanh().matrix().cwiseProduct(out.o);
}

double lstm_forward(const LstmModel& model, const std::vector<Vector>& sequence,
                    LstmCache* cache) {
  if (sequence.empty()) {
    throw ValidationError("lstm_forward: sequence must not be empty");
  }
  const Index h_size = model.hidden_size();
  const size_t n_steps = sequence.size();

  LstmCache local;
  LstmCache& c = cache ? *cache : local;
  if (c.steps.size() != model.layers.size() ||
      (!c.steps.empty() && c.steps[0].size() != n_steps)) {
    c.steps.assign(model.layers.size(), std::vector<LstmStepCache>(n_steps));
  }

  std::vector<Vector> inputs(sequence.begin(), sequence.end());
  for (size_t l = 0; l < model.layers.size(); ++l) {
    const LstmLayer& layer = model.layers[l];
    Vector h = Vector::Zero(h_size);
    Vector cc = Vector::Zero(h_size);
    for (size_t t = 0; t < n_steps; ++t) {
      LstmStepCache& step = c.steps[l][t];
      lstm_cell_step(layer, inputs[t], h, cc, step);
      h = step.h;
      cc = step.c;
      inputs[t] = step.h;  // becomes next layer's input
    }
  }
  const Vector& h_last = c.steps.back().back().h;
  return model.w_d.row(0).dot(h_last) + model.b_d;
}

void lstm_backward(const LstmModel& model, const LstmCache& cache,
                   double dloss_dy, LstmGrads& grads) {
  if (cache.steps.size() != model.layers.size() || cache.steps.empty() ||
      cache.steps[0].empty()) {
    throw ValidationError("lstm_backward: cache does not match model");
  }
  const size_t n_layers = model.layers.size();
  const size_t n_steps = cache.steps[0].size();
  const Index h_size = model.hidden_size();
  if (grads.layers.size() != n_layers) {
    throw ValidationError("lstm_backward: gradient buffer mismatch");
  }

  const Vector& h_last = cache.steps.back().back().h;
  grads.w_d.row(0) += dloss_dy * h_last.transpose();
  grads.b_d += dloss_dy;

  // dL/dh_t arriving from outside the layer: the dense readout for the
  // top layer's last step, the upper layer's input gradients otherwise.
  std::vector<std::vector<Vector>> upstream(
      n_layers, std::vector<Vector>(n_steps, Vector::Zero(h_size)));
  upstream[n_layers - 1][n_steps - 1] = dloss_dy * model.w_d.row(0).transpose();

  for (size_t l = n_layers; l-- > 0;) {
    const LstmLayer& layer = model.layers[l];
    LstmGrads::LayerGrads& lg = grads.layers[l];
    Vector dh_next = Vector::Zero(h_size);
    Vector dc_next = Vector::Zero(h_size);
    for (size_t t = n_steps; t-- > 0;) {
      const LstmStepCache& s = cache.steps[l][t];
      Vector dh = upstream[l][t] + dh_next;

      Array tanh_c = s.c.array().tanh();
      Vector d_o = dh.cwiseProduct(tanh_c.matrix());
      Vector dc = dc_next +
                  (dh.array() * s.o.array() * (1.0 - tanh_c.square())).matrix();

      Vector df = dc.cwiseProduct(s.c_prev);
      Vector dg = dc.cwiseProduct(s.i);
      Vector di = dc.cwiseProduct(s.g);

      // pre-activation gradients
      Vector dzg = (dg.array() * (1.0 - s.g.array().square())).matrix();
      Vector dzi = (di.array() * s.i.array() * (1.0 - s.i.array())).matrix();
      Vector dzf = (df.array() * s.f.array() * (1.0 - s.f.array())).matrix();
      Vector dzo = (d_o.array() * s.o.array() * (1.0 - s.o.array())).matrix();

      lg.u_g += dzg * s.x.transpose();
      lg.u_i += dzi * s.x.transpose();
      lg.u_f += dzf * s.x.transpose();
      lg.u_o += dzo * s.x.transpose();
      lg.v_g += dzg * s.h_prev.transpose();
      lg.v_i += dzi * s.h_prev.transpose();
      lg.v_f += dzf * s.h_prev.transpose();
      lg.v_o += dzo * s.h_prev.transpose();
      lg.b_g += dzg;
      lg.b_i += dzi;
      lg.b_f += dzf;
      lg.b_o += dzo;

      dh_next = layer.v_g.transpose() * dzg + layer.v_i.transpose() * dzi +
                layer.v_f.transpose() * dzf + layer.v_o.transpose() * dzo;
      dc_next = dc.cwiseProduct(s.f);

      if (l > 0) {
        upstream[l - 1][t] += layer.u_g.transpose() * dzg +
                              layer.u_i.transpose() * dzi +
                              layer.u_f.transpose() * dzf +
                              layer.u_o.transpose() * dzo;
      }
    }
  }
}

std::vector<Eigen::Map<Array>> param_views(LstmModel& model) {
  std::vector<Eigen::Map<Array>> views;
  for (LstmLayer& l : model.layers) {
    for (Matrix* m : {&l.u_g, &l.u_i, &l.u_f, &l.u_o, &l.v_g, &l.v_i, &l.v_f,
                      &l.v_o}) {
      views.emplace_back(m->data(), m->size());
    }
    for (Vector* v : {&l.b_g, &l.b_i, &l.b_f, &l.b_o}) {
      views.emplace_back(v->data(), v->size());
    }
  }
  views.emplace_back(model.w_d.data(), model.w_d.size());
  views.emplace_back(&model.b_d, 1);
  return views;
}

std::vector<Eigen::Map<const Array>> grad_views(const LstmGrads& grads) {
  std::vector<Eigen::Map<const Array>> views;
  for (const LstmGrads::LayerGrads& l : grads.layers) {
    for (const Matrix* m : {&l.u_g, &l.u_i, &l.u_f, &l.u_o, &l.v_g, &l.v_i,
                            &l.v_f, &l.v_o}) {
      views.emplace_back(m->data(), m->size());
    }
    for (const Vector* v : {&l.b_g, &l.b_i, &l.b_f, &l.b_o}) {
      views.emplace_back(v->data(), v->size());
    }
  }
  views.emplace_back(grads.w_d.data(), grads.w_d.size());
  views.emplace_back(&grads.b_d, 1);
  return views;
}

}  // namespace karst
