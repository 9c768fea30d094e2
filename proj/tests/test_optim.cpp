#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "karst/data.hpp"
#include "karst/optim.hpp"

#include <cmath>
#include <cstring>
#include <limits>

using namespace karst;

namespace {

SupervisedDataset learnable_dataset(Index rows) {
  SyntheticSpec spec;
  spec.months = static_cast<int>(rows) + 1;
  spec.seed = 7;
  TimeSeriesTable t = generate_synthetic(spec);
  NormalizationParams norm = fit_normalizer(t, 0, t.rows());
  return make_supervised(t, 1, 1, norm);
}

}  // namespace

TEST_CASE("mse loss and gradient hand values") {
  Vector a(2), b(2);
  a << 0, 0;
  b << 3, 4;
  CHECK(mse_loss(a, a) == 0.0);
  CHECK(mse_loss(a, b) == doctest::Approx(12.5).epsilon(1e-12));

  Vector p(1), o(1);
  p << 0.5;
  o << 0.0;
  CHECK(mse_loss(p, o) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(mse_grad(p, o)[0] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(mse_loss(a, p), ValidationError);
  CHECK_THROWS_AS(mse_loss(Vector(), Vector()), ValidationError);
}

TEST_CASE("learning-rate schedule") {
  LrSchedule s;  // 1e-4, 0.99, steps 1
  CHECK(lr_at(s, 0) == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(lr_at(s, 1) == doctest::Approx(9.9e-5).epsilon(1e-12));

  SUBCASE("no decay when rate is 1") {
    s.decay_rate = 1.0;
    for (int e : {0, 1, 10, 999}) CHECK(lr_at(s, e) == 1e-4);
  }
  SUBCASE("decay steps group epochs") {
    s.decay_steps = 10;
    CHECK(lr_at(s, 9) == 1e-4);
    CHECK(lr_at(s, 10) == doctest::Approx(9.9e-5).epsilon(1e-12));
  }
  SUBCASE("trace is non-increasing and bounded below") {
    double prev = std::numeric_limits<double>::infinity();
    double bound = s.initial_rate * std::pow(s.decay_rate, 1000);
    for (int e = 0; e < 1000; ++e) {
      double r = lr_at(s, e);
      CHECK(r <= prev);
      CHECK(r >= bound);
      prev = r;
    }
  }
  SUBCASE("validation") {
    s.decay_rate = 0.0;
    CHECK_THROWS_AS(lr_at(s, 0), ValidationError);
    s.decay_rate = 0.99;
    CHECK_THROWS_AS(lr_at(s, -1), ValidationError);
  }
}

TEST_CASE("adam single steps against hand computation") {
  double theta = 0.0;
  std::vector<Eigen::Map<Array>> params;
  params.emplace_back(&theta, 1);
  AdamState state = AdamState::like(params);

  Array g1(1);
  const double alpha = 1e-3;

  SUBCASE("zero gradient leaves parameters unchanged") {
    g1[0] = 0.0;
    std::vector<Eigen::Map<const Array>> grads;
    grads.emplace_back(g1.data(), 1);
    adam_step(params, grads, state, alpha);
    CHECK(theta == 0.0);
    adam_step(params, grads, state, alpha);
    CHECK(theta == 0.0);
  }
  SUBCASE("first update magnitude is alpha within 1e-7 alpha") {
    g1[0] = 1.0;
    std::vector<Eigen::Map<const Array>> grads;
    grads.emplace_back(g1.data(), 1);
    adam_step(params, grads, state, alpha);
    CHECK(std::abs(std::abs(theta) - alpha) <= 1e-7 * alpha);
  }
  SUBCASE("two successive steps match an independent evaluation to 1e-12") {
    g1[0] = 1.0;
    std::vector<Eigen::Map<const Array>> grads;
    grads.emplace_back(g1.data(), 1);
    adam_step(params, grads, state, alpha);
    adam_step(params, grads, state, alpha);

    // independent scalar evaluation of the bias-corrected recurrence
    double m = 0.0, v = 0.0, ref = 0.0;
    for (int t = 1; t <= 2; ++t) {
      m = 0.9 * m + 0.1 * 1.0;
      v = 0.999 * v + 0.001 * 1.0;
      double mhat = m / (1.0 - std::pow(0.9, t));
      double vhat = v / (1.0 - std::pow(0.999, t));
      ref -= alpha * mhat / (std::sqrt(vhat) + 1e-8);
    }
    CHECK(std::abs(theta - ref) <= 1e-12);
  }
}

TEST_CASE("adam is a pure function of params, grads, state, rate") {
  Array p0(3);
  p0 << 0.5, -0.2, 1.0;
  Array g(3);
  g << 0.3, -0.1, 0.7;

  auto run = [&](Array& p, AdamState& s) {
    std::vector<Eigen::Map<Array>> params;
    params.emplace_back(p.data(), p.size());
    std::vector<Eigen::Map<const Array>> grads;
    grads.emplace_back(g.data(), g.size());
    adam_step(params, grads, s, 1e-2);
  };

  Array pa = p0, pb = p0;
  std::vector<Eigen::Map<Array>> viewa;
  viewa.emplace_back(pa.data(), pa.size());
  AdamState sa = AdamState::like(viewa);
  sa.m[0] << 0.1, 0.2, 0.3;
  sa.v[0] << 0.01, 0.02, 0.03;
  sa.step_count = 5;
  AdamState sb = sa;

  run(pa, sa);
  run(pb, sb);
  CHECK(pa.matrix() == pb.matrix());
  CHECK(sa.m[0].matrix() == sb.m[0].matrix());
  CHECK(sa.v[0].matrix() == sb.v[0].matrix());

  SUBCASE("shape mismatch rejected") {
    Array bad(2);
    bad << 1, 2;
    std::vector<Eigen::Map<Array>> params;
    params.emplace_back(pa.data(), pa.size());
    std::vector<Eigen::Map<const Array>> grads;
    grads.emplace_back(bad.data(), bad.size());
    CHECK_THROWS_AS(adam_step(params, grads, sa, 1e-2), ValidationError);
  }
}

TEST_CASE("training validation and boundary behaviour") {
  SupervisedDataset data = learnable_dataset(40);
  RngStream rng(1);
  MlpModel model = MlpModel::init(10, 4, rng);

  SUBCASE("epochs must be positive") {
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(train(model, data, cfg), ValidationError);
  }
  SUBCASE("width mismatch rejected") {
    MlpModel narrow = MlpModel::init(7, 4, rng);
    TrainConfig cfg;
    cfg.epochs = 1;
    CHECK_THROWS_AS(train(narrow, data, cfg), ValidationError);
  }
  SUBCASE("one epoch with batch >= N is exactly one update") {
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 1000;
    int batches = 0;
    train(model, data, cfg,
          [&](int, int, const Vector&, const Vector&) { ++batches; });
    CHECK(batches == 1);
  }
  SUBCASE("history length equals epochs run") {
    TrainConfig cfg;
    cfg.epochs = 7;
    TrainingHistory h = train(model, data, cfg);
    CHECK(h.epoch_loss.size() == 7);
    CHECK(h.learning_rate.size() == 7);
    CHECK(model.trained);
  }
}

TEST_CASE("training descends on a learnable synthetic task") {
  SupervisedDataset data = learnable_dataset(120);
  RngStream rng(7);
  MlpModel model = MlpModel::init(10, 32, rng);
  TrainConfig cfg;
  cfg.epochs = 100;
  cfg.batch_size = 16;
  TrainingHistory h = train(model, data, cfg);
  CHECK(h.epoch_loss.back() < h.epoch_loss.front());

  SUBCASE("shuffled variant also descends") {
    RngStream rng2(7);
    MlpModel m2 = MlpModel::init(10, 32, rng2);
    TrainConfig cfg2 = cfg;
    cfg2.shuffle_each_epoch = true;
    cfg2.seed = 11;
    TrainingHistory h2 = train(m2, data, cfg2);
    CHECK(h2.epoch_loss.back() < h2.epoch_loss.front());
  }
}

TEST_CASE("training determinism is bit-exact") {
  SupervisedDataset data = learnable_dataset(60);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.shuffle_each_epoch = true;
  cfg.seed = 5;

  auto run = [&]() {
    RngStream rng(9);
    MlpModel m = MlpModel::init(10, 6, rng);
    train(m, data, cfg);
    return m;
  };
  MlpModel a = run();
  MlpModel b = run();
  CHECK(a.w1 == b.w1);
  CHECK(a.b1 == b.b1);
  CHECK(a.w2 == b.w2);
  CHECK(a.b2 == b.b2);

  SUBCASE("lstm path too") {
    TrainConfig lcfg;
    lcfg.epochs = 5;
    lcfg.batch_size = 1;
    auto lrun = [&]() {
      RngStream rng(9);
      LstmModel m = LstmModel::init(10, 3, 1, rng);
      train(m, data, lcfg);
      return m;
    };
    LstmModel la = lrun();
    LstmModel lb = lrun();
    CHECK(la.w_d == lb.w_d);
    CHECK(la.layers[0].v_f == lb.layers[0].v_f);
  }
}

TEST_CASE("epoch loss equals independent re-evaluation of its batches") {
  SupervisedDataset data = learnable_dataset(50);
  RngStream rng(3);
  MlpModel model = MlpModel::init(10, 5, rng);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 8;

  std::vector<double> sq_sum(cfg.epochs, 0.0);
  std::vector<double> count(cfg.epochs, 0.0);
  TrainingHistory h = train(
      model, data, cfg,
      [&](int epoch, int, const Vector& preds, const Vector& targets) {
        sq_sum[epoch] += (preds - targets).squaredNorm();
        count[epoch] += static_cast<double>(preds.size());
      });
  for (int e = 0; e < cfg.epochs; ++e) {
    double independent = sq_sum[e] / count[e];
    CHECK(std::abs(h.epoch_loss[e] - independent) <=
          1e-10 * std::max(1.0, std::abs(independent)));
  }
}

TEST_CASE("divergence aborts with epoch and batch in the diagnostic") {
  SupervisedDataset data = learnable_dataset(30);
  data.targets[3] = std::numeric_limits<double>::quiet_NaN();
  RngStream rng(2);
  MlpModel model = MlpModel::init(10, 3, rng);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  CHECK_THROWS_WITH_AS(train(model, data, cfg), doctest::Contains("epoch 0"),
                       ConvergenceError);
}

TEST_CASE("best-loss snapshot is retained") {
  SupervisedDataset data = learnable_dataset(60);
  RngStream rng(13);
  MlpModel model = MlpModel::init(10, 8, rng);
  TrainConfig cfg;
  cfg.epochs = 50;
  TrainingHistory h = train(model, data, cfg);
  double best = *std::min_element(h.epoch_loss.begin(), h.epoch_loss.end());
  CHECK(h.epoch_loss[static_cast<size_t>(h.best_epoch)] == best);
}

TEST_CASE("finite differences are exact on a quadratic") {
  double w = 0.0;
  std::vector<Eigen::Map<Array>> params;
  params.emplace_back(&w, 1);
  auto loss = [&]() { return (w - 1.0) * (w - 1.0); };
  for (double step : {1e-4, 1e-6, 1e-7}) {
    auto g = finite_difference(params, loss, step);
    CHECK(g[0][0] == doctest::Approx(-2.0).epsilon(1e-8));
  }
  CHECK(w == 0.0);  // parameters restored
  CHECK_THROWS_AS(finite_difference(params, loss, 0.0), ValidationError);
}

TEST_CASE("lstm_input_sequence windows rows") {
  Matrix inputs(5, 2);
  for (Index r = 0; r < 5; ++r) {
    inputs(r, 0) = static_cast<double>(r);
    inputs(r, 1) = 10.0 + static_cast<double>(r);
  }
  auto seq = lstm_input_sequence(inputs, 3, 2);
  REQUIRE(seq.size() == 2);
  CHECK(seq[0][0] == 2.0);
  CHECK(seq[1][0] == 3.0);
  // truncated at the top
  auto head = lstm_input_sequence(inputs, 0, 4);
  CHECK(head.size() == 1);
}
