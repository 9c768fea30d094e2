#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "karst/metrics.hpp"
#include "karst/optim.hpp"
#include "karst/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace karst;

TEST_CASE("metric hand values") {
  Vector p(2), o(2);
  p << 0, 0;
  o << 3, 4;
  Metrics m = compute_metrics(p, o);
  CHECK(m.mse == doctest::Approx(12.5).epsilon(1e-9));
  CHECK(m.mae == doctest::Approx(3.5).epsilon(1e-9));
  CHECK(m.rmse == doctest::Approx(3.535534).epsilon(1e-6));

  Metrics zero = compute_metrics(o, o);
  CHECK(zero.mse == 0.0);
  CHECK(zero.mae == 0.0);
  CHECK(zero.rmse == 0.0);

  SUBCASE("constant offset") {
    Vector shifted = o.array() + 0.25;
    Metrics d = compute_metrics(shifted, o);
    CHECK(d.mse == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(d.mae == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(d.rmse == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("length mismatch and empty input") {
    CHECK_THROWS_AS(compute_metrics(p, Vector::Zero(3)), ValidationError);
    CHECK_THROWS_AS(compute_metrics(Vector(), Vector()), ValidationError);
  }
}

TEST_CASE("metric identities on random pairs") {
  RngStream rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    Index n = 1 + static_cast<Index>(rng.index_below(40));
    Vector p = Vector::NullaryExpr(n, [&]() { return 3.0 * rng.normal(); });
    Vector o = Vector::NullaryExpr(n, [&]() { return 3.0 * rng.normal(); });
    Metrics m = compute_metrics(p, o);
    CHECK(std::abs(m.rmse * m.rmse - m.mse) <= 1e-12 * std::max(1.0, m.mse));
    CHECK(m.mae <= m.rmse + 1e-15);
    CHECK(m.mse >= 0.0);

    // residual sign symmetry: compute(p, o) == compute(2o - p, o);
    // forming 2o - p rounds, so compare to round-off
    Vector mirrored = 2.0 * o - p;
    Metrics mm = compute_metrics(mirrored, o);
    CHECK(mm.mse == doctest::Approx(m.mse).epsilon(1e-12));
    CHECK(mm.mae == doctest::Approx(m.mae).epsilon(1e-12));
    CHECK(mm.rmse == doctest::Approx(m.rmse).epsilon(1e-12));
  }
}

TEST_CASE("metrics are invariant under joint permutation") {
  RngStream rng(22);
  Vector p = Vector::NullaryExpr(64, [&]() { return rng.normal(); });
  Vector o = Vector::NullaryExpr(64, [&]() { return rng.normal(); });
  Metrics base = compute_metrics(p, o);

  std::vector<Index> perm(64);
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 63; i > 0; --i) {
    std::swap(perm[i], perm[static_cast<Index>(rng.index_below(i + 1))]);
  }
  Vector ps(64), os(64);
  for (Index i = 0; i < 64; ++i) {
    ps[i] = p[perm[i]];
    os[i] = o[perm[i]];
  }
  Metrics shuffled = compute_metrics(ps, os);
  CHECK(shuffled.mse == doctest::Approx(base.mse).epsilon(1e-12));
  CHECK(shuffled.mae == doctest::Approx(base.mae).epsilon(1e-12));
  CHECK(shuffled.rmse == doctest::Approx(base.rmse).epsilon(1e-12));
}

TEST_CASE("constant-mean predictor scores the target variance") {
  SyntheticSpec spec;
  spec.months = 200;
  spec.seed = 3;
  TimeSeriesTable t = generate_synthetic(spec);
  NormalizationParams norm = fit_normalizer(t, 0, t.rows());
  SupervisedDataset ds = make_supervised(t, 1, 1, norm);

  const double mean = ds.targets.mean();
  Vector constant = Vector::Constant(ds.rows(), mean);
  Metrics m = compute_metrics(constant, ds.targets);
  const double var =
      (ds.targets.array() - mean).square().sum() / double(ds.rows());
  CHECK(std::abs(m.mse - var) <= 1e-9);
}

TEST_CASE("evaluate rejects untrained models and empty splits") {
  SyntheticSpec spec;
  spec.months = 60;
  TimeSeriesTable t = generate_synthetic(spec);
  NormalizationParams norm = fit_normalizer(t, 0, 40);
  SupervisedDataset ds = make_supervised(t, 1, 1, norm);
  auto [train_set, test_set] = split_contiguous(ds, 40);

  RngStream rng(1);
  MlpModel model = MlpModel::init(10, 4, rng);
  CHECK_THROWS_AS(evaluate(model, train_set, test_set, "10-4-1"),
                  ValidationError);
  model.trained = true;
  EvalReport report = evaluate(model, train_set, test_set, "10-4-1");
  CHECK(report.model_id == "mlp");
  CHECK(report.label == "10-4-1");
  CHECK(report.train.mse >= 0.0);
  CHECK_FALSE(report.train_physical.has_value());
}

TEST_CASE("physical-scale metrics are the normalized ones rescaled") {
  SyntheticSpec spec;
  spec.months = 80;
  spec.seed = 9;
  TimeSeriesTable t = generate_synthetic(spec);
  NormalizationParams norm = fit_normalizer(t, 0, 60);
  SupervisedDataset ds = make_supervised(t, 1, 1, norm);
  auto [train_set, test_set] = split_contiguous(ds, 60);

  RngStream rng(2);
  MlpModel model = MlpModel::init(10, 4, rng);
  model.trained = true;
  EvalReport report = evaluate(model, train_set, test_set, "10-4-1", true);
  REQUIRE(report.train_physical.has_value());

  const Index q = NormalizationParams::kDischargeCol;
  const double range = norm.col_max[q] - norm.col_min[q];
  CHECK(report.train_physical->mae ==
        doctest::Approx(report.train.mae * range).epsilon(1e-12));
  CHECK(report.train_physical->rmse ==
        doctest::Approx(report.train.rmse * range).epsilon(1e-12));
  CHECK(report.train_physical->mse ==
        doctest::Approx(report.train.mse * range * range).epsilon(1e-12));
}

TEST_CASE("perfect memorization gives a near-zero report") {
  // constant targets are reproduced exactly by the fitted constant model
  Matrix x = Matrix::Identity(6, 6);
  Vector y = Vector::Constant(6, 0.42);
  SvrConfig config;
  config.epsilon = 0.01;
  SvrModel model = svr_fit(x, y, config);

  SupervisedDataset split;
  split.inputs = x;
  split.targets = y;
  split.norm.col_min = Vector::Zero(10);
  split.norm.col_max = Vector::Ones(10);
  Metrics m = evaluate_split(svr_predict_all(model, x), split);
  CHECK(m.mse <= 1e-18);
  CHECK(m.mae <= 1e-9);
}
