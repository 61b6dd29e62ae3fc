#include "sobid/predict.hpp"

#include <gtest/gtest.h>

#include "sobid/rng.hpp"

using namespace sobid;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

TEST(BuildNarx, OneStepIndexBookkeeping) {
  IoSeries s;
  s.y = vec({1.0, 2.0, 3.0, 4.0});
  s.u = Vector::Zero(4);
  LagSpec lags{2, 1, 1, false};
  const Dataset d = build_narx_dataset(s, lags);
  ASSERT_EQ(d.size(), 2);
  EXPECT_EQ(d.x.row(0), Eigen::RowVector3d(2.0, 1.0, 0.0));
  EXPECT_DOUBLE_EQ(d.z[0], 3.0);
  EXPECT_EQ(d.x.row(1), Eigen::RowVector3d(3.0, 2.0, 0.0));
  EXPECT_DOUBLE_EQ(d.z[1], 4.0);
}

TEST(BuildNarx, DirectRegressorDimension) {
  IoSeries s;
  s.y = Vector::LinSpaced(40, 0.0, 1.0);
  s.u = Vector::LinSpaced(40, -1.0, 1.0);
  LagSpec lags{3, 2, 3, true};
  const Dataset d = build_narx_dataset(s, lags);
  EXPECT_EQ(d.n_x(), 7);  // 4 + k with k = 3
  EXPECT_EQ(lags.regressor_dim(), 7);
}

TEST(BuildNarx, DirectHorizonOneEqualsOneStep) {
  Rng rng(2);
  IoSeries s;
  s.y = Vector(30);
  s.u = Vector(30);
  for (Index t = 0; t < 30; ++t) {
    s.y[t] = rng.normal();
    s.u[t] = rng.normal();
  }
  const Dataset one = build_narx_dataset(s, {3, 2, 1, false});
  const Dataset direct = build_narx_dataset(s, {3, 2, 1, true});
  ASSERT_EQ(one.size(), direct.size());
  EXPECT_EQ(one.x, direct.x);
  EXPECT_EQ(one.z, direct.z);
}

TEST(BuildNarx, RejectsShortSeries) {
  IoSeries s;
  s.y = vec({1.0, 2.0});
  s.u = vec({0.0, 0.0});
  EXPECT_THROW(build_narx_dataset(s, {3, 2, 1, false}), std::invalid_argument);
}

// the target at each row equals the series value the regressor claims to
// predict, reconstructed independently from the row contents
TEST(BuildNarx, RegressorAlignment) {
  Rng rng(6);
  IoSeries s;
  s.y = Vector(50);
  s.u = Vector(50);
  for (Index t = 0; t < 50; ++t) {
    s.y[t] = rng.normal();
    s.u[t] = rng.normal();
  }
  for (const int k : {1, 3, 5}) {
    const LagSpec lags{3, 2, k, true};
    const Dataset d = build_narx_dataset(s, lags);
    for (Index row = 0; row < d.size(); ++row) {
      // locate t by matching y_t (values are distinct with probability 1)
      Index t = -1;
      for (Index cand = 0; cand < 50; ++cand)
        if (s.y[cand] == d.x(row, 0)) t = cand;
      ASSERT_GE(t, 0);
      EXPECT_EQ(d.x(row, 1), s.y[t - 1]);
      EXPECT_EQ(d.x(row, 2), s.y[t - 2]);
      EXPECT_EQ(d.x(row, 3), s.u[t + k - 2]);
      EXPECT_EQ(d.z[row], s.y[t + k]);
    }
  }
}

Model half_decay_model() {
  // y_{t+1} = 0.5 y_t over lags (1, 0)
  BasisFunction fy{BasisFamily::monomial, vec({1.0})};
  return Model(BasisSet(1, {fy}), vec({0.5}));
}

TEST(PredictIterated, GeometricDecay) {
  const auto model = half_decay_model();
  const Vector out = predict_iterated(model, {1, 0, 1, false}, vec({8.0}), Vector(0), Vector(0), 3);
  ASSERT_EQ(out.size(), 3);
  EXPECT_DOUBLE_EQ(out[0], 4.0);
  EXPECT_DOUBLE_EQ(out[1], 2.0);
  EXPECT_DOUBLE_EQ(out[2], 1.0);
}

TEST(PredictIterated, HorizonOneEqualsModelCall) {
  const auto model = half_decay_model();
  const Vector out = predict_iterated(model, {1, 0, 1, false}, vec({8.0}), Vector(0), Vector(0), 1);
  EXPECT_DOUBLE_EQ(out[0], model.value(vec({8.0})));
}

TEST(PredictIterated, MatchesManualUnrolling) {
  // linear 2-lag model y+ = a y_t + b y_{t-1} + c u_{t-1}
  const auto basis = monomial_basis(3, std::vector<int>{1, 1, 1});
  // pick the three linear monomials out of the multilinear set
  Vector coeffs = Vector::Zero(basis.size());
  double a = 0.6, b = -0.3, c = 0.2;
  for (int j = 0; j < basis.size(); ++j) {
    const Vector& e = basis.functions()[static_cast<std::size_t>(j)].params;
    if (e == vec({1.0, 0.0, 0.0})) coeffs[j] = a;
    if (e == vec({0.0, 1.0, 0.0})) coeffs[j] = b;
    if (e == vec({0.0, 0.0, 1.0})) coeffs[j] = c;
  }
  const Model model(basis, coeffs);

  Rng rng(77);
  const Vector y_hist = vec({rng.normal(), rng.normal()});
  const Vector u_hist = vec({rng.normal()});
  const Vector u_future = vec({rng.normal(), rng.normal()});
  const Vector out =
      predict_iterated(model, {2, 1, 1, false}, y_hist, u_hist, u_future, 3);

  // hand unrolled composition
  const double y1 = a * y_hist[1] + b * y_hist[0] + c * u_hist[0];
  const double y2 = a * y1 + b * y_hist[1] + c * u_future[0];
  const double y3 = a * y2 + b * y1 + c * u_future[1];
  EXPECT_NEAR(out[0], y1, 1e-12);
  EXPECT_NEAR(out[1], y2, 1e-12);
  EXPECT_NEAR(out[2], y3, 1e-12);
}

TEST(PredictIterated, ZeroInputCoefficientsIgnoreFutureInputs) {
  const auto basis = monomial_basis(2, std::vector<int>{1, 1});
  Vector coeffs = Vector::Zero(basis.size());
  for (int j = 0; j < basis.size(); ++j)
    if (basis.functions()[static_cast<std::size_t>(j)].params == vec({1.0, 0.0})) coeffs[j] = 0.9;
  const Model model(basis, coeffs);  // depends on y only
  const Vector a =
      predict_iterated(model, {1, 1, 1, false}, vec({2.0}), vec({0.5}), vec({10.0, -3.0}), 3);
  const Vector b =
      predict_iterated(model, {1, 1, 1, false}, vec({2.0}), vec({0.5}), vec({-7.0, 4.0}), 3);
  EXPECT_EQ(a, b);
}

TEST(PredictIterated, RejectsInsufficientHistory) {
  const auto model = half_decay_model();
  EXPECT_THROW(predict_iterated(model, {1, 0, 1, false}, Vector(0), Vector(0), Vector(0), 2),
               std::invalid_argument);
}

TEST(PredictDirect, SingleEvaluation) {
  const Model affine(monomial_basis(1, 1), vec({1.0, 2.0}));
  EXPECT_DOUBLE_EQ(predict_direct(affine, vec({3.0})), 7.0);
  const Model square(monomial_basis(1, 2), vec({0.0, 0.0, 1.0}));
  EXPECT_DOUBLE_EQ(predict_direct(square, vec({-2.0})), 4.0);
  EXPECT_THROW(predict_direct(affine, vec({1.0, 2.0})), std::invalid_argument);
}

TEST(Rmse, BasicValues) {
  EXPECT_DOUBLE_EQ(rmse(vec({1.0, 2.0, 3.0}), vec({1.0, 2.0, 3.0})), 0.0);
  EXPECT_DOUBLE_EQ(rmse(vec({3.0, 4.0}), vec({0.0, 0.0})), std::sqrt(25.0 / 2.0));
  EXPECT_DOUBLE_EQ(rmse(vec({1.5, 2.5, -0.5}), vec({0.5, 1.5, -1.5})), 1.0);  // constant offset
  EXPECT_THROW(rmse(vec({1.0}), vec({1.0, 2.0})), std::invalid_argument);
  EXPECT_THROW(rmse(Vector(0), Vector(0)), std::invalid_argument);
}

TEST(Rmse, ZeroOnlyWhenEqual) {
  Rng rng(3);
  Vector a(10), b(10);
  for (Index i = 0; i < 10; ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + 1e-8 * rng.normal();
  }
  EXPECT_GT(rmse(a, b), 0.0);
  EXPECT_DOUBLE_EQ(rmse(a, a), 0.0);
}

}  // namespace
