#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bkjump/rng.hpp"
#include "bkjump/svm.hpp"

using namespace bkj;

namespace {

Matrix rows(std::initializer_list<std::vector<double>> r) {
  Matrix m;
  for (const auto& v : r) m.append_row(v);
  return m;
}

// Two overlapping Gaussian blobs in d dimensions, labels alternating.
struct Blobs {
  Matrix x;
  std::vector<int> y;
};

Blobs blobs(std::uint64_t seed, std::size_t n, std::size_t d = 3, double sep = 1.5) {
  Rng r(seed);
  Blobs b;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    std::vector<double> v(d);
    for (std::size_t c = 0; c < d; ++c) v[c] = r.normal() + (label ? sep : 0.0) + 3.0 * static_cast<double>(c);
    b.x.append_row(v);
    b.y.push_back(label);
  }
  return b;
}

double direct_decision(const SvmModel& m, std::span<const double> f) {
  std::vector<double> z(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) z[c] = (f[c] - m.standardizer.mean[c]) / m.standardizer.stddev[c];
  double s = m.bias;
  for (std::size_t i = 0; i < m.dual_coefs.size(); ++i) {
    double d2 = 0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      const double e = m.support_vectors(i, c) - z[c];
      d2 += e * e;
    }
    s += m.dual_coefs[i] * std::exp(-m.hp.gamma * d2);
  }
  return s;
}

}  // namespace

TEST(Standardizer, AlreadyStandardIsIdentity) {
  const auto m = rows({{-1, 1}, {1, -1}});
  const auto s = fit_standardizer(m);
  EXPECT_NEAR(s.mean[0], 0, 1e-15);
  EXPECT_NEAR(s.stddev[0], 1, 1e-15);
  EXPECT_NEAR(s.stddev[1], 1, 1e-15);
}

TEST(Standardizer, ConstantColumnPassesWithMarker) {
  const auto m = rows({{5, 1}, {5, 2}, {5, 4}});
  const auto s = fit_standardizer(m);
  EXPECT_TRUE(s.degenerate[0]);
  EXPECT_FALSE(s.degenerate[1]);
  EXPECT_EQ(s.stddev[0], 1.0);
  EXPECT_EQ(apply_standardizer(s, m)(1, 0), 0.0);
}

TEST(Standardizer, RandomMatrixColumnMeansVanish) {
  Rng r(2);
  Matrix m(200, 5);
  for (std::size_t i = 0; i < 200; ++i)
    for (std::size_t c = 0; c < 5; ++c) m(i, c) = 10.0 * r.normal() + static_cast<double>(c * c);
  const auto z = apply_standardizer(fit_standardizer(m), m);
  for (std::size_t c = 0; c < 5; ++c) {
    double mean = 0, ss = 0;
    for (std::size_t i = 0; i < 200; ++i) mean += z(i, c) / 200;
    for (std::size_t i = 0; i < 200; ++i) ss += (z(i, c) - mean) * (z(i, c) - mean) / 200;
    EXPECT_LT(std::abs(mean), 1e-12);
    EXPECT_NEAR(ss, 1.0, 1e-12);
  }
}

TEST(Standardizer, TooFewRows) { EXPECT_THROW(fit_standardizer(rows({{1, 2}})), ArgumentError); }

TEST(TrainSmo, SeparablePair) {
  const auto x = rows({{0, 0}, {1, 1}});
  const std::vector<int> y = {0, 1};
  for (double c : {1.0, 10.0, 100.0}) {
    const auto m = train_smo(x, y, {c, 0.5, 1e-3, 100000});
    const double d0 = decision_value(m, x.row(0)), d1 = decision_value(m, x.row(1));
    EXPECT_LT(d0, 0.0);
    EXPECT_GT(d1, 0.0);
    EXPECT_EQ(predict(m, x.row(0)), 0);
    EXPECT_EQ(predict(m, x.row(1)), 1);
  }
}

TEST(TrainSmo, XorFitsPerfectly) {
  const auto x = rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const std::vector<int> y = {0, 0, 1, 1};
  const auto m = train_smo(x, y, {10.0, 1.0, 1e-3, 100000});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(predict(m, x.row(i)), y[i]) << i;
}

TEST(TrainSmo, KktAndFeasibility) {
  const auto b = blobs(11, 300);
  for (double c : {0.1, 1.0, 100.0}) {
    SvmHyperParams hp{c, 0.5, 1e-3, 100000};
    const auto x = apply_standardizer(fit_standardizer(b.x), b.x);
    const auto k = rbf_gram(x, hp.gamma);
    const auto y = to_signed_labels(b.y);
    const auto sol = solve_dual(k, y, c, hp.tol, hp.max_iterations);
    EXPECT_TRUE(sol.converged);
    EXPECT_LE(kkt_max_violation(k, y, sol.alpha, sol.bias, c), hp.tol);
    double sum = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_GE(sol.alpha[i], 0.0);
      EXPECT_LE(sol.alpha[i], c);
      sum += sol.alpha[i] * y[i];
    }
    EXPECT_LT(std::abs(sum), 1e-8);
  }
}

TEST(TrainSmo, DualObjectiveNonDecreasing) {
  const auto b = blobs(12, 200);
  const auto x = apply_standardizer(fit_standardizer(b.x), b.x);
  const auto k = rbf_gram(x, 1.0);
  const auto y = to_signed_labels(b.y);
  const auto sol = solve_dual(k, y, 10.0, 1e-3, 100000, true);
  ASSERT_GT(sol.objective_trace.size(), 10u);
  for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
    ASSERT_GE(sol.objective_trace[i], sol.objective_trace[i - 1] - 1e-12) << i;
  EXPECT_NEAR(sol.objective_trace.back(), dual_objective(k, y, sol.alpha), 1e-8);
}

TEST(TrainSmo, SupportVectorsAreNonzeroAlphas) {
  const auto b = blobs(13, 200);
  const auto m = train_smo(b.x, b.y, {1.0, 0.5, 1e-3, 100000});
  ASSERT_EQ(m.support_vectors.rows(), m.dual_coefs.size());
  ASSERT_EQ(m.alphas.size(), m.dual_coefs.size());
  for (std::size_t i = 0; i < m.alphas.size(); ++i) {
    EXPECT_GT(m.alphas[i], 0.0);
    EXPECT_LE(m.alphas[i], 1.0);
    EXPECT_EQ(std::abs(m.dual_coefs[i]), m.alphas[i]);
  }
  EXPECT_LT(m.support_vectors.rows(), 200u);
}

TEST(TrainSmo, DuplicatedDatasetSameDecisionFunction) {
  const auto b = blobs(14, 80, 2);
  Matrix x2;
  std::vector<int> y2;
  for (std::size_t i = 0; i < b.y.size(); ++i) {
    x2.append_row(b.x.row(i));
    x2.append_row(b.x.row(i));
    y2.push_back(b.y[i]);
    y2.push_back(b.y[i]);
  }
  // Duplicating rows halves each alpha's share of the box, so c is halved too.
  const auto m1 = train_smo(b.x, b.y, {1.0, 0.5, 1e-10, 1000000});
  const auto m2 = train_smo(x2, y2, {0.5, 0.5, 1e-10, 1000000});
  for (double u = -2; u <= 4; u += 0.5)
    for (double v = 1; v <= 7; v += 0.5) {
      const std::vector<double> p = {u, v};
      EXPECT_NEAR(decision_value(m1, p), decision_value(m2, p), 1e-6);
    }
}

TEST(TrainSmo, NonBinaryLabelsRejected) {
  const auto x = rows({{0}, {1}, {2}});
  EXPECT_THROW(train_smo(x, std::vector<int>{0, 1, 2}, {}), ArgumentError);
  EXPECT_THROW(train_smo(x, std::vector<int>{0, 1}, {}), ArgumentError);
}

TEST(TrainSmo, IterationCapFlagsNonConvergence) {
  const auto b = blobs(15, 200);
  const auto m = train_smo(b.x, b.y, {100.0, 10.0, 1e-3, 3});
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(m.iterations, 3u);
}

TEST(TrainSmo, Deterministic) {
  const auto b = blobs(16, 150);
  const auto m1 = train_smo(b.x, b.y, {});
  const auto m2 = train_smo(b.x, b.y, {});
  EXPECT_EQ(m1.support_vectors, m2.support_vectors);
  EXPECT_EQ(m1.dual_coefs, m2.dual_coefs);
  EXPECT_EQ(m1.bias, m2.bias);
}

TEST(TrainSmo, RawScalingLeavesPredictionsUnchanged) {
  const auto b = blobs(17, 200);
  const auto probe = blobs(18, 100);
  auto scale = [](Matrix m, double a) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (double& v : m.row(i)) v *= a;
    return m;
  };
  const auto m1 = train_smo(b.x, b.y, {});
  const auto m2 = train_smo(scale(b.x, 7.5), b.y, {});
  const auto p2 = scale(probe.x, 7.5);
  for (std::size_t i = 0; i < probe.x.rows(); ++i) {
    // rounding in the standardized rows can reorder SMO pair choices, so
    // values agree only to solver tolerance
    EXPECT_NEAR(decision_value(m1, probe.x.row(i)), decision_value(m2, p2.row(i)), 1e-2);
    EXPECT_EQ(predict(m1, probe.x.row(i)), predict(m2, p2.row(i)));
  }
}

TEST(DecisionValue, ZeroCoefsGiveBias) {
  SvmModel m;
  m.standardizer = {{0, 0}, {1, 1}, {false, false}};
  m.support_vectors = Matrix(0, 2);
  m.bias = -0.375;
  for (double u : {-3.0, 0.0, 8.0}) EXPECT_EQ(decision_value(m, std::vector<double>{u, 2 * u}), -0.375);
  m.bias = 0.0;
  EXPECT_EQ(predict(m, std::vector<double>{1, 1}), 1);
}

TEST(DecisionValue, SupportVectorSignMatchesLabel) {
  const auto x = rows({{0, 0}, {1, 1}});
  const auto m = train_smo(x, std::vector<int>{0, 1}, {1.0, 0.5, 1e-3, 1000});
  ASSERT_EQ(m.support_vectors.rows(), 2u);
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_EQ(decision_value_standardized(m, m.support_vectors.row(i)) > 0, m.dual_coefs[i] > 0);
}

TEST(DecisionValue, MatchesDirectSum) {
  const auto b = blobs(19, 200);
  const auto m = train_smo(b.x, b.y, {10.0, 1.0, 1e-3, 100000});
  const auto probe = blobs(20, 50);
  for (std::size_t i = 0; i < probe.x.rows(); ++i)
    EXPECT_NEAR(decision_value(m, probe.x.row(i)), direct_decision(m, probe.x.row(i)), 1e-12);
  EXPECT_THROW(decision_value(m, std::vector<double>{1, 2}), ArgumentError);
}

TEST(GridSearch, SingleCell) {
  const auto b = blobs(21, 100), e = blobs(22, 50);
  SvmGrid g;
  g.c = {3.0};
  g.gamma = {0.7};
  const auto r = grid_search(b.x, b.y, e.x, e.y, g);
  EXPECT_EQ(r.best.c, 3.0);
  EXPECT_EQ(r.best.gamma, 0.7);
}

TEST(GridSearch, TiesGoToSmallerCThenGamma) {
  // Well separated: every cell is perfect on eval.
  const auto b = blobs(23, 60, 2, 20.0), e = blobs(24, 40, 2, 20.0);
  SvmGrid g;
  g.c = {100.0, 1.0, 10.0};
  g.gamma = {1.0, 0.1, 0.01};
  const auto r = grid_search(b.x, b.y, e.x, e.y, g);
  EXPECT_EQ(r.best_accuracy, 1.0);
  EXPECT_EQ(r.best.c, 1.0);
  EXPECT_EQ(r.best.gamma, 0.01);
}

TEST(GridSearch, PerfectCellWins) {
  // Random labels scored on the training points: only the narrow kernel memorizes them.
  Rng r(27);
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    x.append_row(std::vector<double>{r.normal(), r.normal()});
    y.push_back(i % 2);
  }
  SvmGrid g;
  g.c = {100.0};
  g.gamma = {0.01, 10.0};
  const auto r1 = grid_search(x, y, x, y, g);
  EXPECT_EQ(r1.best_accuracy, 1.0);
  EXPECT_EQ(r1.best.gamma, 10.0);
}

TEST(GridSearch, DefaultGridReproducible) {
  const auto b = blobs(25, 200), e = blobs(26, 100);
  const auto r1 = grid_search(b.x, b.y, e.x, e.y, SvmGrid{});
  const auto r2 = grid_search(b.x, b.y, e.x, e.y, SvmGrid{});
  EXPECT_EQ(r1.best.c, r2.best.c);
  EXPECT_EQ(r1.best.gamma, r2.best.gamma);
  EXPECT_EQ(r1.model.dual_coefs, r2.model.dual_coefs);
  EXPECT_THROW(grid_search(b.x, b.y, e.x, e.y, SvmGrid{{}, {1.0}}), ArgumentError);
}
