#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bkjump/features.hpp"
#include "bkjump/signal_synth.hpp"

using namespace bkj;

namespace {

std::vector<double> noise(std::uint64_t seed, std::size_t len = 450) {
  Rng r(seed);
  std::vector<double> w(len);
  for (double& v : w) v = r.normal();
  return w;
}

std::vector<double> step(std::size_t len, std::size_t tau, double lo = 0.0, double hi = 1.0) {
  std::vector<double> w(len, lo);
  for (std::size_t n = tau; n < len; ++n) w[n] = hi;
  return w;
}

// Plain two-pass Pearson, independent of stats::pearson.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double f1_oracle(const std::vector<double>& w) {
  const std::size_t L = w.size();
  double best = 0;
  for (std::size_t tau = (L + 9) / 10; tau <= 9 * L / 10; ++tau)
    best = std::max(best, std::abs(pearson_oracle(w, step(L, tau))));
  return best;
}

double f2_oracle(const std::vector<double>& w, const DogKernel& k) {
  double m = 0;
  for (double v : w) m += v;
  m /= static_cast<double>(w.size());
  double best = 0;
  for (std::size_t j = 0; j + k.support() <= w.size(); ++j) {
    double dot = 0, a = 0, b = 0;
    for (std::size_t i = 0; i < k.support(); ++i) {
      const double x = w[j + i] - m;
      dot += x * k.taps[i];
      a += x * x;
      b += k.taps[i] * k.taps[i];
    }
    if (a > 0) best = std::max(best, std::abs(dot) / std::sqrt(a * b));
  }
  return best;
}

double f3_oracle(const std::vector<double>& w) {
  const std::size_t F = w.size() / 10;
  double worst = 1;
  for (std::size_t f = 0; f + 1 < 10; ++f) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < F; ++i) {
      ab += w[f * F + i] * w[(f + 1) * F + i];
      aa += w[f * F + i] * w[f * F + i];
      bb += w[(f + 1) * F + i] * w[(f + 1) * F + i];
    }
    worst = std::min(worst, (aa > 0 && bb > 0) ? std::abs(ab) / std::sqrt(aa * bb) : 0.0);
  }
  return worst;
}

double f5_oracle(const std::vector<double>& w) {
  const std::size_t h = w.size() / 2;
  const std::vector<double> a(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(h));
  const std::vector<double> b(w.begin() + static_cast<std::ptrdiff_t>(h), w.begin() + static_cast<std::ptrdiff_t>(2 * h));
  const double n = static_cast<double>(h);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < h; ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < h; ++i) {
    cov += (a[i] - ma) * (b[i] - mb) / n;
    va += (a[i] - ma) * (a[i] - ma) / n;
    vb += (b[i] - mb) * (b[i] - mb) / n;
  }
  return std::abs(2 * cov / (va + vb + (ma - mb) * (ma - mb)));
}

double f8_oracle(const std::vector<double>& w) {
  const std::size_t L = w.size();
  auto sorted = w;
  std::sort(sorted.begin(), sorted.end());
  double table[2][8] = {};
  for (std::size_t n = 0; n < L; ++n) {
    int bin = 0;
    for (std::size_t k = 1; k < 8; ++k)
      if (sorted[k * L / 8] <= w[n]) ++bin;
    table[n < L / 2 ? 0 : 1][bin] += 1;
  }
  double chi2 = 0;
  const double rows[2] = {static_cast<double>(L / 2), static_cast<double>(L - L / 2)};
  for (int c = 0; c < 8; ++c) {
    const double col = table[0][c] + table[1][c];
    if (col == 0) continue;
    for (int r = 0; r < 2; ++r) {
      const double e = rows[r] * col / static_cast<double>(L);
      chi2 += (table[r][c] - e) * (table[r][c] - e) / e;
    }
  }
  return std::sqrt(chi2 / static_cast<double>(L));
}

// Ranks by counting: rank = 1 + #less + (#equal - 1) / 2.
double f9_oracle(const std::vector<double>& w) {
  std::vector<double> r(w.size()), t(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double less = 0, eq = 0;
    for (double v : w) {
      less += v < w[i];
      eq += v == w[i];
    }
    r[i] = 1 + less + (eq - 1) / 2;
    t[i] = static_cast<double>(i);
  }
  return std::abs(pearson_oracle(r, t));
}

std::vector<double> ramp(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t n = 0; n < len; ++n) w[n] = static_cast<double>(n);
  return w;
}

std::vector<double> alternating(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t n = 0; n < len; ++n) w[n] = n % 2 ? -1.0 : 1.0;
  return w;
}

const DogKernel& kernel() {
  static const DogKernel k = make_kernel(20);
  return k;
}

}  // namespace

TEST(F1, CleanStepIsOne) {
  EXPECT_NEAR(f1_step_correlation(step(450, 230, 2.0, -5.0)), 1.0, 1e-12);
}
TEST(F1, ConstantIsZero) { EXPECT_EQ(f1_step_correlation(std::vector<double>(450, 4.0)), 0.0); }
TEST(F1, MatchesExhaustiveTau) {
  const auto w = noise(42);
  EXPECT_NEAR(f1_step_correlation(w), f1_oracle(w), 1e-12);
  auto s = noise(43);
  for (std::size_t n = 300; n < 450; ++n) s[n] += 1.5;
  EXPECT_NEAR(f1_step_correlation(s), f1_oracle(s), 1e-12);
}
TEST(F1, ShortWindowRejected) { EXPECT_THROW(f1_step_correlation(std::vector<double>(49, 1.0)), ArgumentError); }

TEST(F2, KernelItselfIsOne) {
  std::vector<double> w(450, 0.0);
  for (std::size_t i = 0; i < kernel().support(); ++i) w[100 + i] = kernel().taps[i];
  EXPECT_NEAR(f2_kernel_correlation(w, kernel()), 1.0, 1e-12);
}
TEST(F2, ConstantIsZero) { EXPECT_EQ(f2_kernel_correlation(std::vector<double>(450, -2.0), kernel()), 0.0); }
TEST(F2, MatchesSlidingOracle) {
  const auto s = step(450, 230);
  EXPECT_NEAR(f2_kernel_correlation(s, kernel()), f2_oracle(s, kernel()), 1e-12);
  const auto w = noise(44);
  EXPECT_NEAR(f2_kernel_correlation(w, kernel()), f2_oracle(w, kernel()), 1e-12);
}

TEST(F3, ConstantNonzeroIsOne) { EXPECT_EQ(f3_adjacent_frame_correlation(std::vector<double>(450, 3.0)), 1.0); }
TEST(F3, HalfZeroHalfOneIsZero) { EXPECT_EQ(f3_adjacent_frame_correlation(step(450, 225)), 0.0); }
TEST(F3, MatchesFrameOracle) {
  const auto w = noise(45);
  EXPECT_NEAR(f3_adjacent_frame_correlation(w), f3_oracle(w), 1e-12);
}

TEST(F4, AlternatingIsOne) { EXPECT_NEAR(f4_kurtosis(alternating(450)), 1.0, 1e-12); }
TEST(F4, GaussianNearThree) {
  EXPECT_NEAR(f4_kurtosis(noise(3)), 3.0, 0.5);
  double acc = 0;
  for (std::uint64_t s = 0; s < 500; ++s) acc += f4_kurtosis(noise(100 + s));
  EXPECT_NEAR(acc / 500, 3.0, 0.1);
}
TEST(F4, ConstantThrows) { EXPECT_THROW(f4_kurtosis(std::vector<double>(450, 1.0)), DegenerateInputError); }
TEST(F4, TimeReversalInvariant) {
  auto w = noise(46);
  const double a = f4_kurtosis(w);
  std::reverse(w.begin(), w.end());
  EXPECT_NEAR(f4_kurtosis(w), a, 1e-12);
}

TEST(F5, IdenticalHalvesIsOne) {
  auto w = noise(47, 225);
  w.insert(w.end(), w.begin(), w.end());
  EXPECT_NEAR(f5_concordance(w), 1.0, 1e-12);
}
TEST(F5, LargeShiftGoesToZero) {
  auto w = noise(48, 225);
  const auto first = w;
  double prev = 2.0;
  for (double delta : {1.0, 10.0, 100.0, 1000.0}) {
    w = first;
    for (double v : first) w.push_back(v + delta);
    const double f = f5_concordance(w);
    EXPECT_LT(f, prev);
    prev = f;
  }
  EXPECT_LT(prev, 1e-5);
}
TEST(F5, MatchesFormulaOracle) {
  const auto w = noise(49);
  EXPECT_NEAR(f5_concordance(w), f5_oracle(w), 1e-12);
}

TEST(F6, AlternatingIsZero) { EXPECT_NEAR(f6_skewness(alternating(450)), 0.0, 1e-12); }
TEST(F6, ExponentialNearTwo) {
  Rng r(5);
  std::vector<double> w(450);
  for (double& v : w) v = r.exponential();
  EXPECT_NEAR(f6_skewness(w), 2.0, 0.6);
}
TEST(F6, ConstantThrows) { EXPECT_THROW(f6_skewness(std::vector<double>(450, 1.0)), DegenerateInputError); }

TEST(F7, RampIsOne) { EXPECT_NEAR(f7_trend_covariance(ramp(450)), 1.0, 1e-12); }
TEST(F7, SymmetricIsZero) {
  std::vector<double> w(450);
  for (std::size_t n = 0; n < 450; ++n) w[n] = std::abs(static_cast<double>(n) - 224.5);
  EXPECT_NEAR(f7_trend_covariance(w), 0.0, 1e-12);
}
TEST(F7, MatchesPearsonOracle) {
  const auto w = noise(50);
  EXPECT_NEAR(f7_trend_covariance(w), std::abs(pearson_oracle(w, ramp(450))), 1e-12);
}

TEST(F8, CleanStepIsOne) {
  Rng r(51);
  std::vector<double> w(450);
  for (std::size_t n = 0; n < 450; ++n) w[n] = (n < 225 ? 0.0 : 10.0) + r.uniform();
  EXPECT_NEAR(f8_cramers_v(w), 1.0, 1e-12);
}
TEST(F8, PermutedHalvesNearZero) {
  auto w = noise(52, 225);
  auto second = w;
  Rng r(53);
  for (std::size_t i = second.size(); i-- > 1;) std::swap(second[i], second[r.integer(0, i)]);
  w.insert(w.end(), second.begin(), second.end());
  EXPECT_LT(f8_cramers_v(w), 1e-12);
}
TEST(F8, MatchesChiSquareOracle) {
  for (std::uint64_t s : {54u, 55u, 56u}) {
    auto w = noise(s);
    for (std::size_t n = 200; n < 450; ++n) w[n] += 0.7;
    EXPECT_NEAR(f8_cramers_v(w), f8_oracle(w), 1e-12);
  }
  std::vector<double> ties(450);
  for (std::size_t n = 0; n < 450; ++n) ties[n] = static_cast<double>((n * 7) % 5);
  EXPECT_NEAR(f8_cramers_v(ties), f8_oracle(ties), 1e-12);
}
TEST(F8, ConstantIsZero) { EXPECT_EQ(f8_cramers_v(std::vector<double>(450, 1.0)), 0.0); }

TEST(F9, MonotoneIsOne) {
  auto w = ramp(450);
  for (double& v : w) v = std::exp(v / 100);
  EXPECT_NEAR(f9_spearman(w), 1.0, 1e-12);
  std::reverse(w.begin(), w.end());
  EXPECT_NEAR(f9_spearman(w), 1.0, 1e-12);
}
TEST(F9, MatchesRankOracle) {
  const auto w = noise(57);
  EXPECT_NEAR(f9_spearman(w), f9_oracle(w), 1e-12);
  std::vector<double> ties(450);
  for (std::size_t n = 0; n < 450; ++n) ties[n] = static_cast<double>((n * 13) % 7) + (n > 300 ? 3 : 0);
  EXPECT_NEAR(f9_spearman(ties), f9_oracle(ties), 1e-12);
}

TEST(Extract, CleanStep) {
  const auto f = extract(step(450, 230, 0.0, 3.0), kernel());
  EXPECT_NEAR(f[0], 1.0, 1e-12);
  EXPECT_FALSE(f.degenerate);
}

TEST(Extract, ZeroWindowAllZeroWithMarker) {
  const auto f = extract(std::vector<double>(450, 0.0), kernel());
  for (double v : f.values) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(f.degenerate);
}

// A constant nonzero window has identical frames, so f3 stays at 1.
TEST(Extract, ConstantNonzeroWindow) {
  const auto f = extract(std::vector<double>(450, 2.0), kernel());
  EXPECT_TRUE(f.degenerate);
  for (std::size_t i = 0; i < kNumFeatures; ++i) EXPECT_EQ(f[i], i == 2 ? 1.0 : 0.0) << i;
}

TEST(Extract, ComposesIndividualOps) {
  SynthesisConfig c;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    c.seed = 300 + s;
    const auto w = synth_labeled(c, static_cast<int>(s % 2), s % 3 != 0).window.samples;
    const auto f = extract(w, kernel());
    ASSERT_EQ(f[0], f1_step_correlation(w));
    ASSERT_EQ(f[1], f2_kernel_correlation(w, kernel()));
    ASSERT_EQ(f[2], f3_adjacent_frame_correlation(w));
    ASSERT_EQ(f[3], f4_kurtosis(w));
    ASSERT_EQ(f[4], f5_concordance(w));
    ASSERT_EQ(f[5], f6_skewness(w));
    ASSERT_EQ(f[6], f7_trend_covariance(w));
    ASSERT_EQ(f[7], f8_cramers_v(w));
    ASSERT_EQ(f[8], f9_spearman(w));
  }
}

TEST(Extract, RangesOnRandomWindows) {
  SynthesisConfig c;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    c.seed = 5000 + s;
    c.snr_db = static_cast<double>(s % 16);
    const auto f = extract(synth_labeled(c, static_cast<int>(s % 2), s % 4 == 0).window.samples, kernel());
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      ASSERT_TRUE(std::isfinite(f[i]));
      ASSERT_GE(f[i], 0.0);
      ASSERT_LE(f[i], kFeatureUpperBound[i]);
    }
  }
}

TEST(Extract, ScaleAndOffsetInvariances) {
  SynthesisConfig c;
  for (std::uint64_t s = 0; s < 50; ++s) {
    c.seed = 800 + s;
    const auto w = synth_labeled(c, static_cast<int>(s % 2), false).window.samples;
    std::vector<double> scaled(w.size()), shifted(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      scaled[i] = 2.75 * w[i];
      shifted[i] = w[i] + 13.0;
    }
    const auto f = extract(w, kernel()), fs = extract(scaled, kernel()), fo = extract(shifted, kernel());
    for (std::size_t i : {0u, 1u, 2u, 4u, 6u, 7u, 8u}) EXPECT_NEAR(fs[i], f[i], 1e-12) << "scale f" << i + 1;
    for (std::size_t i : {0u, 3u, 4u, 5u, 6u, 8u}) EXPECT_NEAR(fo[i], f[i], 1e-12 * std::max(1.0, f[i])) << "offset f" << i + 1;
  }
}
