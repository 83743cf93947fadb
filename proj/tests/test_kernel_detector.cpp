#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bkjump/kernel_detector.hpp"
#include "bkjump/signal_synth.hpp"

using namespace bkj;

namespace {

std::vector<double> step(std::size_t len, std::size_t tau, double amp = 1.0) {
  std::vector<double> w(len, 0.0);
  for (std::size_t n = tau; n < len; ++n) w[n] = amp;
  return w;
}

std::vector<double> noise(std::uint64_t seed, std::size_t len = 450, double sd = 1.0) {
  Rng r(seed);
  std::vector<double> w(len);
  for (double& v : w) v = sd * r.normal();
  return w;
}

// Direct correlation with explicit reflect padding, no tap pairing.
std::vector<double> oracle_filter(const std::vector<double>& w, const DogKernel& k) {
  const auto len = static_cast<std::ptrdiff_t>(w.size());
  const auto h = static_cast<std::ptrdiff_t>(k.half_width());
  std::vector<double> out(w.size());
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    double acc = 0;
    for (std::ptrdiff_t n = -h; n <= h; ++n) {
      std::ptrdiff_t j = i + n;
      if (j < 0) j = -j;
      if (j >= len) j = 2 * (len - 1) - j;
      acc += k.at(n) * w[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace

TEST(MakeKernel, ZeroSumAntisymmetricUnitNorm) {
  for (double sigma : {1.0, 2.5, 7.0, 20.0, 33.3}) {
    const auto k = make_kernel(sigma);
    double sum = 0, norm2 = 0;
    for (double t : k.taps) {
      sum += t;
      norm2 += t * t;
    }
    EXPECT_NEAR(sum, 0.0, 1e-12);
    EXPECT_NEAR(norm2, 1.0, 1e-12);
    EXPECT_EQ(k.half_width(), static_cast<std::size_t>(std::floor(4 * sigma)));
    for (std::ptrdiff_t n = 0; n <= static_cast<std::ptrdiff_t>(k.half_width()); ++n) EXPECT_EQ(k.at(-n), -k.at(n));
  }
}

TEST(MakeKernel, ExtremaAtSigma) {
  const auto k = make_kernel(20);
  const auto it = std::max_element(k.taps.begin(), k.taps.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  const auto idx = static_cast<std::ptrdiff_t>(it - k.taps.begin()) - static_cast<std::ptrdiff_t>(k.half_width());
  EXPECT_EQ(std::abs(idx), 20);
  EXPECT_EQ(std::abs(k.at(20)), std::abs(k.at(-20)));
}

TEST(MakeKernel, ClosedForm) {
  const double sigma = 20;
  const auto k = make_kernel(sigma);
  std::vector<double> raw;
  for (int n = -80; n <= 80; ++n) raw.push_back(-n / (sigma * sigma) * std::exp(-n * n / (2 * sigma * sigma)));
  double norm = 0;
  for (double v : raw) norm += v * v;
  norm = std::sqrt(norm);
  ASSERT_EQ(k.taps.size(), raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_NEAR(k.taps[i], raw[i] / norm, 1e-15);
}

TEST(MakeKernel, RejectsSmallSigma) {
  EXPECT_THROW(make_kernel(0.5), ArgumentError);
  EXPECT_NO_THROW(make_kernel(1.0));
  EXPECT_EQ(default_kernel(10).sigma, 20.0);
}

TEST(MatchedFilter, ConstantGivesZero) {
  const auto k = make_kernel(20);
  const std::vector<double> w(450, 3.7);
  for (double v : matched_filter(w, k)) EXPECT_EQ(v, 0.0);
}

TEST(MatchedFilter, MatchesDirectOracle) {
  const auto k = make_kernel(20);
  const auto w = noise(21);
  const auto got = matched_filter(w, k);
  const auto want = oracle_filter(w, k);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(MatchedFilter, StepPeaksAtEdge) {
  const auto k = make_kernel(20);
  for (std::size_t tau : {100u, 230u, 350u}) {
    const auto r = matched_filter(step(450, tau), k);
    const auto it = std::max_element(r.begin(), r.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    const auto idx = static_cast<std::size_t>(it - r.begin());
    // the response is symmetric about tau - 1/2, so either neighbour
    EXPECT_TRUE(idx == tau || idx + 1 == tau) << idx;
  }
}

TEST(MatchedFilter, Linear) {
  const auto k = make_kernel(20);
  const auto w = noise(22);
  std::vector<double> neg(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) neg[i] = -w[i];
  const auto a = matched_filter(w, k), b = matched_filter(neg, k);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(b[i], -a[i]);
}

TEST(MatchedFilter, SupportTooLong) {
  const auto k = make_kernel(20);
  EXPECT_THROW(matched_filter(std::vector<double>(160, 0.0), k), ArgumentError);
}

TEST(ScoreWindow, ConstantScoresZero) {
  const auto k = make_kernel(20);
  const auto s = score_window(std::vector<double>(450, 1.0), k);
  EXPECT_EQ(s.score, 0.0);
}

TEST(ScoreWindow, ZeroMadPositivePeakIsInfinite) {
  const auto k = make_kernel(2);
  std::vector<double> w(450, 0.0);
  w[200] = 1.0;
  EXPECT_EQ(score_window(w, k).score, std::numeric_limits<double>::infinity());
}

TEST(ScoreWindow, JumpBeatsSameSeedNoJump) {
  const auto k = make_kernel(20);
  const auto base = noise(11);
  auto with_jump = base;
  for (std::size_t n = 230; n < 450; ++n) with_jump[n] += 10.0;
  EXPECT_GT(score_window(with_jump, k).score, score_window(base, k).score);
}

// An antisymmetric kernel responds to an impulse with a copy of itself:
// zero at the impulse, extremes one sigma to either side.
TEST(ScoreWindow, SpikePeakOneSigmaFromSpike) {
  const auto k = make_kernel(20);
  std::vector<double> w(450, 0.0);
  w[200] = 5.0;
  const auto r = matched_filter(w, k);
  EXPECT_EQ(r[200], 0.0);
  const auto s = score_window(w, k);
  EXPECT_TRUE(s.peak_index == 180 || s.peak_index == 220) << s.peak_index;
  EXPECT_EQ(std::abs(r[180]), std::abs(r[220]));
}

TEST(ScoreWindow, ScaleInvariantShiftEquivariant) {
  const auto k = make_kernel(20);
  auto w = noise(12, 450, 0.3);
  auto shifted = noise(12, 450, 0.3);
  for (std::size_t n = 200; n < 450; ++n) w[n] += 4.0;
  for (std::size_t n = 230; n < 450; ++n) shifted[n] += 4.0;
  std::vector<double> scaled(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) scaled[i] = 3.0 * w[i];
  const auto a = score_window(w, k), b = score_window(scaled, k);
  EXPECT_NEAR(a.score, b.score, 1e-12 * a.score);
  EXPECT_EQ(a.peak_index, b.peak_index);
  // clean steps: exact shift
  const auto p1 = score_window(step(450, 200), k).peak_index;
  const auto p2 = score_window(step(450, 230), k).peak_index;
  EXPECT_EQ(p2 - p1, 30u);
}

TEST(Detect, Thresholds) {
  const auto k = make_kernel(20);
  const auto w = noise(13);
  EXPECT_EQ(detect(w, k, 0.0), 1);
  EXPECT_EQ(detect(w, k, std::numeric_limits<double>::infinity()), 0);
  EXPECT_EQ(detect(std::vector<double>(450, 0.0), k, 0.0), 1);
  EXPECT_THROW(detect(w, k, -1.0), ArgumentError);
}

// Empirical-percentile oracle on shielded label-0 windows.
TEST(Detect, PercentileThresholdGivesMatchingFpr) {
  const auto k = make_kernel(20);
  SynthesisConfig c;
  std::vector<double> train_scores;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    c.seed = 50000 + s;
    train_scores.push_back(score_window(synth_labeled(c, 0, true).window.samples, k).score);
  }
  const double theta = stats::quantile(train_scores, 0.95);
  int fp = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    c.seed = 90000 + s;
    fp += detect(synth_labeled(c, 0, true).window.samples, k, theta);
  }
  EXPECT_NEAR(fp / 1000.0, 0.05, 0.025);
}

TEST(Detect, ShieldedLabelOneDominates) {
  const auto k = make_kernel(20);
  SynthesisConfig c;
  std::vector<double> s0, s1;
  for (std::uint64_t s = 0; s < 500; ++s) {
    c.seed = 7000 + s;
    s0.push_back(score_window(synth_labeled(c, 0, true).window.samples, k).score);
    s1.push_back(score_window(synth_labeled(c, 1, true).window.samples, k).score);
  }
  EXPECT_GT(stats::median(s1), stats::quantile(s0, 0.95));
}
