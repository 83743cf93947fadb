#pragma once

// The nine per-window features fed to the learning detectors. Each one
// looks for a different jump signature: template match (f1, f2), local
// continuity (f3), moment shape (f4, f6), half-window level shift (f5, f8)
// and monotone trend (f7, f9). All are computed from the window alone.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bkjump/errors.hpp"
#include "bkjump/kernel_detector.hpp"
#include "bkjump/stats.hpp"

namespace bkj {

inline constexpr std::size_t kNumFeatures = 9;

inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "step_correlation", "kernel_correlation", "adjacent_frame_correlation",
    "kurtosis",         "concordance",        "skewness",
    "trend_covariance", "cramers_v",          "spearman"};

struct FeatureVector {
  std::array<double, kNumFeatures> values{};
  bool degenerate = false;  // f4/f6 undefined (zero variance) and reported as 0

  double operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Upper bound of each feature's range; the lower bound is always 0.
inline constexpr std::array<double, kNumFeatures> kFeatureUpperBound = {
    1.0, 1.0, 1.0, std::numeric_limits<double>::infinity(), 1.0, std::numeric_limits<double>::infinity(),
    1.0, 1.0, 1.0};

namespace detail {

inline bool is_constant(std::span<const double> w) {
  if (w.empty()) return true;
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return *lo == *hi;
}

inline std::vector<double> centered(std::span<const double> w) {
  const double m = stats::mean(w);
  std::vector<double> c(w.begin(), w.end());
  for (double& v : c) v -= m;
  return c;
}

/// Central moments m2, m3, m4 (population normalization).
inline std::array<double, 3> central_moments(std::span<const double> w) {
  const auto c = centered(w);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : c) {
    const double v2 = v * v;
    m2 += v2;
    m3 += v2 * v;
    m4 += v2 * v2;
  }
  const auto n = static_cast<double>(c.size());
  return {m2 / n, m3 / n, m4 / n};
}

inline double clamp_unit(double v) { return std::min(1.0, std::abs(v)); }

inline std::vector<double> time_index(std::size_t len) {
  std::vector<double> t(len);
  for (std::size_t n = 0; n < len; ++n) t[n] = static_cast<double>(n);
  return t;
}

}  // namespace detail

/// max over tau in [L/10, 9L/10] of |Pearson(w, 1[n >= tau])|.
inline double f1_step_correlation(std::span<const double> w) {
  const std::size_t len = w.size();
  if (len < 50) throw ArgumentError("f1_step_correlation: window shorter than 50 samples");
  if (detail::is_constant(w)) return 0.0;
  const auto c = detail::centered(w);
  double sxx = 0.0;
  for (double v : c) sxx += v * v;
  if (!(sxx > 0.0)) return 0.0;
  // suffix[t] = sum of c[n] for n >= t
  std::vector<double> suffix(len + 1, 0.0);
  for (std::size_t n = len; n-- > 0;) suffix[n] = suffix[n + 1] + c[n];
  const auto L = static_cast<double>(len);
  double best = 0.0;
  for (std::size_t tau = (len + 9) / 10; tau <= (9 * len) / 10; ++tau) {
    const auto ones = static_cast<double>(len - tau);
    const double syy = ones * (L - ones) / L;
    const double r = suffix[tau] / std::sqrt(sxx * syy);
    best = std::max(best, std::abs(r));
  }
  return std::min(best, 1.0);
}

/// max over valid alignments of |<segment, taps>| / (|segment| |taps|),
/// segments taken from the mean-removed window.
inline double f2_kernel_correlation(std::span<const double> w, const DogKernel& k) {
  const std::size_t len = w.size();
  const std::size_t support = k.support();
  if (support > len) throw ArgumentError("f2_kernel_correlation: kernel support exceeds window length");
  if (detail::is_constant(w)) return 0.0;
  const auto c = detail::centered(w);
  double tap_norm2 = 0.0;
  for (double t : k.taps) tap_norm2 += t * t;
  const double tap_norm = std::sqrt(tap_norm2);
  double best = 0.0;
  for (std::size_t j = 0; j + support <= len; ++j) {
    double dot = 0.0, seg2 = 0.0;
    for (std::size_t i = 0; i < support; ++i) {
      dot += c[j + i] * k.taps[i];
      seg2 += c[j + i] * c[j + i];
    }
    if (seg2 > 0.0) best = std::max(best, std::abs(dot) / (std::sqrt(seg2) * tap_norm));
  }
  return std::min(best, 1.0);
}

inline constexpr std::size_t kFrameCount = 10;

/// Raw window cut into 10 equal frames; min over adjacent pairs of |cosine
/// similarity|, a zero-norm frame counting as similarity 0.
inline double f3_adjacent_frame_correlation(std::span<const double> w) {
  const std::size_t frame = w.size() / kFrameCount;
  if (frame < 1) throw ArgumentError("f3_adjacent_frame_correlation: window too short for 10 frames");
  double worst = 1.0;
  for (std::size_t f = 0; f + 1 < kFrameCount; ++f) {
    const auto a = w.subspan(f * frame, frame);
    const auto b = w.subspan((f + 1) * frame, frame);
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < frame; ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    const double sim = (aa > 0.0 && bb > 0.0) ? detail::clamp_unit(ab / std::sqrt(aa * bb)) : 0.0;
    worst = std::min(worst, sim);
  }
  return worst;
}

/// Non-excess kurtosis m4 / m2^2.
inline double f4_kurtosis(std::span<const double> w) {
  if (detail::is_constant(w)) throw DegenerateInputError("f4_kurtosis: zero variance");
  const auto [m2, m3, m4] = detail::central_moments(w);
  if (!(m2 > 0.0)) throw DegenerateInputError("f4_kurtosis: zero variance");
  return m4 / (m2 * m2);
}

/// |Lin's concordance| between the first and second half, paired by index.
inline double f5_concordance(std::span<const double> w) {
  const std::size_t half = w.size() / 2;
  const auto a = w.first(half);
  const auto b = w.subspan(half, half);
  const double ma = stats::mean(a), mb = stats::mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  const auto n = static_cast<double>(half);
  const double denom = saa / n + sbb / n + (ma - mb) * (ma - mb);
  if (!(denom > 0.0)) return 0.0;
  return detail::clamp_unit(2.0 * (sab / n) / denom);
}

/// |m3| / m2^(3/2).
inline double f6_skewness(std::span<const double> w) {
  if (detail::is_constant(w)) throw DegenerateInputError("f6_skewness: zero variance");
  const auto [m2, m3, m4] = detail::central_moments(w);
  if (!(m2 > 0.0)) throw DegenerateInputError("f6_skewness: zero variance");
  return std::abs(m3) / std::pow(m2, 1.5);
}

/// |Pearson(w, n)|.
inline double f7_trend_covariance(std::span<const double> w) {
  if (detail::is_constant(w)) return 0.0;
  return detail::clamp_unit(stats::pearson(w, detail::time_index(w.size())));
}

inline constexpr std::size_t kCramerBins = 8;

/// Cramer's V of the 2 x 8 table (first/second half) x (amplitude octile).
/// Octile edges are the order statistics at positions kL/8; a sample goes
/// to the bin counting the edges at or below it, so an edge sample opens
/// the upper bin.
inline double f8_cramers_v(std::span<const double> w) {
  const std::size_t len = w.size();
  if (len < 16) throw ArgumentError("f8_cramers_v: window shorter than 16 samples");
  if (detail::is_constant(w)) return 0.0;
  std::vector<double> sorted(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end());
  std::array<double, kCramerBins - 1> edges{};
  for (std::size_t k = 1; k < kCramerBins; ++k) edges[k - 1] = sorted[k * len / kCramerBins];
  std::array<std::array<double, kCramerBins>, 2> table{};
  const std::size_t half = len / 2;
  for (std::size_t n = 0; n < len; ++n) {
    const auto bin = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), w[n]) - edges.begin());
    table[n < half ? 0 : 1][bin] += 1.0;
  }
  const auto total = static_cast<double>(len);
  const std::array<double, 2> row_sum = {static_cast<double>(half), static_cast<double>(len - half)};
  double chi2 = 0.0;
  for (std::size_t c = 0; c < kCramerBins; ++c) {
    const double col = table[0][c] + table[1][c];
    if (col == 0.0) continue;
    for (std::size_t r = 0; r < 2; ++r) {
      const double expected = row_sum[r] * col / total;
      const double d = table[r][c] - expected;
      chi2 += d * d / expected;
    }
  }
  return std::min(1.0, std::sqrt(chi2 / total));
}

/// |Spearman(w, n)| with average ranks for ties.
inline double f9_spearman(std::span<const double> w) {
  if (detail::is_constant(w)) return 0.0;
  const auto ranks = stats::average_ranks(w);
  return detail::clamp_unit(stats::pearson(ranks, detail::time_index(w.size())));
}

/// f1..f9 in order. A zero-variance window yields 0 for f4 and f6 and sets
/// the degeneracy marker.
inline FeatureVector extract(std::span<const double> w, const DogKernel& k) {
  FeatureVector f;
  f.values[0] = f1_step_correlation(w);
  f.values[1] = f2_kernel_correlation(w, k);
  f.values[2] = f3_adjacent_frame_correlation(w);
  try {
    f.values[3] = f4_kurtosis(w);
  } catch (const DegenerateInputError&) {
    f.values[3] = 0.0;
    f.degenerate = true;
  }
  f.values[4] = f5_concordance(w);
  try {
    f.values[5] = f6_skewness(w);
  } catch (const DegenerateInputError&) {
    f.values[5] = 0.0;
    f.degenerate = true;
  }
  f.values[6] = f7_trend_covariance(w);
  f.values[7] = f8_cramers_v(w);
  f.values[8] = f9_spearman(w);
  return f;
}

}  // namespace bkj
