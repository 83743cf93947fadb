#pragma once

// Derivative-of-Gaussian template matching with a robust peak statistic.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "bkjump/errors.hpp"
#include "bkjump/stats.hpp"

namespace bkj {

/// Unit-norm taps of -n/sigma^2 exp(-n^2 / (2 sigma^2)) on n in [-h, h],
/// h = floor(4 sigma). Antisymmetric by construction: taps[h+n] == -taps[h-n].
struct DogKernel {
  double sigma = 20.0;  // samples
  double fs = 10.0;     // Hz
  std::vector<double> taps;

  std::size_t half_width() const { return (taps.size() - 1) / 2; }
  std::size_t support() const { return taps.size(); }
  /// Tap at offset n from the center.
  double at(std::ptrdiff_t n) const { return taps[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(half_width()) + n)]; }
};

struct DetectionScore {
  double score = 0.0;  // max|response| / (1.4826 MAD); +inf when MAD is 0 and the peak is not
  std::size_t peak_index = 0;
};

inline DogKernel make_kernel(double sigma, double fs = 10.0) {
  if (!(sigma >= 1.0)) throw ArgumentError("make_kernel: sigma must be >= 1");
  const auto half = static_cast<std::size_t>(std::floor(4.0 * sigma));
  DogKernel k;
  k.sigma = sigma;
  k.fs = fs;
  k.taps.assign(2 * half + 1, 0.0);
  const double s2 = sigma * sigma;
  double norm2 = 0.0;
  for (std::size_t n = 1; n <= half; ++n) {
    const double x = static_cast<double>(n);
    const double v = -x / s2 * std::exp(-x * x / (2.0 * s2));
    k.taps[half + n] = v;
    k.taps[half - n] = -v;
    norm2 += 2.0 * v * v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& t : k.taps) t *= inv;
  return k;
}

/// Kernel with the default width sigma = 2 fs.
inline DogKernel default_kernel(double fs = 10.0) { return make_kernel(2.0 * fs, fs); }

/// Correlation of w with the taps, reflect-padded (edge sample not
/// repeated), same length as w. Taps are paired as t[n] (w[i+n] - w[i-n])
/// so constant input gives exactly zero.
inline std::vector<double> matched_filter(std::span<const double> w, const DogKernel& k) {
  const std::size_t len = w.size();
  const std::size_t half = k.half_width();
  if (k.support() > len) throw ArgumentError("matched_filter: kernel support exceeds window length");
  const auto n_len = static_cast<std::ptrdiff_t>(len);
  auto sample = [&](std::ptrdiff_t i) {
    if (i < 0) i = -i;
    if (i >= n_len) i = 2 * (n_len - 1) - i;
    return w[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(len, 0.0);
  for (std::ptrdiff_t i = 0; i < n_len; ++i) {
    double acc = 0.0;
    for (std::size_t n = 1; n <= half; ++n) {
      const auto d = static_cast<std::ptrdiff_t>(n);
      acc += k.taps[half + n] * (sample(i + d) - sample(i - d));
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

inline DetectionScore score_window(std::span<const double> w, const DogKernel& k) {
  const auto response = matched_filter(w, k);
  DetectionScore s;
  double peak = 0.0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    if (std::abs(response[i]) > peak) {
      peak = std::abs(response[i]);
      s.peak_index = i;
    }
  }
  const double med = stats::median(response);
  std::vector<double> dev(response.size());
  for (std::size_t i = 0; i < response.size(); ++i) dev[i] = std::abs(response[i] - med);
  const double scale = 1.4826 * stats::median(std::move(dev));
  if (scale > 0.0)
    s.score = peak / scale;
  else
    s.score = peak > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return s;
}

inline int detect(std::span<const double> w, const DogKernel& k, double theta) {
  if (!(theta >= 0.0)) throw ArgumentError("detect: theta must be >= 0");
  return score_window(w, k).score >= theta ? 1 : 0;
}

}  // namespace bkj
