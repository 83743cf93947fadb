#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bkjump/errors.hpp"
#include "bkjump/matrix.hpp"

namespace bkj {

/// Per-column affine map to zero mean, unit population std, fitted on the
/// training rows only. Zero-std columns keep std 1 and are flagged.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> degenerate;

  std::size_t dims() const { return mean.size(); }

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

inline Standardizer fit_standardizer(const Matrix& x) {
  if (x.rows() < 2) throw ArgumentError("fit_standardizer: need at least 2 rows");
  const std::size_t d = x.cols();
  Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), std::vector<bool>(d, false)};
  const auto n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) sum += x(r, c);
    const double m = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, c) - m) * (x(r, c) - m);
    const double sd = std::sqrt(ss / n);
    s.mean[c] = m;
    if (sd > 0.0 && std::isfinite(sd)) {
      s.stddev[c] = sd;
    } else {
      s.stddev[c] = 1.0;
      s.degenerate[c] = true;
    }
  }
  return s;
}

inline void apply_standardizer_into(const Standardizer& s, std::span<const double> in, std::span<double> out) {
  if (in.size() != s.dims() || out.size() != s.dims())
    throw ArgumentError("apply_standardizer: dimension mismatch");
  for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - s.mean[c]) / s.stddev[c];
}

inline std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> f) {
  std::vector<double> out(f.size());
  apply_standardizer_into(s, f, out);
  return out;
}

inline Matrix apply_standardizer(const Standardizer& s, const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) apply_standardizer_into(s, x.row(r), out.row(r));
  return out;
}

}  // namespace bkj
