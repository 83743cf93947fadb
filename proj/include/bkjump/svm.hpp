#pragma once

// Soft-margin RBF support vector machine trained with sequential minimal
// optimization. The pair (i, j) is chosen by maximal violation for i and
// second-order gain for j; iteration stops once the largest KKT violation
// gap m(alpha) - M(alpha) falls below tol.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "bkjump/errors.hpp"
#include "bkjump/matrix.hpp"
#include "bkjump/metrics.hpp"
#include "bkjump/standardize.hpp"

namespace bkj {

struct SvmHyperParams {
  double c = 1.0;
  double gamma = 0.1;
  double tol = 1e-3;
  std::size_t max_iterations = 100000;

  void validate() const {
    if (!(c > 0.0)) throw ArgumentError("SvmHyperParams: c must be positive");
    if (!(gamma > 0.0)) throw ArgumentError("SvmHyperParams: gamma must be positive");
    if (!(tol > 0.0)) throw ArgumentError("SvmHyperParams: tol must be positive");
    if (max_iterations == 0) throw ArgumentError("SvmHyperParams: max_iterations must be positive");
  }
};

struct SvmModel {
  SvmHyperParams hp;
  Standardizer standardizer;
  Matrix support_vectors;          // standardized
  std::vector<double> dual_coefs;  // alpha_i * y_i
  std::vector<double> alphas;      // alpha_i of each support vector
  double bias = 0.0;
  bool converged = true;
  std::size_t iterations = 0;

  std::size_t dims() const { return standardizer.dims(); }
};

/// Solution of the dual problem over a precomputed kernel matrix.
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // dual objective after each accepted update, if requested
};

inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

inline Matrix rbf_gram(const Matrix& x, double gamma) {
  const std::size_t n = x.rows();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) k(i, j) = k(j, i) = rbf_kernel(x.row(i), x.row(j), gamma);
  }
  return k;
}

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
inline double dual_objective(const Matrix& k, std::span<const int> y, std::span<const double> alpha) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    lin += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < alpha.size(); ++j)
      if (alpha[j] != 0.0) quad += alpha[i] * alpha[j] * y[i] * y[j] * k(i, j);
  }
  return lin - 0.5 * quad;
}

/// y in {-1, +1}. Minimizes 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij,
/// 0 <= a <= c, y'a = 0.
inline DualSolution solve_dual(const Matrix& k, std::span<const int> y, double c, double tol,
                               std::size_t max_iterations, bool trace_objective = false) {
  const std::size_t n = y.size();
  if (k.rows() != n || k.cols() != n) throw ArgumentError("solve_dual: kernel matrix shape mismatch");
  constexpr double kTau = 1e-12;
  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto& a = sol.alpha;
  auto in_up = [&](std::size_t t) { return (y[t] == 1 && a[t] < c) || (y[t] == -1 && a[t] > 0.0); };
  auto in_low = [&](std::size_t t) { return (y[t] == 1 && a[t] > 0.0) || (y[t] == -1 && a[t] < c); };

  while (true) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] >= gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best_gain = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * grad[t];
      gmin = std::min(gmin, v);
      if (i == n) continue;
      const double b = gmax - v;
      if (b > 0.0) {
        double quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (quad <= 0.0) quad = kTau;
        const double gain = -(b * b) / quad;
        if (gain <= best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (i == n || j == n || gmax - gmin < tol) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= max_iterations) break;
    ++sol.iterations;

    const double old_i = a[i], old_j = a[j];
    const double qij = y[i] * y[j] * k(i, j);
    if (y[i] != y[j]) {
      double quad = k(i, i) + k(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = diff;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = -diff;
      }
      if (diff > 0.0) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = c - diff;
        }
      } else if (a[j] > c) {
        a[j] = c;
        a[i] = c + diff;
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = sum - c;
        }
      } else if (a[j] < 0.0) {
        a[j] = 0.0;
        a[i] = sum;
      }
      if (sum > c) {
        if (a[j] > c) {
          a[j] = c;
          a[i] = sum - c;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = sum;
      }
    }
    const double di = a[i] - old_i, dj = a[j] - old_j;
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * k(t, i) * di + y[j] * k(t, j) * dj);
    if (trace_objective) {
      // -(1/2 a'Qa - e'a) = -1/2 sum a_t (grad_t - 1)
      double f = 0.0;
      for (std::size_t t = 0; t < n; ++t) f += a[t] * (grad[t] - 1.0);
      sol.objective_trace.push_back(-0.5 * f);
    }
  }

  // Offset: average over free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (a[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (a[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  sol.bias = std::isfinite(rho) ? -rho : 0.0;
  return sol;
}

/// Largest violation of the per-point KKT conditions, recomputed from the
/// kernel matrix: y f(x) >= 1 at alpha = 0, y f(x) = 1 when free, y f(x) <= 1
/// at alpha = c.
inline double kkt_max_violation(const Matrix& k, std::span<const int> y, std::span<const double> alpha,
                                double bias, double c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double f = bias;
    for (std::size_t j = 0; j < y.size(); ++j)
      if (alpha[j] != 0.0) f += alpha[j] * y[j] * k(i, j);
    const double margin = y[i] * f;
    double v = 0.0;
    if (alpha[i] <= 0.0) v = std::max(0.0, 1.0 - margin);
    else if (alpha[i] >= c) v = std::max(0.0, margin - 1.0);
    else v = std::abs(margin - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

inline std::vector<int> to_signed_labels(std::span<const int> labels) {
  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) y[i] = 1;
    else if (labels[i] == 0) y[i] = -1;
    else throw ArgumentError("svm: labels must be 0 or 1");
  }
  return y;
}

/// Standardizes the raw features, solves the dual and keeps alpha > 0.
inline SvmModel train_smo(const Matrix& features, std::span<const int> labels, const SvmHyperParams& hp) {
  hp.validate();
  if (features.rows() != labels.size()) throw ArgumentError("train_smo: features/labels size mismatch");
  if (features.rows() < 2) throw ArgumentError("train_smo: need at least 2 samples");
  const auto y = to_signed_labels(labels);
  SvmModel m;
  m.hp = hp;
  m.standardizer = fit_standardizer(features);
  const Matrix x = apply_standardizer(m.standardizer, features);
  const Matrix k = rbf_gram(x, hp.gamma);
  const DualSolution sol = solve_dual(k, y, hp.c, hp.tol, hp.max_iterations);
  m.bias = sol.bias;
  m.converged = sol.converged;
  m.iterations = sol.iterations;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (sol.alpha[i] > 0.0) {
      m.support_vectors.append_row(x.row(i));
      m.dual_coefs.push_back(sol.alpha[i] * y[i]);
      m.alphas.push_back(sol.alpha[i]);
    }
  }
  if (m.support_vectors.cols() == 0) m.support_vectors = Matrix(0, x.cols());
  return m;
}

/// Decision value on an already standardized feature row.
inline double decision_value_standardized(const SvmModel& m, std::span<const double> z) {
  double s = m.bias;
  for (std::size_t i = 0; i < m.dual_coefs.size(); ++i)
    s += m.dual_coefs[i] * rbf_kernel(m.support_vectors.row(i), z, m.hp.gamma);
  return s;
}

/// sum_i coef_i K(sv_i, standardize(f)) + bias, on a raw feature row.
inline double decision_value(const SvmModel& m, std::span<const double> f) {
  if (f.size() != m.dims()) throw ArgumentError("svm decision_value: dimension mismatch");
  return decision_value_standardized(m, apply_standardizer(m.standardizer, f));
}

inline int predict(const SvmModel& m, std::span<const double> f) { return decision_value(m, f) >= 0.0 ? 1 : 0; }

inline std::vector<double> decision_values(const SvmModel& m, const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = decision_value(m, x.row(r));
  return out;
}

struct SvmGrid {
  std::vector<double> c = {0.1, 1.0, 10.0, 100.0};
  std::vector<double> gamma = {0.01, 0.1, 1.0, 10.0};
  double tol = 1e-3;
  std::size_t max_iterations = 100000;
};

struct GridSearchResult {
  SvmHyperParams best;
  double best_accuracy = 0.0;
  SvmModel model;  // trained on the training split with `best`
};

/// Picks (c, gamma) maximizing the eval-split max(TP+TN); ties go to the
/// smaller c, then the smaller gamma.
inline GridSearchResult grid_search(const Matrix& train_x, std::span<const int> train_y, const Matrix& eval_x,
                                    std::span<const int> eval_y, const SvmGrid& grid) {
  if (grid.c.empty() || grid.gamma.empty()) throw ArgumentError("grid_search: empty grid");
  auto cs = grid.c;
  auto gammas = grid.gamma;
  std::sort(cs.begin(), cs.end());
  std::sort(gammas.begin(), gammas.end());
  GridSearchResult result;
  bool first = true;
  for (double c : cs) {
    for (double g : gammas) {
      const SvmHyperParams hp{c, g, grid.tol, grid.max_iterations};
      SvmModel m = train_smo(train_x, train_y, hp);
      const double acc = max_tp_tn(decision_values(m, eval_x), eval_y).accuracy;
      if (first || acc > result.best_accuracy) {
        first = false;
        result.best = hp;
        result.best_accuracy = acc;
        result.model = std::move(m);
      }
    }
  }
  return result;
}

}  // namespace bkj
