#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bkjump/errors.hpp"

namespace bkj {

struct RocPoint {
  double threshold = 0.0;  // score >= threshold is called positive
  double fpr = 0.0;
  double tpr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// Thresholds descending from +inf (the (0,0) point) down to the smallest
/// score (the (1,1) point).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;

  friend bool operator==(const RocCurve&, const RocCurve&) = default;
};

struct OperatingPoint {
  double accuracy = 0.0;   // (TP + TN) / total
  double threshold = 0.0;  // smallest threshold reaching `accuracy`
};

namespace detail {

inline void check_scored_labels(std::span<const double> scores, std::span<const int> labels, const char* who) {
  if (scores.size() != labels.size()) throw ArgumentError(std::string(who) + ": scores/labels length mismatch");
  std::size_t pos = 0, neg = 0;
  for (int l : labels) {
    if (l == 1) ++pos;
    else if (l == 0) ++neg;
    else throw ArgumentError(std::string(who) + ": labels must be 0 or 1");
  }
  if (pos == 0 || neg == 0) throw ArgumentError(std::string(who) + ": both classes must be present");
}

/// Indices sorted by score descending; ties keep input order.
inline std::vector<std::size_t> descending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace detail

inline RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
  detail::check_scored_labels(scores, labels, "roc");
  const auto order = detail::descending_order(scores);
  double pos = 0.0, neg = 0.0;
  for (int l : labels) (l == 1 ? pos : neg) += 1.0;

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  double tp = 0.0, fp = 0.0, area = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    double dtp = 0.0, dfp = 0.0;
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? dtp : dfp) += 1.0;
      ++i;
    }
    // trapezoid in count space, normalized once at the end
    area += dfp * (tp + 0.5 * dtp);
    tp += dtp;
    fp += dfp;
    curve.points.push_back({s, fp / neg, tp / pos});
  }
  curve.auc = area / (pos * neg);
  return curve;
}

/// P(score_pos > score_neg) + 1/2 P(tie) by direct pair counting.
inline double mann_whitney_auc(std::span<const double> scores, std::span<const int> labels) {
  detail::check_scored_labels(scores, labels, "mann_whitney_auc");
  double wins = 0.0, pairs = 0.0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (labels[p] != 1) continue;
    for (std::size_t n = 0; n < scores.size(); ++n) {
      if (labels[n] != 0) continue;
      pairs += 1.0;
      if (scores[p] > scores[n]) wins += 1.0;
      else if (scores[p] == scores[n]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Best accuracy over all thresholds of the rule score >= threshold,
/// including the all-negative rule (threshold +inf).
inline OperatingPoint max_tp_tn(std::span<const double> scores, std::span<const int> labels) {
  detail::check_scored_labels(scores, labels, "max_tp_tn");
  const auto order = detail::descending_order(scores);
  const auto total = static_cast<double>(labels.size());
  double neg = 0.0;
  for (int l : labels) neg += l == 0 ? 1.0 : 0.0;

  // All negative: TN = neg, TP = 0.
  double tp = 0.0, tn = neg;
  OperatingPoint best{tn / total, std::numeric_limits<double>::infinity()};
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]] == 1) tp += 1.0;
      else tn -= 1.0;
      ++i;
    }
    const double acc = (tp + tn) / total;
    if (acc >= best.accuracy) best = {acc, s};
  }
  return best;
}

}  // namespace bkj
