#pragma once

// Comparison experiments: ROC of the three detectors, accuracy versus SNR,
// versus training-set fraction, and versus feature subset, plus a
// single-feature ranking. Each (method, sweep value, seed) cell is
// independent and deterministic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bkjump/config.hpp"
#include "bkjump/features.hpp"
#include "bkjump/kernel_detector.hpp"
#include "bkjump/matrix.hpp"
#include "bkjump/metrics.hpp"
#include "bkjump/mlp.hpp"
#include "bkjump/signal_synth.hpp"
#include "bkjump/stats.hpp"
#include "bkjump/svm.hpp"

namespace bkj {

struct LabeledFeatures {
  Matrix x;
  std::vector<int> y;

  friend bool operator==(const LabeledFeatures&, const LabeledFeatures&) = default;
};

struct FeatureSplits {
  LabeledFeatures train;
  LabeledFeatures eval;
  LabeledFeatures test;
};

inline LabeledFeatures extract_features(const std::vector<LabeledWindow>& windows, const DogKernel& k) {
  LabeledFeatures out;
  out.x = Matrix(0, kNumFeatures);
  for (const auto& w : windows) {
    const FeatureVector f = extract(w.window.view(), k);
    out.x.append_row(f.values);
    out.y.push_back(w.label);
  }
  return out;
}

inline FeatureSplits extract_features(const DatasetSplits& d, const DogKernel& k) {
  return {extract_features(d.train, k), extract_features(d.eval, k), extract_features(d.test, k)};
}

inline LabeledFeatures select_columns(const LabeledFeatures& in, std::span<const std::size_t> cols) {
  LabeledFeatures out;
  out.x = Matrix(in.x.rows(), cols.size());
  for (std::size_t r = 0; r < in.x.rows(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c] >= in.x.cols()) throw ArgumentError("select_columns: column out of range");
      out.x(r, c) = in.x(r, cols[c]);
    }
  out.y = in.y;
  return out;
}

inline FeatureSplits select_columns(const FeatureSplits& in, std::span<const std::size_t> cols) {
  return {select_columns(in.train, cols), select_columns(in.eval, cols), select_columns(in.test, cols)};
}

/// Keeps the first round(fraction * n_c) rows of each class c, in order.
inline LabeledFeatures subsample_balanced(const LabeledFeatures& in, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ArgumentError("subsample_balanced: fraction must be in (0, 1]");
  std::size_t counts[2] = {0, 0};
  for (int l : in.y) ++counts[l];
  const std::size_t keep[2] = {static_cast<std::size_t>(std::llround(fraction * static_cast<double>(counts[0]))),
                               static_cast<std::size_t>(std::llround(fraction * static_cast<double>(counts[1])))};
  std::size_t taken[2] = {0, 0};
  LabeledFeatures out;
  out.x = Matrix(0, in.x.cols());
  for (std::size_t r = 0; r < in.x.rows(); ++r) {
    const int l = in.y[r];
    if (taken[l] < keep[l]) {
      out.x.append_row(in.x.row(r));
      out.y.push_back(l);
      ++taken[l];
    }
  }
  return out;
}

inline std::vector<double> kernel_scores(const std::vector<LabeledWindow>& windows, const DogKernel& k) {
  std::vector<double> s;
  s.reserve(windows.size());
  for (const auto& w : windows) s.push_back(score_window(w.window.view(), k).score);
  return s;
}

inline std::vector<int> labels_of(const std::vector<LabeledWindow>& windows) {
  std::vector<int> y;
  y.reserve(windows.size());
  for (const auto& w : windows) y.push_back(w.label);
  return y;
}

/// Seed of the MLP trainer inside an experiment run with root seed `seed`;
/// `mlp_seed` selects among independent initializations.
inline std::uint64_t mlp_seed_for(std::uint64_t seed, std::uint64_t mlp_seed) {
  return substream_seed(seed, 0x4d4c50, mlp_seed);
}

struct LearnerOutcome {
  SvmHyperParams svm_hp;
  std::vector<double> svm_scores;  // test-split decision values
  std::vector<double> mlp_scores;  // test-split output logits
  double svm_accuracy = 0.0;
  double mlp_accuracy = 0.0;
  double svm_auc = 0.0;
  double mlp_auc = 0.0;
};

inline double svm_test_accuracy(const FeatureSplits& f, const RunConfig& cfg, LearnerOutcome* out = nullptr) {
  const auto gs = grid_search(f.train.x, f.train.y, f.eval.x, f.eval.y, cfg.svm_grid);
  auto scores = decision_values(gs.model, f.test.x);
  const double acc = max_tp_tn(scores, f.test.y).accuracy;
  if (out) {
    out->svm_hp = gs.best;
    out->svm_accuracy = acc;
    out->svm_auc = roc(scores, f.test.y).auc;
    out->svm_scores = std::move(scores);
  }
  return acc;
}

inline double mlp_test_accuracy(const FeatureSplits& f, const RunConfig& cfg, std::uint64_t seed,
                                LearnerOutcome* out = nullptr) {
  TrainConfig tc = cfg.mlp;
  tc.seed = mlp_seed_for(seed, cfg.mlp.seed);
  const MlpClassifier clf = train_mlp_classifier(f.train.x, f.train.y, f.eval.x, f.eval.y, tc);
  auto scores = clf.scores(f.test.x);
  const double acc = max_tp_tn(scores, f.test.y).accuracy;
  if (out) {
    out->mlp_accuracy = acc;
    out->mlp_auc = roc(scores, f.test.y).auc;
    out->mlp_scores = std::move(scores);
  }
  return acc;
}

/// Trains both learners on train (model selection on eval) and scores test.
inline LearnerOutcome run_learners(const FeatureSplits& f, const RunConfig& cfg, std::uint64_t seed) {
  LearnerOutcome out;
  svm_test_accuracy(f, cfg, &out);
  mlp_test_accuracy(f, cfg, seed, &out);
  return out;
}

struct ExperimentRecord {
  std::string method;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;  // test max(TP+TN)
  double auc = 0.0;       // NaN when not computed
  std::string note;
};

struct ExperimentReport {
  std::string id;
  std::string sweep_variable;
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> seeds;
  std::vector<ExperimentRecord> records;
  std::string config_snapshot;

  std::vector<const ExperimentRecord*> select(const std::string& method, double value) const {
    std::vector<const ExperimentRecord*> out;
    for (const auto& r : records)
      if (r.method == method && r.sweep_value == value) out.push_back(&r);
    return out;
  }

  double median_accuracy(const std::string& method, double value) const {
    std::vector<double> v;
    for (const auto* r : select(method, value)) v.push_back(r->accuracy);
    if (v.empty()) throw ArgumentError("ExperimentReport: no records for " + method);
    return stats::median(v);
  }

  double median_auc(const std::string& method, double value) const {
    std::vector<double> v;
    for (const auto* r : select(method, value)) v.push_back(r->auc);
    if (v.empty()) throw ArgumentError("ExperimentReport: no records for " + method);
    return stats::median(v);
  }

  std::vector<std::string> methods() const {
    std::vector<std::string> out;
    for (const auto& r : records)
      if (std::find(out.begin(), out.end(), r.method) == out.end()) out.push_back(r.method);
    return out;
  }
};

inline ExperimentReport make_report(const std::string& id, const std::string& variable,
                                    std::vector<double> values, const RunConfig& cfg) {
  ExperimentReport rep;
  rep.id = id;
  rep.sweep_variable = variable;
  rep.sweep_values = std::move(values);
  rep.seeds = cfg.seeds;
  rep.config_snapshot = to_text(cfg);
  return rep;
}

inline constexpr double kNoAuc = std::numeric_limits<double>::quiet_NaN();

inline DogKernel kernel_for(const RunConfig& cfg) { return make_kernel(cfg.kernel_sigma, cfg.synth.fs); }

struct SeedRocs {
  std::uint64_t seed = 0;
  RocCurve kernel_shielded;
  RocCurve kernel_cluttered;
  RocCurve svm;
  RocCurve mlp;
};

struct RocComparison {
  ExperimentReport report;
  std::vector<SeedRocs> per_seed;
  double median_auc_kernel_shielded = 0.0;
  double median_auc_kernel_cluttered = 0.0;
  double median_auc_svm = 0.0;
  double median_auc_mlp = 0.0;
};

/// Kernel detector on shielded and cluttered test splits; SVM and MLP
/// trained and tested on the cluttered splits. One ROC per method per seed.
inline RocComparison experiment_roc_comparison(const RunConfig& cfg) {
  cfg.validate();
  const DogKernel k = kernel_for(cfg);
  const double snr = cfg.synth.snr_db;
  RocComparison out;
  out.report = make_report("roc_comparison", "snr_db", {snr}, cfg);
  for (std::uint64_t seed : cfg.seeds) {
    SynthesisConfig sc = cfg.synth;
    sc.seed = seed;
    const DatasetSplits shielded = build_dataset(sc, true);
    const DatasetSplits cluttered = build_dataset(sc, false);
    const auto test_y = labels_of(cluttered.test);

    SeedRocs rocs;
    rocs.seed = seed;
    const auto ks = kernel_scores(shielded.test, k);
    const auto kc = kernel_scores(cluttered.test, k);
    rocs.kernel_shielded = roc(ks, labels_of(shielded.test));
    rocs.kernel_cluttered = roc(kc, test_y);

    const FeatureSplits feats = select_columns(extract_features(cluttered, k), cfg.features);
    const LearnerOutcome lo = run_learners(feats, cfg, seed);
    rocs.svm = roc(lo.svm_scores, test_y);
    rocs.mlp = roc(lo.mlp_scores, test_y);

    auto& recs = out.report.records;
    recs.push_back({"kernel-shielded", snr, seed, max_tp_tn(ks, labels_of(shielded.test)).accuracy,
                    rocs.kernel_shielded.auc, ""});
    recs.push_back({"kernel-cluttered", snr, seed, max_tp_tn(kc, test_y).accuracy, rocs.kernel_cluttered.auc, ""});
    recs.push_back({"svm", snr, seed, lo.svm_accuracy, lo.svm_auc,
                    "c=" + format_double(lo.svm_hp.c) + " gamma=" + format_double(lo.svm_hp.gamma)});
    recs.push_back({"mlp", snr, seed, lo.mlp_accuracy, lo.mlp_auc, ""});
    out.per_seed.push_back(std::move(rocs));
  }
  out.median_auc_kernel_shielded = out.report.median_auc("kernel-shielded", snr);
  out.median_auc_kernel_cluttered = out.report.median_auc("kernel-cluttered", snr);
  out.median_auc_svm = out.report.median_auc("svm", snr);
  out.median_auc_mlp = out.report.median_auc("mlp", snr);
  return out;
}

/// Regenerates the cluttered dataset at each SNR and retrains both learners.
inline ExperimentReport experiment_snr_sweep(const RunConfig& cfg) {
  cfg.validate();
  const DogKernel k = kernel_for(cfg);
  auto rep = make_report("snr_sweep", "snr_db", cfg.snr_list, cfg);
  for (double snr : cfg.snr_list) {
    for (std::uint64_t seed : cfg.seeds) {
      SynthesisConfig sc = cfg.synth;
      sc.seed = seed;
      sc.snr_db = snr;
      const FeatureSplits feats = select_columns(extract_features(build_dataset(sc, false), k), cfg.features);
      const LearnerOutcome lo = run_learners(feats, cfg, seed);
      rep.records.push_back({"svm", snr, seed, lo.svm_accuracy, lo.svm_auc, ""});
      rep.records.push_back({"mlp", snr, seed, lo.mlp_accuracy, lo.mlp_auc, ""});
    }
  }
  return rep;
}

inline constexpr double kReferenceSnrDb = 15.0;

/// Balanced subsamples of train and eval at each fraction; test untouched;
/// SNR held at 15 dB.
inline ExperimentReport experiment_fraction_sweep(const RunConfig& cfg) {
  cfg.validate();
  const DogKernel k = kernel_for(cfg);
  auto rep = make_report("fraction_sweep", "fraction", cfg.fractions, cfg);
  for (double fraction : cfg.fractions)
    if (std::llround(fraction * static_cast<double>(kTrainSize / 2)) * 2 < 4)
      throw ArgumentError("experiment_fraction_sweep: fraction leaves fewer than 4 training samples");
  for (std::uint64_t seed : cfg.seeds) {
    SynthesisConfig sc = cfg.synth;
    sc.seed = seed;
    sc.snr_db = kReferenceSnrDb;
    const FeatureSplits full = select_columns(extract_features(build_dataset(sc, false), k), cfg.features);
    for (double fraction : cfg.fractions) {
      const FeatureSplits part{subsample_balanced(full.train, fraction), subsample_balanced(full.eval, fraction),
                               full.test};
      if (part.train.y.size() < 4) throw ArgumentError("experiment_fraction_sweep: fewer than 4 training samples");
      const LearnerOutcome lo = run_learners(part, cfg, seed);
      rep.records.push_back({"svm", fraction, seed, lo.svm_accuracy, lo.svm_auc, ""});
      rep.records.push_back({"mlp", fraction, seed, lo.mlp_accuracy, lo.mlp_auc, ""});
    }
  }
  return rep;
}

inline std::string subset_label(std::span<const std::size_t> cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "+f" : "f") + std::to_string(cols[i] + 1);
  return s;
}

/// Prefix mode: features {f1..fi}, i = 1..9. Exhaustive mode: all 511
/// non-empty subsets, reporting for each size the best test accuracy.
/// SNR held at 15 dB.
inline ExperimentReport experiment_feature_subsets(const RunConfig& cfg, SubsetMode mode) {
  cfg.validate();
  const DogKernel k = kernel_for(cfg);
  std::vector<double> sizes;
  for (std::size_t n = 1; n <= kNumFeatures; ++n) sizes.push_back(static_cast<double>(n));
  auto rep = make_report(mode == SubsetMode::Prefix ? "feature_prefix" : "feature_exhaustive", "num_features",
                         sizes, cfg);
  for (std::uint64_t seed : cfg.seeds) {
    SynthesisConfig sc = cfg.synth;
    sc.seed = seed;
    sc.snr_db = kReferenceSnrDb;
    const FeatureSplits all = extract_features(build_dataset(sc, false), k);
    if (mode == SubsetMode::Prefix) {
      for (std::size_t n = 1; n <= kNumFeatures; ++n) {
        std::vector<std::size_t> cols(n);
        for (std::size_t i = 0; i < n; ++i) cols[i] = i;
        const LearnerOutcome lo = run_learners(select_columns(all, cols), cfg, seed);
        const auto label = subset_label(cols);
        rep.records.push_back({"svm", static_cast<double>(n), seed, lo.svm_accuracy, lo.svm_auc, label});
        rep.records.push_back({"mlp", static_cast<double>(n), seed, lo.mlp_accuracy, lo.mlp_auc, label});
      }
    } else {
      std::vector<double> best_svm(kNumFeatures + 1, -1.0), best_mlp(kNumFeatures + 1, -1.0);
      std::vector<std::string> arg_svm(kNumFeatures + 1), arg_mlp(kNumFeatures + 1);
      for (unsigned mask = 1; mask < (1u << kNumFeatures); ++mask) {
        std::vector<std::size_t> cols;
        for (std::size_t i = 0; i < kNumFeatures; ++i)
          if (mask & (1u << i)) cols.push_back(i);
        const std::size_t n = cols.size();
        const LearnerOutcome lo = run_learners(select_columns(all, cols), cfg, seed);
        if (lo.svm_accuracy > best_svm[n]) {
          best_svm[n] = lo.svm_accuracy;
          arg_svm[n] = subset_label(cols);
        }
        if (lo.mlp_accuracy > best_mlp[n]) {
          best_mlp[n] = lo.mlp_accuracy;
          arg_mlp[n] = subset_label(cols);
        }
      }
      for (std::size_t n = 1; n <= kNumFeatures; ++n) {
        rep.records.push_back({"svm", static_cast<double>(n), seed, best_svm[n], kNoAuc, arg_svm[n]});
        rep.records.push_back({"mlp", static_cast<double>(n), seed, best_mlp[n], kNoAuc, arg_mlp[n]});
      }
    }
  }
  return rep;
}

struct FeatureRanking {
  std::vector<std::size_t> order;       // 1-based feature numbers, best first
  std::vector<double> median_accuracy;  // indexed by feature number - 1
};

/// Single-feature MLP test accuracy on one set of feature splits.
inline std::vector<double> single_feature_accuracies(const FeatureSplits& all, const RunConfig& cfg,
                                                     std::uint64_t seed) {
  std::vector<double> acc;
  for (std::size_t f = 0; f < all.train.x.cols(); ++f) {
    const std::size_t col[1] = {f};
    acc.push_back(mlp_test_accuracy(select_columns(all, col), cfg, seed));
  }
  return acc;
}

/// Descending accuracy, ties broken by feature number.
inline std::vector<std::size_t> order_by_accuracy(std::span<const double> acc) {
  std::vector<std::size_t> order(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return acc[a] > acc[b]; });
  for (auto& o : order) ++o;
  return order;
}

inline FeatureRanking rank_features(const RunConfig& cfg) {
  cfg.validate();
  const DogKernel k = kernel_for(cfg);
  std::vector<std::vector<double>> per_feature(kNumFeatures);
  for (std::uint64_t seed : cfg.seeds) {
    SynthesisConfig sc = cfg.synth;
    sc.seed = seed;
    sc.snr_db = kReferenceSnrDb;
    const auto acc = single_feature_accuracies(extract_features(build_dataset(sc, false), k), cfg, seed);
    for (std::size_t f = 0; f < kNumFeatures; ++f) per_feature[f].push_back(acc[f]);
  }
  FeatureRanking r;
  for (const auto& v : per_feature) r.median_accuracy.push_back(stats::median(v));
  r.order = order_by_accuracy(r.median_accuracy);
  return r;
}

}  // namespace bkj
