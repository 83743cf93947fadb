#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data or
// model format error, 3 numeric failure. Diagnostics go to `err`; results
// go to the files named by --out.

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "bkjump/config.hpp"
#include "bkjump/errors.hpp"
#include "bkjump/experiments.hpp"
#include "bkjump/io.hpp"

namespace bkj {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitFormat = 2, kExitNumeric = 3 };

namespace cli {

inline RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  try {
    return parse_run_config(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline std::filesystem::path with_suffix(const std::string& prefix, const char* suffix) {
  return std::filesystem::path(prefix + suffix);
}

inline const std::vector<LabeledWindow>& pick_split(const DatasetSplits& d, const std::string& split) {
  if (split == "train") return d.train;
  if (split == "eval") return d.eval;
  return d.test;
}

inline void cmd_gen(const RunConfig& cfg, const std::string& out) {
  const DatasetSplits d = build_dataset(cfg.synth, cfg.shielded);
  write_dataset(out, d, cfg.synth.window_len);
}

inline void cmd_extract(const RunConfig& cfg, const std::string& in, const std::string& out) {
  const DatasetSplits d = read_dataset(in, cfg.synth.fs);
  write_feature_splits(out, extract_features(d, kernel_for(cfg)));
}

inline void cmd_train(const RunConfig& cfg, const std::string& method, const std::string& features,
                      const std::string& out) {
  const FeatureSplits all = read_feature_splits(features);
  for (std::size_t c : cfg.features)
    if (c >= all.train.x.cols()) throw ArgumentError("train: feature f" + std::to_string(c + 1) + " not in " + features);
  const FeatureSplits f = select_columns(all, cfg.features);
  const FeatureSpec spec{cfg.features, cfg.kernel_sigma, cfg.synth.fs};
  if (method == "svm") {
    const auto gs = grid_search(f.train.x, f.train.y, f.eval.x, f.eval.y, cfg.svm_grid);
    save_model(out, SavedSvm{gs.model, spec});
  } else {
    TrainConfig tc = cfg.mlp;
    tc.seed = mlp_seed_for(cfg.synth.seed, cfg.mlp.seed);
    save_model(out, SavedMlp{train_mlp_classifier(f.train.x, f.train.y, f.eval.x, f.eval.y, tc), spec});
  }
}

inline Matrix model_inputs(const std::vector<LabeledWindow>& windows, const FeatureSpec& spec) {
  const DogKernel k = make_kernel(spec.kernel_sigma, spec.fs);
  return select_columns(extract_features(windows, k), spec.columns).x;
}

inline std::vector<Decision> detect_with_model(const SavedModel& saved, const std::string& method,
                                               const std::vector<LabeledWindow>& windows) {
  std::vector<Decision> out;
  if (method == "svm") {
    const auto* s = std::get_if<SavedSvm>(&saved);
    if (!s) throw UnsupportedFormatError("detect: --method svm needs an SVM model file");
    const Matrix x = model_inputs(windows, s->spec);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const double v = decision_value(s->model, x.row(i));
      out.push_back({i, v, v >= 0.0 ? 1 : 0, windows[i].label});
    }
  } else {
    const auto* m = std::get_if<SavedMlp>(&saved);
    if (!m) throw UnsupportedFormatError("detect: --method mlp needs an MLP model file");
    const Matrix x = model_inputs(windows, m->spec);
    for (std::size_t i = 0; i < windows.size(); ++i)
      out.push_back({i, m->model.score(x.row(i)), m->model.predict(x.row(i)), windows[i].label});
  }
  return out;
}

inline void cmd_detect(const RunConfig& cfg, const std::string& method, const std::string& model,
                       const std::string& in, const std::string& split, const std::string& out) {
  const DatasetSplits d = read_dataset(in, cfg.synth.fs);
  const auto& windows = pick_split(d, split);
  std::vector<Decision> ds;
  if (method == "kernel") {
    const DogKernel k = kernel_for(cfg);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const double s = score_window(windows[i].window.view(), k).score;
      ds.push_back({i, s, s >= cfg.kernel_threshold ? 1 : 0, windows[i].label});
    }
  } else {
    if (model.empty()) throw ArgumentError("detect: --model is required for --method " + method);
    ds = detect_with_model(load_model(model), method, windows);
  }
  atomic_write(out, decisions_to_csv(ds));
}

inline void cmd_eval(const std::string& decisions, const std::string& out) {
  std::vector<Decision> ds;
  try {
    ds = decisions_from_csv(read_file(decisions));
  } catch (const FormatError& e) {
    throw FormatError(decisions + ": " + e.what());
  }
  std::vector<double> s;
  std::vector<int> y;
  for (const auto& d : ds) {
    s.push_back(d.score);
    y.push_back(d.label);
  }
  const RocCurve curve = roc(s, y);
  atomic_write(with_suffix(out, ".metrics.csv"), metrics_to_csv(compute_metrics(ds)));
  atomic_write(with_suffix(out, ".roc.csv"), roc_to_csv(curve));
  atomic_write(with_suffix(out, ".roc.svg"), roc_svg({roc_series("detector", curve)}));
}

inline void write_report(const ExperimentReport& rep, const std::string& out) {
  atomic_write(with_suffix(out, ".csv"), report_to_csv(rep));
  atomic_write(with_suffix(out, ".summary.csv"), report_summary_csv(rep));
  atomic_write(with_suffix(out, ".svg"), report_svg(rep));
}

inline void cmd_sweep(const RunConfig& cfg, const std::string& kind, const std::string& out) {
  if (kind == "snr") {
    write_report(experiment_snr_sweep(cfg), out);
  } else if (kind == "fraction") {
    write_report(experiment_fraction_sweep(cfg), out);
  } else if (kind == "features") {
    write_report(experiment_feature_subsets(cfg, cfg.subset_mode), out);
  } else {
    const RocComparison rc = experiment_roc_comparison(cfg);
    atomic_write(with_suffix(out, ".csv"), report_to_csv(rc.report));
    atomic_write(with_suffix(out, ".summary.csv"), report_summary_csv(rc.report));
    std::string curves = "seed,method,threshold,fpr,tpr\n";
    for (const auto& r : rc.per_seed) {
      const std::pair<const char*, const RocCurve*> named[] = {{"kernel-shielded", &r.kernel_shielded},
                                                               {"kernel-cluttered", &r.kernel_cluttered},
                                                               {"svm", &r.svm},
                                                               {"mlp", &r.mlp}};
      for (const auto& [name, c] : named)
        for (const auto& p : c->points)
          curves += std::to_string(r.seed) + ',' + name + ',' + format_double(p.threshold) + ',' +
                    format_double(p.fpr) + ',' + format_double(p.tpr) + '\n';
    }
    atomic_write(with_suffix(out, ".roc.csv"), curves);
    const auto& first = rc.per_seed.front();
    atomic_write(with_suffix(out, ".svg"),
                 roc_svg({roc_series("kernel-shielded", first.kernel_shielded),
                          roc_series("kernel-cluttered", first.kernel_cluttered), roc_series("svm", first.svm),
                          roc_series("mlp", first.mlp)},
                         "ROC, seed " + std::to_string(first.seed)));
  }
}

inline void cmd_rank(const RunConfig& cfg, const std::string& out) {
  const FeatureRanking r = rank_features(cfg);
  std::string text = "rank,feature,name,median_accuracy\n";
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    const std::size_t f = r.order[i];
    text += std::to_string(i + 1) + ",f" + std::to_string(f) + ',' + kFeatureNames[f - 1] + ',' +
            format_double(r.median_accuracy[f - 1]) + '\n';
  }
  atomic_write(out, text);
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Detect dc jumps in magnetometer windows and run the comparison experiments."};
  app.name("bkjump");
  app.require_subcommand(1);

  std::string config, in, outp, method, model, features, kind, decisions, split = "test";
  std::optional<std::uint64_t> seed;
  std::optional<double> snr;
  bool shielded = false;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key = value run configuration (defaults when omitted)");
  };

  auto* gen = app.add_subcommand("gen", "Generate train/eval/test window CSVs");
  add_config(gen);
  gen->add_option("--out", outp, "Output prefix; writes PREFIX.{train,eval,test}.csv")->required();
  gen->add_option("--seed", seed, "Override the synthesis seed");
  gen->add_option("--snr", snr, "Override snr_db");
  gen->add_flag("--shielded", shielded, "Sensor noise only, no clutter");

  auto* ext = app.add_subcommand("extract", "Compute the nine features for every window");
  add_config(ext);
  ext->add_option("--in", in, "Dataset prefix")->required();
  ext->add_option("--out", outp, "Feature CSV prefix")->required();

  auto* train = app.add_subcommand("train", "Train an SVM or MLP on feature CSVs");
  add_config(train);
  train->add_option("--method", method, "svm or mlp")->required()->check(CLI::IsMember({"svm", "mlp"}));
  train->add_option("--features", features, "Feature CSV prefix")->required();
  train->add_option("--out", outp, "Model file")->required();

  auto* det = app.add_subcommand("detect", "Score and classify windows");
  add_config(det);
  det->add_option("--method", method, "kernel, svm or mlp")->required()->check(CLI::IsMember({"kernel", "svm", "mlp"}));
  det->add_option("--model", model, "Model file (svm, mlp)");
  det->add_option("--in", in, "Dataset prefix")->required();
  det->add_option("--split", split, "Split to score")->check(CLI::IsMember({"train", "eval", "test"}));
  det->add_option("--out", outp, "Decisions CSV")->required();

  auto* ev = app.add_subcommand("eval", "ROC, AUC and max(TP+TN) of a decisions CSV");
  ev->add_option("--decisions", decisions, "Decisions CSV")->required();
  ev->add_option("--out", outp, "Output prefix; writes PREFIX.{metrics.csv,roc.csv,roc.svg}")->required();

  auto* sw = app.add_subcommand("sweep", "Run a comparison experiment");
  add_config(sw);
  sw->add_option("--kind", kind, "snr, fraction, features or roc")
      ->required()
      ->check(CLI::IsMember({"snr", "fraction", "features", "roc"}));
  sw->add_option("--out", outp, "Output prefix")->required();

  auto* rk = app.add_subcommand("rank", "Order features by single-feature MLP accuracy");
  add_config(rk);
  rk->add_option("--out", outp, "Ranking CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = cli::load_config(config);
    if (seed) cfg.synth.seed = *seed;
    if (snr) cfg.synth.snr_db = *snr;
    if (shielded) cfg.shielded = true;
    cfg.validate();

    if (*gen) cli::cmd_gen(cfg, outp);
    else if (*ext) cli::cmd_extract(cfg, in, outp);
    else if (*train) cli::cmd_train(cfg, method, features, outp);
    else if (*det) cli::cmd_detect(cfg, method, model, in, split, outp);
    else if (*ev) cli::cmd_eval(decisions, outp);
    else if (*sw) cli::cmd_sweep(cfg, kind, outp);
    else if (*rk) cli::cmd_rank(cfg, outp);
    return kExitOk;
  } catch (const FormatError& e) {
    err << "bkjump: format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const NumericError& e) {
    err << "bkjump: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DegenerateInputError& e) {
    err << "bkjump: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ArgumentError& e) {
    err << "bkjump: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "bkjump: " << e.what() << '\n';
    return kExitFormat;
  }
}

}  // namespace bkj
