#pragma once

// Text file formats: window and feature CSVs, model files, decision lists,
// ROC curves, experiment reports and SVG plots. Every writer goes through
// a temporary file and a rename so readers never see half a file.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bkjump/config.hpp"
#include "bkjump/errors.hpp"
#include "bkjump/experiments.hpp"
#include "bkjump/matrix.hpp"
#include "bkjump/metrics.hpp"
#include "bkjump/mlp.hpp"
#include "bkjump/signal_synth.hpp"
#include "bkjump/standardize.hpp"
#include "bkjump/svm.hpp"

namespace bkj {

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open for writing: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw FormatError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw FormatError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Splits text into lines, dropping '\r' and a trailing empty line.
inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    start = end + 1;
  }
  return out;
}

namespace detail {

inline int parse_label(const std::string& s, std::size_t line) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  throw FormatError("label must be 0 or 1, got '" + s + "'", line);
}

inline std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

inline void expect_header(const std::vector<std::string>& lines, const std::string& header, const std::string& what) {
  if (lines.empty()) throw FormatError(what + ": empty file", 1);
  if (lines[0] != header) throw FormatError(what + ": unexpected header", 1);
}

}  // namespace detail

// ---------------------------------------------------------------- windows

inline std::string window_csv_header(std::size_t len) {
  std::string h;
  for (std::size_t i = 0; i < len; ++i) h += 's' + std::to_string(i) + ',';
  return h + "label";
}

inline std::string windows_to_csv(const std::vector<LabeledWindow>& windows, std::size_t len) {
  std::string out = window_csv_header(len) + '\n';
  for (const auto& w : windows) {
    if (w.window.samples.size() != len) throw ArgumentError("windows_to_csv: inconsistent window length");
    for (double v : w.window.samples) {
      out += format_double(v);
      out += ',';
    }
    out += w.label ? "1\n" : "0\n";
  }
  return out;
}

/// Window length is taken from the header.
inline std::vector<LabeledWindow> windows_from_csv(const std::string& text, double fs = 10.0) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw FormatError("window csv: empty file", 1);
  const auto header = detail::csv_fields(lines[0]);
  const std::size_t len = header.size() - 1;
  if (header.size() < 2 || lines[0] != window_csv_header(len)) throw FormatError("window csv: bad header", 1);
  std::vector<LabeledWindow> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    const auto f = detail::csv_fields(lines[i]);
    if (f.size() != len + 1)
      throw FormatError("window csv: expected " + std::to_string(len + 1) + " fields, got " + std::to_string(f.size()),
                        line);
    LabeledWindow w;
    w.window.fs = fs;
    w.window.samples.resize(len);
    for (std::size_t c = 0; c < len; ++c) w.window.samples[c] = parse_double(f[c], line);
    w.label = detail::parse_label(f[len], line);
    out.push_back(std::move(w));
  }
  return out;
}

inline std::filesystem::path split_path(const std::filesystem::path& prefix, const char* split) {
  std::filesystem::path p = prefix;
  p += std::string(".") + split + ".csv";
  return p;
}

inline constexpr const char* kSplitNames[3] = {"train", "eval", "test"};

inline void write_dataset(const std::filesystem::path& prefix, const DatasetSplits& d, std::size_t window_len) {
  atomic_write(split_path(prefix, "train"), windows_to_csv(d.train, window_len));
  atomic_write(split_path(prefix, "eval"), windows_to_csv(d.eval, window_len));
  atomic_write(split_path(prefix, "test"), windows_to_csv(d.test, window_len));
}

inline std::vector<LabeledWindow> read_windows(const std::filesystem::path& path, double fs = 10.0) {
  try {
    return windows_from_csv(read_file(path), fs);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline DatasetSplits read_dataset(const std::filesystem::path& prefix, double fs = 10.0) {
  return {read_windows(split_path(prefix, "train"), fs), read_windows(split_path(prefix, "eval"), fs),
          read_windows(split_path(prefix, "test"), fs)};
}

// --------------------------------------------------------------- features

inline std::string feature_csv_header(std::size_t dims) {
  std::string h;
  for (std::size_t i = 0; i < dims; ++i) h += 'f' + std::to_string(i + 1) + ',';
  return h + "label";
}

inline std::string features_to_csv(const LabeledFeatures& f) {
  std::string out = feature_csv_header(f.x.cols()) + '\n';
  for (std::size_t r = 0; r < f.x.rows(); ++r) {
    for (double v : f.x.row(r)) {
      out += format_double(v);
      out += ',';
    }
    out += f.y[r] ? "1\n" : "0\n";
  }
  return out;
}

inline LabeledFeatures features_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw FormatError("feature csv: empty file", 1);
  const std::size_t dims = detail::csv_fields(lines[0]).size() - 1;
  if (dims == 0 || lines[0] != feature_csv_header(dims)) throw FormatError("feature csv: bad header", 1);
  LabeledFeatures out;
  out.x = Matrix(0, dims);
  std::vector<double> row(dims);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    const auto f = detail::csv_fields(lines[i]);
    if (f.size() != dims + 1)
      throw FormatError("feature csv: expected " + std::to_string(dims + 1) + " fields, got " + std::to_string(f.size()),
                        line);
    for (std::size_t c = 0; c < dims; ++c) row[c] = parse_double(f[c], line);
    out.x.append_row(row);
    out.y.push_back(detail::parse_label(f[dims], line));
  }
  return out;
}

inline void write_feature_splits(const std::filesystem::path& prefix, const FeatureSplits& f) {
  atomic_write(split_path(prefix, "train"), features_to_csv(f.train));
  atomic_write(split_path(prefix, "eval"), features_to_csv(f.eval));
  atomic_write(split_path(prefix, "test"), features_to_csv(f.test));
}

inline LabeledFeatures read_features(const std::filesystem::path& path) {
  try {
    return features_from_csv(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline FeatureSplits read_feature_splits(const std::filesystem::path& prefix) {
  return {read_features(split_path(prefix, "train")), read_features(split_path(prefix, "eval")),
          read_features(split_path(prefix, "test"))};
}

// ----------------------------------------------------------------- models

/// How the model's inputs were produced from raw windows.
struct FeatureSpec {
  std::vector<std::size_t> columns;  // 0-based, in model input order
  double kernel_sigma = 20.0;
  double fs = 10.0;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

struct SavedSvm {
  SvmModel model;
  FeatureSpec spec;
};

struct SavedMlp {
  MlpClassifier model;
  FeatureSpec spec;
};

using SavedModel = std::variant<SavedSvm, SavedMlp>;

inline constexpr const char* kMlpMagic = "BKJ1 MLP";
inline constexpr const char* kSvmMagic = "BKJ1 SVM";
inline constexpr const char* kModelVersion = "1";

namespace detail {

inline void write_spec(std::ostringstream& o, const FeatureSpec& s) {
  o << "features ";
  for (std::size_t i = 0; i < s.columns.size(); ++i) o << (i ? "," : "") << s.columns[i] + 1;
  o << "\nfeature_kernel " << format_double(s.kernel_sigma) << ' ' << format_double(s.fs) << '\n';
}

inline void write_standardizer(std::ostringstream& o, const Standardizer& s) {
  o << "standardizer " << s.dims() << '\n';
  for (std::size_t i = 0; i < s.dims(); ++i)
    o << format_double(s.mean[i]) << ' ' << format_double(s.stddev[i]) << ' ' << (s.degenerate[i] ? 1 : 0) << '\n';
}

/// Sequential reader over whitespace-separated tokens, line by line.
class ModelReader {
 public:
  explicit ModelReader(const std::string& text) : lines_(lines_of(text)) {}

  std::size_t line_no() const { return pos_; }

  std::vector<std::string> next(const char* what) {
    if (pos_ >= lines_.size()) throw FormatError(std::string("model file truncated: expected ") + what, pos_ + 1);
    std::istringstream in(lines_[pos_++]);
    std::vector<std::string> toks;
    for (std::string t; in >> t;) toks.push_back(t);
    return toks;
  }

  /// Line of the form "<key> v1 v2 ..." with exactly `count` values.
  std::vector<std::string> keyed(const char* key, std::size_t count) {
    auto toks = next(key);
    if (toks.empty() || toks[0] != key || toks.size() != count + 1)
      throw FormatError(std::string("model file: expected '") + key + "' line", pos_);
    return {toks.begin() + 1, toks.end()};
  }

  std::vector<double> numbers(std::size_t count, const char* what) {
    auto toks = next(what);
    if (toks.size() != count)
      throw FormatError(std::string("model file: expected ") + std::to_string(count) + " values in " + what, pos_);
    std::vector<double> v;
    for (const auto& t : toks) v.push_back(parse_double(t, pos_));
    return v;
  }

  double number(const char* key) { return parse_double(keyed(key, 1)[0], pos_); }
  std::uint64_t count(const char* key) { return parse_uint(keyed(key, 1)[0], pos_); }

  void finish() {
    keyed("end", 0);
    if (pos_ != lines_.size()) throw FormatError("model file: content after 'end'", pos_ + 1);
  }

 private:
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

inline FeatureSpec read_spec(ModelReader& r) {
  FeatureSpec s;
  const auto cols = r.keyed("features", 1)[0];
  for (const auto& c : split(cols, ',')) {
    const auto v = parse_uint(c, r.line_no());
    if (v == 0) throw FormatError("model file: feature numbers are 1-based", r.line_no());
    s.columns.push_back(v - 1);
  }
  const auto k = r.keyed("feature_kernel", 2);
  s.kernel_sigma = parse_double(k[0], r.line_no());
  s.fs = parse_double(k[1], r.line_no());
  return s;
}

inline Standardizer read_standardizer(ModelReader& r) {
  const std::size_t d = r.count("standardizer");
  Standardizer s;
  for (std::size_t i = 0; i < d; ++i) {
    const auto v = r.numbers(3, "standardizer row");
    s.mean.push_back(v[0]);
    s.stddev.push_back(v[1]);
    if (v[2] != 0.0 && v[2] != 1.0) throw FormatError("model file: degenerate flag must be 0 or 1", r.line_no());
    s.degenerate.push_back(v[2] == 1.0);
  }
  return s;
}

}  // namespace detail

inline std::string model_to_text(const SavedMlp& m) {
  std::ostringstream o;
  o << kMlpMagic << '\n' << kModelVersion << '\n';
  detail::write_spec(o, m.spec);
  const auto& net = m.model.net;
  o << "layers ";
  for (std::size_t i = 0; i < net.layer_sizes.size(); ++i) o << (i ? "," : "") << net.layer_sizes[i];
  o << "\nparams " << net.params.size() << '\n';
  for (double p : net.params) o << format_double(p) << '\n';
  detail::write_standardizer(o, m.model.standardizer);
  o << "end\n";
  return o.str();
}

inline std::string model_to_text(const SavedSvm& m) {
  std::ostringstream o;
  o << kSvmMagic << '\n' << kModelVersion << '\n';
  detail::write_spec(o, m.spec);
  const auto& s = m.model;
  o << "hyperparameters " << format_double(s.hp.c) << ' ' << format_double(s.hp.gamma) << ' '
    << format_double(s.hp.tol) << ' ' << s.hp.max_iterations << '\n';
  o << "bias " << format_double(s.bias) << '\n';
  o << "solver " << (s.converged ? 1 : 0) << ' ' << s.iterations << '\n';
  o << "support_vectors " << s.support_vectors.rows() << ' ' << s.support_vectors.cols() << '\n';
  for (std::size_t r = 0; r < s.support_vectors.rows(); ++r) {
    o << format_double(s.dual_coefs[r]) << ' ' << format_double(s.alphas[r]);
    for (double v : s.support_vectors.row(r)) o << ' ' << format_double(v);
    o << '\n';
  }
  detail::write_standardizer(o, s.standardizer);
  o << "end\n";
  return o.str();
}

namespace detail {

inline SavedMlp read_mlp_body(ModelReader& r) {
  SavedMlp m;
  m.spec = read_spec(r);
  auto& net = m.model.net;
  for (const auto& s : split(r.keyed("layers", 1)[0], ',')) net.layer_sizes.push_back(parse_uint(s, r.line_no()));
  try {
    validate_layer_sizes(net.layer_sizes);
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("model file: ") + e.what(), r.line_no());
  }
  const std::size_t n = r.count("params");
  if (n != parameter_count(net.layer_sizes)) throw FormatError("model file: parameter count mismatch", r.line_no());
  net.params.reserve(n);
  for (std::size_t i = 0; i < n; ++i) net.params.push_back(r.numbers(1, "params")[0]);
  m.model.standardizer = read_standardizer(r);
  if (m.model.standardizer.dims() != net.input_dims() || m.spec.columns.size() != net.input_dims())
    throw FormatError("model file: input dimension mismatch", r.line_no());
  r.finish();
  return m;
}

inline SavedSvm read_svm_body(ModelReader& r) {
  SavedSvm m;
  m.spec = read_spec(r);
  auto& s = m.model;
  const auto hp = r.keyed("hyperparameters", 4);
  s.hp.c = parse_double(hp[0], r.line_no());
  s.hp.gamma = parse_double(hp[1], r.line_no());
  s.hp.tol = parse_double(hp[2], r.line_no());
  s.hp.max_iterations = parse_uint(hp[3], r.line_no());
  s.bias = r.number("bias");
  const auto sol = r.keyed("solver", 2);
  s.converged = parse_uint(sol[0], r.line_no()) != 0;
  s.iterations = parse_uint(sol[1], r.line_no());
  const auto sv = r.keyed("support_vectors", 2);
  const std::size_t rows = parse_uint(sv[0], r.line_no()), cols = parse_uint(sv[1], r.line_no());
  s.support_vectors = Matrix(0, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto v = r.numbers(cols + 2, "support vector row");
    s.dual_coefs.push_back(v[0]);
    s.alphas.push_back(v[1]);
    s.support_vectors.append_row(std::span<const double>(v).subspan(2));
  }
  s.standardizer = read_standardizer(r);
  if (s.standardizer.dims() != cols || m.spec.columns.size() != cols)
    throw FormatError("model file: input dimension mismatch", r.line_no());
  r.finish();
  return m;
}

}  // namespace detail

inline SavedModel model_from_text(const std::string& text) {
  detail::ModelReader r(text);
  const auto magic_line = lines_of(text);
  if (magic_line.empty()) throw FormatError("model file: empty", 1);
  const std::string& magic = magic_line[0];
  if (magic != kMlpMagic && magic != kSvmMagic) throw UnsupportedFormatError("model file: unknown magic '" + magic + "'", 1);
  r.next("magic");
  const auto version = r.next("version");
  if (version.size() != 1 || version[0] != kModelVersion)
    throw UnsupportedFormatError("model file: unsupported version", 2);
  if (magic == kMlpMagic) return detail::read_mlp_body(r);
  return detail::read_svm_body(r);
}

inline void save_model(const std::filesystem::path& path, const SavedMlp& m) { atomic_write(path, model_to_text(m)); }
inline void save_model(const std::filesystem::path& path, const SavedSvm& m) { atomic_write(path, model_to_text(m)); }

inline SavedModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_text(read_file(path));
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// -------------------------------------------------------------- decisions

struct Decision {
  std::size_t index = 0;
  double score = 0.0;
  int decision = 0;
  int label = 0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

inline std::string decisions_to_csv(const std::vector<Decision>& ds) {
  std::string out = "index,score,decision,label\n";
  for (const auto& d : ds)
    out += std::to_string(d.index) + ',' + format_double(d.score) + ',' + std::to_string(d.decision) + ',' +
           std::to_string(d.label) + '\n';
  return out;
}

inline std::vector<Decision> decisions_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  detail::expect_header(lines, "index,score,decision,label", "decisions csv");
  std::vector<Decision> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    const auto f = detail::csv_fields(lines[i]);
    if (f.size() != 4) throw FormatError("decisions csv: expected 4 fields", line);
    out.push_back({static_cast<std::size_t>(parse_uint(f[0], line)), parse_double(f[1], line),
                   detail::parse_label(f[2], line), detail::parse_label(f[3], line)});
  }
  return out;
}

// ------------------------------------------------------------- evaluation

inline std::string roc_to_csv(const RocCurve& c) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : c.points)
    out += format_double(p.threshold) + ',' + format_double(p.fpr) + ',' + format_double(p.tpr) + '\n';
  return out;
}

struct Metrics {
  double auc = 0.0;
  double accuracy = 0.0;   // max(TP+TN) / N
  double threshold = 0.0;  // where it is reached
  double decision_accuracy = 0.0;  // of the stored decisions
  std::size_t count = 0;
};

inline Metrics compute_metrics(const std::vector<Decision>& ds) {
  std::vector<double> s;
  std::vector<int> y;
  std::size_t correct = 0;
  for (const auto& d : ds) {
    s.push_back(d.score);
    y.push_back(d.label);
    correct += d.decision == d.label ? 1 : 0;
  }
  const auto op = max_tp_tn(s, y);
  return {roc(s, y).auc, op.accuracy, op.threshold, static_cast<double>(correct) / static_cast<double>(ds.size()),
          ds.size()};
}

inline std::string metrics_to_csv(const Metrics& m) {
  return "metric,value\nauc," + format_double(m.auc) + "\nmax_tp_tn_accuracy," + format_double(m.accuracy) +
         "\nmax_tp_tn_threshold," + format_double(m.threshold) + "\ndecision_accuracy," +
         format_double(m.decision_accuracy) + "\ncount," + std::to_string(m.count) + '\n';
}

// ---------------------------------------------------------------- reports

inline std::string report_to_csv(const ExperimentReport& rep) {
  std::string out = "experiment,method," + rep.sweep_variable + ",seed,accuracy,auc,note\n";
  for (const auto& r : rep.records) {
    std::string note = r.note;
    for (char& c : note)
      if (c == ',' || c == '\n') c = ';';
    out += rep.id + ',' + r.method + ',' + format_double(r.sweep_value) + ',' + std::to_string(r.seed) + ',' +
           format_double(r.accuracy) + ',' + format_double(r.auc) + ',' + note + '\n';
  }
  return out;
}

/// Median accuracy (and AUC where recorded) per method and sweep value.
inline std::string report_summary_csv(const ExperimentReport& rep) {
  std::string out = "method," + rep.sweep_variable + ",median_accuracy,median_auc\n";
  for (const auto& m : rep.methods())
    for (double v : rep.sweep_values)
      out += m + ',' + format_double(v) + ',' + format_double(rep.median_accuracy(m, v)) + ',' +
             format_double(rep.median_auc(m, v)) + '\n';
  return out;
}

// -------------------------------------------------------------------- svg

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Polyline plot of one or more series on fixed axes.
inline std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                            const std::vector<SvgSeries>& series, double x_min, double x_max, double y_min,
                            double y_max) {
  constexpr double w = 480, h = 360, left = 60, right = 130, top = 30, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  const double xr = x_max > x_min ? x_max - x_min : 1.0, yr = y_max > y_min ? y_max - y_min : 1.0;
  auto px = [&](double x) { return left + (x - x_min) / xr * pw; };
  auto py = [&](double y) { return top + ph - (y - y_min) / yr * ph; };
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" font-size=\"12\" text-anchor=\"middle\">" << x_label
    << "</text>\n";
  o << "<text x=\"15\" y=\"" << top + ph / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 " << top + ph / 2
    << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
  o << "<text x=\"" << left << "\" y=\"" << top + ph + 15 << "\" font-size=\"10\">" << num(x_min) << "</text>\n";
  o << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 15 << "\" font-size=\"10\" text-anchor=\"end\">"
    << num(x_max) << "</text>\n";
  o << "<text x=\"" << left - 5 << "\" y=\"" << top + ph << "\" font-size=\"10\" text-anchor=\"end\">" << num(y_min)
    << "</text>\n";
  o << "<text x=\"" << left - 5 << "\" y=\"" << top + 10 << "\" font-size=\"10\" text-anchor=\"end\">" << num(y_max)
    << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % std::size(colors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      const double y = series[s].y[i];
      if (!std::isfinite(y) || !std::isfinite(series[s].x[i])) continue;
      o << num(px(std::clamp(series[s].x[i], x_min, x_max))) << ',' << num(py(y)) << ' ';
    }
    o << "\"/>\n";
    o << "<text x=\"" << left + pw + 10 << "\" y=\"" << top + 15 + 18 * static_cast<double>(s)
      << "\" font-size=\"12\" fill=\"" << color << "\">" << series[s].name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline SvgSeries roc_series(const std::string& name, const RocCurve& c) {
  SvgSeries s{name, {}, {}};
  for (const auto& p : c.points) {
    s.x.push_back(p.fpr);
    s.y.push_back(p.tpr);
  }
  return s;
}

inline std::string roc_svg(const std::vector<SvgSeries>& curves, const std::string& title = "ROC") {
  return svg_plot(title, "false positive rate", "true positive rate", curves, 0.0, 1.0, 0.0, 1.0);
}

/// Median accuracy per method against the sweep variable.
inline std::string report_svg(const ExperimentReport& rep) {
  std::vector<SvgSeries> series;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : rep.sweep_values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> xs = rep.sweep_values;
  std::sort(xs.begin(), xs.end());
  for (const auto& m : rep.methods()) {
    SvgSeries s{m, {}, {}};
    for (double v : xs) {
      s.x.push_back(v);
      s.y.push_back(rep.median_accuracy(m, v));
    }
    series.push_back(std::move(s));
  }
  return svg_plot(rep.id, rep.sweep_variable, "median max(TP+TN) accuracy", series, lo, hi, 0.5, 1.0);
}

}  // namespace bkj
