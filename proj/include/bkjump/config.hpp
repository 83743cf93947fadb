#pragma once

// key = value run configuration. '#' starts a comment; unknown keys and
// out-of-range values are rejected at load.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bkjump/errors.hpp"
#include "bkjump/features.hpp"
#include "bkjump/mlp.hpp"
#include "bkjump/signal_synth.hpp"
#include "bkjump/svm.hpp"

namespace bkj {

enum class SubsetMode { Prefix, Exhaustive };

struct RunConfig {
  SynthesisConfig synth;
  bool shielded = false;
  double kernel_sigma = 20.0;       // samples; 2 * fs by default
  double kernel_threshold = 6.0;    // detect --method kernel operating point
  TrainConfig mlp;
  SvmGrid svm_grid;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<double> snr_list = {15.0, 10.0, 5.0, 0.0};
  std::vector<double> fractions = {1.0, 0.75, 0.5, 0.25};
  std::vector<std::size_t> features = {0, 1, 2, 3, 4, 5, 6, 7, 8};  // 0-based columns
  SubsetMode subset_mode = SubsetMode::Prefix;

  void validate() const {
    synth.validate();
    mlp.validate();
    if (!(kernel_sigma >= 1.0)) throw ArgumentError("RunConfig: kernel_sigma must be >= 1");
    if (static_cast<double>(2 * static_cast<std::size_t>(4.0 * kernel_sigma) + 1) > static_cast<double>(synth.window_len))
      throw ArgumentError("RunConfig: kernel support exceeds window_len");
    if (!(kernel_threshold >= 0.0)) throw ArgumentError("RunConfig: kernel_threshold must be >= 0");
    if (svm_grid.c.empty() || svm_grid.gamma.empty()) throw ArgumentError("RunConfig: svm grid must be non-empty");
    for (double c : svm_grid.c)
      if (!(c > 0.0)) throw ArgumentError("RunConfig: svm_c_grid values must be positive");
    for (double g : svm_grid.gamma)
      if (!(g > 0.0)) throw ArgumentError("RunConfig: svm_gamma_grid values must be positive");
    if (!(svm_grid.tol > 0.0)) throw ArgumentError("RunConfig: svm_tol must be positive");
    if (svm_grid.max_iterations == 0) throw ArgumentError("RunConfig: svm_max_iterations must be positive");
    if (seeds.empty()) throw ArgumentError("RunConfig: seeds must be non-empty");
    if (snr_list.empty()) throw ArgumentError("RunConfig: snr_list must be non-empty");
    for (double f : fractions)
      if (!(f > 0.0 && f <= 1.0)) throw ArgumentError("RunConfig: fractions must lie in (0, 1]");
    if (features.empty()) throw ArgumentError("RunConfig: features must be non-empty");
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i] >= kNumFeatures) throw ArgumentError("RunConfig: features must be in 1..9");
      for (std::size_t j = 0; j < i; ++j)
        if (features[j] == features[i]) throw ArgumentError("RunConfig: duplicate feature index");
    }
  }
};

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view text, std::size_t line = 0) {
  const std::string s(text);
  if (s.empty()) throw FormatError("empty numeric field", line);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  // ERANGE on underflow still yields the correctly rounded subnormal
  if (end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v)))
    throw FormatError("not a number: '" + s + "'", line);
  return v;
}

inline std::uint64_t parse_uint(std::string_view text, std::size_t line = 0) {
  const std::string s(text);
  if (s.empty() || s[0] == '-' || s[0] == '+') throw FormatError("not a nonnegative integer: '" + s + "'", line);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw FormatError("not a nonnegative integer: '" + s + "'", line);
  return v;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace detail {

inline std::vector<double> parse_double_list(const std::string& v, std::size_t line) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_double(item, line));
  return out;
}

inline std::vector<std::uint64_t> parse_uint_list(const std::string& v, std::size_t line) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_uint(item, line));
  return out;
}

inline bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw FormatError("not a boolean: '" + v + "'", line);
}

template <typename T>
std::string join(const std::vector<T>& xs, auto&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(std::string_view(raw).substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw FormatError("expected key = value", line);
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string val = trim(std::string_view(text).substr(eq + 1));
    auto& s = cfg.synth;
    auto& m = cfg.mlp;
    if (key == "fs") s.fs = parse_double(val, line);
    else if (key == "window_len") s.window_len = parse_uint(val, line);
    else if (key == "snr_db") s.snr_db = parse_double(val, line);
    else if (key == "jump_amplitude") s.jump_amplitude = parse_double(val, line);
    else if (key == "white_noise_rms") s.white_noise_rms = parse_double(val, line);
    else if (key == "pink_noise_rms") s.pink_noise_rms = parse_double(val, line);
    else if (key == "pink_exponent") s.pink_exponent = parse_double(val, line);
    else if (key == "clutter_mix") {
      const auto mix = detail::parse_double_list(val, line);
      if (mix.size() != 4) throw FormatError("clutter_mix needs 4 weights (ramp, boxcar, spike, sinusoid)", line);
      for (std::size_t i = 0; i < 4; ++i) s.clutter_mix[i] = mix[i];
    } else if (key == "rise_len_min") s.rise_len_min = parse_uint(val, line);
    else if (key == "rise_len_max") s.rise_len_max = parse_uint(val, line);
    else if (key == "seed") s.seed = parse_uint(val, line);
    else if (key == "shielded") cfg.shielded = detail::parse_bool(val, line);
    else if (key == "kernel_sigma") cfg.kernel_sigma = parse_double(val, line);
    else if (key == "kernel_threshold") cfg.kernel_threshold = parse_double(val, line);
    else if (key == "learning_rate") m.learning_rate = parse_double(val, line);
    else if (key == "momentum") m.momentum = parse_double(val, line);
    else if (key == "lambda") m.lambda = parse_double(val, line);
    else if (key == "max_epochs") m.max_epochs = parse_uint(val, line);
    else if (key == "min_grad") m.min_grad = parse_double(val, line);
    else if (key == "dropout_rate") m.dropout_rate = parse_double(val, line);
    else if (key == "init_std") m.init_std = parse_double(val, line);
    else if (key == "mlp_seed") m.seed = parse_uint(val, line);
    else if (key == "svm_c_grid") cfg.svm_grid.c = detail::parse_double_list(val, line);
    else if (key == "svm_gamma_grid") cfg.svm_grid.gamma = detail::parse_double_list(val, line);
    else if (key == "svm_tol") cfg.svm_grid.tol = parse_double(val, line);
    else if (key == "svm_max_iterations") cfg.svm_grid.max_iterations = parse_uint(val, line);
    else if (key == "seeds") cfg.seeds = detail::parse_uint_list(val, line);
    else if (key == "snr_list") cfg.snr_list = detail::parse_double_list(val, line);
    else if (key == "fractions") cfg.fractions = detail::parse_double_list(val, line);
    else if (key == "features") {
      cfg.features.clear();
      for (auto f : detail::parse_uint_list(val, line)) {
        if (f < 1 || f > kNumFeatures) throw FormatError("features are numbered 1..9", line);
        cfg.features.push_back(static_cast<std::size_t>(f - 1));
      }
    } else if (key == "subset_mode") {
      if (val == "prefix") cfg.subset_mode = SubsetMode::Prefix;
      else if (val == "exhaustive") cfg.subset_mode = SubsetMode::Exhaustive;
      else throw FormatError("subset_mode must be prefix or exhaustive", line);
    } else {
      throw FormatError("unknown key '" + key + "'", line);
    }
  }
  try {
    cfg.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

inline RunConfig parse_run_config(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

inline std::string to_text(const RunConfig& cfg) {
  const auto d = [](double v) { return format_double(v); };
  const auto u = [](std::uint64_t v) { return std::to_string(v); };
  const auto& s = cfg.synth;
  const auto& m = cfg.mlp;
  std::ostringstream o;
  o << "fs = " << d(s.fs) << '\n'
    << "window_len = " << s.window_len << '\n'
    << "snr_db = " << d(s.snr_db) << '\n'
    << "jump_amplitude = " << d(s.jump_amplitude) << '\n'
    << "white_noise_rms = " << d(s.white_noise_rms) << '\n'
    << "pink_noise_rms = " << d(s.pink_noise_rms) << '\n'
    << "pink_exponent = " << d(s.pink_exponent) << '\n'
    << "clutter_mix = " << d(s.clutter_mix[0]) << ',' << d(s.clutter_mix[1]) << ',' << d(s.clutter_mix[2]) << ','
    << d(s.clutter_mix[3]) << '\n'
    << "rise_len_min = " << s.rise_len_min << '\n'
    << "rise_len_max = " << s.rise_len_max << '\n'
    << "seed = " << s.seed << '\n'
    << "shielded = " << (cfg.shielded ? "true" : "false") << '\n'
    << "kernel_sigma = " << d(cfg.kernel_sigma) << '\n'
    << "kernel_threshold = " << d(cfg.kernel_threshold) << '\n'
    << "learning_rate = " << d(m.learning_rate) << '\n'
    << "momentum = " << d(m.momentum) << '\n'
    << "lambda = " << d(m.lambda) << '\n'
    << "max_epochs = " << m.max_epochs << '\n'
    << "min_grad = " << d(m.min_grad) << '\n'
    << "dropout_rate = " << d(m.dropout_rate) << '\n'
    << "init_std = " << d(m.init_std) << '\n'
    << "mlp_seed = " << m.seed << '\n'
    << "svm_c_grid = " << detail::join(cfg.svm_grid.c, d) << '\n'
    << "svm_gamma_grid = " << detail::join(cfg.svm_grid.gamma, d) << '\n'
    << "svm_tol = " << d(cfg.svm_grid.tol) << '\n'
    << "svm_max_iterations = " << cfg.svm_grid.max_iterations << '\n'
    << "seeds = " << detail::join(cfg.seeds, u) << '\n'
    << "snr_list = " << detail::join(cfg.snr_list, d) << '\n'
    << "fractions = " << detail::join(cfg.fractions, d) << '\n'
    << "features = " << detail::join(cfg.features, [](std::size_t f) { return std::to_string(f + 1); }) << '\n'
    << "subset_mode = " << (cfg.subset_mode == SubsetMode::Prefix ? "prefix" : "exhaustive") << '\n';
  return o.str();
}

}  // namespace bkj
