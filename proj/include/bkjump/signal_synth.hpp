#pragma once

// Labeled synthetic single-axis magnetometer windows: sensor noise, dc
// jumps and jump-like clutter at a controlled signal-to-noise ratio.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bkjump/errors.hpp"
#include "bkjump/rng.hpp"
#include "bkjump/stats.hpp"

namespace bkj {

enum class ClutterKind { Ramp = 0, Boxcar = 1, Spike = 2, Sinusoid = 3 };

inline constexpr std::array<ClutterKind, 4> kClutterKinds = {ClutterKind::Ramp, ClutterKind::Boxcar,
                                                            ClutterKind::Spike, ClutterKind::Sinusoid};

inline std::string to_string(ClutterKind k) {
  switch (k) {
    case ClutterKind::Ramp: return "ramp";
    case ClutterKind::Boxcar: return "boxcar";
    case ClutterKind::Spike: return "spike";
    case ClutterKind::Sinusoid: return "sinusoid";
  }
  return "unknown";
}

struct SynthesisConfig {
  double fs = 10.0;               // Hz
  std::size_t window_len = 450;   // samples
  double snr_db = 15.0;
  double jump_amplitude = 6.0;    // nT; nominal scale for clutter events
  double white_noise_rms = 1.0;   // nT
  double pink_noise_rms = 1.0;    // nT
  double pink_exponent = 1.0;
  std::array<double, 4> clutter_mix = {0.10, 0.50, 0.10, 0.30};  // ramp, boxcar, spike, sinusoid
  std::size_t rise_len_min = 1;
  std::size_t rise_len_max = 10;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(fs > 0.0)) throw ArgumentError("SynthesisConfig: fs must be positive");
    if (window_len < 50) throw ArgumentError("SynthesisConfig: window_len must be >= 50");
    double total = 0.0;
    for (double w : clutter_mix) {
      if (!(w >= 0.0)) throw ArgumentError("SynthesisConfig: clutter_mix weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("SynthesisConfig: clutter_mix must sum to 1");
    if (rise_len_min < 1 || rise_len_min > rise_len_max || rise_len_max > window_len / 10)
      throw ArgumentError("SynthesisConfig: rise_len_range must lie within [1, window_len/10]");
    if (!(white_noise_rms >= 0.0) || !(pink_noise_rms >= 0.0) || !(jump_amplitude >= 0.0))
      throw ArgumentError("SynthesisConfig: amplitudes must be nonnegative");
    if (!(pink_exponent >= 0.0)) throw ArgumentError("SynthesisConfig: pink_exponent must be nonnegative");
    if (!std::isfinite(snr_db)) throw ArgumentError("SynthesisConfig: snr_db must be finite");
  }
};

struct TimeWindow {
  std::vector<double> samples;  // nT
  double fs = 10.0;

  std::size_t size() const { return samples.size(); }
  std::span<const double> view() const { return samples; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct LabeledWindow {
  TimeWindow window;
  int label = 0;  // 1 = contains a dc jump

  friend bool operator==(const LabeledWindow&, const LabeledWindow&) = default;
};

inline constexpr std::size_t kTrainSize = 600;
inline constexpr std::size_t kEvalSize = 100;
inline constexpr std::size_t kTestSize = 100;

struct DatasetSplits {
  std::vector<LabeledWindow> train;
  std::vector<LabeledWindow> eval;
  std::vector<LabeledWindow> test;

  friend bool operator==(const DatasetSplits&, const DatasetSplits&) = default;
};

/// One clutter disturbance, fully parameterized so rendering is deterministic.
struct ClutterEvent {
  ClutterKind kind = ClutterKind::Spike;
  double amplitude = 0.0;  // peak level; ramp: total drift over the window
  double slope = 0.0;      // ramp only, per sample
  std::size_t start = 0;
  std::size_t width = 1;
  double cycles = 1.0;     // sinusoid periods per window
  double phase = 0.0;
};

namespace detail {

// RNG substream ids inside one window's seed.
inline constexpr std::uint64_t kBackgroundStream = 1;
inline constexpr std::uint64_t kClutterStream = 2;
inline constexpr std::uint64_t kJumpStream = 3;

// Root substream ids of the three dataset splits.
inline constexpr std::uint64_t kTrainStream = 101;
inline constexpr std::uint64_t kEvalStream = 102;
inline constexpr std::uint64_t kTestStream = 103;

/// 1/f^exponent noise by spectral shaping: Gaussian Fourier coefficients
/// scaled by k^(-exponent/2) over a 2L period, first L samples kept, then
/// scaled to the requested sample RMS.
inline std::vector<double> pink_noise(std::size_t len, double rms_target, double exponent, Rng& rng) {
  std::vector<double> out(len, 0.0);
  if (rms_target == 0.0) return out;
  const std::size_t period = 2 * len;
  const std::size_t bins = len;
  std::vector<double> cos_table(period), sin_table(period);
  for (std::size_t m = 0; m < period; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(period);
    cos_table[m] = std::cos(angle);
    sin_table[m] = std::sin(angle);
  }
  for (std::size_t k = 1; k <= bins; ++k) {
    const double gain = std::pow(static_cast<double>(k), -0.5 * exponent);
    const double a = gain * rng.normal();
    const double b = gain * rng.normal();
    std::size_t phase = 0;
    for (std::size_t n = 0; n < len; ++n) {
      out[n] += a * cos_table[phase] + b * sin_table[phase];
      phase += k;
      if (phase >= period) phase -= period;
    }
  }
  const double r = stats::rms(out);
  if (r > 0.0)
    for (double& v : out) v *= rms_target / r;
  return out;
}

inline std::vector<double> sensor_noise(const SynthesisConfig& cfg, Rng& rng) {
  std::vector<double> out(cfg.window_len, 0.0);
  if (cfg.white_noise_rms > 0.0)
    for (double& v : out) v = cfg.white_noise_rms * rng.normal();
  const auto pink = pink_noise(cfg.window_len, cfg.pink_noise_rms, cfg.pink_exponent, rng);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += pink[n];
  return out;
}

inline double random_sign(Rng& rng) { return rng.uniform() < 0.5 ? -1.0 : 1.0; }

}  // namespace detail

/// Draws the parameters of one clutter event. Every event except the ramp
/// starts and ends inside [L/10, 9L/10], so none leaves a permanent shift;
/// ramps drift by at most half the nominal jump amplitude.
inline ClutterEvent draw_clutter(const SynthesisConfig& cfg, ClutterKind kind, Rng& rng) {
  const std::size_t len = cfg.window_len;
  const std::size_t lo = len / 10;
  const std::size_t hi = len - len / 10;
  const double scale = cfg.jump_amplitude;
  ClutterEvent ev;
  ev.kind = kind;
  switch (kind) {
    case ClutterKind::Ramp:
      ev.amplitude = rng.uniform(-0.5, 0.5) * scale;
      ev.slope = ev.amplitude / static_cast<double>(len - 1);
      ev.start = 0;
      ev.width = len;
      break;
    case ClutterKind::Boxcar: {
      ev.amplitude = detail::random_sign(rng) * rng.uniform(0.5, 1.5) * scale;
      const std::size_t max_width = std::max<std::size_t>(len / 4, 3);
      // at least len/10 wide so each edge reads as a full step
      ev.width = rng.integer(std::min<std::size_t>(std::max<std::size_t>(len / 10, 3), max_width), max_width);
      ev.start = rng.integer(lo, hi - ev.width);
      break;
    }
    case ClutterKind::Spike:
      ev.amplitude = detail::random_sign(rng) * rng.uniform(0.5, 1.5) * scale;
      ev.width = rng.integer(1, 3);
      ev.start = rng.integer(lo, hi - ev.width);
      break;
    case ClutterKind::Sinusoid:
      ev.amplitude = rng.uniform(0.25, 0.75) * scale;
      ev.cycles = rng.uniform(0.5, 4.0);
      ev.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      ev.start = 0;
      ev.width = len;
      break;
  }
  return ev;
}

inline std::vector<double> render_clutter(const ClutterEvent& ev, std::size_t len) {
  std::vector<double> out(len, 0.0);
  switch (ev.kind) {
    case ClutterKind::Ramp: {
      for (std::size_t n = 0; n < len; ++n) out[n] = ev.slope * static_cast<double>(n);
      break;
    }
    case ClutterKind::Boxcar:
    case ClutterKind::Spike:
      for (std::size_t n = ev.start; n < std::min(len, ev.start + ev.width); ++n) out[n] = ev.amplitude;
      break;
    case ClutterKind::Sinusoid:
      for (std::size_t n = 0; n < len; ++n)
        out[n] = ev.amplitude * std::sin(2.0 * std::numbers::pi * ev.cycles * static_cast<double>(n) /
                                             static_cast<double>(len) +
                                         ev.phase);
      break;
  }
  return out;
}

/// Ramp with an explicit slope, samples[n] = slope * n.
inline ClutterEvent ramp_with_slope(double slope, std::size_t len) {
  ClutterEvent ev;
  ev.kind = ClutterKind::Ramp;
  ev.amplitude = slope * static_cast<double>(len - 1);
  ev.slope = slope;
  ev.width = len;
  return ev;
}

inline ClutterKind draw_clutter_kind(const SynthesisConfig& cfg, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < kClutterKinds.size(); ++i) {
    acc += cfg.clutter_mix[i];
    if (u < acc) return kClutterKinds[i];
  }
  for (std::size_t i = kClutterKinds.size(); i-- > 0;)
    if (cfg.clutter_mix[i] > 0.0) return kClutterKinds[i];
  return ClutterKind::Spike;
}

inline TimeWindow gen_clutter(const SynthesisConfig& cfg, ClutterKind kind) {
  cfg.validate();
  Rng rng(substream_seed(cfg.seed, detail::kClutterStream));
  return {render_clutter(draw_clutter(cfg, kind, rng), cfg.window_len), cfg.fs};
}

/// Everything that went into one synthesized window.
struct SynthesisTrace {
  LabeledWindow labeled;
  std::vector<double> disturbance;  // background + clutter, without the jump
  std::vector<ClutterEvent> clutter;
  double jump_amplitude = 0.0;      // signed step height; 0 for label 0
  std::size_t jump_start = 0;
  std::size_t rise_len = 0;
};

namespace detail {

inline std::vector<ClutterEvent> draw_clutter_events(const SynthesisConfig& cfg, Rng& rng) {
  std::vector<ClutterEvent> events;
  const std::size_t count = rng.integer(0, 2);
  for (std::size_t i = 0; i < count; ++i) events.push_back(draw_clutter(cfg, draw_clutter_kind(cfg, rng), rng));
  return events;
}

inline std::vector<double> disturbance(const SynthesisConfig& cfg, bool shielded,
                                       std::vector<ClutterEvent>* events_out) {
  Rng bg_rng(substream_seed(cfg.seed, kBackgroundStream));
  auto out = sensor_noise(cfg, bg_rng);
  if (!shielded) {
    Rng clutter_rng(substream_seed(cfg.seed, kClutterStream));
    const auto events = draw_clutter_events(cfg, clutter_rng);
    for (const auto& ev : events) {
      const auto c = render_clutter(ev, cfg.window_len);
      for (std::size_t n = 0; n < out.size(); ++n) out[n] += c[n];
    }
    if (events_out) *events_out = events;
  }
  return out;
}

}  // namespace detail

/// Sensor noise; when not shielded, plus 0-2 clutter events.
inline TimeWindow gen_background(const SynthesisConfig& cfg, bool shielded) {
  cfg.validate();
  return {detail::disturbance(cfg, shielded, nullptr), cfg.fs};
}

/// Step of height `amp` starting at t0 that reaches full height after
/// `rise_len` samples: zero before t0, linear rise, then a permanent shift.
inline std::vector<double> jump_profile(std::size_t len, std::size_t t0, std::size_t rise_len, double amp) {
  if (rise_len < 1) throw ArgumentError("jump_profile: rise_len must be >= 1");
  if (t0 == 0 || t0 + rise_len >= len) throw ArgumentError("jump_profile: t0 out of range");
  std::vector<double> out(len, 0.0);
  for (std::size_t n = t0; n < len; ++n) {
    const std::size_t done = n - t0 + 1;
    out[n] = done >= rise_len ? amp : amp * static_cast<double>(done) / static_cast<double>(rise_len);
  }
  return out;
}

/// Jump at t0 with a rise length drawn uniformly from the configured range.
inline TimeWindow gen_jump(const SynthesisConfig& cfg, std::size_t t0, double amp) {
  cfg.validate();
  if (t0 == 0 || t0 + cfg.rise_len_max >= cfg.window_len)
    throw ArgumentError("gen_jump: t0 must satisfy 0 < t0 < window_len - max rise length");
  Rng rng(substream_seed(cfg.seed, detail::kJumpStream));
  const std::size_t rise = rng.integer(cfg.rise_len_min, cfg.rise_len_max);
  return {jump_profile(cfg.window_len, t0, rise, amp), cfg.fs};
}

/// 20 log10(amp / RMS(disturbance)).
inline double measure_snr(double jump_amp, const TimeWindow& disturbance) {
  const double r = stats::rms(disturbance.view());
  if (!(r > 0.0)) throw DegenerateInputError("measure_snr: disturbance has zero RMS");
  return 20.0 * std::log10(std::abs(jump_amp) / r);
}

/// Full synthesis with its ingredients exposed. For label 1 the jump height
/// is RMS(disturbance) * 10^(snr_db/20); a disturbance with zero RMS falls
/// back to the nominal jump_amplitude.
inline SynthesisTrace synthesize(const SynthesisConfig& cfg, int label, bool shielded) {
  cfg.validate();
  if (label != 0 && label != 1) throw ArgumentError("synthesize: label must be 0 or 1");
  SynthesisTrace trace;
  trace.disturbance = detail::disturbance(cfg, shielded, &trace.clutter);
  trace.labeled.window = {trace.disturbance, cfg.fs};
  trace.labeled.label = label;
  if (label == 1) {
    Rng rng(substream_seed(cfg.seed, detail::kJumpStream));
    const std::size_t len = cfg.window_len;
    trace.rise_len = rng.integer(cfg.rise_len_min, cfg.rise_len_max);
    trace.jump_start = rng.integer(len / 10, len - len / 10 - trace.rise_len);
    const double r = stats::rms(trace.disturbance);
    const double magnitude = r > 0.0 ? r * std::pow(10.0, cfg.snr_db / 20.0) : cfg.jump_amplitude;
    trace.jump_amplitude = detail::random_sign(rng) * magnitude;
    const auto jump = jump_profile(len, trace.jump_start, trace.rise_len, trace.jump_amplitude);
    auto& s = trace.labeled.window.samples;
    for (std::size_t n = 0; n < len; ++n) s[n] += jump[n];
  }
  return trace;
}

inline LabeledWindow synth_labeled(const SynthesisConfig& cfg, int label, bool shielded) {
  return synthesize(cfg, label, shielded).labeled;
}

/// Seed of window `index` within a split substream.
inline std::uint64_t window_seed(std::uint64_t root, std::uint64_t split_stream, std::size_t index) {
  return substream_seed(root, split_stream, index);
}

namespace detail {

inline std::vector<LabeledWindow> build_split(const SynthesisConfig& cfg, bool shielded, std::uint64_t stream,
                                              std::size_t count) {
  std::vector<LabeledWindow> out;
  out.reserve(count);
  SynthesisConfig window_cfg = cfg;
  for (std::size_t i = 0; i < count; ++i) {
    window_cfg.seed = window_seed(cfg.seed, stream, i);
    out.push_back(synth_labeled(window_cfg, static_cast<int>(i % 2), shielded));
  }
  return out;
}

}  // namespace detail

/// 600/100/100 balanced splits, labels alternating 0,1,0,1,... Each window
/// has its own seed derived from (cfg.seed, split, index), so split sizes
/// never perturb each other.
inline DatasetSplits build_dataset(const SynthesisConfig& cfg, bool shielded) {
  cfg.validate();
  DatasetSplits d;
  d.train = detail::build_split(cfg, shielded, detail::kTrainStream, kTrainSize);
  d.eval = detail::build_split(cfg, shielded, detail::kEvalStream, kEvalSize);
  d.test = detail::build_split(cfg, shielded, detail::kTestStream, kTestSize);
  return d;
}

}  // namespace bkj
