#include "printmon/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace printmon {

namespace {

std::vector<SignalWindow> window_stream(std::span<const double> samples,
                                        const ChannelConfig& channel,
                                        std::size_t window_len, std::size_t hop_len,
                                        std::int64_t start_us,
                                        std::uint64_t transient_prefix) {
  Windower w(channel, window_len, hop_len);
  w.reset(start_us);
  w.set_transient_prefix(transient_prefix);
  return w.push_and_emit(samples);
}

}  // namespace

std::vector<SignalWindow> acoustic_windows(std::span<const double> samples,
                                           double rate_hz, const PipelineConfig& cfg,
                                           std::int64_t start_us) {
  const ChannelConfig channel = ChannelConfig::acoustic(rate_hz);
  if (!cfg.bandpass_acoustic) {
    return window_stream(samples, channel, cfg.acoustic_window_len,
                         cfg.acoustic_hop_len, start_us, 0);
  }
  StreamingFilter f = design_band_pass(cfg.acoustic_band, rate_hz);
  const std::vector<double> conditioned = f.filter(samples);
  // Content-aligned timestamps: the linear-phase filter delays every sample
  // by exactly group_delay, so the stream origin moves back by as much.
  const std::int64_t delay_us = static_cast<std::int64_t>(
      std::llround(static_cast<double>(f.group_delay()) * 1e6 / rate_hz));
  return window_stream(conditioned, channel, cfg.acoustic_window_len,
                       cfg.acoustic_hop_len, start_us - delay_us, f.group_delay());
}

std::vector<SignalWindow> accel_windows(std::span<const double> samples,
                                        double rate_hz, const PipelineConfig& cfg,
                                        std::int64_t start_us) {
  // Axis identity does not matter for windowing; X is used as the carrier.
  const ChannelConfig channel = ChannelConfig::accel(Axis::X, rate_hz);
  auto windows = window_stream(samples, channel, cfg.accel_window_len,
                               cfg.accel_hop_len, start_us, 0);
  if (cfg.dc_remove_accel) {
    for (auto& w : windows) w = remove_dc(w);
  }
  return windows;
}

MonitorPipeline::MonitorPipeline(const PipelineConfig& cfg, double accel_rate_hz,
                                 double acoustic_rate_hz)
    : cfg_(cfg),
      accel_x_(ChannelConfig::accel(Axis::X, accel_rate_hz), cfg.accel_window_len,
               cfg.accel_hop_len),
      accel_y_(ChannelConfig::accel(Axis::Y, accel_rate_hz), cfg.accel_window_len,
               cfg.accel_hop_len),
      acoustic_(ChannelConfig::acoustic(acoustic_rate_hz), cfg.acoustic_window_len,
                cfg.acoustic_hop_len),
      engine_(cfg.thresholds) {
  if (cfg_.bandpass_acoustic) {
    filter_.emplace(design_band_pass(cfg_.acoustic_band, acoustic_rate_hz));
    acoustic_.set_transient_prefix(filter_->group_delay());
  }
}

void MonitorPipeline::push_accel(std::int64_t chunk_start_us,
                                 std::span<const double> x,
                                 std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::MisalignedWindows, "accel axis chunks differ in length");
  }
  if (!accel_started_) {
    accel_x_.reset(chunk_start_us);
    accel_y_.reset(chunk_start_us);
    accel_started_ = true;
  }
  auto wx = accel_x_.push_and_emit(x);
  auto wy = accel_y_.push_and_emit(y);
  for (std::size_t i = 0; i < wx.size(); ++i) pending_x_.push_back(std::move(wx[i]));
  // X and Y advance in lockstep, so every Y window pairs with the oldest
  // pending X window.
  std::size_t consumed = 0;
  for (; consumed < wy.size() && consumed < pending_x_.size(); ++consumed) {
    process_accel_pair(pending_x_[consumed], wy[consumed]);
  }
  pending_x_.erase(pending_x_.begin(),
                   pending_x_.begin() + static_cast<std::ptrdiff_t>(consumed));
}

void MonitorPipeline::process_accel_pair(const SignalWindow& raw_x,
                                         const SignalWindow& raw_y) {
  const SignalWindow wx = cfg_.dc_remove_accel ? remove_dc(raw_x) : raw_x;
  const SignalWindow wy = cfg_.dc_remove_accel ? remove_dc(raw_y) : raw_y;
  const FeatureVector fx = extract_features(wx);
  const FeatureVector fy = extract_features(wy);
  try {
    engine_.push_motion(fx, fy, reversal_rate(wx, wy));
  } catch (const Error& e) {
    engine_.push_motion_anomaly(fx, e.code());
  }
}

void MonitorPipeline::push_acoustic(std::int64_t chunk_start_us,
                                    std::span<const double> samples) {
  if (!acoustic_started_) {
    std::int64_t delay_us = 0;
    if (filter_) {
      delay_us = static_cast<std::int64_t>(
          std::llround(static_cast<double>(filter_->group_delay()) * 1e6 /
                       acoustic_.channel().sample_rate_hz));
    }
    acoustic_.reset(chunk_start_us - delay_us);
    acoustic_started_ = true;
  }
  std::vector<double> conditioned;
  std::span<const double> feed = samples;
  if (filter_) {
    conditioned = filter_->filter(samples);
    feed = conditioned;
  }
  for (const auto& w : acoustic_.push_and_emit(feed)) {
    engine_.push_acoustic(extract_features(w));
  }
}

std::vector<ConditionEvent> MonitorPipeline::drain() { return engine_.drain(); }

std::vector<ConditionEvent> MonitorPipeline::finish() { return engine_.finish(); }

namespace {

struct Envelope {
  double lo = 1e300;
  double hi = -1e300;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  /// Widened by half the observed width (a quarter each side); degenerate
  /// envelopes get a small relative pad.
  FeatureInterval widened() const {
    double pad = 0.25 * (hi - lo);
    if (pad <= 0.0) pad = std::max(1e-6, 0.05 * std::abs(hi));
    return FeatureInterval{lo - pad, hi + pad};
  }
};

double geometric_midpoint(double a, double b) {
  const double floor = 1e-9;
  return std::sqrt(std::max(a, floor) * std::max(b, floor));
}

}  // namespace

ThresholdConfig calibrate_thresholds(std::span<const std::uint64_t> seeds,
                                     std::span<const double> snrs_db,
                                     double duration_s,
                                     const PipelineConfig* base_cfg) {
  PipelineConfig cfg = base_cfg ? *base_cfg : PipelineConfig{};

  // --- acoustic state envelopes over the conditioned feature path ---
  struct StateEnvelopes {
    Envelope rms, cf, ki;
  };
  std::array<StateEnvelopes, 5> state_env{};

  const char* state_presets[5] = {"normal", "semi-blocked", "blocked", "runout",
                                  "loading"};
  for (const char* preset : state_presets) {
    for (std::uint64_t seed : seeds) {
      for (double snr : snrs_db) {
        ScenarioSpec spec = ScenarioSpec::preset(preset);
        spec.duration_s = duration_s;
        spec.seed = seed;
        spec.snr_db = snr;
        const LabeledRecording rec = render_scenario(spec);
        auto& env = state_env[static_cast<std::size_t>(spec.nozzle_state)];
        for (const auto& w :
             acoustic_windows(rec.acoustic, rec.acoustic_rate_hz, cfg)) {
          if (w.transient) continue;
          const FeatureVector fv = extract_features(w);
          if (fv.degenerate) continue;
          env.rms.add(fv.rms);
          env.cf.add(fv.cf);
          env.ki.add(fv.ki);
        }
      }
    }
  }

  // --- motion cut points ---
  struct RegimeStats {
    Envelope rms, cf, reversal;
  };
  std::array<RegimeStats, 4> regime{};
  const char* motion_presets[4] = {"continuous-print", "zigzag-print",
                                   "point-to-point-print", "idle"};
  for (const char* preset : motion_presets) {
    for (std::uint64_t seed : seeds) {
      for (double snr : snrs_db) {
        ScenarioSpec spec = ScenarioSpec::preset(preset);
        spec.duration_s = duration_s;
        spec.seed = seed;
        spec.snr_db = snr;
        const LabeledRecording rec = render_scenario(spec);
        const auto wx = accel_windows(rec.accel[0], rec.accel_rate_hz, cfg);
        const auto wy = accel_windows(rec.accel[1], rec.accel_rate_hz, cfg);
        auto& stats = regime[static_cast<std::size_t>(spec.motion.kind)];
        for (std::size_t i = 0; i < std::min(wx.size(), wy.size()); ++i) {
          const FeatureVector fx = extract_features(wx[i]);
          const FeatureVector fy = extract_features(wy[i]);
          stats.rms.add(std::max(fx.rms, fy.rms));
          stats.cf.add(std::max(fx.cf, fy.cf));
          stats.reversal.add(reversal_rate(wx[i], wy[i]));
        }
      }
    }
  }

  ThresholdConfig out;
  for (MachineState s : kAllStates) {
    const auto& env = state_env[static_cast<std::size_t>(s)];
    StateBounds& b = out.bounds(s);
    b.rms = env.rms.widened();
    b.cf = env.cf.widened();
    b.ki = env.ki.widened();
  }

  const auto& idle = regime[static_cast<std::size_t>(MotionRegime::Idle)];
  const auto& cont = regime[static_cast<std::size_t>(MotionRegime::Continuous)];
  const auto& zz = regime[static_cast<std::size_t>(MotionRegime::ZigZag)];
  const auto& p2p = regime[static_cast<std::size_t>(MotionRegime::PointToPoint)];
  out.motion.idle_rms_max = geometric_midpoint(idle.rms.hi, cont.rms.lo);
  out.motion.p2p_rms_min = geometric_midpoint(cont.rms.hi, p2p.rms.lo);
  out.motion.zigzag_rms_min = geometric_midpoint(p2p.rms.hi, zz.rms.lo);
  out.motion.zigzag_reversal_min_hz = std::max(1.0, zz.reversal.lo / 2.0);
  out.motion.p2p_cf_min = std::max(1.0, p2p.cf.lo / 2.0);

  out.hysteresis_windows = cfg.thresholds.hysteresis_windows;
  out.motion_align_tol_us = cfg.thresholds.motion_align_tol_us;
  out.validate();
  return out;
}

}  // namespace printmon
