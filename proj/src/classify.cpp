#include "printmon/classify.hpp"

#include <algorithm>
#include <cmath>

namespace printmon {

const char* to_string(MachineState s) {
  switch (s) {
    case MachineState::Normal: return "normal";
    case MachineState::SemiBlocked: return "semi_blocked";
    case MachineState::Blocked: return "blocked";
    case MachineState::Runout: return "runout";
    case MachineState::Loading: return "loading";
  }
  return "?";
}

const char* to_string(MotionRegime m) {
  switch (m) {
    case MotionRegime::Continuous: return "continuous";
    case MotionRegime::ZigZag: return "zigzag";
    case MotionRegime::PointToPoint: return "point_to_point";
    case MotionRegime::Idle: return "idle";
  }
  return "?";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::StateChange: return "state_change";
    case EventKind::MotionChange: return "motion_change";
    case EventKind::Anomaly: return "anomaly";
  }
  return "?";
}

MachineState machine_state_from_string(const std::string& s) {
  for (MachineState st : kAllStates) {
    if (s == to_string(st)) return st;
  }
  throw Error(Errc::BadConfig, "unknown machine state '" + s + "'");
}

MotionRegime motion_regime_from_string(const std::string& s) {
  for (MotionRegime m : kAllRegimes) {
    if (s == to_string(m)) return m;
  }
  throw Error(Errc::BadConfig, "unknown motion regime '" + s + "'");
}

ThresholdConfig ThresholdConfig::defaults() {
  // Calibration artifact: values produced by calibrate_thresholds() over the
  // simulator's labeled scenarios (seeds 1..20, SNR inf/20/10 dB, 8 s runs)
  // and baked in. Regenerate with `printmon-calibrate` after changing the
  // simulator's signature amplitudes.
  ThresholdConfig cfg;
  auto set = [&](MachineState s, double rms_lo, double rms_hi, double cf_lo,
                 double cf_hi, double ki_lo, double ki_hi) {
    StateBounds& b = cfg.bounds(s);
    b.rms = {rms_lo, rms_hi};
    b.cf = {cf_lo, cf_hi};
    b.ki = {ki_lo, ki_hi};
  };
  set(MachineState::Normal, 0.13194462321646724, 0.16543294999963593,
      4.0771879611852775, 7.1330744499666352, 1.7905135218254167,
      3.1245044843451391);
  set(MachineState::SemiBlocked, 0.094498281823387376, 0.15405110971392103,
      8.8680014124576587, 17.000899852515467, 2.3453373147959433,
      11.634689196173142);
  set(MachineState::Blocked, 0.02520809559495138, 0.028978247607788537,
      2.7267587173191803, 6.2613983029778932, 1.3845420640877479,
      2.9073245077623602);
  set(MachineState::Runout, -0.012998844777402079, 0.079399999805915347,
      4.3139600167614578, 13.507704890661989, 1.0845974332637196,
      10.953925074364912);
  set(MachineState::Loading, 0.01685794117975721, 0.030821286604522682,
      33.882755383907892, 60.944649692647239, 187.80149987070263,
      752.57201878679439);
  cfg.motion.idle_rms_max = 0.0054160307149277859;
  cfg.motion.zigzag_rms_min = 0.18815206561750702;
  cfg.motion.zigzag_reversal_min_hz = 4.8828125;
  cfg.motion.p2p_rms_min = 0.073009707863255099;
  cfg.motion.p2p_cf_min = 3.6774951875306701;
  return cfg;
}

void ThresholdConfig::validate() const {
  for (const auto& b : state) {
    b.rms.validate();
    b.cf.validate();
    b.ki.validate();
  }
  if (hysteresis_windows < 1) {
    throw Error(Errc::BadConfig, "hysteresis_windows must be >= 1");
  }
  if (motion_align_tol_us < 0) {
    throw Error(Errc::BadConfig, "motion_align_tol_us must be >= 0");
  }
}

ThresholdConfig ThresholdConfig::from_config(const KeyValueConfig& cfg) {
  ThresholdConfig out = ThresholdConfig::defaults();
  for (MachineState s : kAllStates) {
    const std::string base = std::string("state.") + to_string(s) + ".";
    StateBounds& b = out.bounds(s);
    auto load = [&](const char* feat, FeatureInterval& iv) {
      iv.lo = cfg.get_double_or(base + feat + ".min", iv.lo);
      iv.hi = cfg.get_double_or(base + feat + ".max", iv.hi);
    };
    load("rms", b.rms);
    load("cf", b.cf);
    load("ki", b.ki);
  }
  out.motion.idle_rms_max = cfg.get_double_or("motion.idle.rms.max", out.motion.idle_rms_max);
  out.motion.zigzag_rms_min = cfg.get_double_or("motion.zigzag.rms.min", out.motion.zigzag_rms_min);
  out.motion.zigzag_reversal_min_hz =
      cfg.get_double_or("motion.zigzag.reversal.min_hz", out.motion.zigzag_reversal_min_hz);
  out.motion.p2p_rms_min = cfg.get_double_or("motion.p2p.rms.min", out.motion.p2p_rms_min);
  out.motion.p2p_cf_min = cfg.get_double_or("motion.p2p.cf.min", out.motion.p2p_cf_min);
  out.hysteresis_windows =
      static_cast<int>(cfg.get_int_or("monitor.hysteresis_windows", out.hysteresis_windows));
  out.motion_align_tol_us = cfg.get_int_or("monitor.align_tol_us", out.motion_align_tol_us);
  out.validate();
  return out;
}

KeyValueConfig ThresholdConfig::to_config() const {
  KeyValueConfig cfg;
  for (MachineState s : kAllStates) {
    const std::string base = std::string("state.") + to_string(s) + ".";
    const StateBounds& b = bounds(s);
    auto store = [&](const char* feat, const FeatureInterval& iv) {
      cfg.set_double(base + feat + ".min", iv.lo);
      cfg.set_double(base + feat + ".max", iv.hi);
    };
    store("rms", b.rms);
    store("cf", b.cf);
    store("ki", b.ki);
  }
  cfg.set_double("motion.idle.rms.max", motion.idle_rms_max);
  cfg.set_double("motion.zigzag.rms.min", motion.zigzag_rms_min);
  cfg.set_double("motion.zigzag.reversal.min_hz", motion.zigzag_reversal_min_hz);
  cfg.set_double("motion.p2p.rms.min", motion.p2p_rms_min);
  cfg.set_double("motion.p2p.cf.min", motion.p2p_cf_min);
  cfg.set_int("monitor.hysteresis_windows", hysteresis_windows);
  cfg.set_int("monitor.align_tol_us", motion_align_tol_us);
  return cfg;
}

std::pair<MachineState, double> classify_state(const FeatureVector& fv,
                                               const ThresholdConfig& cfg) {
  if (fv.degenerate) {
    throw Error(Errc::DegenerateInput, "degenerate feature vector");
  }
  MachineState best = MachineState::Normal;
  int best_hits = -1;
  // Severity-first iteration: equal scores keep the more severe state.
  for (MachineState s : kSeverityOrder) {
    const StateBounds& b = cfg.bounds(s);
    const int hits = static_cast<int>(b.rms.contains(fv.rms)) +
                     static_cast<int>(b.cf.contains(fv.cf)) +
                     static_cast<int>(b.ki.contains(fv.ki));
    if (hits > best_hits) {
      best_hits = hits;
      best = s;
    }
  }
  return {best, static_cast<double>(best_hits) / 3.0};
}

MotionRegime classify_motion(const FeatureVector& fx, const FeatureVector& fy,
                             double reversal_rate_hz, const ThresholdConfig& cfg) {
  if (std::llabs(fx.start_time_us - fy.start_time_us) > cfg.motion_align_tol_us) {
    throw Error(Errc::MisalignedWindows,
                "accelerometer windows start " +
                    std::to_string(fx.start_time_us - fy.start_time_us) + " us apart");
  }
  const double rms = std::max(fx.rms, fy.rms);
  const double cf = std::max(fx.cf, fy.cf);
  if (rms <= cfg.motion.idle_rms_max) return MotionRegime::Idle;
  if (rms >= cfg.motion.zigzag_rms_min &&
      reversal_rate_hz >= cfg.motion.zigzag_reversal_min_hz) {
    return MotionRegime::ZigZag;
  }
  if (rms >= cfg.motion.p2p_rms_min && cf >= cfg.motion.p2p_cf_min) {
    return MotionRegime::PointToPoint;
  }
  return MotionRegime::Continuous;
}

double reversal_rate(const SignalWindow& wx, const SignalWindow& wy) {
  if (wx.samples.size() != wy.samples.size() ||
      wx.channel.sample_rate_hz != wy.channel.sample_rate_hz) {
    throw Error(Errc::MisalignedWindows, "axis windows differ in length or rate");
  }

  auto window_rms = [](const SignalWindow& w) {
    double s = 0.0;
    for (double v : w.samples) s += v * v;
    return std::sqrt(s / static_cast<double>(w.samples.size()));
  };
  const SignalWindow& dominant = window_rms(wx) >= window_rms(wy) ? wx : wy;

  // DC removal, then causal 5-sample moving average.
  double mu = 0.0;
  for (double v : dominant.samples) mu += v;
  mu /= static_cast<double>(dominant.samples.size());

  const std::size_t n = dominant.samples.size();
  std::vector<double> smooth(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += dominant.samples[i] - mu;
    if (i >= 5) acc -= dominant.samples[i - 5] - mu;
    smooth[i] = acc / static_cast<double>(std::min<std::size_t>(i + 1, 5));
  }

  int changes = 0;
  int last_sign = 0;
  for (double v : smooth) {
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  const double duration_s =
      static_cast<double>(n) / dominant.channel.sample_rate_hz;
  return static_cast<double>(changes) / duration_s;
}

MonitorEngine::MonitorEngine(const ThresholdConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
}

std::optional<std::pair<std::string, std::string>> MonitorEngine::Debouncer::feed(
    const std::string& label, int hysteresis) {
  if (label == confirmed) {
    pending.clear();
    pending_count = 0;
    return std::nullopt;
  }
  if (label == pending) {
    ++pending_count;
  } else {
    pending = label;
    pending_count = 1;
  }
  if (pending_count < hysteresis) return std::nullopt;
  std::string from = confirmed;
  confirmed = pending;
  pending.clear();
  pending_count = 0;
  return std::make_pair(std::move(from), confirmed);
}

void MonitorEngine::push_acoustic(const FeatureVector& fv) {
  saw_acoustic_ = true;
  acoustic_clock_us_ = fv.start_time_us;

  std::string label;
  if (fv.degenerate) {
    label = "degenerate";
  } else {
    label = to_string(classify_state(fv, cfg_).first);
  }
  const auto change = state_.feed(label, cfg_.hysteresis_windows);
  if (change && !change->first.empty()) {
    ConditionEvent ev;
    ev.time_us = fv.start_time_us;
    ev.channel = fv.channel_id;
    ev.kind = change->second == "degenerate" ? EventKind::Anomaly : EventKind::StateChange;
    ev.from = change->first;
    ev.to = change->second;
    ev.evidence = fv;
    buffer_.push_back(std::move(ev));
  }
}

void MonitorEngine::push_motion_anomaly(const FeatureVector& fx, Errc code) {
  saw_motion_ = true;
  motion_clock_us_ = fx.start_time_us;
  ConditionEvent ev;
  ev.time_us = fx.start_time_us;
  ev.channel = "accel";
  ev.kind = EventKind::Anomaly;
  ev.from = motion_.confirmed;
  ev.to = errc_name(code);
  ev.evidence = fx;
  buffer_.push_back(std::move(ev));
}

void MonitorEngine::push_motion(const FeatureVector& fx, const FeatureVector& fy,
                                double reversal_rate_hz) {
  saw_motion_ = true;
  motion_clock_us_ = fx.start_time_us;

  std::string label;
  try {
    label = to_string(classify_motion(fx, fy, reversal_rate_hz, cfg_));
  } catch (const Error& e) {
    push_motion_anomaly(fx, e.code());
    return;
  }
  const auto change = motion_.feed(label, cfg_.hysteresis_windows);
  if (change && !change->first.empty()) {
    ConditionEvent ev;
    ev.time_us = fx.start_time_us;
    ev.channel = "accel";
    ev.kind = EventKind::MotionChange;
    ev.from = change->first;
    ev.to = change->second;
    ev.evidence = fx;
    buffer_.push_back(std::move(ev));
  }
}

void MonitorEngine::release_ready(std::vector<ConditionEvent>& out, bool all) {
  std::int64_t watermark = INT64_MAX;
  if (!all) {
    if (saw_acoustic_) watermark = std::min(watermark, acoustic_clock_us_);
    if (saw_motion_) watermark = std::min(watermark, motion_clock_us_);
    if (watermark == INT64_MAX) return;  // nothing pushed yet
  }

  std::vector<ConditionEvent> ready;
  std::vector<ConditionEvent> rest;
  for (auto& ev : buffer_) {
    if (all || ev.time_us <= watermark) {
      ready.push_back(std::move(ev));
    } else {
      rest.push_back(std::move(ev));
    }
  }
  buffer_ = std::move(rest);

  std::stable_sort(ready.begin(), ready.end(),
                   [](const ConditionEvent& a, const ConditionEvent& b) {
                     if (a.time_us != b.time_us) return a.time_us < b.time_us;
                     return a.channel < b.channel;
                   });
  for (auto& ev : ready) out.push_back(std::move(ev));
}

std::vector<ConditionEvent> MonitorEngine::drain() {
  std::vector<ConditionEvent> out;
  release_ready(out, false);
  return out;
}

std::vector<ConditionEvent> MonitorEngine::finish() {
  std::vector<ConditionEvent> out;
  release_ready(out, true);
  return out;
}

std::vector<ConditionEvent> run_monitor(const MonitorInput& input,
                                        const ThresholdConfig& cfg) {
  if (input.accel_x.size() != input.accel_y.size()) {
    throw Error(Errc::MisalignedWindows, "accel X/Y window counts differ");
  }

  MonitorEngine engine(cfg);
  std::vector<ConditionEvent> events;

  std::size_t ia = 0;  // acoustic index
  std::size_t im = 0;  // motion (accel pair) index
  while (ia < input.acoustic.size() || im < input.accel_x.size()) {
    const bool have_a = ia < input.acoustic.size();
    const bool have_m = im < input.accel_x.size();
    const std::int64_t ta = have_a ? input.acoustic[ia].start_time_us : INT64_MAX;
    const std::int64_t tm = have_m ? input.accel_x[im].start_time_us : INT64_MAX;

    if (tm <= ta) {
      const auto& wx = input.accel_x[im];
      const auto& wy = input.accel_y[im];
      const FeatureVector fx = extract_features(wx);
      const FeatureVector fy = extract_features(wy);
      try {
        engine.push_motion(fx, fy, reversal_rate(wx, wy));
      } catch (const Error& e) {
        engine.push_motion_anomaly(fx, e.code());
      }
      ++im;
    } else {
      engine.push_acoustic(extract_features(input.acoustic[ia]));
      ++ia;
    }
    auto ready = engine.drain();
    events.insert(events.end(), std::make_move_iterator(ready.begin()),
                  std::make_move_iterator(ready.end()));
  }

  auto rest = engine.finish();
  events.insert(events.end(), std::make_move_iterator(rest.begin()),
                std::make_move_iterator(rest.end()));
  return events;
}

}  // namespace printmon
