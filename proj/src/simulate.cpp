#include "printmon/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "printmon/preprocess.hpp"

namespace printmon {

namespace {

using sim_constants::kBlockedFloorRatio;
using sim_constants::kBlockedToneScale;
using sim_constants::kBroadbandSigma;
using sim_constants::kCornerAmp;
using sim_constants::kCrossAxisRatio;
using sim_constants::kIdleAccelNoiseG;
using sim_constants::kIdleAcousticNoise;
using sim_constants::kLoadingClickAmp;
using sim_constants::kLoadingFloorSigma;
using sim_constants::kP2pPulseAmp;
using sim_constants::kSputterClickAmp;
using sim_constants::kZigZagPulseAmp;

constexpr double kTau = 2.0 * std::numbers::pi;

// Substream indices (see rng.hpp for the derivation rule).
constexpr std::uint64_t kSubMotion = 0;
constexpr std::uint64_t kSubAcousticNoise = 2;
constexpr std::uint64_t kSubAccelNoiseX = 3;  // +1 per axis
constexpr std::uint64_t kSubSignatureBase = 10;  // +1 per state segment

double mean_square(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

std::vector<double> white_noise(std::size_t n, Xoshiro256& rng) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.next_gaussian();
  return out;
}

/// White Gaussian noise shaped into the 100-1000 Hz printing band and
/// normalized to an exact RMS target.
std::vector<double> band_noise(std::size_t n, double rate_hz, double sigma,
                               Xoshiro256& rng) {
  std::vector<double> out = white_noise(n, rng);
  BandPassSpec band;
  band.low_cut_hz = 100.0;
  band.high_cut_hz = 1000.0;
  StreamingFilter f = design_band_pass(band, rate_hz);
  out = f.filter(out);
  const double ms = mean_square(out);
  if (ms > 0.0) {
    const double scale = sigma / std::sqrt(ms);
    for (double& v : out) v *= scale;
  }
  return out;
}

void scale_to_rms(std::vector<double>& buf, double sigma) {
  const double ms = mean_square(buf);
  if (ms > 0.0) {
    const double scale = sigma / std::sqrt(ms);
    for (double& v : buf) v *= scale;
  }
}

/// Sum of seeded-phase harmonics added into an existing buffer.
void add_tones(std::vector<double>& buf, std::span<const MotorTone> tones,
               double amp_scale, double rate_hz, Xoshiro256& rng) {
  for (const auto& tone : tones) {
    for (int k = 1; k <= tone.orders; ++k) {
      const double f = tone.fundamental_hz * static_cast<double>(k);
      if (f >= rate_hz / 2.0) {
        throw Error(Errc::AliasedTone,
                    "harmonic " + std::to_string(k) + " at " + std::to_string(f) +
                        " Hz reaches Nyquist " + std::to_string(rate_hz / 2.0));
      }
      const double amp = amp_scale * tone.amplitude *
                         std::pow(10.0, -tone.rolloff_db_per_order *
                                            static_cast<double>(k - 1) / 20.0);
      const double phase = rng.next_unit() * kTau;
      const double w = kTau * f / rate_hz;
      for (std::size_t i = 0; i < buf.size(); ++i) {
        buf[i] += amp * std::sin(w * static_cast<double>(i) + phase);
      }
    }
  }
}

void add_half_sine_pulse(std::vector<double>& buf, std::int64_t start,
                         std::size_t width, double amp) {
  for (std::size_t j = 0; j < width; ++j) {
    const std::int64_t idx = start + static_cast<std::int64_t>(j);
    if (idx < 0 || idx >= static_cast<std::int64_t>(buf.size())) continue;
    buf[static_cast<std::size_t>(idx)] +=
        amp * std::sin(std::numbers::pi * static_cast<double>(j) /
                       static_cast<double>(width - 1));
  }
}

/// Biphasic click: half amplitude, full, -full, -half over four samples.
void add_click(std::vector<double>& buf, std::int64_t start, double amp) {
  static constexpr double shape[4] = {0.5, 1.0, -1.0, -0.5};
  for (int j = 0; j < 4; ++j) {
    const std::int64_t idx = start + j;
    if (idx < 0 || idx >= static_cast<std::int64_t>(buf.size())) continue;
    buf[static_cast<std::size_t>(idx)] += amp * shape[j];
  }
}

std::vector<double> signature_n(MachineState state, std::span<const MotorTone> tones,
                                double rate_hz, std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> out(n, 0.0);

  switch (state) {
    case MachineState::Normal: {
      add_tones(out, tones, 1.0, rate_hz, rng);
      const std::vector<double> noise = band_noise(n, rate_hz, kBroadbandSigma, rng);
      for (std::size_t i = 0; i < n; ++i) out[i] += noise[i];
      break;
    }
    case MachineState::SemiBlocked: {
      // Normal mix interrupted by amplitude-modulation dropouts of 30-70%
      // depth, with a sputter pop at each dropout onset. The pop cadence
      // stays under half an analysis window so every window is marked.
      add_tones(out, tones, 1.0, rate_hz, rng);
      const std::vector<double> noise = band_noise(n, rate_hz, kBroadbandSigma, rng);
      for (std::size_t i = 0; i < n; ++i) out[i] += noise[i];

      std::vector<double> envelope(n, 1.0);
      std::vector<std::size_t> drop_starts;
      double t = rng.next_range(0.03, 0.08);
      while (t < static_cast<double>(n) / rate_hz) {
        const double drop_len = rng.next_range(0.05, 0.10);
        const double depth = rng.next_range(0.3, 0.7);
        const auto i0 = static_cast<std::size_t>(t * rate_hz);
        const auto i1 = std::min(
            n, static_cast<std::size_t>((t + drop_len) * rate_hz));
        for (std::size_t i = i0; i < i1; ++i) envelope[i] = 1.0 - depth;
        if (i0 < n) drop_starts.push_back(i0);
        t += drop_len + rng.next_range(0.05, 0.10);
      }
      for (std::size_t i = 0; i < n; ++i) out[i] *= envelope[i];
      for (std::size_t i0 : drop_starts) {
        add_click(out, static_cast<std::int64_t>(i0), kSputterClickAmp);
      }
      break;
    }
    case MachineState::Blocked: {
      // Motors keep running unloaded; extrusion noise collapses to a floor
      // 30 dB under the Normal broadband level.
      add_tones(out, tones, kBlockedToneScale, rate_hz, rng);
      std::vector<double> floor_noise = white_noise(n, rng);
      scale_to_rms(floor_noise, kBroadbandSigma * kBlockedFloorRatio);
      for (std::size_t i = 0; i < n; ++i) out[i] += floor_noise[i];
      break;
    }
    case MachineState::Runout: {
      // Motion has ceased: no motor tones, broadband decaying exponentially
      // to the Blocked floor across the rendered span. Molten material keeps
      // dripping, so soft envelope-scaled blips ride on the decay; they are
      // what keeps a mid-decay window distinguishable from the other quiet
      // states at matching energy.
      std::vector<double> noise = band_noise(n, rate_hz, kBroadbandSigma, rng);
      const double duration_s = static_cast<double>(n) / rate_hz;
      const double tau = duration_s / std::log(1.0 / kBlockedFloorRatio);
      for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) / rate_hz;
        out[i] = noise[i] * std::exp(-ti / tau);
      }
      const std::size_t drip_width =
          std::max<std::size_t>(6, static_cast<std::size_t>(0.006 * rate_hz));
      double t = rng.next_range(0.05, 0.15);
      while (t < duration_s) {
        const double local = kBroadbandSigma * std::exp(-t / tau);
        add_half_sine_pulse(out, static_cast<std::int64_t>(t * rate_hz), drip_width,
                            sim_constants::kRunoutDripAmpSigma * local);
        t += rng.next_range(0.28, 0.38);
      }
      break;
    }
    case MachineState::Loading: {
      // Near-silence plus filament-insertion clicks; spacing under half an
      // analysis window so every window carries at least one click.
      std::vector<double> floor_noise = white_noise(n, rng);
      scale_to_rms(floor_noise, kLoadingFloorSigma);
      out = std::move(floor_noise);
      double t = rng.next_range(0.05, 0.15);
      while (t < static_cast<double>(n) / rate_hz) {
        add_click(out, static_cast<std::int64_t>(t * rate_hz), kLoadingClickAmp);
        t += rng.next_range(0.25, 0.35);
      }
      break;
    }
  }
  return out;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw Error(Errc::InvalidScenario, "duration_s must be positive");
  }
  if (!(accel_rate_hz > 0.0) || !(acoustic_rate_hz > 0.0)) {
    throw Error(Errc::InvalidScenario, "sample rates must be positive");
  }
  for (const auto& tone : motor_tones) {
    if (tone.amplitude < 0.0) {
      throw Error(Errc::InvalidScenario, "tone amplitudes must be >= 0");
    }
    if (tone.orders < 1) {
      throw Error(Errc::InvalidScenario, "tone orders must be >= 1");
    }
    if (tone.fundamental_hz * tone.orders >= acoustic_rate_hz / 2.0) {
      throw Error(Errc::AliasedTone, "highest harmonic reaches Nyquist");
    }
  }
  if (motion.kind == MotionRegime::ZigZag &&
      !(motion.reversal_period_s > 4.0 / accel_rate_hz)) {
    throw Error(Errc::InvalidScenario, "reversal period must exceed 4 samples");
  }
  if (motion.kind == MotionRegime::PointToPoint &&
      (!(motion.move_s > 0.0) || !(motion.dwell_s >= 0.0))) {
    throw Error(Errc::InvalidScenario, "move/dwell durations must be positive");
  }
  if (transition) {
    if (!(transition->at_s > 0.0) || !(transition->at_s < duration_s)) {
      throw Error(Errc::InvalidScenario, "transition time must fall inside the run");
    }
  }
  if (!(snr_db > 0.0)) {
    // Negative SNR would drown every scenario; not a supported regime.
    throw Error(Errc::InvalidScenario, "snr_db must be positive (or inf)");
  }
}

std::vector<double> gen_motor_tone(double fundamental_hz, int orders,
                                   double rolloff_db, double amplitude,
                                   double rate_hz, double duration_s,
                                   std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(rate_hz * duration_s);
  std::vector<double> out(n, 0.0);
  MotorTone tone{fundamental_hz, orders, rolloff_db, amplitude};
  Xoshiro256 rng(seed);
  add_tones(out, std::span<const MotorTone>(&tone, 1), 1.0, rate_hz, rng);
  return out;
}

std::pair<std::vector<double>, std::vector<double>> gen_motion_profile(
    const MotionSpec& motion, double rate_hz, double duration_s,
    std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(rate_hz * duration_s);
  std::vector<double> x(n, 0.0);
  std::vector<double> y(n, 0.0);
  Xoshiro256 rng(seed);

  switch (motion.kind) {
    case MotionRegime::Idle:
      break;
    case MotionRegime::ZigZag: {
      // One pulse pair per direction reversal: accelerate out, brake back.
      const double period = motion.reversal_period_s;
      const std::size_t width =
          std::max<std::size_t>(4, static_cast<std::size_t>(0.012 * rate_hz));
      for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * period + period / 4.0;
        if (t >= duration_s) break;
        const auto start = static_cast<std::int64_t>(t * rate_hz);
        add_half_sine_pulse(x, start, width, kZigZagPulseAmp);
        add_half_sine_pulse(x, start + static_cast<std::int64_t>(width), width,
                            -kZigZagPulseAmp);
      }
      for (std::size_t i = 0; i < n; ++i) y[i] = kCrossAxisRatio * x[i];
      break;
    }
    case MotionRegime::PointToPoint: {
      // Accel pulse at move start, decel pulse at move end, dwell silence.
      const double cycle = motion.move_s + motion.dwell_s;
      const std::size_t width =
          std::max<std::size_t>(4, static_cast<std::size_t>(0.020 * rate_hz));
      for (std::size_t k = 0;; ++k) {
        const double t0 = static_cast<double>(k) * cycle + motion.dwell_s / 2.0;
        if (t0 >= duration_s) break;
        add_half_sine_pulse(x, static_cast<std::int64_t>(t0 * rate_hz), width,
                            kP2pPulseAmp);
        const double t1 = t0 + motion.move_s;
        if (t1 < duration_s) {
          add_half_sine_pulse(x, static_cast<std::int64_t>(t1 * rate_hz), width,
                              -kP2pPulseAmp);
        }
      }
      for (std::size_t i = 0; i < n; ++i) y[i] = kCrossAxisRatio * x[i];
      break;
    }
    case MotionRegime::Continuous: {
      // Soft corner transients at seeded quasi-periodic times; one full sine
      // cycle each, amplitude well under the zigzag pulses.
      const std::size_t width =
          std::max<std::size_t>(8, static_cast<std::size_t>(0.016 * rate_hz));
      double t = rng.next_range(0.05, 0.15);
      while (t < duration_s) {
        const double sign = rng.next_unit() < 0.5 ? 1.0 : -1.0;
        const auto start = static_cast<std::int64_t>(t * rate_hz);
        for (std::size_t j = 0; j < width; ++j) {
          const std::int64_t idx = start + static_cast<std::int64_t>(j);
          if (idx < 0 || idx >= static_cast<std::int64_t>(n)) continue;
          x[static_cast<std::size_t>(idx)] +=
              sign * kCornerAmp *
              std::sin(kTau * static_cast<double>(j) / static_cast<double>(width));
        }
        t += rng.next_range(0.20, 0.40);
      }
      for (std::size_t i = 0; i < n; ++i) y[i] = kCrossAxisRatio * x[i];
      break;
    }
  }
  return {std::move(x), std::move(y)};
}

std::vector<double> gen_state_signature(MachineState state,
                                        std::span<const MotorTone> tones,
                                        double rate_hz, double duration_s,
                                        std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(rate_hz * duration_s);
  return signature_n(state, tones, rate_hz, n, seed);
}

LabeledRecording render_scenario(const ScenarioSpec& spec) {
  spec.validate();

  LabeledRecording rec;
  rec.accel_rate_hz = spec.accel_rate_hz;
  rec.acoustic_rate_hz = spec.acoustic_rate_hz;

  const std::size_t n_accel =
      static_cast<std::size_t>(spec.accel_rate_hz * spec.duration_s);
  const std::size_t n_acoustic =
      static_cast<std::size_t>(spec.acoustic_rate_hz * spec.duration_s);

  // Accelerometer: motion pattern on X/Y, Z stays quiet.
  auto [ax, ay] = gen_motion_profile(spec.motion, spec.accel_rate_hz,
                                     spec.duration_s,
                                     Xoshiro256::substream(spec.seed, kSubMotion)
                                         .next_u64());
  rec.accel[0] = std::move(ax);
  rec.accel[1] = std::move(ay);
  rec.accel[2].assign(n_accel, 0.0);

  // Acoustic: one signature segment per machine-state span.
  struct Segment {
    MachineState state;
    std::size_t count;
    std::int64_t start_us;
    std::int64_t end_us;
  };
  const std::int64_t duration_us =
      static_cast<std::int64_t>(std::llround(spec.duration_s * 1e6));
  std::vector<Segment> segments;
  if (spec.transition) {
    const auto split =
        static_cast<std::size_t>(spec.acoustic_rate_hz * spec.transition->at_s);
    const std::int64_t split_us =
        static_cast<std::int64_t>(std::llround(spec.transition->at_s * 1e6));
    segments.push_back({spec.nozzle_state, split, 0, split_us});
    segments.push_back({spec.transition->to, n_acoustic - split, split_us, duration_us});
  } else {
    segments.push_back({spec.nozzle_state, n_acoustic, 0, duration_us});
  }

  rec.acoustic.reserve(n_acoustic);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto seg_seed =
        Xoshiro256::substream(spec.seed, kSubSignatureBase + i).next_u64();
    std::vector<double> sig = signature_n(segments[i].state, spec.motor_tones,
                                          spec.acoustic_rate_hz,
                                          segments[i].count, seg_seed);
    rec.acoustic.insert(rec.acoustic.end(), sig.begin(), sig.end());
  }

  // Labels tile the full duration.
  for (const auto& seg : segments) {
    rec.labels.push_back({seg.start_us, seg.end_us, to_string(seg.state),
                          to_string(spec.motion.kind)});
  }

  // Noise injection, exact to the requested SNR by construction.
  const bool printing = spec.motion.kind != MotionRegime::Idle;
  auto inject = [&](std::vector<double>& buf, bool band_shaped, double rate_hz,
                    double floor_sigma, std::uint64_t substream) {
    const double clean_power = mean_square(buf);
    if (std::isinf(spec.snr_db)) return std::pair<double, double>{clean_power, 0.0};

    Xoshiro256 rng = Xoshiro256::substream(spec.seed, substream);
    std::vector<double> noise;
    double sigma;
    if (clean_power > 0.0) {
      sigma = std::sqrt(clean_power / std::pow(10.0, spec.snr_db / 10.0));
    } else {
      sigma = floor_sigma;  // silent channel: fixed sensor floor
    }
    if (band_shaped) {
      noise = band_noise(buf.size(), rate_hz, sigma, rng);
    } else {
      noise = white_noise(buf.size(), rng);
      scale_to_rms(noise, sigma);
    }
    const double noise_power = mean_square(noise);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += noise[i];
    return std::pair<double, double>{clean_power, noise_power};
  };

  auto [ac_clean, ac_noise] =
      inject(rec.acoustic, printing, spec.acoustic_rate_hz, kIdleAcousticNoise,
             kSubAcousticNoise);
  rec.acoustic_clean_power = ac_clean;
  rec.acoustic_noise_power = ac_noise;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    auto [clean, noise] =
        inject(rec.accel[axis], false, spec.accel_rate_hz, kIdleAccelNoiseG,
               kSubAccelNoiseX + axis);
    rec.accel_clean_power[axis] = clean;
    rec.accel_noise_power[axis] = noise;
  }
  return rec;
}

std::vector<std::string> ScenarioSpec::preset_names() {
  return {"normal",        "semi-blocked",  "blocked",
          "runout",        "loading",       "y-motor-381",
          "zigzag-print",  "continuous-print", "point-to-point-print",
          "idle",          "normal-to-blocked"};
}

ScenarioSpec ScenarioSpec::preset(const std::string& name) {
  ScenarioSpec spec;
  spec.name = name;
  spec.metadata = {
      {"extruder_temperature", "270C"},
      {"material_type", "ABS-R"},
      {"layer_thickness", "0.2mm"},
      {"nozzle_diameter", "0.4mm"},
      {"print_type", "2 inch square"},
      {"acoustic_preamp_gain_db", "40"},
  };
  auto condition = [&](const char* text) {
    spec.metadata.emplace_back("condition", text);
  };

  if (name == "normal") {
    spec.nozzle_state = MachineState::Normal;
    spec.motion.kind = MotionRegime::Continuous;
    condition("extrusion speed 10 mm/s, nozzle temperature 210-220 C");
  } else if (name == "semi-blocked") {
    spec.nozzle_state = MachineState::SemiBlocked;
    spec.motion.kind = MotionRegime::Continuous;
    condition("extrusion speed 10 mm/s, nozzle temperature 170-180 C");
  } else if (name == "blocked") {
    spec.nozzle_state = MachineState::Blocked;
    spec.motion.kind = MotionRegime::Continuous;
    condition("extrusion speed 10 mm/s, nozzle temperature 160 C");
  } else if (name == "runout") {
    spec.nozzle_state = MachineState::Runout;
    spec.motion.kind = MotionRegime::Idle;
    condition("material flows out after normal extrusion ends");
  } else if (name == "loading") {
    spec.nozzle_state = MachineState::Loading;
    spec.motion.kind = MotionRegime::Idle;
    condition("filament loading before extrusion");
  } else if (name == "y-motor-381") {
    spec.nozzle_state = MachineState::Blocked;  // motors only, no extrusion
    spec.motion.kind = MotionRegime::Idle;
    spec.motor_tones = {MotorTone{381.0, 3, 6.0, 0.8}};
    condition("Y axis stepper under load at constant speed");
  } else if (name == "zigzag-print") {
    spec.nozzle_state = MachineState::Normal;
    spec.motion.kind = MotionRegime::ZigZag;
  } else if (name == "continuous-print") {
    spec.nozzle_state = MachineState::Normal;
    spec.motion.kind = MotionRegime::Continuous;
  } else if (name == "point-to-point-print") {
    spec.nozzle_state = MachineState::Normal;
    spec.motion.kind = MotionRegime::PointToPoint;
  } else if (name == "idle") {
    spec.nozzle_state = MachineState::Loading;
    spec.motion.kind = MotionRegime::Idle;
  } else if (name == "normal-to-blocked") {
    spec.nozzle_state = MachineState::Normal;
    spec.motion.kind = MotionRegime::Continuous;
    spec.transition = StateTransition{MachineState::Blocked, 10.0};
    spec.duration_s = 20.0;
  } else {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw Error(Errc::InvalidScenario,
                "unknown scenario '" + name + "'; valid: " + names);
  }
  return spec;
}

ScenarioSpec ScenarioSpec::from_config(const KeyValueConfig& cfg) {
  ScenarioSpec spec;
  if (cfg.has("scenario.preset")) {
    spec = preset(cfg.get_string("scenario.preset"));
  }
  spec.name = cfg.get_string_or("scenario.name", spec.name);
  spec.duration_s = cfg.get_double_or("scenario.duration_s", spec.duration_s);
  spec.seed = static_cast<std::uint64_t>(
      cfg.get_int_or("scenario.seed", static_cast<std::int64_t>(spec.seed)));
  spec.snr_db = cfg.get_double_or("scenario.snr_db", spec.snr_db);
  if (cfg.has("scenario.state")) {
    spec.nozzle_state = machine_state_from_string(cfg.get_string("scenario.state"));
  }
  if (cfg.has("scenario.motion")) {
    spec.motion.kind = motion_regime_from_string(cfg.get_string("scenario.motion"));
  }
  spec.motion.speed_mm_s =
      cfg.get_double_or("scenario.motion.speed_mm_s", spec.motion.speed_mm_s);
  spec.motion.reversal_period_s = cfg.get_double_or(
      "scenario.motion.reversal_period_s", spec.motion.reversal_period_s);
  spec.motion.move_s = cfg.get_double_or("scenario.motion.move_s", spec.motion.move_s);
  spec.motion.dwell_s = cfg.get_double_or("scenario.motion.dwell_s", spec.motion.dwell_s);
  spec.accel_rate_hz = cfg.get_double_or("scenario.rate.accel_hz", spec.accel_rate_hz);
  spec.acoustic_rate_hz =
      cfg.get_double_or("scenario.rate.acoustic_hz", spec.acoustic_rate_hz);
  if (cfg.has("scenario.transition.state")) {
    StateTransition tr;
    tr.to = machine_state_from_string(cfg.get_string("scenario.transition.state"));
    tr.at_s = cfg.get_double("scenario.transition.at_s");
    spec.transition = tr;
  }
  if (!cfg.keys_with_prefix("scenario.tone").empty()) {
    spec.motor_tones.clear();
    for (int i = 0;; ++i) {
      const std::string base = "scenario.tone." + std::to_string(i) + ".";
      if (!cfg.has(base + "fundamental_hz")) break;
      MotorTone tone;
      tone.fundamental_hz = cfg.get_double(base + "fundamental_hz");
      tone.orders = static_cast<int>(cfg.get_int_or(base + "orders", tone.orders));
      tone.rolloff_db_per_order =
          cfg.get_double_or(base + "rolloff_db", tone.rolloff_db_per_order);
      tone.amplitude = cfg.get_double_or(base + "amplitude", tone.amplitude);
      spec.motor_tones.push_back(tone);
    }
  }
  spec.validate();
  return spec;
}

KeyValueConfig ScenarioSpec::to_config() const {
  KeyValueConfig cfg;
  cfg.set("scenario.name", name);
  cfg.set_double("scenario.duration_s", duration_s);
  cfg.set_int("scenario.seed", static_cast<std::int64_t>(seed));
  if (std::isinf(snr_db)) {
    cfg.set("scenario.snr_db", "inf");
  } else {
    cfg.set_double("scenario.snr_db", snr_db);
  }
  cfg.set("scenario.state", to_string(nozzle_state));
  cfg.set("scenario.motion", to_string(motion.kind));
  cfg.set_double("scenario.motion.speed_mm_s", motion.speed_mm_s);
  cfg.set_double("scenario.motion.reversal_period_s", motion.reversal_period_s);
  cfg.set_double("scenario.motion.move_s", motion.move_s);
  cfg.set_double("scenario.motion.dwell_s", motion.dwell_s);
  cfg.set_double("scenario.rate.accel_hz", accel_rate_hz);
  cfg.set_double("scenario.rate.acoustic_hz", acoustic_rate_hz);
  if (transition) {
    cfg.set("scenario.transition.state", to_string(transition->to));
    cfg.set_double("scenario.transition.at_s", transition->at_s);
  }
  for (std::size_t i = 0; i < motor_tones.size(); ++i) {
    const std::string base = "scenario.tone." + std::to_string(i) + ".";
    cfg.set_double(base + "fundamental_hz", motor_tones[i].fundamental_hz);
    cfg.set_int(base + "orders", motor_tones[i].orders);
    cfg.set_double(base + "rolloff_db", motor_tones[i].rolloff_db_per_order);
    cfg.set_double(base + "amplitude", motor_tones[i].amplitude);
  }
  int meta_index = 0;
  for (const auto& [key, value] : metadata) {
    // Repeated keys (e.g. condition) stay distinct in the dotted namespace.
    cfg.set("scenario.meta." + std::to_string(meta_index) + "." + key, value);
    ++meta_index;
  }
  return cfg;
}

}  // namespace printmon
