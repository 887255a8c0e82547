#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "printmon/classify.hpp"
#include "printmon/config.hpp"
#include "printmon/ingest.hpp"
#include "printmon/rng.hpp"
#include "printmon/signal.hpp"

namespace printmon {

struct MotorTone {
  double fundamental_hz = 381.0;
  int orders = 3;
  double rolloff_db_per_order = 6.0;
  double amplitude = 0.16;
};

struct MotionSpec {
  MotionRegime kind = MotionRegime::Idle;
  double speed_mm_s = 10.0;        // Continuous (metadata; see Table scenarios)
  double reversal_period_s = 0.2;  // ZigZag
  double move_s = 0.3;             // PointToPoint
  double dwell_s = 0.3;            // PointToPoint
};

struct StateTransition {
  MachineState to = MachineState::Blocked;
  double at_s = 10.0;
};

/// Simulator configuration naming a labeled scenario. Same (spec, seed)
/// always renders bit-identical output.
struct ScenarioSpec {
  std::string name = "custom";
  double duration_s = 8.0;
  std::uint64_t seed = 1;
  std::vector<MotorTone> motor_tones{MotorTone{}};
  MotionSpec motion{};
  MachineState nozzle_state = MachineState::Normal;
  std::optional<StateTransition> transition;
  double snr_db = INFINITY;
  double accel_rate_hz = kDefaultAccelRateHz;
  double acoustic_rate_hz = kDefaultAcousticRateHz;
  /// Print-process metadata carried verbatim into scenario.conf; never
  /// consumed by analysis.
  std::vector<std::pair<std::string, std::string>> metadata;

  void validate() const;  // throws InvalidScenario

  static std::vector<std::string> preset_names();
  static ScenarioSpec preset(const std::string& name);  // throws InvalidScenario
  static ScenarioSpec from_config(const KeyValueConfig& cfg);
  KeyValueConfig to_config() const;
};

/// Rendered channels plus ground-truth labels. Clean/noise powers are kept
/// so realized SNR can be audited exactly.
struct LabeledRecording {
  double accel_rate_hz = 0.0;
  double acoustic_rate_hz = 0.0;
  std::array<std::vector<double>, 3> accel;  // x, y, z
  std::vector<double> acoustic;
  std::vector<LabelSpan> labels;

  double acoustic_clean_power = 0.0;
  double acoustic_noise_power = 0.0;
  std::array<double, 3> accel_clean_power{};
  std::array<double, 3> accel_noise_power{};
};

/// Sum of phase-randomized sinusoids at k*fundamental for k = 1..orders,
/// amplitude decaying rolloff_db per order. Throws AliasedTone when a
/// harmonic reaches Nyquist.
std::vector<double> gen_motor_tone(double fundamental_hz, int orders,
                                   double rolloff_db, double amplitude,
                                   double rate_hz, double duration_s,
                                   std::uint64_t seed);

/// Accelerometer X/Y pattern for one motion regime. ZigZag emits an
/// alternating-sign pulse pair per reversal; Continuous emits sparse
/// low-amplitude corner transients; PointToPoint emits accel/decel pulse
/// pairs separated by dwell silence; Idle is all zeros (pre-noise).
std::pair<std::vector<double>, std::vector<double>> gen_motion_profile(
    const MotionSpec& motion, double rate_hz, double duration_s,
    std::uint64_t seed);

/// Acoustic signature of one machine state (synthetic, tuned for feature
/// separability; amplitudes are not calibrated to real printer acoustics).
std::vector<double> gen_state_signature(MachineState state,
                                        std::span<const MotorTone> tones,
                                        double rate_hz, double duration_s,
                                        std::uint64_t seed);

LabeledRecording render_scenario(const ScenarioSpec& spec);

/// Per-state amplitude constants, exposed for tests.
namespace sim_constants {
inline constexpr double kBroadbandSigma = 0.065;      // Normal extrusion noise
inline constexpr double kBlockedToneScale = 0.2;      // unloaded motor level
inline constexpr double kBlockedFloorRatio = 0.0316;  // -30 dB vs Normal noise
inline constexpr double kLoadingFloorSigma = 0.003;
inline constexpr double kLoadingClickAmp = 0.55;
inline constexpr double kSputterClickAmp = 0.75;
inline constexpr double kRunoutDripAmpSigma = 6.5;  // drip peak over local noise
inline constexpr double kZigZagPulseAmp = 1.0;
inline constexpr double kP2pPulseAmp = 0.8;
inline constexpr double kCornerAmp = 0.22;  // < kZigZagPulseAmp / 4
inline constexpr double kCrossAxisRatio = 0.15;
inline constexpr double kIdleAccelNoiseG = 0.001;     // floor when clean power is 0
inline constexpr double kIdleAcousticNoise = 0.001;
}  // namespace sim_constants

}  // namespace printmon
