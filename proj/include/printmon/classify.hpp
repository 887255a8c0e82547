#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "printmon/config.hpp"
#include "printmon/features.hpp"
#include "printmon/signal.hpp"
#include "printmon/spectral.hpp"

namespace printmon {

/// Five acoustic machine states (Liu et al. taxonomy).
enum class MachineState : std::uint8_t { Normal, SemiBlocked, Blocked, Runout, Loading };
inline constexpr std::array<MachineState, 5> kAllStates = {
    MachineState::Normal, MachineState::SemiBlocked, MachineState::Blocked,
    MachineState::Runout, MachineState::Loading};

/// Extruder motion regimes; Idle covers no-motion windows.
enum class MotionRegime : std::uint8_t { Continuous, ZigZag, PointToPoint, Idle };
inline constexpr std::array<MotionRegime, 4> kAllRegimes = {
    MotionRegime::Continuous, MotionRegime::ZigZag, MotionRegime::PointToPoint,
    MotionRegime::Idle};

const char* to_string(MachineState s);
const char* to_string(MotionRegime m);
MachineState machine_state_from_string(const std::string& s);  // throws BadConfig
MotionRegime motion_regime_from_string(const std::string& s);  // throws BadConfig

struct FeatureInterval {
  double lo = -1e300;
  double hi = 1e300;
  bool contains(double v) const { return v >= lo && v <= hi; }
  void validate() const {
    if (!(lo <= hi)) throw Error(Errc::BadConfig, "interval has lo > hi");
  }
};

struct StateBounds {
  FeatureInterval rms, cf, ki;
};

struct MotionBounds {
  double idle_rms_max = 0.0;
  double zigzag_rms_min = 0.0;
  double zigzag_reversal_min_hz = 0.0;
  double p2p_rms_min = 0.0;
  double p2p_cf_min = 0.0;
};

/// Decision rule for the rule-based classifier. Defaults are a calibration
/// artifact: regenerated by calibrate_thresholds() over the simulator's
/// labeled scenarios (see simulate.hpp) and baked in.
struct ThresholdConfig {
  std::array<StateBounds, 5> state{};  // indexed by MachineState
  MotionBounds motion{};
  int hysteresis_windows = 3;
  std::int64_t motion_align_tol_us = 128000;  // half the default accel hop

  static ThresholdConfig defaults();
  void validate() const;

  /// `key = value` dialect, keys like state.blocked.rms.max.
  static ThresholdConfig from_config(const KeyValueConfig& cfg);
  KeyValueConfig to_config() const;

  StateBounds& bounds(MachineState s) { return state[static_cast<std::size_t>(s)]; }
  const StateBounds& bounds(MachineState s) const {
    return state[static_cast<std::size_t>(s)];
  }
};

/// Severity order for tie-breaking: most severe first.
inline constexpr std::array<MachineState, 5> kSeverityOrder = {
    MachineState::Blocked, MachineState::SemiBlocked, MachineState::Runout,
    MachineState::Loading, MachineState::Normal};

/// Interval classifier over (rms, cf, ki) of an acoustic feature vector.
/// Score is the fraction of the three features inside the winning state's
/// intervals; ties go to the more severe state. Throws DegenerateInput for
/// flagged-degenerate vectors.
std::pair<MachineState, double> classify_state(const FeatureVector& fv,
                                               const ThresholdConfig& cfg);

/// Rule cascade: Idle, then ZigZag (energy + reversal rate), then
/// PointToPoint (burst crest factor), otherwise Continuous.
MotionRegime classify_motion(const FeatureVector& fx, const FeatureVector& fy,
                             double reversal_rate_hz, const ThresholdConfig& cfg);

/// Sign changes per second of the dominant-axis acceleration after DC
/// removal and 5-sample moving-average smoothing.
double reversal_rate(const SignalWindow& wx, const SignalWindow& wy);

enum class EventKind : std::uint8_t { StateChange, MotionChange, Anomaly };
const char* to_string(EventKind k);

struct ConditionEvent {
  std::int64_t time_us = 0;
  std::string channel;
  EventKind kind = EventKind::StateChange;
  std::string from;
  std::string to;
  FeatureVector evidence;
  std::optional<HarmonicReport> harmonics;
};

/// Incremental monitor: feed classified-window inputs in per-channel time
/// order; confirmed events come out ordered by event time (ties by channel).
/// A label change is emitted only once the new label has persisted for
/// hysteresis_windows consecutive windows. Degenerate acoustic windows are
/// reported as Anomaly, never as a state change.
class MonitorEngine {
public:
  explicit MonitorEngine(const ThresholdConfig& cfg);

  void push_acoustic(const FeatureVector& fv);
  void push_motion(const FeatureVector& fx, const FeatureVector& fy,
                   double reversal_rate_hz);
  /// Records a per-window failure as an Anomaly event instead of halting.
  void push_motion_anomaly(const FeatureVector& fx, Errc code);

  /// Events whose order can no longer change; call repeatedly.
  std::vector<ConditionEvent> drain();
  /// Flushes everything still pending; no more pushes after this.
  std::vector<ConditionEvent> finish();

private:
  struct Debouncer {
    std::string confirmed;
    std::string pending;
    int pending_count = 0;
    // Returns an event label pair when a change is confirmed.
    std::optional<std::pair<std::string, std::string>> feed(const std::string& label,
                                                            int hysteresis);
  };

  void release_ready(std::vector<ConditionEvent>& out, bool all);

  ThresholdConfig cfg_;
  Debouncer state_;
  Debouncer motion_;
  std::vector<ConditionEvent> buffer_;
  std::int64_t acoustic_clock_us_ = INT64_MIN;
  std::int64_t motion_clock_us_ = INT64_MIN;
  bool saw_acoustic_ = false;
  bool saw_motion_ = false;
};

struct MonitorInput {
  std::vector<SignalWindow> accel_x;
  std::vector<SignalWindow> accel_y;
  std::vector<SignalWindow> acoustic;
};

/// Batch wrapper around MonitorEngine: windows are assumed preprocessed
/// (acoustic band-passed, accel DC-removed) and per-channel time ordered.
std::vector<ConditionEvent> run_monitor(const MonitorInput& input,
                                        const ThresholdConfig& cfg);

}  // namespace printmon
