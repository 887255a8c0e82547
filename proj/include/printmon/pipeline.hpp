#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "printmon/classify.hpp"
#include "printmon/preprocess.hpp"
#include "printmon/signal.hpp"
#include "printmon/simulate.hpp"

namespace printmon {

/// End-to-end monitoring settings: windowing, conditioning, thresholds.
struct PipelineConfig {
  std::size_t accel_window_len = 1024;
  std::size_t accel_hop_len = 512;
  std::size_t acoustic_window_len = 2048;
  std::size_t acoustic_hop_len = 1024;
  /// The acoustic path is band-pass conditioned; the accelerometer path only
  /// has its per-window DC offset removed.
  bool bandpass_acoustic = true;
  BandPassSpec acoustic_band{};
  bool dc_remove_accel = true;
  ThresholdConfig thresholds = ThresholdConfig::defaults();
};

/// Conditioned, windowed view of an acoustic sample stream: band-pass (when
/// enabled), then windowing; warm-up windows carry the transient flag.
std::vector<SignalWindow> acoustic_windows(std::span<const double> samples,
                                           double rate_hz,
                                           const PipelineConfig& cfg,
                                           std::int64_t start_us = 0);

/// Windowed accelerometer axis with per-window DC removal (when enabled).
std::vector<SignalWindow> accel_windows(std::span<const double> samples,
                                        double rate_hz, const PipelineConfig& cfg,
                                        std::int64_t start_us = 0);

/// Streaming ingest -> preprocess -> window -> classify pipeline. Push any
/// chunking of the two sources; confirmed events drain in event-time order,
/// identical for every chunking of the same streams.
class MonitorPipeline {
public:
  MonitorPipeline(const PipelineConfig& cfg, double accel_rate_hz,
                  double acoustic_rate_hz);

  /// First chunk of a channel pins its stream start time.
  void push_accel(std::int64_t chunk_start_us, std::span<const double> x,
                  std::span<const double> y);
  void push_acoustic(std::int64_t chunk_start_us, std::span<const double> samples);

  std::vector<ConditionEvent> drain();
  std::vector<ConditionEvent> finish();

private:
  PipelineConfig cfg_;
  std::optional<StreamingFilter> filter_;
  Windower accel_x_;
  Windower accel_y_;
  Windower acoustic_;
  MonitorEngine engine_;
  std::vector<SignalWindow> pending_x_;  // waiting for the matching Y window
  bool accel_started_ = false;
  bool acoustic_started_ = false;

  void process_accel_pair(const SignalWindow& wx, const SignalWindow& wy);
};

/// Derives the default decision thresholds from the simulator's labeled
/// scenarios: per-state feature envelopes (widened by half their width) over
/// the same conditioned feature path the monitor runs, and per-regime cut
/// points at the geometric midpoints between neighboring regimes.
ThresholdConfig calibrate_thresholds(std::span<const std::uint64_t> seeds,
                                     std::span<const double> snrs_db,
                                     double duration_s = 8.0,
                                     const PipelineConfig* base_cfg = nullptr);

}  // namespace printmon
