#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "printmon/signal.hpp"

namespace printmon {

// ---- WAV (PCM16 mono, canonical 44-byte header) ----

struct WavData {
  ChannelConfig channel;        // acoustic, rate from the header
  std::vector<double> samples;  // PCM codes mapped to [-1, 1) by /32768
};

WavData read_wav(const std::filesystem::path& path);

/// Writes PCM16 mono. Samples are quantized round-half-away-from-zero and
/// clamped to full scale; with clamping disabled, out-of-range samples throw.
void write_wav(const std::filesystem::path& path, const ChannelConfig& config,
               std::span<const double> samples, bool clamp = true);

// ---- Accelerometer CSV (t_us,ax_g,ay_g,az_g) ----

struct AccelCsv {
  std::array<ChannelConfig, 3> channels;  // x, y, z at the inferred rate
  std::array<std::vector<double>, 3> samples;
  std::vector<std::int64_t> timestamps_us;
  double inferred_rate_hz = 0.0;  // from the median timestamp delta
  bool jitter_flag = false;       // any delta off by >10% of the median
};

AccelCsv read_accel_csv(const std::filesystem::path& path);

void write_accel_csv(const std::filesystem::path& path,
                     const std::array<std::vector<double>, 3>& samples,
                     double rate_hz, std::int64_t start_us = 0);

// ---- Labels (JSON lines) ----

struct LabelSpan {
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
  std::string state;
  std::string motion;
};

void write_labels_jsonl(const std::filesystem::path& path,
                        std::span<const LabelSpan> labels);
std::vector<LabelSpan> read_labels_jsonl(const std::filesystem::path& path);

// ---- Line-framed stream protocol (v1) ----
//
// One record per newline-terminated line:
//   V,<t_us>,<ax>,<ay>,<az>   vibration sample (three axes, g)
//   A,<t_us>,<sample>         acoustic sample (normalized)
// Timestamps are non-decreasing per kind; violations are counted and the
// frame is dropped. Malformed lines are counted and skipped, never fatal.

struct VibrationFrame {
  std::int64_t t_us = 0;
  double ax = 0.0, ay = 0.0, az = 0.0;
};

struct AcousticFrame {
  std::int64_t t_us = 0;
  double sample = 0.0;
};

class StreamDecoder {
public:
  struct Counters {
    std::uint64_t malformed_lines = 0;
    std::uint64_t time_regressions = 0;
  };

  /// Feeds a chunk of bytes; partial lines are buffered across calls.
  void push(std::string_view chunk);
  /// Flushes a trailing line that lacks its newline.
  void finish();

  /// Decoded frames accumulated since the last take; order preserved.
  std::vector<VibrationFrame> take_vibration();
  std::vector<AcousticFrame> take_acoustic();

  const Counters& counters() const { return counters_; }

private:
  void decode_line(std::string_view line);

  std::string partial_;
  std::vector<VibrationFrame> vibration_;
  std::vector<AcousticFrame> acoustic_;
  std::int64_t last_v_us_ = INT64_MIN;
  std::int64_t last_a_us_ = INT64_MIN;
  Counters counters_;
};

/// Encodes frames back into protocol text (testing and replay aid).
std::string encode_vibration_line(const VibrationFrame& f);
std::string encode_acoustic_line(const AcousticFrame& f);

}  // namespace printmon
