#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "printmon/errors.hpp"

namespace printmon {

inline constexpr double kDefaultAccelRateHz = 2000.0;
inline constexpr double kDefaultAcousticRateHz = 5000.0;

enum class ChannelKind : std::uint8_t { Accelerometer, Acoustic };
enum class Axis : std::uint8_t { X, Y, Z };
enum class Units : std::uint8_t { G, NormalizedPressure };

struct ChannelConfig {
  std::string channel_id;
  ChannelKind kind = ChannelKind::Acoustic;
  Axis axis = Axis::X;  // meaningful only for accelerometer channels
  double sample_rate_hz = kDefaultAcousticRateHz;
  Units units = Units::NormalizedPressure;

  static ChannelConfig accel(Axis axis, double rate_hz = kDefaultAccelRateHz);
  static ChannelConfig acoustic(double rate_hz = kDefaultAcousticRateHz);

  void validate() const;  // throws InvalidChannel
  /// Rejects analyses that would ask for content above Nyquist.
  void require_nyquist(double f_max_hz) const;  // throws NyquistViolation
};

/// A fixed-length contiguous slice of one channel's samples; the unit of all
/// analysis. Immutable once built and safe to share across threads.
struct SignalWindow {
  ChannelConfig channel;
  std::int64_t start_time_us = 0;
  std::vector<double> samples;
  /// True when the window overlaps a filter warm-up prefix (see preprocess).
  bool transient = false;

  std::size_t n() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / channel.sample_rate_hz;
  }
};

/// Validates and builds a window: at least two samples, all finite.
SignalWindow make_window(ChannelConfig channel, std::int64_t start_time_us,
                         std::vector<double> samples);

/// Splits a sample stream into fixed-length windows with a configurable hop.
/// Sequential single-producer state; one instance per channel.
class Windower {
public:
  Windower(ChannelConfig channel, std::size_t window_len, std::size_t hop_len);

  /// Restarts the stream; the next pushed sample lands at `stream_start_us`.
  void reset(std::int64_t stream_start_us);

  /// Buffers new samples and emits every window whose final sample has
  /// arrived. Any chunk size is fine, including empty.
  std::vector<SignalWindow> push_and_emit(std::span<const double> samples);

  /// Samples with absolute index below this count are filter warm-up;
  /// windows overlapping them get the transient flag.
  void set_transient_prefix(std::uint64_t num_samples) { transient_prefix_ = num_samples; }

  std::size_t window_len() const { return window_len_; }
  std::size_t hop_len() const { return hop_len_; }
  const ChannelConfig& channel() const { return channel_; }
  std::int64_t stream_start_us() const { return stream_start_us_; }
  /// Start time of window k: stream_start + round(k*hop*1e6/rate).
  std::int64_t window_start_us(std::uint64_t window_index) const;
  double hop_duration_s() const { return static_cast<double>(hop_len_) / channel_.sample_rate_hz; }

private:
  ChannelConfig channel_;
  std::size_t window_len_;
  std::size_t hop_len_;
  std::int64_t stream_start_us_ = 0;
  std::uint64_t next_window_ = 0;    // index of the next window to emit
  std::uint64_t buffer_begin_ = 0;   // absolute index of buffer_[0]
  std::uint64_t transient_prefix_ = 0;
  std::vector<double> buffer_;
};

}  // namespace printmon
