#include "printmon/signal.hpp"

#include <cmath>
#include <utility>

namespace printmon {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::TooShort: return "TooShort";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::InvalidChannel: return "InvalidChannel";
    case Errc::NyquistViolation: return "NyquistViolation";
    case Errc::InvalidWindowing: return "InvalidWindowing";
    case Errc::InvalidBand: return "InvalidBand";
    case Errc::UnrealizableSpec: return "UnrealizableSpec";
    case Errc::ZeroRms: return "ZeroRMS";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::InconsistentWindows: return "InconsistentWindows";
    case Errc::NoSeries: return "NoSeries";
    case Errc::EmptySpectrum: return "EmptySpectrum";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::MisalignedWindows: return "MisalignedWindows";
    case Errc::AliasedTone: return "AliasedTone";
    case Errc::InvalidScenario: return "InvalidScenario";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::TruncatedData: return "TruncatedData";
    case Errc::BadHeader: return "BadHeader";
    case Errc::NonMonotonicTime: return "NonMonotonicTime";
    case Errc::UnparsableRow: return "UnparsableRow";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::BadConfig: return "BadConfig";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

ChannelConfig ChannelConfig::accel(Axis axis, double rate_hz) {
  ChannelConfig cfg;
  cfg.kind = ChannelKind::Accelerometer;
  cfg.axis = axis;
  cfg.sample_rate_hz = rate_hz;
  cfg.units = Units::G;
  switch (axis) {
    case Axis::X: cfg.channel_id = "accel-x"; break;
    case Axis::Y: cfg.channel_id = "accel-y"; break;
    case Axis::Z: cfg.channel_id = "accel-z"; break;
  }
  return cfg;
}

ChannelConfig ChannelConfig::acoustic(double rate_hz) {
  ChannelConfig cfg;
  cfg.kind = ChannelKind::Acoustic;
  cfg.sample_rate_hz = rate_hz;
  cfg.units = Units::NormalizedPressure;
  cfg.channel_id = "acoustic";
  return cfg;
}

void ChannelConfig::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw Error(Errc::InvalidChannel,
                "sample_rate_hz must be a positive finite value");
  }
  if (channel_id.empty()) {
    throw Error(Errc::InvalidChannel, "channel_id must not be empty");
  }
}

void ChannelConfig::require_nyquist(double f_max_hz) const {
  if (sample_rate_hz < 2.0 * f_max_hz) {
    throw Error(Errc::NyquistViolation,
                "content up to " + std::to_string(f_max_hz) + " Hz needs rate >= " +
                    std::to_string(2.0 * f_max_hz) + " Hz, have " +
                    std::to_string(sample_rate_hz));
  }
}

SignalWindow make_window(ChannelConfig channel, std::int64_t start_time_us,
                         std::vector<double> samples) {
  channel.validate();
  if (samples.size() < 2) {
    throw Error(Errc::TooShort, "window needs at least 2 samples, got " +
                                    std::to_string(samples.size()));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw Error(Errc::NonFiniteSample,
                  "non-finite sample at index " + std::to_string(i),
                  static_cast<std::int64_t>(i));
    }
  }
  SignalWindow w;
  w.channel = std::move(channel);
  w.start_time_us = start_time_us;
  w.samples = std::move(samples);
  return w;
}

Windower::Windower(ChannelConfig channel, std::size_t window_len, std::size_t hop_len)
    : channel_(std::move(channel)), window_len_(window_len), hop_len_(hop_len) {
  channel_.validate();
  if (window_len_ < 2) {
    throw Error(Errc::InvalidWindowing, "window_len must be >= 2");
  }
  if (hop_len_ < 1 || hop_len_ > window_len_) {
    throw Error(Errc::InvalidWindowing, "need 1 <= hop_len <= window_len");
  }
}

void Windower::reset(std::int64_t stream_start_us) {
  stream_start_us_ = stream_start_us;
  next_window_ = 0;
  buffer_begin_ = 0;
  buffer_.clear();
}

std::int64_t Windower::window_start_us(std::uint64_t window_index) const {
  const double offset_us = static_cast<double>(window_index) *
                           static_cast<double>(hop_len_) * 1e6 /
                           channel_.sample_rate_hz;
  return stream_start_us_ + static_cast<std::int64_t>(std::llround(offset_us));
}

std::vector<SignalWindow> Windower::push_and_emit(std::span<const double> samples) {
  buffer_.insert(buffer_.end(), samples.begin(), samples.end());

  std::vector<SignalWindow> out;
  while (true) {
    const std::uint64_t start = next_window_ * hop_len_;
    const std::uint64_t end = start + window_len_;
    if (end > buffer_begin_ + buffer_.size()) break;

    const std::size_t local = static_cast<std::size_t>(start - buffer_begin_);
    std::vector<double> chunk(buffer_.begin() + local,
                              buffer_.begin() + local + window_len_);
    SignalWindow w = make_window(channel_, window_start_us(next_window_),
                                 std::move(chunk));
    w.transient = start < transient_prefix_;
    out.push_back(std::move(w));
    ++next_window_;
  }

  // Drop samples no window can reach anymore.
  const std::uint64_t keep_from = next_window_ * hop_len_;
  if (keep_from > buffer_begin_) {
    const std::size_t drop = static_cast<std::size_t>(keep_from - buffer_begin_);
    if (drop >= buffer_.size()) {
      buffer_begin_ = keep_from;
      buffer_.clear();
    } else {
      buffer_.erase(buffer_.begin(), buffer_.begin() + drop);
      buffer_begin_ = keep_from;
    }
  }
  return out;
}

}  // namespace printmon
