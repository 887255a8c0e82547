#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "printmon/signal.hpp"

namespace printmon {

/// Band-pass description. The realized filter keeps its transition bands
/// inside the nominal band: passband [low+transition, high-transition] within
/// +-1 dB, stopband at or beyond the nominal cutoffs at >= stopband_atten_db.
struct BandPassSpec {
  double low_cut_hz = 1.0;
  double high_cut_hz = 2499.0;
  double transition_width_hz = 50.0;
  double stopband_atten_db = 60.0;
  std::size_t max_taps = 8192;

  void validate(double sample_rate_hz) const;  // throws InvalidBand
};

/// Linear-phase FIR with persistent streaming state. Output length equals
/// input length; the delay line starts primed with zeros, so the first
/// (taps-1)/2 output samples are warm-up transient.
class StreamingFilter {
public:
  explicit StreamingFilter(std::vector<double> taps);

  /// y(n) = sum_k taps(k) * x(n-k), state carried across calls.
  std::vector<double> filter(std::span<const double> x);
  void reset();

  std::size_t tap_count() const { return taps_.size(); }
  std::size_t group_delay() const { return (taps_.size() - 1) / 2; }
  const std::vector<double>& taps() const { return taps_; }

  /// Magnitude of the frequency response at `freq_hz` for a given rate.
  double response_at(double freq_hz, double sample_rate_hz) const;

private:
  std::vector<double> taps_;
  std::vector<double> delay_;  // delay_[i] = x(n-1-i) from previous calls
};

// Kaiser design helpers.
double bessel_i0(double x);
double kaiser_beta(double stopband_atten_db);
std::size_t kaiser_tap_estimate(double stopband_atten_db,
                                double transition_width_hz,
                                double sample_rate_hz);

/// Windowed-sinc band-pass with a Kaiser window sized by the standard
/// attenuation/transition-width estimate (tap count forced odd). The DC gain
/// is nulled exactly with a window-shaped correction, which keeps the taps
/// symmetric; a sub-hertz low cut would otherwise be unrealizable at these
/// lengths.
StreamingFilter design_band_pass(const BandPassSpec& spec, double sample_rate_hz);

/// Subtracts the window mean from every sample. Idempotent.
SignalWindow remove_dc(const SignalWindow& w);

}  // namespace printmon
