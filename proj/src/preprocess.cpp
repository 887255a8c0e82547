#include "printmon/preprocess.hpp"

#include <cmath>
#include <numbers>

namespace printmon {

void BandPassSpec::validate(double sample_rate_hz) const {
  const double nyquist = sample_rate_hz / 2.0;
  if (!(low_cut_hz > 0.0) || !(low_cut_hz < high_cut_hz) || !(high_cut_hz < nyquist)) {
    throw Error(Errc::InvalidBand,
                "need 0 < low < high < Nyquist (" + std::to_string(nyquist) + " Hz)");
  }
  if (!(transition_width_hz > 0.0)) {
    throw Error(Errc::InvalidBand, "transition width must be positive");
  }
  if (!(stopband_atten_db >= 40.0)) {
    throw Error(Errc::InvalidBand, "stopband attenuation must be >= 40 dB");
  }
}

double bessel_i0(double x) {
  // Series expansion; converges quickly for the beta range used here.
  double sum = 1.0;
  double term = 1.0;
  const double y = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= y / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

double kaiser_beta(double stopband_atten_db) {
  const double a = stopband_atten_db;
  if (a > 50.0) return 0.1102 * (a - 8.7);
  if (a >= 21.0) return 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
  return 0.0;
}

std::size_t kaiser_tap_estimate(double stopband_atten_db,
                                double transition_width_hz,
                                double sample_rate_hz) {
  const double delta_omega =
      2.0 * std::numbers::pi * transition_width_hz / sample_rate_hz;
  const double n = (stopband_atten_db - 7.95) / (2.285 * delta_omega);
  std::size_t taps = static_cast<std::size_t>(std::ceil(n)) + 1;
  if (taps % 2 == 0) ++taps;
  return taps;
}

StreamingFilter design_band_pass(const BandPassSpec& spec, double sample_rate_hz) {
  spec.validate(sample_rate_hz);

  const std::size_t taps =
      kaiser_tap_estimate(spec.stopband_atten_db, spec.transition_width_hz,
                          sample_rate_hz);
  if (taps > spec.max_taps) {
    throw Error(Errc::UnrealizableSpec,
                "design needs " + std::to_string(taps) + " taps, cap is " +
                    std::to_string(spec.max_taps));
  }

  // Ideal cutoffs inset by half the transition width, so the realized
  // transition bands sit inside [low, low+tw] and [high-tw, high].
  const double half_tw = spec.transition_width_hz / 2.0;
  const double f1 = spec.low_cut_hz + half_tw;
  const double f2 = spec.high_cut_hz - half_tw;
  if (!(f1 < f2)) {
    throw Error(Errc::UnrealizableSpec, "transition bands overlap inside the passband");
  }
  const double w1 = 2.0 * std::numbers::pi * f1 / sample_rate_hz;
  const double w2 = 2.0 * std::numbers::pi * f2 / sample_rate_hz;

  const double beta = kaiser_beta(spec.stopband_atten_db);
  const double i0_beta = bessel_i0(beta);
  const std::ptrdiff_t mid = static_cast<std::ptrdiff_t>(taps / 2);

  std::vector<double> h(taps);
  std::vector<double> win(taps);
  for (std::size_t i = 0; i < taps; ++i) {
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(i) - mid;
    const double r = static_cast<double>(m) / static_cast<double>(mid);
    win[i] = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;

    double ideal;
    if (m == 0) {
      ideal = (w2 - w1) / std::numbers::pi;
    } else {
      const double md = static_cast<double>(m);
      ideal = (std::sin(w2 * md) - std::sin(w1 * md)) / (std::numbers::pi * md);
    }
    h[i] = ideal * win[i];
  }

  // Null the DC gain exactly. The correction is window-shaped, so symmetry
  // (and with it linear phase) is preserved, and its spectral footprint away
  // from DC is below the window sidelobe level.
  double dc_gain = 0.0;
  double win_sum = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    dc_gain += h[i];
    win_sum += win[i];
  }
  const double c = dc_gain / win_sum;
  for (std::size_t i = 0; i < taps; ++i) h[i] -= c * win[i];

  return StreamingFilter(std::move(h));
}

StreamingFilter::StreamingFilter(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.empty() || taps_.size() % 2 == 0) {
    throw Error(Errc::UnrealizableSpec, "tap count must be odd and non-zero");
  }
  for (std::size_t i = 0; i < taps_.size() / 2; ++i) {
    if (std::abs(taps_[i] - taps_[taps_.size() - 1 - i]) > 1e-12) {
      throw Error(Errc::UnrealizableSpec, "taps must be symmetric (linear phase)");
    }
  }
  delay_.assign(taps_.size() - 1, 0.0);
}

void StreamingFilter::reset() { std::fill(delay_.begin(), delay_.end(), 0.0); }

std::vector<double> StreamingFilter::filter(std::span<const double> x) {
  const std::size_t k = taps_.size();
  std::vector<double> y(x.size());

  // Work on a contiguous [history | chunk] buffer; history holds the k-1
  // most recent past samples, newest first is at the end.
  std::vector<double> buf(delay_.size() + x.size());
  for (std::size_t i = 0; i < delay_.size(); ++i) {
    buf[i] = delay_[delay_.size() - 1 - i];  // oldest first
  }
  std::copy(x.begin(), x.end(), buf.begin() + static_cast<std::ptrdiff_t>(delay_.size()));

  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    const double* xn = buf.data() + n + (k - 1);  // points at x(n)
    for (std::size_t t = 0; t < k; ++t) acc += taps_[t] * xn[-static_cast<std::ptrdiff_t>(t)];
    y[n] = acc;
  }

  // Refresh the delay line with the newest k-1 samples.
  for (std::size_t i = 0; i < delay_.size(); ++i) {
    delay_[i] = buf[buf.size() - 1 - i];
  }
  return y;
}

double StreamingFilter::response_at(double freq_hz, double sample_rate_hz) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  double re = 0.0;
  double im = 0.0;
  for (std::size_t n = 0; n < taps_.size(); ++n) {
    re += taps_[n] * std::cos(w * static_cast<double>(n));
    im -= taps_[n] * std::sin(w * static_cast<double>(n));
  }
  return std::hypot(re, im);
}

SignalWindow remove_dc(const SignalWindow& w) {
  // Compensated summation keeps the residual mean at the 1e-12 level even
  // for long windows with a large offset.
  double sum = 0.0;
  double comp = 0.0;
  for (double v : w.samples) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  const double mu = (sum + comp) / static_cast<double>(w.samples.size());

  SignalWindow out = w;
  for (double& v : out.samples) v -= mu;
  return out;
}

}  // namespace printmon
