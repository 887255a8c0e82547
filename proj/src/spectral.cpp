#include "printmon/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace printmon {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> taper_coefficients(Taper taper, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (taper == Taper::Hann) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n));
    }
  }
  return w;
}

double db_of(double magnitude) {
  return 20.0 * std::log10(magnitude + kSpectrogramDbEpsilon);
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw Error(Errc::InvalidWindowing, "FFT length must be a power of two");
  }

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

Spectrum magnitude_spectrum(const SignalWindow& w, Taper taper) {
  const std::size_t n = w.samples.size();
  const std::size_t fft_len = next_pow2(n);

  const std::vector<double> coeff = taper_coefficients(taper, n);
  double coeff_sum = 0.0;
  for (double c : coeff) coeff_sum += c;

  std::vector<std::complex<double>> buf(fft_len, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) buf[i] = w.samples[i] * coeff[i];
  fft_inplace(buf);

  Spectrum s;
  s.channel_id = w.channel.channel_id;
  s.start_time_us = w.start_time_us;
  s.sample_rate_hz = w.channel.sample_rate_hz;
  s.bin_hz = w.channel.sample_rate_hz / static_cast<double>(fft_len);
  s.fft_len = fft_len;
  s.analyzed_len = n;
  s.taper = taper;
  s.magnitudes.resize(fft_len / 2 + 1);
  for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
    const double scale = (k == 0 || k == fft_len / 2) ? 1.0 : 2.0;
    s.magnitudes[k] = scale * std::abs(buf[k]) / coeff_sum;
  }
  return s;
}

Spectrogram make_spectrogram(std::span<const SignalWindow> windows, Taper taper) {
  if (windows.empty()) {
    throw Error(Errc::InconsistentWindows, "no windows");
  }
  const auto& first = windows.front();
  std::int64_t hop_us = 0;
  if (windows.size() > 1) hop_us = windows[1].start_time_us - first.start_time_us;

  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.channel.channel_id != first.channel.channel_id ||
        w.channel.sample_rate_hz != first.channel.sample_rate_hz ||
        w.samples.size() != first.samples.size()) {
      throw Error(Errc::InconsistentWindows, "windows mix channels or lengths");
    }
    if (i > 0) {
      const std::int64_t d = w.start_time_us - windows[i - 1].start_time_us;
      // Start times are rounded to whole microseconds, so allow 1 us of play.
      if (d <= 0 || std::llabs(d - hop_us) > 1) {
        throw Error(Errc::InconsistentWindows, "irregular hop spacing");
      }
    }
  }

  const std::size_t n = first.samples.size();
  const std::size_t fft_len = next_pow2(n);
  const std::vector<double> coeff = taper_coefficients(taper, n);
  double coeff_sum = 0.0;
  for (double c : coeff) coeff_sum += c;

  Spectrogram sg;
  sg.channel_id = first.channel.channel_id;
  sg.sample_rate_hz = first.channel.sample_rate_hz;
  sg.bin_hz = first.channel.sample_rate_hz / static_cast<double>(fft_len);
  sg.num_bins = fft_len / 2 + 1;
  sg.frame_times_us.reserve(windows.size());
  sg.frames_db.reserve(windows.size());

  std::vector<std::complex<double>> buf(fft_len);
  for (const auto& w : windows) {
    std::fill(buf.begin(), buf.end(), std::complex<double>{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) buf[i] = w.samples[i] * coeff[i];
    fft_inplace(buf);

    std::vector<double> row(sg.num_bins);
    for (std::size_t k = 0; k < sg.num_bins; ++k) {
      row[k] = db_of(std::abs(buf[k]) / coeff_sum);
    }
    sg.frame_times_us.push_back(w.start_time_us);
    sg.frames_db.push_back(std::move(row));
  }
  return sg;
}

std::vector<SpectralPeak> find_peaks(const Spectrum& s, double min_prominence_db,
                                     double floor_percentile) {
  const std::size_t n = s.magnitudes.size();
  if (n < 3) return {};

  std::vector<double> db(n);
  for (std::size_t k = 0; k < n; ++k) db[k] = db_of(s.magnitudes[k]);

  // Nearest-rank percentile of all bin dB values.
  std::vector<double> sorted(db);
  std::sort(sorted.begin(), sorted.end());
  const double q = std::clamp(floor_percentile, 0.0, 100.0) / 100.0;
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (rank > 0) --rank;
  const double floor_db = sorted[rank];

  std::vector<SpectralPeak> peaks;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!(db[k] > db[k - 1] && db[k] > db[k + 1])) continue;
    if (db[k] < floor_db + min_prominence_db) continue;

    const double a = db[k - 1];
    const double b = db[k];
    const double c = db[k + 1];
    double delta = 0.0;
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);

    SpectralPeak p;
    p.bin = k;
    p.freq_hz = (static_cast<double>(k) + delta) * s.bin_hz;
    p.magnitude_db = b - 0.25 * (a - c) * delta;
    peaks.push_back(p);
  }

  std::sort(peaks.begin(), peaks.end(), [](const SpectralPeak& x, const SpectralPeak& y) {
    if (x.magnitude_db != y.magnitude_db) return x.magnitude_db > y.magnitude_db;
    return x.freq_hz < y.freq_hz;
  });
  return peaks;
}

HarmonicReport detect_harmonic_series(std::span<const SpectralPeak> peaks,
                                      double bin_hz, int max_order,
                                      double tolerance_bins) {
  if (peaks.empty()) {
    throw Error(Errc::NoSeries, "no peaks to analyze");
  }
  if (max_order < 2) {
    throw Error(Errc::NoSeries, "max_order must be at least 2");
  }

  // Canonical candidate order makes the result independent of input order.
  std::vector<SpectralPeak> sorted(peaks.begin(), peaks.end());
  std::sort(sorted.begin(), sorted.end(), [](const SpectralPeak& a, const SpectralPeak& b) {
    return a.freq_hz < b.freq_hz;
  });

  const double tol_hz = tolerance_bins * bin_hz;

  HarmonicReport best;
  int best_count = 0;
  double best_mag_sum = -1e300;

  for (const auto& cand : sorted) {
    if (cand.freq_hz <= 0.0) continue;

    HarmonicReport report;
    report.fundamental_hz = cand.freq_hz;
    double mag_sum = 0.0;
    std::vector<bool> used(sorted.size(), false);

    for (int order = 1; order <= max_order; ++order) {
      const double target = static_cast<double>(order) * cand.freq_hz;
      std::ptrdiff_t chosen = -1;
      double best_err = tol_hz;
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (used[i]) continue;
        const double err = std::abs(sorted[i].freq_hz - target);
        if (err <= best_err) {
          best_err = err;
          chosen = static_cast<std::ptrdiff_t>(i);
        }
      }
      if (chosen < 0) continue;
      used[static_cast<std::size_t>(chosen)] = true;
      const auto& m = sorted[static_cast<std::size_t>(chosen)];
      report.harmonics.push_back({order, m.freq_hz, m.magnitude_db});
      mag_sum += m.magnitude_db;
    }

    const int count = static_cast<int>(report.harmonics.size());
    if (count > best_count || (count == best_count && mag_sum > best_mag_sum)) {
      best_count = count;
      best_mag_sum = mag_sum;
      report.confidence = static_cast<double>(count) / static_cast<double>(max_order);
      best = std::move(report);
    }
  }

  if (best_count < 2) {
    throw Error(Errc::NoSeries, "no candidate fundamental matches two or more orders");
  }
  return best;
}

double band_energy_ratio(const Spectrum& s, double band_low_hz, double band_high_hz) {
  const double nyquist = s.sample_rate_hz / 2.0;
  if (!(band_low_hz >= 0.0) || !(band_low_hz < band_high_hz) || band_high_hz > nyquist) {
    throw Error(Errc::InvalidBand, "need 0 <= low < high <= Nyquist");
  }

  double in_band = 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k < s.magnitudes.size(); ++k) {
    const double f = s.freq_of_bin(k);
    const double e = s.magnitudes[k] * s.magnitudes[k];
    total += e;
    if (f >= band_low_hz && f <= band_high_hz) in_band += e;
  }
  if (total == 0.0) {
    throw Error(Errc::EmptySpectrum, "spectrum carries no energy outside DC");
  }
  return in_band / total;
}

void write_spectrogram_csv(const Spectrogram& sg, const std::filesystem::path& path,
                           const std::vector<double>* band_ratio_column) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  char buf[64];

  out << "t_s";
  for (std::size_t k = 0; k < sg.num_bins; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(k) * sg.bin_hz);
    out << ',' << buf;
  }
  if (band_ratio_column) out << ",band_ratio";
  out << '\n';

  for (std::size_t r = 0; r < sg.frames_db.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g",
                  static_cast<double>(sg.frame_times_us[r]) / 1e6);
    out << buf;
    for (double v : sg.frames_db[r]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    if (band_ratio_column) {
      std::snprintf(buf, sizeof buf, "%.17g", (*band_ratio_column)[r]);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

void write_spectrogram_pgm(const Spectrogram& sg, const std::filesystem::path& path,
                           double floor_db) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  out << "P5\n" << sg.num_bins << ' ' << sg.frames_db.size() << "\n255\n";
  for (const auto& row : sg.frames_db) {
    for (double v : row) {
      const double t = std::clamp((v - floor_db) / (0.0 - floor_db), 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
    }
  }
  if (!out) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

}  // namespace printmon
