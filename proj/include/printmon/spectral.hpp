#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "printmon/signal.hpp"

namespace printmon {

enum class Taper : std::uint8_t { Rectangular, Hann };

/// One-sided magnitude spectrum, amplitude-calibrated: a full-scale sine at a
/// bin center reports its amplitude within 0.1 dB for either taper.
struct Spectrum {
  std::string channel_id;
  std::int64_t start_time_us = 0;
  double sample_rate_hz = 0.0;
  double bin_hz = 0.0;
  std::size_t fft_len = 0;       // power of two actually transformed
  std::size_t analyzed_len = 0;  // original window length before padding
  Taper taper = Taper::Rectangular;
  std::vector<double> magnitudes;  // fft_len/2 + 1 entries

  std::size_t num_bins() const { return magnitudes.size(); }
  double freq_of_bin(std::size_t bin) const { return static_cast<double>(bin) * bin_hz; }
};

/// Time-frequency matrix in dB relative to full scale, one row per window.
/// Rows use unit-gain window normalization (|X_k| / sum of taper), so inputs
/// bounded in [-1, 1] can never exceed 0 dB.
struct Spectrogram {
  std::string channel_id;
  std::vector<std::int64_t> frame_times_us;
  double sample_rate_hz = 0.0;
  double bin_hz = 0.0;
  std::size_t num_bins = 0;
  std::vector<std::vector<double>> frames_db;
};

struct SpectralPeak {
  std::size_t bin = 0;
  double freq_hz = 0.0;
  double magnitude_db = 0.0;
};

struct HarmonicPeak {
  int order = 0;
  double freq_hz = 0.0;
  double magnitude_db = 0.0;
};

struct HarmonicReport {
  double fundamental_hz = 0.0;
  std::vector<HarmonicPeak> harmonics;  // orders strictly increasing from 1
  double confidence = 0.0;              // matched orders / max_order
};

inline constexpr double kSpectrogramDbEpsilon = 1e-12;  // floor: -240 dB
inline constexpr double kDefaultPeakProminenceDb = 12.0;
inline constexpr double kDefaultPeakFloorPercentile = 50.0;
inline constexpr int kDefaultHarmonicMaxOrder = 8;
inline constexpr double kDefaultHarmonicToleranceBins = 1.0;

/// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

Spectrum magnitude_spectrum(const SignalWindow& w, Taper taper);

/// Windows must share a channel and have constant hop spacing.
Spectrogram make_spectrogram(std::span<const SignalWindow> windows,
                             Taper taper = Taper::Hann);

/// Local maxima exceeding the floor (the given percentile of all bin dB
/// values) by at least min_prominence_db, strongest first. Frequencies are
/// refined by parabolic interpolation.
std::vector<SpectralPeak> find_peaks(
    const Spectrum& s, double min_prominence_db = kDefaultPeakProminenceDb,
    double floor_percentile = kDefaultPeakFloorPercentile);

/// Picks the fundamental whose integer multiples explain the most peaks
/// (count, then summed magnitude). Throws NoSeries when no candidate matches
/// at least two orders.
HarmonicReport detect_harmonic_series(std::span<const SpectralPeak> peaks,
                                      double bin_hz,
                                      int max_order = kDefaultHarmonicMaxOrder,
                                      double tolerance_bins = kDefaultHarmonicToleranceBins);

/// Energy fraction inside [band_low_hz, band_high_hz], DC bin excluded.
double band_energy_ratio(const Spectrum& s, double band_low_hz, double band_high_hz);

/// CSV matrix: first row bin frequencies, first column frame times in
/// seconds. Optional extra column of per-frame band energy ratios.
void write_spectrogram_csv(const Spectrogram& sg, const std::filesystem::path& path,
                           const std::vector<double>* band_ratio_column = nullptr);

/// 8-bit binary PGM, one row per frame, dB mapped linearly from floor_db to 0.
void write_spectrogram_pgm(const Spectrogram& sg, const std::filesystem::path& path,
                           double floor_db = -96.0);

}  // namespace printmon
