#pragma once

#include <cstdint>
#include <string>

#include "printmon/signal.hpp"

namespace printmon {

/// The five time-domain statistics of one window.
///
/// Conventions fixed for reproducibility:
///  - std uses the N-1 divisor; the standardization inside ki uses N.
///  - cf is peak-to-valley over RMS: (max - min) / rms.
///  - ki is the non-excess fourth standardized moment (Gaussian ~ 3).
///  - energy is the mean of squares (rms^2), kept alongside the radical form.
struct FeatureVector {
  std::string channel_id;
  std::int64_t start_time_us = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
  double rms = 0.0;
  double cf = 0.0;
  double ki = 0.0;
  double energy = 0.0;
  bool degenerate = false;
  bool transient = false;
};

double mean(const SignalWindow& w);
double stddev(const SignalWindow& w);
double rms(const SignalWindow& w);
double crest_factor(const SignalWindow& w);    // throws ZeroRMS on all-zero input
double kurtosis_index(const SignalWindow& w);  // throws ZeroVariance on constant input

/// Bundles the five features. Degenerate windows (zero RMS or zero variance)
/// yield cf = 0 and ki = 0 with the degenerate flag set instead of throwing,
/// so a silent channel cannot kill a monitoring stream.
FeatureVector extract_features(const SignalWindow& w);

}  // namespace printmon
