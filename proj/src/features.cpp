#include "printmon/features.hpp"

#include <algorithm>
#include <cmath>

namespace printmon {

namespace {

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;  // sum of (x - mean)^2
  double m4 = 0.0;  // sum of (x - mean)^4
  double sumsq = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Moments compute_moments(const SignalWindow& w) {
  Moments m;
  const auto& x = w.samples;
  const double n = static_cast<double>(x.size());

  double sum = 0.0;
  m.min = x[0];
  m.max = x[0];
  for (double v : x) {
    sum += v;
    m.sumsq += v * v;
    m.min = std::min(m.min, v);
    m.max = std::max(m.max, v);
  }
  m.mean = sum / n;
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m4 += d2 * d2;
  }
  return m;
}

}  // namespace

double mean(const SignalWindow& w) {
  double sum = 0.0;
  for (double v : w.samples) sum += v;
  return sum / static_cast<double>(w.samples.size());
}

double stddev(const SignalWindow& w) {
  const Moments m = compute_moments(w);
  return std::sqrt(m.m2 / static_cast<double>(w.samples.size() - 1));
}

double rms(const SignalWindow& w) {
  const Moments m = compute_moments(w);
  return std::sqrt(m.sumsq / static_cast<double>(w.samples.size()));
}

double crest_factor(const SignalWindow& w) {
  const Moments m = compute_moments(w);
  const double r = std::sqrt(m.sumsq / static_cast<double>(w.samples.size()));
  if (r == 0.0) {
    throw Error(Errc::ZeroRms, "crest factor undefined for an all-zero window");
  }
  return (m.max - m.min) / r;
}

double kurtosis_index(const SignalWindow& w) {
  const Moments m = compute_moments(w);
  const double n = static_cast<double>(w.samples.size());
  const double var_pop = m.m2 / n;
  if (var_pop == 0.0) {
    throw Error(Errc::ZeroVariance, "kurtosis undefined for a constant window");
  }
  return (m.m4 / n) / (var_pop * var_pop);
}

FeatureVector extract_features(const SignalWindow& w) {
  const Moments m = compute_moments(w);
  const double n = static_cast<double>(w.samples.size());

  FeatureVector fv;
  fv.channel_id = w.channel.channel_id;
  fv.start_time_us = w.start_time_us;
  fv.n = w.samples.size();
  fv.transient = w.transient;
  fv.mean = m.mean;
  fv.std = std::sqrt(m.m2 / (n - 1.0));
  fv.energy = m.sumsq / n;
  fv.rms = std::sqrt(fv.energy);

  const double var_pop = m.m2 / n;
  if (fv.rms == 0.0 || var_pop == 0.0) {
    fv.degenerate = true;
    fv.cf = 0.0;
    fv.ki = 0.0;
    return fv;
  }
  fv.cf = (m.max - m.min) / fv.rms;
  fv.ki = (m.m4 / n) / (var_pop * var_pop);
  return fv;
}

}  // namespace printmon
