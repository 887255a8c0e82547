#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "printmon/features.hpp"
#include "printmon/rng.hpp"

using namespace printmon;

namespace {

SignalWindow win(std::vector<double> samples, double rate = 5000.0) {
  return make_window(ChannelConfig::acoustic(rate), 0, std::move(samples));
}

std::vector<double> unit_sine(std::size_t n, int periods) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::sin(2.0 * std::numbers::pi * periods * double(i) / double(n));
  }
  return out;
}

// Independent oracle: direct summation at extended precision.
struct OracleStats {
  double mean, std, rms, cf, ki;
};

OracleStats oracle(const std::vector<double>& x) {
  const long double n = static_cast<long double>(x.size());
  long double sum = 0, sumsq = 0;
  long double mn = x[0], mx = x[0];
  for (double v : x) {
    sum += v;
    sumsq += static_cast<long double>(v) * v;
    mn = std::min<long double>(mn, v);
    mx = std::max<long double>(mx, v);
  }
  const long double mu = sum / n;
  long double m2 = 0, m4 = 0;
  for (double v : x) {
    const long double d = v - mu;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  OracleStats s{};
  s.mean = double(mu);
  s.std = double(sqrtl(m2 / (n - 1)));
  s.rms = double(sqrtl(sumsq / n));
  s.cf = double((mx - mn) / sqrtl(sumsq / n));
  const long double var_pop = m2 / n;
  s.ki = double((m4 / n) / (var_pop * var_pop));
  return s;
}

}  // namespace

TEST_CASE("mean: zero, arithmetic, sine symmetry") {
  CHECK(mean(win({0, 0, 0, 0})) == 0.0);
  CHECK(mean(win({1, 3})) == 2.0);
  const auto s = unit_sine(1024, 16);
  CHECK(std::abs(mean(win(s))) < 1e-12);
  CHECK(mean(win(s)) == doctest::Approx(oracle(s).mean).epsilon(1e-12));
}

TEST_CASE("std: constant, two-point, sine") {
  CHECK(stddev(win({2, 2, 2})) == 0.0);
  CHECK(stddev(win({-1, 1})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  const auto s = unit_sine(1024, 16);
  CHECK(stddev(win(s)) == doctest::Approx(0.70746).epsilon(1.5e-4));
  CHECK(stddev(win(s)) == doctest::Approx(oracle(s).std).epsilon(1e-12));
}

TEST_CASE("rms: constant, sine, square wave") {
  CHECK(rms(win({-3, -3, -3})) == 3.0);
  const auto s = unit_sine(1024, 16);
  CHECK(rms(win(s)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1.5e-4));
  std::vector<double> square(512);
  for (std::size_t i = 0; i < square.size(); ++i) square[i] = i % 2 ? 1.0 : -1.0;
  CHECK(rms(win(square)) == 1.0);
}

TEST_CASE("crest factor uses the paper's peak-to-valley form") {
  const auto s = unit_sine(1024, 16);
  CHECK(crest_factor(win(s)) == doctest::Approx(2.8284).epsilon(1e-3));
  std::vector<double> square(512);
  for (std::size_t i = 0; i < square.size(); ++i) square[i] = i % 2 ? 1.0 : -1.0;
  CHECK(crest_factor(win(square)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(crest_factor(win({5, 5, 5})) == 0.0);
  CHECK_THROWS_AS(crest_factor(win({0, 0, 0})), Error);
}

TEST_CASE("kurtosis index: sine, square, gaussian") {
  CHECK(kurtosis_index(win(unit_sine(4096, 64))) == doctest::Approx(1.5).epsilon(0.01));
  std::vector<double> square(512);
  for (std::size_t i = 0; i < square.size(); ++i) square[i] = i % 2 ? 1.0 : -1.0;
  CHECK(kurtosis_index(win(square)) == doctest::Approx(1.0).epsilon(1e-12));

  // Monte-Carlo oracle at a fixed seed.
  Xoshiro256 rng(2024);
  std::vector<double> gauss(100000);
  for (auto& v : gauss) v = rng.next_gaussian();
  CHECK(kurtosis_index(win(gauss)) == doctest::Approx(3.0).epsilon(0.1 / 3.0));
  CHECK(kurtosis_index(win(gauss)) == doctest::Approx(oracle(gauss).ki).epsilon(1e-9));

  CHECK_THROWS_AS(kurtosis_index(win({4, 4, 4})), Error);
}

TEST_CASE("extract_features composes the five statistics") {
  SUBCASE("all-zero window degrades instead of failing") {
    const FeatureVector fv = extract_features(win({0, 0, 0, 0}));
    CHECK(fv.degenerate);
    CHECK(fv.mean == 0.0);
    CHECK(fv.std == 0.0);
    CHECK(fv.rms == 0.0);
    CHECK(fv.cf == 0.0);
    CHECK(fv.ki == 0.0);
  }
  SUBCASE("unit sine matches the per-feature oracles") {
    const auto s = unit_sine(4096, 64);
    const FeatureVector fv = extract_features(win(s));
    const OracleStats o = oracle(s);
    CHECK(!fv.degenerate);
    CHECK(fv.mean == doctest::Approx(o.mean).epsilon(1e-12));
    CHECK(fv.std == doctest::Approx(o.std).epsilon(1e-12));
    CHECK(fv.rms == doctest::Approx(o.rms).epsilon(1e-12));
    CHECK(fv.cf == doctest::Approx(o.cf).epsilon(1e-12));
    CHECK(fv.ki == doctest::Approx(o.ki).epsilon(1e-12));
  }
  SUBCASE("hand-evaluable two-point case") {
    const FeatureVector fv = extract_features(win({1, 3}));
    CHECK(fv.mean == 2.0);
    CHECK(fv.std == doctest::Approx(1.41421).epsilon(1e-5));
    CHECK(fv.rms == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    CHECK(fv.cf == doctest::Approx(2.0 / std::sqrt(2.5)).epsilon(1e-12));
    CHECK(fv.ki == doctest::Approx(1.0).epsilon(1e-12));  // two symmetric points
    CHECK(fv.energy == doctest::Approx(2.5).epsilon(1e-12));
  }
}

TEST_CASE("feature invariants over random windows") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(512);
    for (auto& v : x) v = std::uniform_real_distribution<>(-2, 2)(gen);
    const FeatureVector base = extract_features(win(x));

    // rms^2 == mean of squares, and the mean/std/rms identity.
    CHECK(base.rms * base.rms == doctest::Approx(base.energy).epsilon(1e-12));
    const double n = double(x.size());
    CHECK(base.rms * base.rms ==
          doctest::Approx(base.mean * base.mean +
                          base.std * base.std * (n - 1.0) / n)
              .epsilon(1e-9));

    // Scale equivariance; cf/ki scale-invariant.
    const double c = std::uniform_real_distribution<>(0.1, 10.0)(gen);
    std::vector<double> scaled(x);
    for (auto& v : scaled) v *= c;
    const FeatureVector fs = extract_features(win(scaled));
    CHECK(fs.mean == doctest::Approx(c * base.mean).epsilon(1e-9));
    CHECK(fs.std == doctest::Approx(c * base.std).epsilon(1e-9));
    CHECK(fs.rms == doctest::Approx(c * base.rms).epsilon(1e-9));
    CHECK(fs.cf == doctest::Approx(base.cf).epsilon(1e-9));
    CHECK(fs.ki == doctest::Approx(base.ki).epsilon(1e-9));

    // Shift behavior: std/ki invariant, mean shifts.
    const double d = std::uniform_real_distribution<>(-5, 5)(gen);
    std::vector<double> shifted(x);
    for (auto& v : shifted) v += d;
    const FeatureVector fd = extract_features(win(shifted));
    CHECK(fd.mean == doctest::Approx(base.mean + d).epsilon(1e-9));
    CHECK(fd.std == doctest::Approx(base.std).epsilon(1e-9));
    CHECK(fd.ki == doctest::Approx(base.ki).epsilon(1e-7));

    // Permutation invariance.
    std::vector<double> shuffled(x);
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const FeatureVector fp = extract_features(win(shuffled));
    CHECK(fp.mean == doctest::Approx(base.mean).epsilon(1e-12));
    CHECK(fp.std == doctest::Approx(base.std).epsilon(1e-12));
    CHECK(fp.rms == doctest::Approx(base.rms).epsilon(1e-12));
    CHECK(fp.cf == doctest::Approx(base.cf).epsilon(1e-12));
    CHECK(fp.ki == doctest::Approx(base.ki).epsilon(1e-12));
  }
}

TEST_CASE("peak-to-valley cf is twice the conventional form on symmetric windows") {
  const auto s = unit_sine(2048, 32);
  const FeatureVector fv = extract_features(win(s));
  double peak = 0.0;
  for (double v : s) peak = std::max(peak, std::abs(v));
  const double conventional = peak / fv.rms;
  CHECK(fv.cf == doctest::Approx(2.0 * conventional).epsilon(1e-9));
}
