#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "printmon/preprocess.hpp"

using namespace printmon;

namespace {

std::vector<double> sine(double freq_hz, double rate_hz, std::size_t n,
                         double amp = 1.0) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = amp * std::sin(2.0 * std::numbers::pi * freq_hz * double(i) / rate_hz);
  }
  return out;
}

// Steady-state output amplitude of a tone, skipping filter warm-up.
double steady_amplitude(StreamingFilter& f, double freq_hz, double rate_hz) {
  const std::size_t n = f.tap_count() * 2 + std::size_t(rate_hz);
  const auto y = f.filter(sine(freq_hz, rate_hz, n));
  double peak = 0.0;
  for (std::size_t i = f.tap_count() + std::size_t(rate_hz) / 2; i < y.size(); ++i) {
    peak = std::max(peak, std::abs(y[i]));
  }
  return peak;
}

BandPassSpec paper_band() {
  BandPassSpec spec;
  spec.low_cut_hz = 1.0;
  spec.high_cut_hz = 2499.0;
  spec.transition_width_hz = 50.0;
  spec.stopband_atten_db = 60.0;
  return spec;
}

}  // namespace

TEST_CASE("band spec validation") {
  BandPassSpec spec = paper_band();
  CHECK_NOTHROW(spec.validate(5000.0));

  spec.high_cut_hz = 2600.0;  // above Nyquist 2500
  CHECK_THROWS_AS(spec.validate(5000.0), Error);

  spec = paper_band();
  spec.stopband_atten_db = 30.0;
  CHECK_THROWS_AS(spec.validate(5000.0), Error);
}

TEST_CASE("paper band-pass at 5 kHz: odd taps, passband, DC rejection") {
  StreamingFilter f = design_band_pass(paper_band(), 5000.0);
  CHECK(f.tap_count() % 2 == 1);
  CHECK(f.group_delay() == (f.tap_count() - 1) / 2);

  // 400 Hz and 1000 Hz unit tones pass within +-1 dB.
  {
    StreamingFilter g = design_band_pass(paper_band(), 5000.0);
    const double a400 = steady_amplitude(g, 400.0, 5000.0);
    CHECK(a400 > 0.891);
    CHECK(a400 < 1.122);
  }
  {
    StreamingFilter g = design_band_pass(paper_band(), 5000.0);
    const double a1000 = steady_amplitude(g, 1000.0, 5000.0);
    CHECK(a1000 > 0.891);
    CHECK(a1000 < 1.122);
  }

  // Constant input decays below the 60 dB floor once state fills.
  {
    StreamingFilter g = design_band_pass(paper_band(), 5000.0);
    std::vector<double> ones(g.tap_count() * 3, 1.0);
    const auto y = g.filter(ones);
    double tail = 0.0;
    for (std::size_t i = y.size() - g.tap_count(); i < y.size(); ++i) {
      tail = std::max(tail, std::abs(y[i]));
    }
    CHECK(tail < 1e-3);
  }
  CHECK(f.response_at(0.0, 5000.0) < 1e-12);  // DC nulled exactly
}

TEST_CASE("unrealizable transition width is rejected") {
  BandPassSpec spec = paper_band();
  spec.transition_width_hz = 0.01;
  CHECK_THROWS_AS(design_band_pass(spec, 5000.0), Error);
  spec.transition_width_hz = 0.01;
  spec.max_taps = 10'000'000;
  CHECK_NOTHROW(design_band_pass(spec, 5000.0));
}

TEST_CASE("filter_stream basics") {
  StreamingFilter f = design_band_pass(paper_band(), 5000.0);

  SUBCASE("all-zero input stays zero") {
    const std::vector<double> zeros(1000, 0.0);
    for (double v : f.filter(zeros)) CHECK(v == 0.0);
  }
  SUBCASE("impulse reproduces the taps") {
    std::vector<double> impulse(f.tap_count() + 16, 0.0);
    impulse[0] = 1.0;
    const auto y = f.filter(impulse);
    for (std::size_t i = 0; i < f.tap_count(); ++i) {
      CHECK(y[i] == doctest::Approx(f.taps()[i]).epsilon(1e-15));
    }
    for (std::size_t i = f.tap_count(); i < y.size(); ++i) CHECK(y[i] == 0.0);
  }
  SUBCASE("output length equals input length") {
    CHECK(f.filter(std::vector<double>(37, 0.5)).size() == 37);
    CHECK(f.filter(std::vector<double>{}).empty());
  }
}

TEST_CASE("chunked filtering equals whole-stream filtering") {
  std::mt19937_64 gen(11);
  std::vector<double> x(4000);
  for (auto& v : x) v = std::uniform_real_distribution<>(-1, 1)(gen);

  StreamingFilter whole = design_band_pass(paper_band(), 5000.0);
  const auto ref = whole.filter(x);

  for (int trial = 0; trial < 10; ++trial) {
    StreamingFilter chunked = design_band_pass(paper_band(), 5000.0);
    std::vector<double> got;
    std::size_t pos = 0;
    while (pos < x.size()) {
      const std::size_t n = std::min<std::size_t>(
          std::uniform_int_distribution<std::size_t>(0, 900)(gen), x.size() - pos);
      const auto part = chunked.filter(std::span<const double>(x.data() + pos, n));
      got.insert(got.end(), part.begin(), part.end());
      pos += n;
    }
    REQUIRE(got.size() == ref.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("linearity of the stream filter") {
  std::mt19937_64 gen(5);
  std::vector<double> x(2000), y(2000);
  for (auto& v : x) v = std::uniform_real_distribution<>(-1, 1)(gen);
  for (auto& v : y) v = std::uniform_real_distribution<>(-1, 1)(gen);
  const double a = 1.7, b = -0.4;

  StreamingFilter fx = design_band_pass(paper_band(), 5000.0);
  StreamingFilter fy = design_band_pass(paper_band(), 5000.0);
  StreamingFilter fmix = design_band_pass(paper_band(), 5000.0);

  std::vector<double> mix(2000);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + b * y[i];

  const auto rx = fx.filter(x);
  const auto ry = fy.filter(y);
  const auto rmix = fmix.filter(mix);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const double expect = a * rx[i] + b * ry[i];
    CHECK(rmix[i] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("linear phase: correlation peak sits at the group delay") {
  StreamingFilter f = design_band_pass(paper_band(), 5000.0);
  // Band-limited input: a 400 Hz burst.
  std::vector<double> x = sine(400.0, 5000.0, 4000);
  const auto y = f.filter(x);

  std::size_t best_lag = 0;
  double best = -1e300;
  for (std::size_t lag = 0; lag < f.tap_count(); ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < y.size(); ++i) acc += x[i] * y[i + lag];
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  CHECK(best_lag == f.group_delay());
}

TEST_CASE("stopband attenuation at a rate where the band edge is real") {
  // At 6 kHz the spec's 2549 Hz stopband point sits below Nyquist.
  StreamingFilter f = design_band_pass(paper_band(), 6000.0);
  CHECK(f.response_at(2549.0, 6000.0) <= 1e-3);
  CHECK(f.response_at(2700.0, 6000.0) <= 1e-3);
  CHECK(f.response_at(2999.0, 6000.0) <= 1e-3);
  {
    StreamingFilter g = design_band_pass(paper_band(), 6000.0);
    CHECK(steady_amplitude(g, 2549.0, 6000.0) <= 1e-3);
  }
}

TEST_CASE("remove_dc") {
  const auto cfg = ChannelConfig::accel(Axis::X, 2000.0);

  SUBCASE("constant collapses to zero") {
    const auto w = remove_dc(make_window(cfg, 0, {1, 1, 1, 1}));
    for (double v : w.samples) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("two-point case") {
    const auto w = remove_dc(make_window(cfg, 0, {0, 2}));
    CHECK(w.samples[0] == doctest::Approx(-1.0));
    CHECK(w.samples[1] == doctest::Approx(1.0));
  }
  SUBCASE("idempotent on zero-mean input and in general") {
    std::vector<double> s(1024);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = std::sin(2.0 * std::numbers::pi * 16.0 * double(i) / 1024.0);
    }
    const auto once = remove_dc(make_window(cfg, 0, s));
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(once.samples[i] == doctest::Approx(s[i]).epsilon(1e-12));
    }
    const auto twice = remove_dc(once);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(twice.samples[i] == doctest::Approx(once.samples[i]).epsilon(1e-12));
    }
  }
  SUBCASE("output mean is zero within 1e-12") {
    std::mt19937_64 gen(3);
    std::vector<double> s(4096);
    for (auto& v : s) v = std::uniform_real_distribution<>(99.0, 101.0)(gen);
    const auto w = remove_dc(make_window(cfg, 0, s));
    double sum = 0.0;
    for (double v : w.samples) sum += v;
    CHECK(std::abs(sum / double(w.samples.size())) < 1e-12);
  }
}
