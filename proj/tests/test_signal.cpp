#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "printmon/signal.hpp"

using namespace printmon;

TEST_CASE("make_window validates length and finiteness") {
  const auto accel = ChannelConfig::accel(Axis::X);
  const auto acoustic = ChannelConfig::acoustic();

  const SignalWindow w = make_window(accel, 0, {0.0, 0.0});
  CHECK(w.n() == 2);
  CHECK(w.samples[0] == 0.0);

  CHECK_THROWS_WITH_AS(make_window(acoustic, 0, {1.0}), doctest::Contains("TooShort"),
                       Error);

  try {
    make_window(accel, 0, {0.1, NAN, 0.2});
    FAIL("expected NonFiniteSample");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteSample);
    CHECK(e.where() == 1);
  }
}

TEST_CASE("channel nyquist admission") {
  const auto acoustic = ChannelConfig::acoustic(5000.0);
  CHECK_NOTHROW(acoustic.require_nyquist(2500.0));
  CHECK_THROWS_AS(acoustic.require_nyquist(2501.0), Error);

  ChannelConfig bad = acoustic;
  bad.sample_rate_hz = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("windower emits 50% overlap windows") {
  Windower w(ChannelConfig::accel(Axis::X, 2000.0), 4, 2);
  w.reset(0);
  const double chunk[] = {1, 2, 3, 4, 5, 6};
  const auto windows = w.push_and_emit(chunk);
  REQUIRE(windows.size() == 2);
  CHECK(windows[0].samples == std::vector<double>{1, 2, 3, 4});
  CHECK(windows[1].samples == std::vector<double>{3, 4, 5, 6});
}

TEST_CASE("windower retains incomplete windows") {
  Windower w(ChannelConfig::accel(Axis::X, 2000.0), 4, 4);
  w.reset(0);
  const double chunk[] = {1, 2, 3};
  CHECK(w.push_and_emit(chunk).empty());
  const double rest[] = {4.0};
  const auto windows = w.push_and_emit(rest);
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].samples == std::vector<double>{1, 2, 3, 4});
}

// Index-enumeration oracle: starts are every hop while start+len <= total.
static std::vector<std::size_t> expected_starts(std::size_t total, std::size_t len,
                                                std::size_t hop) {
  std::vector<std::size_t> out;
  for (std::size_t start = 0; start + len <= total; start += hop) out.push_back(start);
  return out;
}

TEST_CASE("windower count matches the enumeration oracle") {
  Windower w(ChannelConfig::accel(Axis::X, 2000.0), 1024, 512);
  w.reset(0);
  std::vector<double> samples(2048);
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = double(i);
  const auto windows = w.push_and_emit(samples);

  const auto starts = expected_starts(2048, 1024, 512);
  REQUIRE(windows.size() == starts.size());
  REQUIRE(windows.size() == 3);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    CHECK(windows[k].samples.front() == double(starts[k]));
  }
}

TEST_CASE("chunking independence over random partitions") {
  std::mt19937_64 gen(99);
  std::vector<double> stream(5000);
  for (auto& v : stream) v = std::uniform_real_distribution<>(-1, 1)(gen);

  Windower whole(ChannelConfig::acoustic(5000.0), 256, 96);
  whole.reset(0);
  const auto reference = whole.push_and_emit(stream);

  for (int trial = 0; trial < 50; ++trial) {
    Windower chunked(ChannelConfig::acoustic(5000.0), 256, 96);
    chunked.reset(0);
    std::vector<SignalWindow> got;
    std::size_t pos = 0;
    while (pos < stream.size()) {
      const std::size_t n =
          std::min<std::size_t>(std::uniform_int_distribution<std::size_t>(0, 700)(gen),
                                stream.size() - pos);
      auto part = chunked.push_and_emit(
          std::span<const double>(stream.data() + pos, n));
      got.insert(got.end(), part.begin(), part.end());
      pos += n;
    }
    REQUIRE(got.size() == reference.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].samples == reference[k].samples);
      CHECK(got[k].start_time_us == reference[k].start_time_us);
    }
  }
}

TEST_CASE("window timestamps follow the hop arithmetic exactly") {
  const double rate = 2000.0;
  Windower w(ChannelConfig::accel(Axis::X, rate), 1024, 512);
  w.reset(1234567);
  std::vector<double> stream(1024 + 512 * 9);
  const auto windows = w.push_and_emit(stream);
  REQUIRE(windows.size() == 10);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto expect =
        1234567 + std::llround(double(k) * 512.0 * 1e6 / rate);
    CHECK(windows[k].start_time_us == expect);
  }
}

TEST_CASE("reconstruction covers every input sample when hop <= len") {
  Windower w(ChannelConfig::acoustic(5000.0), 64, 48);
  w.reset(0);
  std::vector<double> stream(64 + 48 * 20);
  for (std::size_t i = 0; i < stream.size(); ++i) stream[i] = double(i);
  const auto windows = w.push_and_emit(stream);

  std::vector<int> covered(stream.size(), 0);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    for (std::size_t j = 0; j < windows[k].samples.size(); ++j) {
      const std::size_t idx = k * 48 + j;
      CHECK(windows[k].samples[j] == stream[idx]);
      covered[idx] = 1;
    }
  }
  const std::size_t last_covered = (windows.size() - 1) * 48 + 64;
  for (std::size_t i = 0; i < last_covered; ++i) CHECK(covered[i] == 1);
}

TEST_CASE("windower rejects bad configuration") {
  const auto cfg = ChannelConfig::accel(Axis::X, 2000.0);
  CHECK_THROWS_AS(Windower(cfg, 4, 0), Error);
  CHECK_THROWS_AS(Windower(cfg, 4, 5), Error);
  CHECK_NOTHROW(Windower(cfg, 4, 4));
}

TEST_CASE("transient prefix flags overlapping windows") {
  Windower w(ChannelConfig::acoustic(5000.0), 8, 4);
  w.reset(0);
  w.set_transient_prefix(6);
  std::vector<double> stream(24, 1.0);
  const auto windows = w.push_and_emit(stream);
  REQUIRE(windows.size() == 5);
  CHECK(windows[0].transient);   // starts at 0
  CHECK(windows[1].transient);   // starts at 4 < 6
  CHECK(!windows[2].transient);  // starts at 8
}
