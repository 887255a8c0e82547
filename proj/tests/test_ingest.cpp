#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "printmon/ingest.hpp"

using namespace printmon;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("printmon_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("wav round-trip is exact for PCM16-representable samples") {
  TempDir tmp;
  std::vector<double> samples;
  std::mt19937_64 gen(13);
  for (int i = 0; i < 5000; ++i) {
    samples.push_back(double(std::uniform_int_distribution<int>(-32768, 32767)(gen)) /
                      32768.0);
  }
  const auto path = tmp.path / "roundtrip.wav";
  write_wav(path, ChannelConfig::acoustic(5000.0), samples);
  const WavData back = read_wav(path);
  CHECK(back.channel.sample_rate_hz == 5000.0);
  REQUIRE(back.samples.size() == samples.size());
  CHECK(back.samples == samples);
}

TEST_CASE("wav quantization endpoints") {
  TempDir tmp;
  const auto path = tmp.path / "codes.wav";
  const double top = 1.0 - std::pow(2.0, -15.0);
  write_wav(path, ChannelConfig::acoustic(5000.0), std::vector<double>{0.0, top, -1.0});
  const WavData back = read_wav(path);
  CHECK(back.samples[0] == 0.0);           // code 0
  CHECK(back.samples[1] == top);           // code 32767
  CHECK(back.samples[2] == -1.0);          // code -32768
}

TEST_CASE("wav clamps by default and throws with clamping disabled") {
  TempDir tmp;
  const auto path = tmp.path / "clip.wav";
  write_wav(path, ChannelConfig::acoustic(5000.0), std::vector<double>{1.5, -1.5});
  const WavData back = read_wav(path);
  CHECK(back.samples[0] == doctest::Approx(32767.0 / 32768.0));
  CHECK(back.samples[1] == -1.0);

  CHECK_THROWS_AS(write_wav(tmp.path / "strict.wav", ChannelConfig::acoustic(5000.0),
                            std::vector<double>{1.5}, /*clamp=*/false),
                  Error);
}

TEST_CASE("wav rejects stereo and truncated files") {
  TempDir tmp;
  const auto path = tmp.path / "mono.wav";
  write_wav(path, ChannelConfig::acoustic(5000.0), std::vector<double>(16, 0.25));

  // Flip the channel count to 2.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(22);
    const char two[2] = {2, 0};
    f.write(two, 2);
  }
  CHECK_THROWS_AS(read_wav(path), Error);
  try {
    read_wav(path);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnsupportedFormat);
  }

  // Declared data size larger than actual payload.
  const auto path2 = tmp.path / "trunc.wav";
  write_wav(path2, ChannelConfig::acoustic(5000.0), std::vector<double>(16, 0.25));
  {
    std::fstream f(path2, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    const unsigned char big[4] = {0xFF, 0xFF, 0x00, 0x00};
    f.write(reinterpret_cast<const char*>(big), 4);
  }
  try {
    read_wav(path2);
    FAIL("expected TruncatedData");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TruncatedData);
  }
}

TEST_CASE("accel csv round-trip and rate inference") {
  TempDir tmp;
  const auto path = tmp.path / "accel.csv";
  std::array<std::vector<double>, 3> samples;
  std::mt19937_64 gen(19);
  for (int i = 0; i < 2000; ++i) {
    for (auto& axis : samples) {
      axis.push_back(std::uniform_real_distribution<>(-2, 2)(gen));
    }
  }
  write_accel_csv(path, samples, 2000.0);
  const AccelCsv back = read_accel_csv(path);
  CHECK(back.inferred_rate_hz == doctest::Approx(2000.0));
  CHECK(!back.jitter_flag);
  for (int axis = 0; axis < 3; ++axis) {
    CHECK(back.samples[std::size_t(axis)] == samples[std::size_t(axis)]);
  }
  // 2000 rows spanning exactly one second.
  CHECK(back.timestamps_us.front() == 0);
  CHECK(back.timestamps_us.back() == 999500);
}

TEST_CASE("accel csv error reporting") {
  TempDir tmp;

  SUBCASE("bad header") {
    const auto path = tmp.path / "h.csv";
    std::ofstream(path) << "time,ax,ay,az\n0,0,0,0\n";
    try {
      read_accel_csv(path);
      FAIL("expected BadHeader");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::BadHeader);
    }
  }
  SUBCASE("duplicate timestamp") {
    const auto path = tmp.path / "d.csv";
    std::ofstream(path) << "t_us,ax_g,ay_g,az_g\n0,0,0,0\n500,0,0,0\n500,0,0,0\n";
    try {
      read_accel_csv(path);
      FAIL("expected NonMonotonicTime");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonMonotonicTime);
      CHECK(e.where() == 4);  // 1-based line number
    }
  }
  SUBCASE("row with three fields") {
    const auto path = tmp.path / "r.csv";
    std::ofstream(path) << "t_us,ax_g,ay_g,az_g\n0,0,0,0\n500,0,0\n";
    try {
      read_accel_csv(path);
      FAIL("expected UnparsableRow");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnparsableRow);
      CHECK(e.where() == 3);
    }
  }
  SUBCASE("jitter flag") {
    const auto path = tmp.path / "j.csv";
    std::ofstream(path) << "t_us,ax_g,ay_g,az_g\n0,0,0,0\n500,0,0,0\n1300,0,0,0\n"
                        << "1800,0,0,0\n2300,0,0,0\n";
    const AccelCsv csv = read_accel_csv(path);
    CHECK(csv.jitter_flag);
  }
}

TEST_CASE("labels jsonl round-trip") {
  TempDir tmp;
  const auto path = tmp.path / "labels.jsonl";
  const std::vector<LabelSpan> labels = {
      {0, 10'000'000, "normal", "continuous"},
      {10'000'000, 20'000'000, "blocked", "continuous"},
  };
  write_labels_jsonl(path, labels);
  const auto back = read_labels_jsonl(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].state == "normal");
  CHECK(back[1].start_us == 10'000'000);
  CHECK(back[1].motion == "continuous");
}

TEST_CASE("stream decoder reassembles split lines") {
  StreamDecoder dec;
  dec.push("V,100,0.0");
  CHECK(dec.take_vibration().empty());
  dec.push("1,0.02,0.98\n");
  const auto frames = dec.take_vibration();
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].t_us == 100);
  CHECK(frames[0].ax == doctest::Approx(0.01));
  CHECK(frames[0].ay == doctest::Approx(0.02));
  CHECK(frames[0].az == doctest::Approx(0.98));
  CHECK(dec.counters().malformed_lines == 0);
}

TEST_CASE("stream decoder counts malformed lines and routes by kind") {
  StreamDecoder dec;
  dec.push("X,1,2\n");
  CHECK(dec.counters().malformed_lines == 1);

  dec.push("V,10,0.1,0.2,0.3\nA,11,0.5\nV,12,0.4,0.5,0.6\nA,13,-0.25\n");
  const auto vib = dec.take_vibration();
  const auto aud = dec.take_acoustic();
  REQUIRE(vib.size() == 2);
  REQUIRE(aud.size() == 2);
  CHECK(vib[0].t_us == 10);
  CHECK(vib[1].t_us == 12);
  CHECK(aud[0].sample == 0.5);
  CHECK(aud[1].sample == -0.25);

  // Field-count violations for each tag.
  dec.push("V,14,0.1,0.2\n");
  dec.push("A,15,0.5,0.6\n");
  CHECK(dec.counters().malformed_lines == 3);

  // Time regression is counted and the frame dropped.
  dec.push("A,9,0.5\n");
  CHECK(dec.counters().time_regressions == 1);
  CHECK(dec.take_acoustic().empty());
}

TEST_CASE("stream decoding is chunking invariant") {
  std::string text;
  for (int i = 0; i < 500; ++i) {
    text += encode_vibration_line({i * 500, 0.001 * i, -0.002 * i, 0.98});
    if (i % 2 == 0) text += encode_acoustic_line({i * 200, 0.1 * ((i % 7) - 3)});
    if (i % 97 == 0) text += "garbage line\n";
  }

  StreamDecoder whole;
  whole.push(text);
  whole.finish();
  const auto ref_v = whole.take_vibration();
  const auto ref_a = whole.take_acoustic();

  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    StreamDecoder dec;
    std::size_t pos = 0;
    std::vector<VibrationFrame> got_v;
    std::vector<AcousticFrame> got_a;
    while (pos < text.size()) {
      const std::size_t n = std::min<std::size_t>(
          std::uniform_int_distribution<std::size_t>(0, 57)(gen), text.size() - pos);
      dec.push(std::string_view(text).substr(pos, n));
      pos += n;
      for (const auto& f : dec.take_vibration()) got_v.push_back(f);
      for (const auto& f : dec.take_acoustic()) got_a.push_back(f);
    }
    dec.finish();
    for (const auto& f : dec.take_vibration()) got_v.push_back(f);
    for (const auto& f : dec.take_acoustic()) got_a.push_back(f);

    REQUIRE(got_v.size() == ref_v.size());
    REQUIRE(got_a.size() == ref_a.size());
    for (std::size_t i = 0; i < got_v.size(); ++i) {
      CHECK(got_v[i].t_us == ref_v[i].t_us);
      CHECK(got_v[i].ax == ref_v[i].ax);
    }
    for (std::size_t i = 0; i < got_a.size(); ++i) {
      CHECK(got_a[i].t_us == ref_a[i].t_us);
      CHECK(got_a[i].sample == ref_a[i].sample);
    }
    CHECK(dec.counters().malformed_lines == whole.counters().malformed_lines);
  }
}

TEST_CASE("encoded lines round-trip at full precision") {
  StreamDecoder dec;
  const VibrationFrame v{123456789, 0.1234567890123456, -1.0 / 3.0, 0.98765432109876};
  const AcousticFrame a{987654321, -0.7071067811865476};
  dec.push(encode_vibration_line(v));
  dec.push(encode_acoustic_line(a));
  const auto vibs = dec.take_vibration();
  const auto auds = dec.take_acoustic();
  REQUIRE(vibs.size() == 1);
  REQUIRE(auds.size() == 1);
  CHECK(vibs[0].ax == v.ax);
  CHECK(vibs[0].ay == v.ay);
  CHECK(vibs[0].az == v.az);
  CHECK(auds[0].sample == a.sample);
}
