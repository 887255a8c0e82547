#include "printmon/ingest.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace printmon {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

bool parse_int64(std::string_view s, std::int64_t& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  // strtod needs a terminated buffer; fields are short.
  char buf[64];
  if (s.size() >= sizeof buf) return false;
  std::memcpy(buf, s.data(), s.size());
  buf[s.size()] = '\0';
  char* endp = nullptr;
  errno = 0;
  out = std::strtod(buf, &endp);
  return endp == buf + s.size() && errno == 0 && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

// ---- WAV ----

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 44) {
    throw Error(Errc::MalformedHeader, "file shorter than a canonical WAV header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

  if (std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0 ||
      std::memcmp(p + 12, "fmt ", 4) != 0 || std::memcmp(p + 36, "data", 4) != 0) {
    throw Error(Errc::MalformedHeader, "missing RIFF/WAVE/fmt/data markers");
  }
  const std::uint32_t fmt_size = get_u32(p + 16);
  const std::uint16_t audio_format = get_u16(p + 20);
  const std::uint16_t num_channels = get_u16(p + 22);
  const std::uint32_t sample_rate = get_u32(p + 24);
  const std::uint16_t block_align = get_u16(p + 32);
  const std::uint16_t bits = get_u16(p + 34);
  const std::uint32_t data_size = get_u32(p + 40);

  if (fmt_size != 16) {
    throw Error(Errc::MalformedHeader, "non-canonical fmt chunk size");
  }
  if (audio_format != 1 || num_channels != 1 || bits != 16 || block_align != 2) {
    throw Error(Errc::UnsupportedFormat, "only PCM16 mono is supported");
  }
  if (sample_rate == 0) {
    throw Error(Errc::MalformedHeader, "zero sample rate");
  }
  if (data_size % 2 != 0 || 44 + static_cast<std::size_t>(data_size) > bytes.size()) {
    throw Error(Errc::TruncatedData, "declared data size exceeds file contents");
  }

  WavData out;
  out.channel = ChannelConfig::acoustic(static_cast<double>(sample_rate));
  const std::size_t count = data_size / 2;
  out.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint16_t raw = get_u16(p + 44 + 2 * i);
    const std::int16_t code = static_cast<std::int16_t>(raw);
    out.samples[i] = static_cast<double>(code) / 32768.0;
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const ChannelConfig& config,
               std::span<const double> samples, bool clamp) {
  config.validate();
  const std::uint32_t rate = static_cast<std::uint32_t>(std::llround(config.sample_rate_hz));
  const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 2);

  std::string bytes;
  bytes.reserve(44 + data_size);
  bytes += "RIFF";
  put_u32(bytes, 36 + data_size);
  bytes += "WAVE";
  bytes += "fmt ";
  put_u32(bytes, 16);
  put_u16(bytes, 1);  // PCM
  put_u16(bytes, 1);  // mono
  put_u32(bytes, rate);
  put_u32(bytes, rate * 2);  // byte rate
  put_u16(bytes, 2);         // block align
  put_u16(bytes, 16);        // bits
  bytes += "data";
  put_u32(bytes, data_size);

  for (std::size_t i = 0; i < samples.size(); ++i) {
    // Round half away from zero, then clamp to full scale.
    double scaled = samples[i] * 32768.0;
    double rounded = scaled >= 0.0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
    if (rounded > 32767.0 || rounded < -32768.0) {
      if (!clamp) {
        throw Error(Errc::OutOfRange,
                    "sample " + std::to_string(i) + " exceeds full scale",
                    static_cast<std::int64_t>(i));
      }
      rounded = std::clamp(rounded, -32768.0, 32767.0);
    }
    put_u16(bytes, static_cast<std::uint16_t>(static_cast<std::int16_t>(rounded)));
  }

  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

// ---- Accelerometer CSV ----

AccelCsv read_accel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::IoError, "cannot open " + path.string());
  }

  std::string line;
  if (!std::getline(in, line) || line != "t_us,ax_g,ay_g,az_g") {
    throw Error(Errc::BadHeader, "expected header t_us,ax_g,ay_g,az_g");
  }

  AccelCsv out;
  std::int64_t line_no = 1;
  std::int64_t prev_t = INT64_MIN;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != 4) {
      throw Error(Errc::UnparsableRow,
                  "expected 4 fields at line " + std::to_string(line_no), line_no);
    }
    std::int64_t t = 0;
    double a[3];
    if (!parse_int64(fields[0], t) || !parse_double(fields[1], a[0]) ||
        !parse_double(fields[2], a[1]) || !parse_double(fields[3], a[2])) {
      throw Error(Errc::UnparsableRow,
                  "unparsable row at line " + std::to_string(line_no), line_no);
    }
    if (t <= prev_t) {
      throw Error(Errc::NonMonotonicTime,
                  "timestamp does not increase at line " + std::to_string(line_no),
                  line_no);
    }
    prev_t = t;
    out.timestamps_us.push_back(t);
    for (int i = 0; i < 3; ++i) out.samples[static_cast<std::size_t>(i)].push_back(a[i]);
  }
  if (out.timestamps_us.size() < 2) {
    throw Error(Errc::TooShort, "need at least two rows to infer a sample rate");
  }

  std::vector<std::int64_t> deltas(out.timestamps_us.size() - 1);
  for (std::size_t i = 0; i + 1 < out.timestamps_us.size(); ++i) {
    deltas[i] = out.timestamps_us[i + 1] - out.timestamps_us[i];
  }
  std::vector<std::int64_t> sorted(deltas);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  const std::int64_t median = sorted[sorted.size() / 2];
  out.inferred_rate_hz = 1e6 / static_cast<double>(median);
  for (std::int64_t d : deltas) {
    if (std::llabs(d - median) > median / 10) {
      out.jitter_flag = true;
      break;
    }
  }

  out.channels = {ChannelConfig::accel(Axis::X, out.inferred_rate_hz),
                  ChannelConfig::accel(Axis::Y, out.inferred_rate_hz),
                  ChannelConfig::accel(Axis::Z, out.inferred_rate_hz)};
  return out;
}

void write_accel_csv(const std::filesystem::path& path,
                     const std::array<std::vector<double>, 3>& samples,
                     double rate_hz, std::int64_t start_us) {
  const std::size_t n = samples[0].size();
  if (samples[1].size() != n || samples[2].size() != n) {
    throw Error(Errc::InvalidChannel, "axis sample counts differ");
  }
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  out << "t_us,ax_g,ay_g,az_g\n";
  char buf[96];
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t t =
        start_us + static_cast<std::int64_t>(
                       std::llround(static_cast<double>(i) * 1e6 / rate_hz));
    out << t;
    for (int axis = 0; axis < 3; ++axis) {
      std::snprintf(buf, sizeof buf, "%.17g", samples[static_cast<std::size_t>(axis)][i]);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

// ---- Labels ----

void write_labels_jsonl(const std::filesystem::path& path,
                        std::span<const LabelSpan> labels) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  for (const auto& l : labels) {
    out << "{\"start_us\":" << l.start_us << ",\"end_us\":" << l.end_us
        << ",\"state\":\"" << l.state << "\",\"motion\":\"" << l.motion << "\"}\n";
  }
  if (!out) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

std::vector<LabelSpan> read_labels_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::IoError, "cannot open " + path.string());
  }
  std::vector<LabelSpan> out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("start_us") || !j.contains("end_us") ||
        !j.contains("state") || !j.contains("motion")) {
      throw Error(Errc::UnparsableRow, "bad label line " + std::to_string(line_no),
                  line_no);
    }
    LabelSpan l;
    l.start_us = j["start_us"].get<std::int64_t>();
    l.end_us = j["end_us"].get<std::int64_t>();
    l.state = j["state"].get<std::string>();
    l.motion = j["motion"].get<std::string>();
    out.push_back(std::move(l));
  }
  return out;
}

// ---- Stream protocol ----

void StreamDecoder::push(std::string_view chunk) {
  std::size_t start = 0;
  while (start < chunk.size()) {
    const std::size_t pos = chunk.find('\n', start);
    if (pos == std::string_view::npos) {
      partial_.append(chunk.substr(start));
      break;
    }
    if (partial_.empty()) {
      decode_line(chunk.substr(start, pos - start));
    } else {
      partial_.append(chunk.substr(start, pos - start));
      decode_line(partial_);
      partial_.clear();
    }
    start = pos + 1;
  }
}

void StreamDecoder::finish() {
  if (!partial_.empty()) {
    decode_line(partial_);
    partial_.clear();
  }
}

void StreamDecoder::decode_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty()) return;

  const auto fields = split_fields(line, ',');
  if (fields[0] == "V") {
    VibrationFrame f;
    if (fields.size() != 5 || !parse_int64(fields[1], f.t_us) ||
        !parse_double(fields[2], f.ax) || !parse_double(fields[3], f.ay) ||
        !parse_double(fields[4], f.az)) {
      ++counters_.malformed_lines;
      return;
    }
    if (f.t_us < last_v_us_) {
      ++counters_.time_regressions;
      return;
    }
    last_v_us_ = f.t_us;
    vibration_.push_back(f);
  } else if (fields[0] == "A") {
    AcousticFrame f;
    if (fields.size() != 3 || !parse_int64(fields[1], f.t_us) ||
        !parse_double(fields[2], f.sample)) {
      ++counters_.malformed_lines;
      return;
    }
    if (f.t_us < last_a_us_) {
      ++counters_.time_regressions;
      return;
    }
    last_a_us_ = f.t_us;
    acoustic_.push_back(f);
  } else {
    ++counters_.malformed_lines;
  }
}

std::vector<VibrationFrame> StreamDecoder::take_vibration() {
  return std::exchange(vibration_, {});
}

std::vector<AcousticFrame> StreamDecoder::take_acoustic() {
  return std::exchange(acoustic_, {});
}

std::string encode_vibration_line(const VibrationFrame& f) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "V,%lld,%.17g,%.17g,%.17g\n",
                static_cast<long long>(f.t_us), f.ax, f.ay, f.az);
  return buf;
}

std::string encode_acoustic_line(const AcousticFrame& f) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "A,%lld,%.17g\n", static_cast<long long>(f.t_us),
                f.sample);
  return buf;
}

}  // namespace printmon
