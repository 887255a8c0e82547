// printmon: streaming vibration/acoustic analysis for FDM printers.
//
// Subcommands: simulate, features, spectrogram, harmonics, monitor.
// Exit codes: 0 success, 2 usage, 3 write I/O, 4 malformed input,
// 5 analysis found nothing.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "printmon/config.hpp"
#include "printmon/ingest.hpp"
#include "printmon/jsonl.hpp"
#include "printmon/pipeline.hpp"
#include "printmon/simulate.hpp"
#include "printmon/spectral.hpp"

namespace fs = std::filesystem;
using namespace printmon;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitWriteIo = 3;
constexpr int kExitBadInput = 4;
constexpr int kExitEmptyAnalysis = 5;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::IoError:
      return kExitWriteIo;
    case Errc::MalformedHeader:
    case Errc::UnsupportedFormat:
    case Errc::TruncatedData:
    case Errc::BadHeader:
    case Errc::NonMonotonicTime:
    case Errc::UnparsableRow:
    case Errc::TooShort:
    case Errc::NonFiniteSample:
      return kExitBadInput;
    case Errc::NoSeries:
    case Errc::EmptySpectrum:
      return kExitEmptyAnalysis;
    default:
      return kExitUsage;
  }
}

// Effective run settings: defaults < config file < command-line flags.
struct RunConfig {
  KeyValueConfig values;

  static KeyValueConfig builtin_defaults() {
    KeyValueConfig kv;
    kv.set_int("window.accel.len", 1024);
    kv.set_int("window.accel.hop", 512);
    kv.set_int("window.acoustic.len", 2048);
    kv.set_int("window.acoustic.hop", 1024);
    kv.set("filter.acoustic.enabled", "true");
    kv.set_double("filter.acoustic.low_hz", 1.0);
    kv.set_double("filter.acoustic.high_hz", 2499.0);
    kv.set_double("filter.acoustic.transition_hz", 50.0);
    kv.set_double("filter.acoustic.atten_db", 60.0);
    kv.set_int("filter.acoustic.max_taps", 8192);
    kv.set_double("rate.accel_hz", kDefaultAccelRateHz);
    kv.set_double("rate.acoustic_hz", kDefaultAcousticRateHz);
    kv.merge_from(ThresholdConfig::defaults().to_config());
    return kv;
  }

  static RunConfig load(const std::string& config_path,
                        const KeyValueConfig& flag_overrides) {
    RunConfig rc;
    rc.values = builtin_defaults();
    if (!config_path.empty()) {
      rc.values.merge_from(KeyValueConfig::parse_file(config_path));
    }
    rc.values.merge_from(flag_overrides);
    return rc;
  }

  PipelineConfig pipeline() const {
    PipelineConfig cfg;
    cfg.accel_window_len = static_cast<std::size_t>(values.get_int("window.accel.len"));
    cfg.accel_hop_len = static_cast<std::size_t>(values.get_int("window.accel.hop"));
    cfg.acoustic_window_len =
        static_cast<std::size_t>(values.get_int("window.acoustic.len"));
    cfg.acoustic_hop_len =
        static_cast<std::size_t>(values.get_int("window.acoustic.hop"));
    cfg.bandpass_acoustic = values.get_bool("filter.acoustic.enabled");
    cfg.acoustic_band.low_cut_hz = values.get_double("filter.acoustic.low_hz");
    cfg.acoustic_band.high_cut_hz = values.get_double("filter.acoustic.high_hz");
    cfg.acoustic_band.transition_width_hz =
        values.get_double("filter.acoustic.transition_hz");
    cfg.acoustic_band.stopband_atten_db = values.get_double("filter.acoustic.atten_db");
    cfg.acoustic_band.max_taps =
        static_cast<std::size_t>(values.get_int("filter.acoustic.max_taps"));
    cfg.thresholds = ThresholdConfig::from_config(values);
    return cfg;
  }
};

void print_effective_config(const RunConfig& rc) {
  std::fputs(rc.values.serialize().c_str(), stdout);
}

// ---- simulate ----

int cmd_simulate(const std::string& scenario, const std::string& spec_file,
                 std::optional<double> duration, std::optional<double> snr,
                 std::optional<std::int64_t> seed, const std::string& out_dir) {
  ScenarioSpec spec;
  if (!spec_file.empty()) {
    spec = ScenarioSpec::from_config(KeyValueConfig::parse_file(spec_file));
  } else {
    spec = ScenarioSpec::preset(scenario);
  }
  if (duration) spec.duration_s = *duration;
  if (snr) spec.snr_db = *snr;
  if (seed) spec.seed = static_cast<std::uint64_t>(*seed);
  spec.validate();

  const LabeledRecording rec = render_scenario(spec);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path dir(out_dir);
  write_wav(dir / "acoustic.wav", ChannelConfig::acoustic(rec.acoustic_rate_hz),
            rec.acoustic);
  write_accel_csv(dir / "accel.csv", rec.accel, rec.accel_rate_hz);
  write_labels_jsonl(dir / "labels.jsonl", rec.labels);

  std::ofstream conf(dir / "scenario.conf");
  if (!conf || !(conf << spec.to_config().serialize())) {
    throw Error(Errc::IoError, "cannot write scenario.conf");
  }
  return 0;
}

// ---- features ----

int cmd_features(const std::string& in_path, std::optional<std::int64_t> window,
                 std::optional<std::int64_t> hop, const std::string& out_path,
                 const RunConfig& rc) {
  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (out_path != "-") {
    file_out.open(out_path);
    if (!file_out) throw Error(Errc::IoError, "cannot open " + out_path);
    out = &file_out;
  }

  auto emit = [&](const ChannelConfig& channel, std::span<const double> samples,
                  std::size_t wlen, std::size_t hlen, std::int64_t start_us) {
    Windower w(channel, wlen, hlen);
    w.reset(start_us);
    for (const auto& win : w.push_and_emit(samples)) {
      (*out) << feature_jsonl(extract_features(win)) << '\n';
    }
  };

  const fs::path p(in_path);
  if (p.extension() == ".wav") {
    const WavData wav = read_wav(p);
    const auto wlen = static_cast<std::size_t>(
        window.value_or(rc.values.get_int("window.acoustic.len")));
    const auto hlen = static_cast<std::size_t>(
        hop.value_or(rc.values.get_int("window.acoustic.hop")));
    emit(wav.channel, wav.samples, wlen, hlen, 0);
  } else if (p.extension() == ".csv") {
    const AccelCsv csv = read_accel_csv(p);
    const auto wlen = static_cast<std::size_t>(
        window.value_or(rc.values.get_int("window.accel.len")));
    const auto hlen = static_cast<std::size_t>(
        hop.value_or(rc.values.get_int("window.accel.hop")));
    // Window-major interleave keeps the output time ordered.
    std::vector<std::vector<SignalWindow>> per_axis;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      Windower w(csv.channels[axis], wlen, hlen);
      w.reset(csv.timestamps_us.front());
      per_axis.push_back(w.push_and_emit(csv.samples[axis]));
    }
    for (std::size_t i = 0; i < per_axis[0].size(); ++i) {
      for (std::size_t axis = 0; axis < 3; ++axis) {
        (*out) << feature_jsonl(extract_features(per_axis[axis][i])) << '\n';
      }
    }
  } else {
    throw Error(Errc::UnsupportedFormat, "input must be .wav or .csv, got " + in_path);
  }
  out->flush();
  if (!*out) throw Error(Errc::IoError, "write failed");
  return 0;
}

// ---- spectrogram ----

int cmd_spectrogram(const std::string& in_path, const std::string& out_csv,
                    const std::string& pgm_path, const std::string& band,
                    const RunConfig& rc) {
  const WavData wav = read_wav(in_path);
  const auto wlen = static_cast<std::size_t>(rc.values.get_int("window.acoustic.len"));
  const auto hlen = static_cast<std::size_t>(rc.values.get_int("window.acoustic.hop"));

  Windower w(wav.channel, wlen, hlen);
  w.reset(0);
  const auto windows = w.push_and_emit(wav.samples);
  if (windows.empty()) {
    throw Error(Errc::EmptySpectrum, "input shorter than one analysis window");
  }
  const Spectrogram sg = make_spectrogram(windows, Taper::Hann);

  std::optional<std::vector<double>> ratios;
  if (!band.empty()) {
    const auto comma = band.find(',');
    if (comma == std::string::npos) {
      throw Error(Errc::BadConfig, "--band expects lo,hi");
    }
    const double lo = std::stod(band.substr(0, comma));
    const double hi = std::stod(band.substr(comma + 1));
    ratios.emplace();
    for (const auto& win : windows) {
      ratios->push_back(
          band_energy_ratio(magnitude_spectrum(win, Taper::Hann), lo, hi));
    }
  }
  write_spectrogram_csv(sg, out_csv, ratios ? &*ratios : nullptr);
  if (!pgm_path.empty()) write_spectrogram_pgm(sg, pgm_path);
  return 0;
}

// ---- harmonics ----

int cmd_harmonics(const std::string& in_path, int max_order) {
  const WavData wav = read_wav(in_path);
  const std::size_t wlen = std::min<std::size_t>(4096, wav.samples.size());
  if (wlen < 2) throw Error(Errc::TooShort, "input too short for analysis");

  Windower w(wav.channel, wlen, std::max<std::size_t>(1, wlen / 2));
  w.reset(0);
  const auto windows = w.push_and_emit(wav.samples);
  if (windows.empty()) {
    throw Error(Errc::EmptySpectrum, "no complete analysis window");
  }

  // Averaged magnitude spectrum tames the noise floor before peak picking.
  Spectrum avg;
  std::size_t count = 0;
  for (const auto& win : windows) {
    Spectrum s = magnitude_spectrum(win, Taper::Hann);
    if (count == 0) {
      avg = std::move(s);
    } else {
      for (std::size_t k = 0; k < avg.magnitudes.size(); ++k) {
        avg.magnitudes[k] += s.magnitudes[k];
      }
    }
    ++count;
  }
  for (double& m : avg.magnitudes) m /= static_cast<double>(count);

  const auto peaks = find_peaks(avg);
  const HarmonicReport report = detect_harmonic_series(peaks, avg.bin_hz, max_order);
  std::printf("%s\n", harmonic_report_json(report).c_str());
  return 0;
}

// ---- monitor ----

class EventWriter {
public:
  explicit EventWriter(const std::string& out_path) {
    if (out_path != "-") {
      file_.open(out_path);
      if (!file_) throw Error(Errc::IoError, "cannot open " + out_path);
    }
  }
  void write(const std::vector<ConditionEvent>& events) {
    std::ostream& out = file_.is_open() ? file_ : std::cout;
    for (const auto& ev : events) {
      out << event_jsonl(ev) << '\n';
      out.flush();  // confirmed events must survive an interrupted run
    }
    if (!out) throw Error(Errc::IoError, "write failed");
  }

private:
  std::ofstream file_;
};

int cmd_monitor(const std::string& accel_src, const std::string& audio_src,
                const std::string& out_path, const RunConfig& rc) {
  const PipelineConfig pcfg = rc.pipeline();
  double accel_rate = rc.values.get_double("rate.accel_hz");
  double acoustic_rate = rc.values.get_double("rate.acoustic_hz");

  // File sources are loaded up front; their header/inferred rates win.
  std::optional<AccelCsv> accel_file;
  std::optional<WavData> audio_file;
  if (accel_src != "-") {
    accel_file = read_accel_csv(accel_src);
    accel_rate = accel_file->inferred_rate_hz;
  }
  if (audio_src != "-") {
    audio_file = read_wav(audio_src);
    acoustic_rate = audio_file->channel.sample_rate_hz;
  }

  MonitorPipeline pipeline(pcfg, accel_rate, acoustic_rate);
  EventWriter writer(out_path);

  if (accel_file) {
    pipeline.push_accel(accel_file->timestamps_us.front(), accel_file->samples[0],
                        accel_file->samples[1]);
    writer.write(pipeline.drain());
  }
  if (audio_file) {
    pipeline.push_acoustic(0, audio_file->samples);
    writer.write(pipeline.drain());
  }

  if (accel_src == "-" || audio_src == "-") {
    StreamDecoder decoder;
    char buf[65536];
    while (std::cin.read(buf, sizeof buf) || std::cin.gcount() > 0) {
      decoder.push(std::string_view(buf, static_cast<std::size_t>(std::cin.gcount())));
      const auto vib = decoder.take_vibration();
      const auto aud = decoder.take_acoustic();
      if (accel_src == "-" && !vib.empty()) {
        std::vector<double> xs(vib.size()), ys(vib.size());
        for (std::size_t i = 0; i < vib.size(); ++i) {
          xs[i] = vib[i].ax;
          ys[i] = vib[i].ay;
        }
        pipeline.push_accel(vib.front().t_us, xs, ys);
      }
      if (audio_src == "-" && !aud.empty()) {
        std::vector<double> samples(aud.size());
        for (std::size_t i = 0; i < aud.size(); ++i) samples[i] = aud[i].sample;
        pipeline.push_acoustic(aud.front().t_us, samples);
      }
      writer.write(pipeline.drain());
    }
    decoder.finish();
    const auto& counters = decoder.counters();
    if (counters.malformed_lines > 0 || counters.time_regressions > 0) {
      std::fprintf(stderr, "stream: %llu malformed lines, %llu time regressions\n",
                   static_cast<unsigned long long>(counters.malformed_lines),
                   static_cast<unsigned long long>(counters.time_regressions));
    }
  }

  writer.write(pipeline.finish());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-situ FDM printer monitoring: simulate, analyze, classify"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Render a labeled synthetic scenario");
  std::string sim_scenario;
  std::string sim_spec_file;
  std::string sim_out;
  std::optional<double> sim_duration;
  std::optional<double> sim_snr;
  std::optional<std::int64_t> sim_seed;
  sim->add_option("--scenario", sim_scenario, "Preset scenario name");
  sim->add_option("--spec", sim_spec_file, "Scenario spec file (key = value)");
  sim->add_option("--duration", sim_duration, "Duration in seconds");
  sim->add_option("--snr", sim_snr, "Signal-to-noise ratio in dB");
  sim->add_option("--seed", sim_seed, "64-bit seed");
  sim->add_option("--out", sim_out, "Output directory")->required();

  // features
  auto* feat = app.add_subcommand("features", "Per-window time-domain features");
  std::string feat_in;
  std::string feat_out = "-";
  std::string feat_config;
  std::optional<std::int64_t> feat_window, feat_hop;
  bool feat_print_config = false;
  feat->add_option("--in", feat_in, "Input .wav or .csv")->required();
  feat->add_option("--window", feat_window, "Window length in samples");
  feat->add_option("--hop", feat_hop, "Hop length in samples");
  feat->add_option("--out", feat_out, "Output JSONL path or -");
  feat->add_option("--config", feat_config, "Run config file");
  feat->add_flag("--print-config", feat_print_config, "Dump effective config");

  // spectrogram
  auto* spec = app.add_subcommand("spectrogram", "STFT magnitude matrix export");
  std::string spec_in, spec_out, spec_pgm, spec_band, spec_config;
  bool spec_print_config = false;
  spec->add_option("--in", spec_in, "Input .wav")->required();
  spec->add_option("--out", spec_out, "Output CSV path")->required();
  spec->add_option("--pgm", spec_pgm, "Optional grayscale PGM path");
  spec->add_option("--band", spec_band, "lo,hi Hz: append band energy ratio column");
  spec->add_option("--config", spec_config, "Run config file");
  spec->add_flag("--print-config", spec_print_config, "Dump effective config");

  // harmonics
  auto* harm = app.add_subcommand("harmonics", "Fundamental + harmonic series report");
  std::string harm_in;
  int harm_max_order = kDefaultHarmonicMaxOrder;
  harm->add_option("--in", harm_in, "Input .wav")->required();
  harm->add_option("--max-order", harm_max_order, "Highest harmonic order to match");

  // monitor
  auto* mon = app.add_subcommand("monitor", "Run the full monitoring pipeline");
  std::string mon_accel, mon_audio, mon_out, mon_config;
  bool mon_print_config = false;
  mon->add_option("--accel", mon_accel, "Accel CSV path or - (stream on stdin)")
      ->required();
  mon->add_option("--audio", mon_audio, "Acoustic WAV path or - (stream on stdin)")
      ->required();
  mon->add_option("--out", mon_out, "Events JSONL path or -")->required();
  mon->add_option("--config", mon_config, "Run config file");
  mon->add_flag("--print-config", mon_print_config, "Dump effective config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (sim->parsed()) {
      if (sim_scenario.empty() == sim_spec_file.empty()) {
        std::fprintf(stderr, "simulate: exactly one of --scenario/--spec required\n");
        return kExitUsage;
      }
      return cmd_simulate(sim_scenario, sim_spec_file, sim_duration, sim_snr,
                          sim_seed, sim_out);
    }
    if (feat->parsed()) {
      const RunConfig rc = RunConfig::load(feat_config, {});
      if (feat_print_config) print_effective_config(rc);
      if ((feat_window && *feat_window < 2) || (feat_hop && *feat_hop < 1)) {
        std::fprintf(stderr, "features: invalid --window/--hop\n");
        return kExitUsage;
      }
      return cmd_features(feat_in, feat_window, feat_hop, feat_out, rc);
    }
    if (spec->parsed()) {
      const RunConfig rc = RunConfig::load(spec_config, {});
      if (spec_print_config) print_effective_config(rc);
      return cmd_spectrogram(spec_in, spec_out, spec_pgm, spec_band, rc);
    }
    if (harm->parsed()) {
      return cmd_harmonics(harm_in, harm_max_order);
    }
    if (mon->parsed()) {
      const RunConfig rc = RunConfig::load(mon_config, {});
      if (mon_print_config) print_effective_config(rc);
      return cmd_monitor(mon_accel, mon_audio, mon_out, rc);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "printmon: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "printmon: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
