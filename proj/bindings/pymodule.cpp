// Python bindings for the core analysis operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "printmon/classify.hpp"
#include "printmon/features.hpp"
#include "printmon/ingest.hpp"
#include "printmon/pipeline.hpp"
#include "printmon/preprocess.hpp"
#include "printmon/simulate.hpp"
#include "printmon/spectral.hpp"

namespace py = pybind11;
using namespace printmon;

namespace {

SignalWindow window_from(const std::vector<double>& samples, double rate_hz,
                         std::int64_t start_us, bool acoustic) {
  const ChannelConfig cfg = acoustic ? ChannelConfig::acoustic(rate_hz)
                                     : ChannelConfig::accel(Axis::X, rate_hz);
  return make_window(cfg, start_us, samples);
}

py::dict feature_dict(const FeatureVector& fv) {
  py::dict d;
  d["t_us"] = fv.start_time_us;
  d["channel"] = fv.channel_id;
  d["n"] = fv.n;
  d["mean"] = fv.mean;
  d["std"] = fv.std;
  d["rms"] = fv.rms;
  d["cf"] = fv.cf;
  d["ki"] = fv.ki;
  d["energy"] = fv.energy;
  d["degenerate"] = fv.degenerate;
  return d;
}

}  // namespace

PYBIND11_MODULE(printmon, m) {
  m.doc() = "FDM printer vibration/acoustic monitoring toolkit";

  py::register_exception<Error>(m, "PrintmonError");

  // ---- features ----
  m.def(
      "extract_features",
      [](const std::vector<double>& samples, double rate_hz, bool acoustic,
         std::int64_t start_us) {
        return feature_dict(
            extract_features(window_from(samples, rate_hz, start_us, acoustic)));
      },
      py::arg("samples"), py::arg("rate_hz"), py::arg("acoustic") = true,
      py::arg("start_us") = 0,
      "Mean, std, RMS, peak-to-valley crest factor, and kurtosis index of one "
      "window.");

  // ---- preprocess ----
  py::class_<BandPassSpec>(m, "BandPassSpec")
      .def(py::init<>())
      .def_readwrite("low_cut_hz", &BandPassSpec::low_cut_hz)
      .def_readwrite("high_cut_hz", &BandPassSpec::high_cut_hz)
      .def_readwrite("transition_width_hz", &BandPassSpec::transition_width_hz)
      .def_readwrite("stopband_atten_db", &BandPassSpec::stopband_atten_db)
      .def_readwrite("max_taps", &BandPassSpec::max_taps);

  py::class_<StreamingFilter>(m, "StreamingFilter")
      .def("filter",
           [](StreamingFilter& f, const std::vector<double>& x) {
             return f.filter(x);
           })
      .def("reset", &StreamingFilter::reset)
      .def_property_readonly("tap_count", &StreamingFilter::tap_count)
      .def_property_readonly("group_delay", &StreamingFilter::group_delay)
      .def("response_at", &StreamingFilter::response_at, py::arg("freq_hz"),
           py::arg("sample_rate_hz"));

  m.def("design_band_pass", &design_band_pass, py::arg("spec"),
        py::arg("sample_rate_hz"),
        "Linear-phase Kaiser-windowed FIR band-pass (taps forced odd, DC "
        "nulled).");

  m.def(
      "remove_dc",
      [](const std::vector<double>& samples, double rate_hz) {
        return remove_dc(window_from(samples, rate_hz, 0, false)).samples;
      },
      py::arg("samples"), py::arg("rate_hz") = kDefaultAccelRateHz);

  // ---- spectral ----
  m.def(
      "magnitude_spectrum",
      [](const std::vector<double>& samples, double rate_hz, bool hann) {
        const Spectrum s = magnitude_spectrum(window_from(samples, rate_hz, 0, true),
                                              hann ? Taper::Hann : Taper::Rectangular);
        py::dict d;
        d["bin_hz"] = s.bin_hz;
        d["magnitudes"] = s.magnitudes;
        d["fft_len"] = s.fft_len;
        return d;
      },
      py::arg("samples"), py::arg("rate_hz"), py::arg("hann") = true,
      "One-sided amplitude-calibrated magnitude spectrum.");

  m.def(
      "band_energy_ratio",
      [](const std::vector<double>& samples, double rate_hz, double lo, double hi,
         bool hann) {
        return band_energy_ratio(
            magnitude_spectrum(window_from(samples, rate_hz, 0, true),
                               hann ? Taper::Hann : Taper::Rectangular),
            lo, hi);
      },
      py::arg("samples"), py::arg("rate_hz"), py::arg("band_low_hz"),
      py::arg("band_high_hz"), py::arg("hann") = true);

  m.def(
      "detect_harmonics",
      [](const std::vector<double>& samples, double rate_hz, int max_order,
         double tolerance_bins) {
        const Spectrum s =
            magnitude_spectrum(window_from(samples, rate_hz, 0, true), Taper::Hann);
        const auto peaks = find_peaks(s);
        const HarmonicReport r =
            detect_harmonic_series(peaks, s.bin_hz, max_order, tolerance_bins);
        py::dict d;
        d["fundamental_hz"] = r.fundamental_hz;
        d["confidence"] = r.confidence;
        py::list hs;
        for (const auto& h : r.harmonics) {
          py::dict hd;
          hd["order"] = h.order;
          hd["freq_hz"] = h.freq_hz;
          hd["magnitude_db"] = h.magnitude_db;
          hs.append(hd);
        }
        d["harmonics"] = hs;
        return d;
      },
      py::arg("samples"), py::arg("rate_hz"),
      py::arg("max_order") = kDefaultHarmonicMaxOrder,
      py::arg("tolerance_bins") = kDefaultHarmonicToleranceBins,
      "Fundamental + harmonic series from one window's spectrum.");

  // ---- simulate ----
  m.def("scenario_presets", &ScenarioSpec::preset_names);

  m.def(
      "render_scenario",
      [](const std::string& preset, double duration_s, std::uint64_t seed,
         std::optional<double> snr_db) {
        ScenarioSpec spec = ScenarioSpec::preset(preset);
        spec.duration_s = duration_s;
        spec.seed = seed;
        if (snr_db) spec.snr_db = *snr_db;
        const LabeledRecording rec = render_scenario(spec);
        py::dict d;
        d["accel_rate_hz"] = rec.accel_rate_hz;
        d["acoustic_rate_hz"] = rec.acoustic_rate_hz;
        d["accel_x"] = rec.accel[0];
        d["accel_y"] = rec.accel[1];
        d["accel_z"] = rec.accel[2];
        d["acoustic"] = rec.acoustic;
        py::list labels;
        for (const auto& l : rec.labels) {
          py::dict ld;
          ld["start_us"] = l.start_us;
          ld["end_us"] = l.end_us;
          ld["state"] = l.state;
          ld["motion"] = l.motion;
          labels.append(ld);
        }
        d["labels"] = labels;
        return d;
      },
      py::arg("preset"), py::arg("duration_s") = 8.0, py::arg("seed") = 1,
      py::arg("snr_db") = std::nullopt,
      "Render a labeled synthetic scenario to sample arrays plus labels.");

  // ---- classify ----
  m.def(
      "classify_state",
      [](const std::vector<double>& samples, double rate_hz) {
        PipelineConfig pcfg;
        py::list out;
        for (const auto& w : acoustic_windows(samples, rate_hz, pcfg)) {
          if (w.transient) continue;
          const FeatureVector fv = extract_features(w);
          py::dict d;
          d["t_us"] = fv.start_time_us;
          if (fv.degenerate) {
            d["state"] = "degenerate";
            d["score"] = 0.0;
          } else {
            const auto [state, score] =
                classify_state(fv, ThresholdConfig::defaults());
            d["state"] = to_string(state);
            d["score"] = score;
          }
          out.append(d);
        }
        return out;
      },
      py::arg("samples"), py::arg("rate_hz") = kDefaultAcousticRateHz,
      "Per-window machine state over the default conditioned pipeline.");

  m.def(
      "classify_motion",
      [](const std::vector<double>& x, const std::vector<double>& y,
         double rate_hz) {
        PipelineConfig pcfg;
        const auto wx = accel_windows(x, rate_hz, pcfg);
        const auto wy = accel_windows(y, rate_hz, pcfg);
        const ThresholdConfig cfg = ThresholdConfig::defaults();
        py::list out;
        for (std::size_t i = 0; i < std::min(wx.size(), wy.size()); ++i) {
          const FeatureVector fx = extract_features(wx[i]);
          const FeatureVector fy = extract_features(wy[i]);
          py::dict d;
          d["t_us"] = fx.start_time_us;
          d["motion"] =
              to_string(classify_motion(fx, fy, reversal_rate(wx[i], wy[i]), cfg));
          out.append(d);
        }
        return out;
      },
      py::arg("accel_x"), py::arg("accel_y"), py::arg("rate_hz") = kDefaultAccelRateHz,
      "Per-window motion regime for an accelerometer X/Y pair.");

  // ---- ingest ----
  m.def(
      "read_wav",
      [](const std::string& path) {
        const WavData w = read_wav(path);
        return py::make_tuple(w.channel.sample_rate_hz, w.samples);
      },
      py::arg("path"));
  m.def(
      "write_wav",
      [](const std::string& path, double rate_hz, const std::vector<double>& samples) {
        write_wav(path, ChannelConfig::acoustic(rate_hz), samples);
      },
      py::arg("path"), py::arg("rate_hz"), py::arg("samples"));
}
