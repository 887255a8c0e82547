#include "printmon/jsonl.hpp"

#include <cstdio>

namespace printmon {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string feature_jsonl(const FeatureVector& fv) {
  std::string out = "{\"t_us\":" + std::to_string(fv.start_time_us);
  out += ",\"channel\":\"" + fv.channel_id + "\"";
  out += ",\"n\":" + std::to_string(fv.n);
  out += ",\"mean\":" + fmt_double(fv.mean);
  out += ",\"std\":" + fmt_double(fv.std);
  out += ",\"rms\":" + fmt_double(fv.rms);
  out += ",\"cf\":" + fmt_double(fv.cf);
  out += ",\"ki\":" + fmt_double(fv.ki);
  out += fv.degenerate ? ",\"degenerate\":true}" : ",\"degenerate\":false}";
  return out;
}

std::string event_jsonl(const ConditionEvent& ev) {
  std::string out = "{\"t_us\":" + std::to_string(ev.time_us);
  out += ",\"kind\":\"" + std::string(to_string(ev.kind)) + "\"";
  out += ",\"channel\":\"" + ev.channel + "\"";
  out += ",\"from\":\"" + ev.from + "\"";
  out += ",\"to\":\"" + ev.to + "\"";
  out += ",\"evidence\":" + feature_jsonl(ev.evidence);
  if (ev.harmonics) {
    out += ",\"harmonics\":" + harmonic_report_json(*ev.harmonics);
  }
  out += "}";
  return out;
}

std::string harmonic_report_json(const HarmonicReport& report) {
  std::string out = "{\"fundamental_hz\":" + fmt_double(report.fundamental_hz);
  out += ",\"confidence\":" + fmt_double(report.confidence);
  out += ",\"harmonics\":[";
  for (std::size_t i = 0; i < report.harmonics.size(); ++i) {
    const auto& h = report.harmonics[i];
    if (i) out += ",";
    out += "{\"order\":" + std::to_string(h.order);
    out += ",\"freq_hz\":" + fmt_double(h.freq_hz);
    out += ",\"magnitude_db\":" + fmt_double(h.magnitude_db) + "}";
  }
  out += "]}";
  return out;
}

}  // namespace printmon
