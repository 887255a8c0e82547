#pragma once

#include <string>

#include "printmon/classify.hpp"
#include "printmon/features.hpp"

namespace printmon {

/// One JSON object per line; floats at 17 significant digits so 64-bit
/// values round-trip across tools.
std::string feature_jsonl(const FeatureVector& fv);
std::string event_jsonl(const ConditionEvent& ev);
std::string harmonic_report_json(const HarmonicReport& report);

}  // namespace printmon
