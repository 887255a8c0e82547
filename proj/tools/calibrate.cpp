// Regenerates the default classifier thresholds from the simulator's labeled
// scenarios and prints them in the `key = value` dialect. The shipped
// defaults in ThresholdConfig::defaults() are this tool's output.

#include <cmath>
#include <cstdio>
#include <vector>

#include "printmon/pipeline.hpp"

int main() {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  const std::vector<double> snrs = {INFINITY, 20.0, 10.0};

  const printmon::ThresholdConfig cfg =
      printmon::calibrate_thresholds(seeds, snrs, 8.0);
  std::fputs(cfg.to_config().serialize().c_str(), stdout);
  return 0;
}
