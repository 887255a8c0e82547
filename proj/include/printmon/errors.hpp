#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace printmon {

enum class Errc {
  // signal
  TooShort,
  NonFiniteSample,
  InvalidChannel,
  NyquistViolation,
  InvalidWindowing,
  // preprocess
  InvalidBand,
  UnrealizableSpec,
  // features
  ZeroRms,
  ZeroVariance,
  // spectral
  InconsistentWindows,
  NoSeries,
  EmptySpectrum,
  // classify
  DegenerateInput,
  MisalignedWindows,
  // simulate
  AliasedTone,
  InvalidScenario,
  // ingest
  MalformedHeader,
  UnsupportedFormat,
  TruncatedData,
  BadHeader,
  NonMonotonicTime,
  UnparsableRow,
  OutOfRange,
  // config / io
  BadConfig,
  IoError,
};

const char* errc_name(Errc code);

/// Library-wide exception. `where()` carries a sample index or line number
/// for errors that report a position, -1 otherwise.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message, std::int64_t where = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        where_(where) {}

  Errc code() const noexcept { return code_; }
  std::int64_t where() const noexcept { return where_; }

private:
  Errc code_;
  std::int64_t where_;
};

}  // namespace printmon
