#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace projcap {

enum class Errc {
  ZeroVector,
  DimensionMismatch,
  ChartUndefined,
  ChartMismatch,
  IndexOutOfRange,
  EmptyMeasure,
  SingleAtom,
  SharedAtoms,
  UnsortedGrid,
  AtomCoincidence,
  TooFewPoints,
  SamplerExhausted,
  NonConvergence,
  CoincidentSamples,
  DegenerateGamma,
  EmptySet,
  LevelUnreachable,
  GridTooClose,
  InvalidArgument,
  Io,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ChartUndefined: return "ChartUndefined";
    case Errc::ChartMismatch: return "ChartMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::EmptyMeasure: return "EmptyMeasure";
    case Errc::SingleAtom: return "SingleAtom";
    case Errc::SharedAtoms: return "SharedAtoms";
    case Errc::UnsortedGrid: return "UnsortedGrid";
    case Errc::AtomCoincidence: return "AtomCoincidence";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::SamplerExhausted: return "SamplerExhausted";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::CoincidentSamples: return "CoincidentSamples";
    case Errc::DegenerateGamma: return "DegenerateGamma";
    case Errc::EmptySet: return "EmptySet";
    case Errc::LevelUnreachable: return "LevelUnreachable";
    case Errc::GridTooClose: return "GridTooClose";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace projcap
