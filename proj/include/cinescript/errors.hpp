#pragma once

#include <stdexcept>
#include <string>

namespace cine {

// Every failure surfaced by the library maps to one of these codes.  The C
// API exposes the same numbering, so values are stable by construction.
enum class ErrorCode : int {
  Ok = 0,

  // document parsing / structure
  SyntaxError = 1,     // input is not well-formed JSON
  SchemaError = 2,     // JSON shape or field type is wrong
  InvariantError = 3,  // structurally valid but violates a script invariant

  // configuration and arguments
  InvalidConfig = 10,
  RangeError = 11,
  LengthMismatch = 12,
  UsageError = 13,

  // numeric kernels
  DegenerateGroup = 20,
  ZeroVector = 21,
  DimMismatch = 22,

  // alignment metrics
  MissingInstruction = 30,
  NoFramesInIntervals = 31,
  NoFrames = 32,

  // scene planning
  UnknownShot = 40,
  UnplannableShot = 41,

  // generation pipeline
  GeneratorError = 50,
  MalformedDraft = 51,
  VideoGenError = 52,
  MediaError = 53,

  // judge protocol
  MissingSlot = 60,
  NoJsonFound = 61,
  UnknownDimension = 62,
  MissingDimension = 63,
  ScoreOutOfRange = 64,
  NonIntegerScore = 65,
  EmptyInput = 66,
  MixedRubrics = 67,

  // transport
  ServiceError = 70,
  ProtocolError = 71,
  IoError = 72,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Error(ErrorCode code, std::string message, long detail)
      : std::runtime_error(std::move(message)), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }

  // Context-dependent payload: retry/attempt count for transport errors,
  // round index for generation errors, scene index for pipeline aborts.
  long detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  long detail_ = -1;
};

}  // namespace cine
