#include "cinescript/errors.hpp"

namespace cine {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::SyntaxError: return "syntax_error";
    case ErrorCode::SchemaError: return "schema_error";
    case ErrorCode::InvariantError: return "invariant_error";
    case ErrorCode::InvalidConfig: return "invalid_config";
    case ErrorCode::RangeError: return "range_error";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::UsageError: return "usage_error";
    case ErrorCode::DegenerateGroup: return "degenerate_group";
    case ErrorCode::ZeroVector: return "zero_vector";
    case ErrorCode::DimMismatch: return "dim_mismatch";
    case ErrorCode::MissingInstruction: return "missing_instruction";
    case ErrorCode::NoFramesInIntervals: return "no_frames_in_intervals";
    case ErrorCode::NoFrames: return "no_frames";
    case ErrorCode::UnknownShot: return "unknown_shot";
    case ErrorCode::UnplannableShot: return "unplannable_shot";
    case ErrorCode::GeneratorError: return "generator_error";
    case ErrorCode::MalformedDraft: return "malformed_draft";
    case ErrorCode::VideoGenError: return "video_gen_error";
    case ErrorCode::MediaError: return "media_error";
    case ErrorCode::MissingSlot: return "missing_slot";
    case ErrorCode::NoJsonFound: return "no_json_found";
    case ErrorCode::UnknownDimension: return "unknown_dimension";
    case ErrorCode::MissingDimension: return "missing_dimension";
    case ErrorCode::ScoreOutOfRange: return "score_out_of_range";
    case ErrorCode::NonIntegerScore: return "non_integer_score";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::MixedRubrics: return "mixed_rubrics";
    case ErrorCode::ServiceError: return "service_error";
    case ErrorCode::ProtocolError: return "protocol_error";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

}  // namespace cine
