#include "cinescript/metrics.hpp"

#include <cmath>
#include <sstream>

#include "cinescript/errors.hpp"

namespace cine {

namespace {

std::vector<double> parse_vector(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw Error(ErrorCode::SchemaError, where + ": expected a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& x : v) {
    if (!x.is_number())
      throw Error(ErrorCode::SchemaError, where + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

bool is_zero(const std::vector<double>& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

}  // namespace

EmbeddingSeries EmbeddingSeries::from_jsonl(const std::string& text) {
  EmbeddingSeries series;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = "line " + std::to_string(line_no);
    Json doc;
    try {
      doc = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::SyntaxError, where + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string())
      throw Error(ErrorCode::SchemaError, where + ": expected {kind, ...}");
    std::string kind = doc["kind"].get<std::string>();
    std::vector<double> e;
    if (doc.contains("e")) e = parse_vector(doc["e"], where + ".e");
    if (e.empty())
      throw Error(ErrorCode::SchemaError, where + ": missing embedding 'e'");
    if (is_zero(e))
      throw Error(ErrorCode::ZeroVector, where + ": zero embedding");
    if (series.dim == 0)
      series.dim = static_cast<int>(e.size());
    else if (static_cast<int>(e.size()) != series.dim)
      throw Error(ErrorCode::DimMismatch,
                  where + ": dimension " + std::to_string(e.size()) +
                      " != " + std::to_string(series.dim));

    if (kind == "frame") {
      if (!doc.contains("t") || !doc["t"].is_number())
        throw Error(ErrorCode::SchemaError, where + ": frame needs numeric 't'");
      double t = doc["t"].get<double>();
      if (!series.frames.empty() && t <= series.frames.back().t)
        throw Error(ErrorCode::InvariantError,
                    where + ": frame times must be strictly increasing");
      series.frames.push_back({t, std::move(e)});
    } else if (kind == "instruction") {
      if (!doc.contains("shot_id") || !doc["shot_id"].is_string())
        throw Error(ErrorCode::SchemaError,
                    where + ": instruction needs 'shot_id'");
      series.shot_instructions[doc["shot_id"].get<std::string>()] =
          std::move(e);
    } else {
      throw Error(ErrorCode::SchemaError, where + ": unknown kind '" + kind + "'");
    }
  }
  return series;
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimMismatch,
                "dimension mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  if (a.empty()) throw Error(ErrorCode::ZeroVector, "empty vector");
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0)
    throw Error(ErrorCode::ZeroVector, "cosine of a zero vector is undefined");
  return dot / std::sqrt(aa * bb);
}

VsaResult vsa(const CinematicScript& script, const EmbeddingSeries& emb) {
  VsaResult result;
  for (const Shot& shot : script.shots) {
    if (!emb.shot_instructions.contains(shot.id))
      throw Error(ErrorCode::MissingInstruction,
                  "no instruction embedding for shot '" + shot.id + "'");
    result.per_shot[shot.id] = ShotAlignment{};
  }

  double total_sim = 0.0;
  int total_frames = 0;
  // Fixed summation order: ascending shot index, then ascending frame time.
  for (const Shot& shot : script.shots) {
    const std::vector<double>& instruction = emb.shot_instructions.at(shot.id);
    ShotAlignment& entry = result.per_shot[shot.id];
    double shot_sum = 0.0;
    for (const FrameEmbedding& frame : emb.frames) {
      if (!shot.interval.contains(frame.t)) continue;
      shot_sum += cosine_sim(frame.e, instruction);
      ++entry.frame_count;
    }
    if (entry.frame_count > 0)
      entry.mean_sim = shot_sum / entry.frame_count;
    total_sim += shot_sum;
    total_frames += entry.frame_count;
  }

  if (total_frames == 0)
    throw Error(ErrorCode::NoFramesInIntervals,
                "no frame falls inside any shot interval");
  result.frames_used = total_frames;
  result.score = 100.0 * total_sim / static_cast<double>(total_frames);
  return result;
}

double clip_score(const EmbeddingSeries& emb,
                  std::span<const double> global_text) {
  if (emb.frames.empty())
    throw Error(ErrorCode::NoFrames, "no frames in embedding series");
  double sum = 0.0;
  for (const FrameEmbedding& frame : emb.frames)
    sum += cosine_sim(frame.e, global_text);
  return 100.0 * sum / static_cast<double>(emb.frames.size());
}

Json vsa_json(const VsaResult& result) {
  Json out = Json::object();
  out["score"] = result.score;
  out["frames_used"] = result.frames_used;
  Json per_shot = Json::object();
  for (const auto& [shot_id, entry] : result.per_shot) {
    Json s = Json::object();
    s["mean_sim"] = entry.mean_sim;
    s["frame_count"] = entry.frame_count;
    per_shot[shot_id] = std::move(s);
  }
  out["per_shot"] = std::move(per_shot);
  return out;
}

}  // namespace cine
