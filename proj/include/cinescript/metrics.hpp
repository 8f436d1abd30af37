#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cinescript/json.hpp"
#include "cinescript/script.hpp"

namespace cine {

struct FrameEmbedding {
  double t = 0.0;  // seconds
  std::vector<double> e;
};

// Per-frame visual embeddings plus one instruction embedding per shot.
// This module consumes embeddings; it never runs an encoder.
struct EmbeddingSeries {
  std::vector<FrameEmbedding> frames;  // times strictly increasing
  std::map<std::string, std::vector<double>> shot_instructions;
  int dim = 0;

  // JSON Lines: {"kind":"frame","t":..,"e":[..]} and
  // {"kind":"instruction","shot_id":"..","e":[..]}.  Blank lines skipped.
  static EmbeddingSeries from_jsonl(const std::string& text);
};

// a.b / (|a||b|), computed with a single square root so algebraically exact
// cases stay exact in floating point.
double cosine_sim(std::span<const double> a, std::span<const double> b);

struct ShotAlignment {
  double mean_sim = 0.0;  // 0 when no frames fall in the shot
  int frame_count = 0;
};

struct VsaResult {
  double score = 0.0;  // 100 x frame-weighted mean similarity
  std::map<std::string, ShotAlignment> per_shot;
  int frames_used = 0;
};

// Visual-script alignment: each frame inside a shot's half-open interval is
// scored against that shot's instruction embedding; frames outside every
// interval are excluded from numerator and denominator alike.
VsaResult vsa(const CinematicScript& script, const EmbeddingSeries& emb);

// 100 x mean similarity of every frame against one global text embedding.
double clip_score(const EmbeddingSeries& emb, std::span<const double> global_text);

Json vsa_json(const VsaResult& result);

}  // namespace cine
