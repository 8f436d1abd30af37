#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cinescript/errors.hpp"
#include "cinescript/metrics.hpp"
#include "cinescript/script.hpp"
#include "testutil.hpp"

using namespace cine;
using namespace testutil;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

// Independent reference: per-norm square roots instead of one combined root,
// and a frame-major accumulation order.
double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double naive_vsa(const CinematicScript& script, const EmbeddingSeries& emb) {
  double total = 0.0;
  int used = 0;
  for (const FrameEmbedding& frame : emb.frames) {
    const Shot* owner = nullptr;
    for (const Shot& shot : script.shots)
      if (frame.t >= shot.interval.start_s && frame.t < shot.interval.end_s) {
        owner = &shot;
        break;
      }
    if (!owner) continue;
    total += naive_cosine(frame.e, emb.shot_instructions.at(owner->id));
    ++used;
  }
  return 100.0 * total / used;
}

std::vector<double> random_vector(Rng& rng, int dim) {
  std::vector<double> v(static_cast<size_t>(dim));
  for (double& x : v) x = rng.real_in(-1.0, 1.0);
  v[0] += v[0] >= 0 ? 0.5 : -0.5;  // keep the vector away from zero
  return v;
}

// Shots with gaps, instructions for all of them, frames inside and outside.
struct RandomInstance {
  CinematicScript script;
  EmbeddingSeries emb;
};

RandomInstance random_instance(Rng& rng) {
  RandomInstance out;
  out.script.scene_setting = "Synthetic.";
  int n_shots = rng.int_in(1, 8);
  int dim = rng.int_in(2, 16);
  out.emb.dim = dim;
  double t = 0.0;
  for (int i = 0; i < n_shots; ++i) {
    if (rng.chance(0.4)) t += rng.real_in(0.5, 2.0);  // gap
    double dur = rng.real_in(1.0, 6.0);
    std::string id = "s" + std::to_string(i + 1);
    out.script.shots.push_back(make_shot(id, t, t + dur));
    out.emb.shot_instructions[id] = random_vector(rng, dim);
    t += dur;
  }
  int n_frames = rng.int_in(1, 64);
  double ft = -1.0;
  for (int i = 0; i < n_frames; ++i) {
    ft += rng.real_in(1e-3, (t + 2.0) / n_frames);
    out.emb.frames.push_back({ft, random_vector(rng, dim)});
  }
  // Guarantee at least one counted frame.
  const TimeInterval& first = out.script.shots[0].interval;
  bool covered = false;
  for (const FrameEmbedding& f : out.emb.frames)
    for (const Shot& s : out.script.shots)
      covered |= s.interval.contains(f.t);
  if (!covered)
    out.emb.frames[0].t = (first.start_s + first.end_s) / 2.0;
  std::sort(out.emb.frames.begin(), out.emb.frames.end(),
            [](const FrameEmbedding& a, const FrameEmbedding& b) {
              return a.t < b.t;
            });
  return out;
}

}  // namespace

TEST_CASE("alignment score matches a naive reference on random instances") {
  Rng rng(2468);
  for (int trial = 0; trial < 200; ++trial) {
    CAPTURE(trial);
    RandomInstance inst = random_instance(rng);
    VsaResult result = vsa(inst.script, inst.emb);
    double reference = naive_vsa(inst.script, inst.emb);
    CHECK(std::abs(result.score - reference) <=
          1e-9 * std::max(1.0, std::abs(reference)));

    int counted = 0;
    for (const auto& [id, entry] : result.per_shot) counted += entry.frame_count;
    CHECK(counted == result.frames_used);
    CHECK(result.per_shot.size() == inst.script.shots.size());
  }
}

TEST_CASE("worked example scores exactly 87.5") {
  CinematicScript script = parse_script(read_fixture("vsa_script.json"));
  EmbeddingSeries emb =
      EmbeddingSeries::from_jsonl(read_fixture("vsa_embeddings.jsonl"));
  // Frames: three aligned with the instruction (one merely scaled) and one
  // at cosine 1/2, so the mean is 3.5/4 and the score is exact.
  VsaResult result = vsa(script, emb);
  CHECK(result.score == 87.5);
  CHECK(result.frames_used == 4);
  CHECK(result.per_shot.at("s1").frame_count == 4);
  CHECK(result.per_shot.at("s1").mean_sim == 0.875);
}

TEST_CASE("cosine similarity is exact on clean cases") {
  std::vector<double> x = {1, 0, 0, 0};
  std::vector<double> same = {3, 0, 0, 0};
  std::vector<double> half = {1, 1, 1, 1};
  std::vector<double> orth = {0, 2, 0, 0};
  std::vector<double> anti = {-5, 0, 0, 0};
  CHECK(cosine_sim(x, x) == 1.0);
  CHECK(cosine_sim(x, same) == 1.0);
  CHECK(cosine_sim(x, half) == 0.5);
  CHECK(cosine_sim(x, orth) == 0.0);
  CHECK(cosine_sim(x, anti) == -1.0);
}

TEST_CASE("cosine similarity validates its operands") {
  std::vector<double> a = {1, 2};
  std::vector<double> b = {1, 2, 3};
  std::vector<double> z = {0, 0};
  std::vector<double> empty;
  CHECK(code_of([&] { cosine_sim(a, b); }) == ErrorCode::DimMismatch);
  CHECK(code_of([&] { cosine_sim(a, z); }) == ErrorCode::ZeroVector);
  CHECK(code_of([&] { cosine_sim(empty, empty); }) == ErrorCode::ZeroVector);
}

TEST_CASE("shot intervals are half-open") {
  CinematicScript script;
  script.scene_setting = "Boundaries.";
  script.shots.push_back(make_shot("s1", 0, 4));
  script.shots.push_back(make_shot("s2", 4, 8));

  EmbeddingSeries emb;
  emb.dim = 2;
  emb.shot_instructions["s1"] = {1, 0};
  emb.shot_instructions["s2"] = {0, 1};
  // t=0 lands in s1; t=4 lands in s2, not s1; t=8 is past every shot.
  emb.frames.push_back({0.0, {1, 0}});
  emb.frames.push_back({4.0, {1, 0}});
  emb.frames.push_back({8.0, {1, 0}});

  VsaResult result = vsa(script, emb);
  CHECK(result.frames_used == 2);
  CHECK(result.per_shot.at("s1").frame_count == 1);
  CHECK(result.per_shot.at("s1").mean_sim == 1.0);
  CHECK(result.per_shot.at("s2").frame_count == 1);
  CHECK(result.per_shot.at("s2").mean_sim == 0.0);  // orthogonal
  CHECK(result.score == 50.0);
}

TEST_CASE("frames in gaps count for neither numerator nor denominator") {
  CinematicScript script;
  script.scene_setting = "Gapped.";
  script.shots.push_back(make_shot("s1", 0, 2));
  script.shots.push_back(make_shot("s2", 4, 6));

  EmbeddingSeries emb;
  emb.dim = 2;
  emb.shot_instructions["s1"] = {1, 0};
  emb.shot_instructions["s2"] = {1, 0};
  emb.frames.push_back({1.0, {1, 0}});
  emb.frames.push_back({3.0, {0, 1}});  // in the gap: would drag score down
  emb.frames.push_back({5.0, {1, 0}});

  VsaResult result = vsa(script, emb);
  CHECK(result.frames_used == 2);
  CHECK(result.score == 100.0);
}

TEST_CASE("score is invariant under positive scaling and shot reordering") {
  Rng rng(1357);
  for (int trial = 0; trial < 50; ++trial) {
    RandomInstance inst = random_instance(rng);
    double base = vsa(inst.script, inst.emb).score;

    // Power-of-two scaling introduces no rounding anywhere.
    RandomInstance scaled = inst;
    for (FrameEmbedding& f : scaled.emb.frames)
      for (double& x : f.e) x *= 4.0;
    for (auto& [id, e] : scaled.emb.shot_instructions)
      for (double& x : e) x *= 0.5;
    CHECK(vsa(scaled.script, scaled.emb).score == base);

    // Reversing shot order only reorders the outer summation.
    RandomInstance shuffled = inst;
    std::reverse(shuffled.script.shots.begin(), shuffled.script.shots.end());
    double reordered = vsa(shuffled.script, shuffled.emb).score;
    CHECK(reordered == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("a shot without an instruction embedding is an error") {
  CinematicScript script;
  script.scene_setting = "Missing.";
  script.shots.push_back(make_shot("s1", 0, 2));
  script.shots.push_back(make_shot("s2", 2, 4));
  EmbeddingSeries emb;
  emb.dim = 2;
  emb.shot_instructions["s1"] = {1, 0};
  emb.frames.push_back({1.0, {1, 0}});
  try {
    vsa(script, emb);
    FAIL("expected MissingInstruction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingInstruction);
    CHECK(std::string(e.what()).find("'s2'") != std::string::npos);
  }
}

TEST_CASE("no frame inside any shot is an error, not a zero score") {
  CinematicScript script;
  script.scene_setting = "Empty overlap.";
  script.shots.push_back(make_shot("s1", 0, 2));
  EmbeddingSeries emb;
  emb.dim = 2;
  emb.shot_instructions["s1"] = {1, 0};
  emb.frames.push_back({5.0, {1, 0}});
  CHECK(code_of([&] { vsa(script, emb); }) == ErrorCode::NoFramesInIntervals);
}

TEST_CASE("embedding series parses frames and instructions from JSON lines") {
  EmbeddingSeries emb = EmbeddingSeries::from_jsonl(
      "{\"kind\": \"instruction\", \"shot_id\": \"s1\", \"e\": [1, 0]}\n"
      "\n"
      "   \t\n"
      "{\"kind\": \"frame\", \"t\": 0.25, \"e\": [0, 1]}\n"
      "{\"kind\": \"frame\", \"t\": 0.5, \"e\": [1, 1]}\n");
  CHECK(emb.dim == 2);
  REQUIRE(emb.frames.size() == 2);
  CHECK(emb.frames[0].t == 0.25);
  CHECK(emb.frames[1].e == std::vector<double>{1, 1});
  REQUIRE(emb.shot_instructions.contains("s1"));
}

TEST_CASE("embedding series rejects malformed lines with precise codes") {
  auto code_for = [](const std::string& text) {
    return code_of([&] { EmbeddingSeries::from_jsonl(text); });
  };
  CHECK(code_for("not json") == ErrorCode::SyntaxError);
  CHECK(code_for("{\"e\": [1]}") == ErrorCode::SchemaError);
  CHECK(code_for("{\"kind\": \"frame\", \"t\": 0}") == ErrorCode::SchemaError);
  CHECK(code_for("{\"kind\": \"frame\", \"e\": [1]}") == ErrorCode::SchemaError);
  CHECK(code_for("{\"kind\": \"wave\", \"e\": [1]}") == ErrorCode::SchemaError);
  CHECK(code_for("{\"kind\": \"frame\", \"t\": 0, \"e\": [0, 0]}") ==
        ErrorCode::ZeroVector);
  CHECK(code_for("{\"kind\": \"frame\", \"t\": 0, \"e\": [1, 0]}\n"
                 "{\"kind\": \"frame\", \"t\": 1, \"e\": [1, 0, 0]}") ==
        ErrorCode::DimMismatch);
  CHECK(code_for("{\"kind\": \"frame\", \"t\": 1, \"e\": [1]}\n"
                 "{\"kind\": \"frame\", \"t\": 1, \"e\": [1]}") ==
        ErrorCode::InvariantError);
  CHECK(code_for("{\"kind\": \"instruction\", \"e\": [1]}") ==
        ErrorCode::SchemaError);
}

TEST_CASE("global text score averages every frame") {
  EmbeddingSeries emb;
  emb.dim = 2;
  emb.frames.push_back({0.0, {1, 0}});
  emb.frames.push_back({1.0, {0, 1}});
  std::vector<double> text = {1, 0};
  CHECK(clip_score(emb, text) == 50.0);

  EmbeddingSeries empty;
  CHECK(code_of([&] { clip_score(empty, text); }) == ErrorCode::NoFrames);
}

TEST_CASE("result JSON carries score and per-shot detail") {
  CinematicScript script = parse_script(read_fixture("vsa_script.json"));
  EmbeddingSeries emb =
      EmbeddingSeries::from_jsonl(read_fixture("vsa_embeddings.jsonl"));
  Json doc = vsa_json(vsa(script, emb));
  CHECK(doc["score"] == 87.5);
  CHECK(doc["frames_used"] == 4);
  CHECK(doc["per_shot"]["s1"]["frame_count"] == 4);
  CHECK(doc["per_shot"]["s1"]["mean_sim"] == 0.875);
}
