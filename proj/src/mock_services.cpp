#include "cinescript/mock_services.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "cinescript/errors.hpp"
#include "cinescript/paths.hpp"

namespace cine {

namespace {

uint64_t fnv1a(const std::string& text, uint64_t seed) {
  uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string strip_scheme(const std::string& uri) {
  size_t pos = uri.find("://");
  return pos == std::string::npos ? uri : uri.substr(pos + 3);
}

}  // namespace

std::vector<double> mock_embedding(const std::string& kind,
                                   const std::string& payload, int dim) {
  if (dim < 1) dim = 1;
  uint64_t state = fnv1a(kind + "\x1f" + payload, 0x5eedULL);
  std::vector<double> e(dim);
  for (int i = 0; i < dim; ++i) {
    state = splitmix64(state + static_cast<uint64_t>(i));
    // 53 high bits -> [0, 1) -> [-1, 1); exactly representable doubles.
    double unit = static_cast<double>(state >> 11) / 9007199254740992.0;
    e[i] = unit * 2.0 - 1.0;
  }
  bool all_zero = true;
  for (double v : e)
    if (v != 0.0) all_zero = false;
  if (all_zero) e[0] = 1.0;
  return e;
}

struct MockServices::Impl {
  explicit Impl(MockOptions opts)
      : options(std::move(opts)),
        seq(options.seq_base),
        video_failures_left(options.video_failures) {}

  MockOptions options;
  httplib::Server server;
  std::thread thread;
  std::string base_url;

  mutable std::mutex mu;
  Json transcript = Json::array();
  long seq;
  int video_calls = 0;
  int video_failures_left;
  int clip_counter = 0;
  size_t draft_cursor = 0;
  size_t judge_cursor = 0;

  void record(const std::string& service, const std::string& path, int status,
              const Json& request, const Json& response) {
    Json entry = Json::object();
    entry["seq"] = seq++;
    entry["service"] = service;
    entry["path"] = path;
    entry["status"] = status;
    entry["request"] = request;
    entry["response"] = response;
    transcript.push_back(std::move(entry));
  }

  // Valid script satisfying every verification check: one 5-second shot per
  // source line, verbatim dialogue, stationary cast.
  Json synthesize_script(const Json& context) {
    Json script = Json::object();
    script["scene_setting"] = context.value("scene_setting", std::string());

    Json characters = Json::array();
    std::vector<std::string> declared;
    if (context.contains("characters") && context["characters"].is_array())
      for (const Json& c : context["characters"])
        if (c.is_object() && c.contains("id") && c["id"].is_string()) {
          characters.push_back(c);
          declared.push_back(c["id"].get<std::string>());
        }

    Json source = Json::array();
    if (context.contains("source_dialogue") &&
        context["source_dialogue"].is_array())
      source = context["source_dialogue"];

    // Speakers missing from the cast get a minimal profile so the draft
    // satisfies the declared-speaker invariant.
    for (const Json& line : source) {
      if (!line.is_object() || !line.contains("speaker") ||
          !line["speaker"].is_string())
        continue;
      std::string speaker = line["speaker"].get<std::string>();
      if (speaker.empty()) continue;
      bool known = false;
      for (const std::string& id : declared)
        if (id == speaker) known = true;
      if (!known) {
        Json profile = Json::object();
        profile["id"] = speaker;
        profile["name"] = speaker;
        profile["appearance"] = "";
        profile["initial_position"] = Json::array({0.0, 0.0});
        characters.push_back(std::move(profile));
        declared.push_back(speaker);
      }
    }
    script["characters"] = characters;
    script["source_dialogue"] = source;

    auto display_name = [&](const Json& line) -> std::string {
      if (!line.is_object() || !line.contains("speaker") ||
          !line["speaker"].is_string())
        return "A voice";
      std::string id = line["speaker"].get<std::string>();
      if (id.empty()) return "A voice";
      for (const Json& c : characters)
        if (c["id"] == id && c.contains("name") && c["name"].is_string() &&
            !c["name"].get<std::string>().empty())
          return c["name"].get<std::string>();
      return id;
    };

    Json positions = Json::object();
    for (const Json& c : characters) {
      Json coord = Json::array({0.0, 0.0});
      if (c.contains("initial_position") && c["initial_position"].is_array())
        coord = c["initial_position"];
      positions[c["id"].get<std::string>()] = coord;
    }

    Json shots = Json::array();
    size_t n = source.is_array() ? source.size() : 0;
    for (size_t i = 0; i < n; ++i) {
      Json shot = Json::object();
      shot["id"] = "s" + std::to_string(i + 1);
      shot["start"] = 5.0 * static_cast<double>(i);
      shot["end"] = 5.0 * static_cast<double>(i) + 5.0;
      shot["shot_type"] = "medium";
      shot["camera_movement"] = "static";
      shot["fixed_camera"] = true;
      shot["description"] = "Shot " + std::to_string(i + 1) + ": " +
                            display_name(source[i]) + " delivers the line.";
      shot["dialogue"] = Json::array({source[i]});
      shot["positions"] = positions;
      shot["semantic_breakpoint"] = false;
      shots.push_back(std::move(shot));
    }
    if (n == 0) {
      Json shot = Json::object();
      shot["id"] = "s1";
      shot["start"] = 0.0;
      shot["end"] = 5.0;
      shot["shot_type"] = "wide";
      shot["camera_movement"] = "static";
      shot["fixed_camera"] = true;
      shot["description"] = "Shot 1: establishing view of the setting.";
      Json marker = Json::object();
      marker["speaker"] = nullptr;
      marker["text"] = "[No Dialogue]";
      shot["dialogue"] = Json::array({marker});
      shot["positions"] = positions;
      shot["semantic_breakpoint"] = false;
      shots.push_back(std::move(shot));
    }
    script["shots"] = std::move(shots);
    return script;
  }

  std::string synthesize_judgement(const std::string& prompt) {
    Json scores = Json::object();
    if (prompt.find("Cinematic Camera Articulation") != std::string::npos) {
      scores["Cinematic Camera Articulation"] = 4.2;
      scores["Kinetic Body Language & Blocking"] = 3.6;
      scores["Visual Descriptive Fidelity"] = 4.0;
      scores["Emotional Arc & Micro-Expressions"] = 3.8;
      scores["Narrative Pacing & Timing"] = 4.1;
    } else if (prompt.find("Audio-Visual Synchronization") !=
               std::string::npos) {
      scores["Audio-Visual Synchronization"] = 4;
      scores["Emotional Consistency"] = 4;
      scores["Rhythm Coordination"] = 3;
      scores["Voice-Lip Sync"] = 5;
    } else {
      scores["Format Compliance"] = 4;
      scores["Shot Division Rationality"] = 4;
      scores["Content Completeness"] = 3;
      scores["Narrative Coherence"] = 5;
    }
    return "Here is my assessment.\n\n" + scores.dump(2) + "\n";
  }

  using Handler = std::function<std::pair<int, Json>(const Json&)>;

  void route(const std::string& service, const std::string& path,
             Handler handler) {
    server.Post(path, [this, service, path, handler](
                          const httplib::Request& req,
                          httplib::Response& res) {
      Json request;
      try {
        request = Json::parse(req.body);
      } catch (const Json::parse_error&) {
        Json error = Json::object();
        error["error"] = "request body is not JSON";
        std::lock_guard<std::mutex> lock(mu);
        record(service, path, 400, Json(req.body), error);
        res.status = 400;
        res.set_content(error.dump(), "application/json");
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      auto [status, response] = handler(request);
      record(service, path, status, request, response);
      res.status = status;
      res.set_content(response.dump(), "application/json");
    });
  }

  void install_routes() {
    route("generator", "/v1/generate-script", [this](const Json& req) {
      std::string document;
      if (draft_cursor < options.generator_drafts.size())
        document = options.generator_drafts[draft_cursor++];
      else
        document =
            synthesize_script(req.value("context", Json::object())).dump(2);
      Json response = Json::object();
      response["script_document"] = document;
      return std::make_pair(200, response);
    });

    route("preference", "/v1/score", [this](const Json&) {
      Json response = Json::object();
      response["score"] = options.preference_score;
      return std::make_pair(200, response);
    });

    route("videogen", "/v1/generate-video", [this](const Json& req) {
      ++video_calls;
      if (options.video_fail_from_call > 0 &&
          video_calls >= options.video_fail_from_call &&
          video_failures_left > 0) {
        --video_failures_left;
        Json error = Json::object();
        error["error"] = "injected video failure";
        return std::make_pair(500, error);
      }
      ++clip_counter;
      Json response = Json::object();
      response["clip_uri"] = "mock://clip/" + std::to_string(clip_counter);
      response["duration_s"] = req.value("duration_s", 0.0);
      return std::make_pair(200, response);
    });

    route("media", "/v1/extract-frame", [this](const Json& req) {
      std::string clip = req.value("clip_uri", std::string());
      Json response = Json::object();
      response["frame_uri"] = "frame://" + strip_scheme(clip) + "/last";
      return std::make_pair(200, response);
    });

    route("embed", "/v1/embed", [this](const Json& req) {
      Json response = Json::object();
      response["e"] = mock_embedding(req.value("kind", std::string()),
                                     req.value("payload", std::string()),
                                     options.embed_dim);
      return std::make_pair(200, response);
    });

    route("judge", "/v1/complete", [this](const Json& req) {
      std::string text;
      if (judge_cursor < options.judge_responses.size())
        text = options.judge_responses[judge_cursor++];
      else
        text = synthesize_judgement(req.value("prompt", std::string()));
      Json response = Json::object();
      response["text"] = text;
      return std::make_pair(200, response);
    });
  }
};

MockServices::MockServices(MockOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->install_routes();
}

MockServices::~MockServices() { stop(); }

void MockServices::start() {
  int port = impl_->server.bind_to_any_port("127.0.0.1");
  if (port <= 0)
    throw Error(ErrorCode::ServiceError, "mock services: cannot bind a port");
  impl_->base_url = "http://127.0.0.1:" + std::to_string(port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  for (int i = 0; i < 1000 && !impl_->server.is_running(); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  if (!impl_->server.is_running())
    throw Error(ErrorCode::ServiceError, "mock services: server did not start");
}

void MockServices::stop() {
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

std::string MockServices::base_url() const {
  if (impl_->base_url.empty())
    throw Error(ErrorCode::ServiceError, "mock services not started");
  return impl_->base_url;
}

ServiceEndpoints MockServices::endpoints() const {
  std::string url = base_url();
  return ServiceEndpoints{url, url, url, url, url, url};
}

Json MockServices::transcript() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->transcript;
}

void MockServices::write_transcript(const std::string& path) const {
  write_text_file(path, transcript().dump(2) + "\n");
}

}  // namespace cine
