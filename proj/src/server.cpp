#include "specbench/server.hpp"

#include <httplib.h>

#include <chrono>
#include <ctime>
#include <filesystem>

#include "specbench/errors.hpp"
#include "specbench/export.hpp"
#include "specbench/pipeline.hpp"

namespace specbench {

namespace fs = std::filesystem;
using nlohmann::json;

RunData RunData::load(const std::string& run_dir) {
  RunData data;
  data.run_dir_ = run_dir;
  const fs::path results = fs::path(run_dir) / "results.json";
  if (!fs::exists(results)) return data;

  const json doc = json::parse(read_text_file(results.string()));
  std::map<std::string, std::vector<std::string>> methods_of;
  for (const auto& plot : doc.at("plots")) {
    const auto clip = plot.at("clip_id").get<std::string>();
    const auto method = plot.at("method").get<std::string>();
    data.plots_[{clip, method}] = dump_json(plot);
    methods_of[clip].push_back(method);
  }
  for (const auto& in : doc.at("manifest").at("inputs")) {
    const auto id = in.at("clip_id").get<std::string>();
    const int fs_hz = in.at("sample_rate_hz").get<int>();
    const auto n = in.at("n_samples").get<std::size_t>();
    data.collection_.push_back({{"clip_id", id},
                                {"group_key", in.at("group_key")},
                                {"label", in.at("label")},
                                {"source_path", in.at("source_path")},
                                {"sample_rate_hz", fs_hz},
                                {"n_samples", n},
                                {"duration_s", fs_hz > 0 ? static_cast<double>(n) / fs_hz : 0.0},
                                {"onset_s", in.at("onset_s")},
                                {"offset_s", in.at("offset_s")},
                                {"sha256", in.at("sha256")},
                                {"methods", methods_of[id]}});
    const fs::path audio = fs::path(run_dir) / "clips" / clip_audio_filename(id);
    if (fs::exists(audio)) data.audio_[id] = audio.string();
  }
  data.loaded_ = true;
  return data;
}

const std::string* RunData::plot_text(const std::string& clip_id, const std::string& method) const {
  auto it = plots_.find({clip_id, method});
  return it == plots_.end() ? nullptr : &it->second;
}

std::optional<std::string> RunData::audio_path(const std::string& clip_id) const {
  auto it = audio_.find(clip_id);
  if (it == audio_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------

json normalize_session_state(const json& state) {
  try {
    if (!state.is_object()) throw ParseError("state must be an object");
    json out;
    out["selection"] = to_json(selection_from_json(state.at("selection")));
    const json view = state.value("view", json::object());
    if (!view.is_object()) throw ParseError("view must be an object");
    const auto scale = view.value("scale", std::string("dB"));
    if (scale != "dB" && scale != "linear") throw ParseError("view.scale must be 'dB' or 'linear'");
    out["view"] = {{"scale", scale},
                   {"show_spectrogram", view.value("show_spectrogram", true)},
                   {"show_ridge", view.value("show_ridge", true)},
                   {"show_veins", view.value("show_veins", true)}};
    return out;
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json error_body(const std::string& message) { return {{"error", message}}; }

}  // namespace

SessionStore::SessionStore(std::string dir) : dir_(std::move(dir)) {
  if (!fs::exists(dir_)) return;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() != ".json") continue;
    const auto id = entry.path().stem().string();
    if (!valid_id(id)) continue;
    try {
      sessions_[id] = json::parse(read_text_file(entry.path().string()));
    } catch (const std::exception&) {
      continue;
    }
  }
}

bool SessionStore::valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '_'; });
}

SessionStore::Response SessionStore::put(const std::string& id, const std::string& body) {
  if (!valid_id(id)) return {400, error_body("session id must match [A-Za-z0-9_-]{1,64}")};
  json state;
  long long revision = 0;
  try {
    const json doc = json::parse(body);
    if (!doc.is_object() || !doc.contains("revision") || !doc.at("revision").is_number_integer())
      return {400, error_body("body needs an integer 'revision'")};
    revision = doc.at("revision").get<long long>();
    state = normalize_session_state(doc.at("state"));
  } catch (const json::exception& e) {
    return {400, error_body(e.what())};
  } catch (const ParseError& e) {
    return {400, error_body(e.what())};
  }

  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  const long long current = it == sessions_.end() ? 0 : it->second.at("revision").get<long long>();
  if (revision != current) {
    json conflict = error_body("revision conflict: expected " + std::to_string(current) + ", got " +
                               std::to_string(revision));
    conflict["current_revision"] = current;
    return {409, conflict};
  }
  json doc = {{"session_id", id}, {"revision", current + 1}, {"state", std::move(state)}, {"last_modified", utc_now()}};
  fs::create_directories(dir_);
  write_file_atomic((fs::path(dir_) / (id + ".json")).string(), doc.dump() + "\n");
  sessions_[id] = doc;
  return {200, doc};
}

SessionStore::Response SessionStore::get(const std::string& id) const {
  if (!valid_id(id)) return {400, error_body("session id must match [A-Za-z0-9_-]{1,64}")};
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return {404, error_body("no session '" + id + "'")};
  return {200, it->second};
}

// ---------------------------------------------------------------------------

struct ApiServer::Impl {
  ServerOptions options;
  RunData run;
  SessionStore sessions;
  httplib::Server http;

  explicit Impl(ServerOptions opts)
      : options(std::move(opts)),
        run(RunData::load(options.run_dir)),
        sessions(options.session_dir.value_or((fs::path(options.run_dir) / "sessions").string())) {}

  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(dump_json(body), "application/json");
  }

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, PUT, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http.Get("/api/collection", [this](const httplib::Request&, httplib::Response& res) {
      if (!run.loaded()) return send_json(res, 404, error_body("no analysis run loaded"));
      send_json(res, 200, run.collection());
    });

    http.Get(R"(/api/clip/([^/]+)/spectral)", [this](const httplib::Request& req, httplib::Response& res) {
      if (!run.loaded()) return send_json(res, 404, error_body("no analysis run loaded"));
      if (!req.has_param("method")) return send_json(res, 400, error_body("query parameter 'method' is required"));
      std::string method;
      try {
        method = std::string(to_string(parse_method(req.get_param_value("method"))));
      } catch (const InvalidParams&) {
        return send_json(res, 404, error_body("unknown method"));
      }
      const std::string* text = run.plot_text(req.matches[1], method);
      if (!text) return send_json(res, 404, error_body("no such clip or method"));
      res.status = 200;
      res.set_content(*text, "application/json");
    });

    http.Get(R"(/api/clip/([^/]+)/audio)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto path = run.audio_path(req.matches[1]);
      if (!path) return send_json(res, 404, error_body("no such clip"));
      try {
        res.status = 200;
        res.set_content(read_text_file(*path), "audio/wav");
      } catch (const Error& e) {
        send_json(res, 404, error_body(e.what()));
      }
    });

    http.Get(R"(/api/session/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto r = sessions.get(req.matches[1]);
      send_json(res, r.status, r.body);
    });

    http.Put(R"(/api/session/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto r = sessions.put(req.matches[1], req.body);
      send_json(res, r.status, r.body);
    });

    if (options.ui_dir) http.set_mount_point("/", *options.ui_dir);
  }
};

ApiServer::ApiServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) { impl_->routes(); }

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::serve() { return impl_->http.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_) impl_->http.stop();
}

void ApiServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace specbench
