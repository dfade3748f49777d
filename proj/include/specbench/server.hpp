#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace specbench {

/// Read-only view of an analysis run directory, loaded once.
class RunData {
 public:
  /// A directory without results.json yields an unloaded instance.
  static RunData load(const std::string& run_dir);

  bool loaded() const { return loaded_; }
  /// Clip index in manifest order.
  const nlohmann::json& collection() const { return collection_; }
  /// The plot's text exactly as it appears inside results.json.
  const std::string* plot_text(const std::string& clip_id, const std::string& method) const;
  /// Path of the clip's WAV file, if the clip is part of the run.
  std::optional<std::string> audio_path(const std::string& clip_id) const;

 private:
  bool loaded_ = false;
  std::string run_dir_;
  nlohmann::json collection_ = nlohmann::json::array();
  std::map<std::pair<std::string, std::string>, std::string> plots_;
  std::map<std::string, std::string> audio_;
};

/// File-backed session documents with optimistic revisions. Each session is
/// stored as <dir>/<id>.json; all access is serialized by one mutex.
class SessionStore {
 public:
  explicit SessionStore(std::string dir);

  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  /// Body: {"revision": r, "state": {"selection": ..., "view": ...}}. Succeeds
  /// when r equals the stored revision (0 for a new session); the stored
  /// revision becomes r + 1. Otherwise 409 with the current document, 400 for
  /// a malformed body or id.
  Response put(const std::string& session_id, const std::string& body);
  /// 200 with the stored document, 404 when unknown, 400 for a bad id.
  Response get(const std::string& session_id) const;

  static bool valid_id(const std::string& session_id);

 private:
  std::string dir_;
  mutable std::mutex mutex_;
  std::map<std::string, nlohmann::json> sessions_;
};

/// Validates and normalizes a session state object; throws ParseError.
nlohmann::json normalize_session_state(const nlohmann::json& state);

struct ServerOptions {
  std::string run_dir;
  std::optional<std::string> ui_dir;
  /// Defaults to <run_dir>/sessions.
  std::optional<std::string> session_dir;
};

class ApiServer {
 public:
  explicit ApiServer(ServerOptions options);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound port
  /// or -1 on failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace specbench
