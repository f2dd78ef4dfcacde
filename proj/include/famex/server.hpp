#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace famex {

struct ServerOptions {
  std::size_t max_upload_bytes = 64u << 20;
  std::chrono::seconds session_ttl{3600};
  std::size_t workers = 2;
  // Served under "/" when non-empty and present on disk.
  std::string static_dir;
  std::string cors_origin = "*";
  // Injected for eviction tests.
  std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using QueryParams = std::multimap<std::string, std::string>;

// The HTTP handlers without the transport. Sessions are keyed by a hash of
// the upload bytes and class column, so replaying an upload yields the same id.
//
//   upload    POST /api/datasets            query: class_col, name
//   scores    GET  /api/datasets/{id}/scores query: bins, thresholds, corr_decimals
//   graph     GET  /api/datasets/{id}/graph  query: thresholds, corr_decimals
//   evaluate  POST /api/datasets/{id}/evaluate  body: settings JSON
//   job       GET  /api/jobs/{id}
class Api {
 public:
  explicit Api(ServerOptions options = {});
  ~Api();
  Api(const Api&) = delete;
  Api& operator=(const Api&) = delete;

  ApiResponse upload(std::string_view body, const QueryParams& query);
  ApiResponse scores(const std::string& session, const QueryParams& query);
  ApiResponse graph(const std::string& session, const QueryParams& query);
  ApiResponse evaluate(const std::string& session, std::string_view body);
  ApiResponse job(const std::string& id);

  std::size_t session_count() const;
  // Number of cached scores/graph computations actually run; for tests.
  std::size_t computations() const;
  const ServerOptions& options() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

class HttpServer {
 public:
  HttpServer(Api& api, const ServerOptions& options);
  ~HttpServer();

  // Binds to host:port (0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace famex
