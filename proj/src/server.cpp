#include "famex/server.hpp"

#include <condition_variable>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <future>
#include <mutex>
#include <thread>
#include <vector>

#include "famex/dataset.hpp"
#include "famex/fam.hpp"
#include "famex/harness.hpp"
#include "famex/scoring.hpp"
#include "httplib.h"
#include "json.hpp"

namespace famex {
namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

ApiResponse json_response(int status, const ordered_json& doc) { return {status, doc.dump(2) + "\n"}; }

ApiResponse error_response(int status, std::string_view code, std::string_view message) {
  return json_response(status, {{"error", code}, {"message", message}});
}

std::string fnv1a_hex(std::initializer_list<std::string_view> parts) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto part : parts) {
    for (const unsigned char c : part) {
      h ^= c;
      h *= 1099511628211ull;
    }
    // Separator so ("ab","c") and ("a","bc") differ.
    h ^= 0xff;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::string* query_value(const QueryParams& query, const std::string& key) {
  const auto it = query.find(key);
  return it == query.end() ? nullptr : &it->second;
}

int parse_int(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument(key + " must be an integer, got '" + text + "'");
  return v;
}

double parse_double(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument(key + " must be a number, got '" + text + "'");
  return v;
}

FamexParams famex_params(const QueryParams& query) {
  FamexParams p;
  if (const auto* v = query_value(query, "bins")) {
    p.bin_count = parse_int(*v, "bins");
    if (p.bin_count < 1) throw std::invalid_argument("bins must be >= 1");
  }
  if (const auto* v = query_value(query, "thresholds")) {
    const auto comma = v->find(',');
    if (comma == std::string::npos) throw std::invalid_argument("thresholds must be 'low,high'");
    p.fam.threshold_low = parse_double(v->substr(0, comma), "thresholds");
    p.fam.threshold_high = parse_double(v->substr(comma + 1), "thresholds");
  }
  if (const auto* v = query_value(query, "corr_decimals")) p.fam.correlation_decimals = parse_int(*v, "corr_decimals");
  validate(p.fam);
  return p;
}

std::string params_key(std::string_view what, const FamexParams& p) {
  return std::string(what) + "|bins=" + std::to_string(p.bin_count) + "|low=" + exact(p.fam.threshold_low) +
         "|high=" + exact(p.fam.threshold_high) + "|dec=" + std::to_string(p.fam.correlation_decimals);
}

struct Session {
  std::shared_ptr<const Dataset> dataset;
  Clock::time_point last_used;
  std::map<std::string, std::shared_future<ApiResponse>> cache;
};

enum class JobStatus { queued, running, done, failed };

std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::queued: return "queued";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
  }
  return "queued";
}

struct Job {
  std::string id;
  std::string session;
  JobStatus status = JobStatus::queued;
  std::size_t done = 0;
  std::size_t total = 0;
  std::string report;  // JSON text once done
  std::string error;
};

}  // namespace

struct Api::State {
  ServerOptions options;
  mutable std::mutex mutex;
  std::map<std::string, Session> sessions;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::size_t computations = 0;

  std::condition_variable work_ready;
  std::deque<std::function<void()>> queue;
  std::vector<std::thread> workers;
  bool stopping = false;

  explicit State(ServerOptions opts) : options(std::move(opts)) {
    const std::size_t n = std::max<std::size_t>(1, options.workers);
    for (std::size_t i = 0; i < n; ++i) workers.emplace_back([this] { work(); });
  }

  ~State() {
    {
      std::lock_guard lock(mutex);
      stopping = true;
      queue.clear();
    }
    work_ready.notify_all();
    for (auto& t : workers) t.join();
  }

  void work() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mutex);
        work_ready.wait(lock, [this] { return stopping || !queue.empty(); });
        if (stopping) return;
        task = std::move(queue.front());
        queue.pop_front();
      }
      task();
    }
  }

  // Caller holds the mutex.
  void evict_idle() {
    const auto now = options.clock();
    for (auto it = sessions.begin(); it != sessions.end();) {
      if (now - it->second.last_used > options.session_ttl) it = sessions.erase(it);
      else ++it;
    }
  }

  // Caller holds the mutex. Null when the session is unknown or expired.
  Session* touch(const std::string& id) {
    evict_idle();
    const auto it = sessions.find(id);
    if (it == sessions.end()) return nullptr;
    it->second.last_used = options.clock();
    return &it->second;
  }

  // Runs compute at most once per (session, key); concurrent callers share the result.
  ApiResponse cached(const std::string& id, const std::string& key,
                     const std::function<ApiResponse(const Dataset&)>& compute) {
    std::promise<ApiResponse> promise;
    std::shared_future<ApiResponse> future;
    std::shared_ptr<const Dataset> dataset;
    {
      std::lock_guard lock(mutex);
      Session* session = touch(id);
      if (!session) return error_response(404, "unknown_session", "no dataset session '" + id + "'");
      if (const auto it = session->cache.find(key); it != session->cache.end()) {
        future = it->second;
      } else {
        future = promise.get_future().share();
        session->cache.emplace(key, future);
        dataset = session->dataset;
        ++computations;
      }
    }
    if (dataset) {
      try {
        promise.set_value(compute(*dataset));
      } catch (const DegenerateInputError& e) {
        promise.set_value(error_response(422, "degenerate_input", e.what()));
      } catch (const std::exception& e) {
        promise.set_value(error_response(500, "internal_error", e.what()));
      }
    }
    return future.get();
  }
};

Api::Api(ServerOptions options) : state_(std::make_unique<State>(std::move(options))) {}
Api::~Api() = default;

const ServerOptions& Api::options() const { return state_->options; }

std::size_t Api::session_count() const {
  std::lock_guard lock(state_->mutex);
  state_->evict_idle();
  return state_->sessions.size();
}

std::size_t Api::computations() const {
  std::lock_guard lock(state_->mutex);
  return state_->computations;
}

ApiResponse Api::upload(std::string_view body, const QueryParams& query) {
  if (body.size() > state_->options.max_upload_bytes) {
    return error_response(413, "payload_too_large",
                          "upload exceeds " + std::to_string(state_->options.max_upload_bytes) + " bytes");
  }
  if (body.empty()) return error_response(400, "parse_error", "empty upload");
  const auto* class_col = query_value(query, "class_col");
  const auto* name = query_value(query, "name");

  LoadOptions load;
  if (class_col) load.class_column = ClassColumn::parse(*class_col);
  std::shared_ptr<const Dataset> dataset;
  try {
    auto parsed = parse_csv(body, name ? *name : "upload", load);
    validate(parsed);
    dataset = std::make_shared<const Dataset>(std::move(parsed));
  } catch (const DataError& e) {
    return error_response(400, to_string(e.kind()), e.what());
  }

  const std::string id =
      fnv1a_hex({class_col ? *class_col : std::string_view("\x01last"), dataset->name, body});
  {
    std::lock_guard lock(state_->mutex);
    state_->evict_idle();
    auto [it, inserted] = state_->sessions.try_emplace(id);
    if (inserted) it->second.dataset = dataset;
    it->second.last_used = state_->options.clock();
  }

  std::vector<std::size_t> counts(dataset->class_count(), 0);
  for (const int v : dataset->labels) ++counts[static_cast<std::size_t>(v)];
  ordered_json classes = ordered_json::array();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    classes.push_back({{"name", dataset->class_names[c]}, {"count", counts[c]}});
  }
  return json_response(200, {{"id", id},
                             {"name", dataset->name},
                             {"features", dataset->feature_names},
                             {"rows", dataset->rows()},
                             {"dropped_rows", dataset->dropped_rows},
                             {"classes", std::move(classes)}});
}

ApiResponse Api::scores(const std::string& session, const QueryParams& query) {
  FamexParams params;
  try {
    params = famex_params(query);
  } catch (const std::invalid_argument& e) {
    return error_response(422, "invalid_params", e.what());
  }
  return state_->cached(session, params_key("scores", params),
                        [params](const Dataset& ds) { return ApiResponse{200, scores_to_json(famex(ds, params))}; });
}

ApiResponse Api::graph(const std::string& session, const QueryParams& query) {
  FamexParams params;
  try {
    params = famex_params(query);
  } catch (const std::invalid_argument& e) {
    return error_response(422, "invalid_params", e.what());
  }
  // Bins do not affect the graph.
  params.bin_count = 0;
  return state_->cached(session, params_key("graph", params), [params](const Dataset& ds) {
    return ApiResponse{200, export_graph(build_fam_graph(ds, params.fam), GraphFormat::json)};
  });
}

ApiResponse Api::evaluate(const std::string& session, std::string_view body) {
  std::shared_ptr<const Dataset> dataset;
  {
    std::lock_guard lock(state_->mutex);
    Session* s = state_->touch(session);
    if (!s) return error_response(404, "unknown_session", "no dataset session '" + session + "'");
    dataset = s->dataset;
  }

  ExperimentConfig config;
  try {
    config.settings = settings_from_json(body.empty() ? std::string_view("{}") : body);
    config.datasets.push_back(*dataset);
    validate(config);
  } catch (const std::exception& e) {
    return error_response(422, "invalid_params", e.what());
  }

  const std::string id = fnv1a_hex({session, settings_to_json(config.settings)});
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(state_->mutex);
    auto& slot = state_->jobs[id];
    if (!slot || slot->status == JobStatus::failed) {
      slot = std::make_shared<Job>();
      slot->id = id;
      slot->session = session;
      job = slot;
      state_->queue.push_back([state = state_.get(), job, config = std::move(config)] {
        {
          std::lock_guard lock(state->mutex);
          job->status = JobStatus::running;
        }
        try {
          auto report = run_experiment(config, [&](std::size_t done, std::size_t total) {
            std::lock_guard lock(state->mutex);
            job->done = done;
            job->total = total;
          });
          auto text = render_report(report, ReportFormat::json);
          std::lock_guard lock(state->mutex);
          job->report = std::move(text);
          job->status = JobStatus::done;
        } catch (const std::exception& e) {
          std::lock_guard lock(state->mutex);
          job->error = e.what();
          job->status = JobStatus::failed;
        }
      });
      state_->work_ready.notify_one();
    }
  }
  auto response = this->job(id);
  response.status = 202;
  return response;
}

ApiResponse Api::job(const std::string& id) {
  std::lock_guard lock(state_->mutex);
  const auto it = state_->jobs.find(id);
  if (it == state_->jobs.end()) return error_response(404, "unknown_job", "no job '" + id + "'");
  const Job& j = *it->second;
  ordered_json doc = {{"id", j.id},
                      {"session", j.session},
                      {"status", to_string(j.status)},
                      {"progress", {{"done", j.done}, {"total", j.total}}},
                      {"report", nullptr},
                      {"error", nullptr}};
  if (j.status == JobStatus::done) doc["report"] = ordered_json::parse(j.report);
  if (j.status == JobStatus::failed) doc["error"] = j.error;
  return json_response(200, doc);
}

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, f(req));
    } catch (const std::exception& e) {
      send(res, error_response(500, "internal_error", e.what()));
    }
  };
}

}  // namespace

HttpServer::HttpServer(Api& api, const ServerOptions& options) : impl_(std::make_unique<Impl>()) {
  auto& svr = impl_->server;
  svr.set_payload_max_length(options.max_upload_bytes);
  svr.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin}});
  svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  svr.Post("/api/datasets", guarded([&api](const httplib::Request& req) {
             return api.upload(req.body, QueryParams(req.params.begin(), req.params.end()));
           }));
  svr.Get(R"(/api/datasets/([^/]+)/scores)", guarded([&api](const httplib::Request& req) {
            return api.scores(req.matches[1], QueryParams(req.params.begin(), req.params.end()));
          }));
  svr.Get(R"(/api/datasets/([^/]+)/graph)", guarded([&api](const httplib::Request& req) {
            return api.graph(req.matches[1], QueryParams(req.params.begin(), req.params.end()));
          }));
  svr.Post(R"(/api/datasets/([^/]+)/evaluate)",
           guarded([&api](const httplib::Request& req) { return api.evaluate(req.matches[1], req.body); }));
  svr.Get(R"(/api/jobs/([^/]+))", guarded([&api](const httplib::Request& req) { return api.job(req.matches[1]); }));

  std::error_code ec;
  if (!options.static_dir.empty() && std::filesystem::is_directory(options.static_dir, ec)) {
    svr.set_mount_point("/", options.static_dir);
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("could not bind to " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error("could not bind to " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace famex
