#include <doctest.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "famex/fam.hpp"
#include "famex/harness.hpp"
#include "famex/scoring.hpp"
#include "famex/server.hpp"
#include "helpers.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace famex;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string upload_id(Api& api, const std::string& file, QueryParams q = {}) {
  const auto r = api.upload(read_file(testing::data_file(file)), q);
  REQUIRE(r.status == 200);
  return json::parse(r.body)["id"];
}

json wait_for_job(Api& api, const std::string& id) {
  for (int i = 0; i < 6000; ++i) {
    const auto doc = json::parse(api.job(id).body);
    if (doc["status"] == "done" || doc["status"] == "failed") return doc;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  FAIL("job did not finish");
  return {};
}

}  // namespace

TEST_SUITE("server") {
  TEST_CASE("upload summary") {
    Api api;
    const auto r = api.upload(read_file(testing::data_file("wisconsin.csv")), {{"name", "wisconsin"}});
    REQUIRE(r.status == 200);
    const auto doc = json::parse(r.body);
    CHECK(doc["features"].size() == 9);
    CHECK(doc["rows"] == 683);
    CHECK(doc["dropped_rows"] == 16);
    CHECK(doc["classes"][0]["name"] == "2");
    CHECK(doc["classes"][0]["count"] == 444);
    CHECK(doc["classes"][1]["count"] == 239);
    CHECK(api.session_count() == 1);
  }

  TEST_CASE("upload errors") {
    ServerOptions options;
    options.max_upload_bytes = 100;
    Api api(options);
    CHECK(api.upload("", {}).status == 400);
    const auto unknown = api.upload("a,b,c\n1,2,x\n3,4,y\n", {{"class_col", "label"}});
    CHECK(unknown.status == 400);
    CHECK(json::parse(unknown.body)["error"] == "class_column_not_found");
    const auto garbage = api.upload("a,b,c\n1,2\n", {});
    CHECK(garbage.status == 400);
    CHECK(json::parse(garbage.body)["message"].get<std::string>().find("line 2") != std::string::npos);
    CHECK(api.upload(std::string(101, 'x'), {}).status == 413);
    CHECK(api.session_count() == 0);
  }

  TEST_CASE("replayed upload gives the same session") {
    Api api;
    const auto a = upload_id(api, "pima.csv");
    const auto b = upload_id(api, "pima.csv");
    CHECK(a == b);
    CHECK(upload_id(api, "pima.csv", {{"class_col", "Outcome"}}) != a);
    CHECK(api.session_count() == 2);
  }

  TEST_CASE("scores equal the scoring module and are cached") {
    Api api;
    const auto id = upload_id(api, "wisconsin.csv", {{"name", "wisconsin"}});
    const auto first = api.scores(id, {});
    CHECK(first.status == 200);
    CHECK(first.body == scores_to_json(famex::famex(load_csv(testing::data_file("wisconsin.csv")))));
    CHECK(api.computations() == 1);
    CHECK(api.scores(id, {}).body == first.body);
    CHECK(api.computations() == 1);
    const auto rebinned = api.scores(id, {{"bins", "5"}});
    CHECK(rebinned.status == 200);
    CHECK(rebinned.body != first.body);
    CHECK(api.computations() == 2);
    CHECK(api.scores("nope", {}).status == 404);
    CHECK(api.scores(id, {{"bins", "zero"}}).status == 422);
    CHECK(api.scores(id, {{"thresholds", "0.9,0.5"}}).status == 422);
  }

  TEST_CASE("concurrent identical requests compute once") {
    Api api;
    const auto id = upload_id(api, "winequality-red.csv");
    std::vector<std::thread> threads;
    std::vector<std::string> bodies(8);
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      threads.emplace_back([&, i] { bodies[i] = api.scores(id, {{"bins", "7"}}).body; });
    }
    for (auto& t : threads) t.join();
    CHECK(api.computations() == 1);
    for (const auto& b : bodies) CHECK(b == bodies.front());
  }

  TEST_CASE("graph endpoint") {
    Api api;
    const auto id = upload_id(api, "winequality-red.csv");
    const auto r = api.graph(id, {});
    REQUIRE(r.status == 200);
    const auto graph = parse_graph_json(r.body);
    CHECK(graph.vertices.size() == 11);
    std::size_t green = 0;
    for (const auto& v : graph.vertices) green += v.grade == Grade::low;
    CHECK(green == 5);
    CHECK(api.graph("missing", {}).status == 404);

    const auto flat = api.upload("a,b,c\n1,5,x\n2,3,y\n3,6,x\n4,4,y\n", {});
    const auto flat_id = json::parse(flat.body)["id"].get<std::string>();
    CHECK(json::parse(api.graph(flat_id, {}).body)["edges"].empty());
  }

  TEST_CASE("sessions expire after the idle ttl") {
    auto now = std::chrono::steady_clock::time_point{};
    ServerOptions options;
    options.session_ttl = std::chrono::seconds(60);
    options.clock = [&now] { return now; };
    Api api(options);
    const auto id = upload_id(api, "pima.csv");
    now += std::chrono::seconds(50);
    CHECK(api.scores(id, {}).status == 200);
    now += std::chrono::seconds(50);
    CHECK(api.session_count() == 1);
    now += std::chrono::seconds(61);
    CHECK(api.session_count() == 0);
    CHECK(api.scores(id, {}).status == 404);
  }

  TEST_CASE("evaluate runs as a job and matches the harness") {
    Api api;
    const auto id = upload_id(api, "pima.csv", {{"name", "pima"}});
    const std::string params = R"({"methods":["famex"],"classifiers":["naive_bayes"],"iterations":2,"folds":5})";
    const auto started = api.evaluate(id, params);
    REQUIRE(started.status == 202);
    const auto job_id = json::parse(started.body)["id"].get<std::string>();
    const auto done = wait_for_job(api, job_id);
    REQUIRE(done["status"] == "done");
    CHECK(done["progress"]["done"] == 2);
    CHECK(done["progress"]["total"] == 2);
    const auto& report = done["report"];
    CHECK(report["cells"].size() == 2);
    CHECK(report["cells"][0]["subset"] == "top");
    CHECK(report["cells"][1]["subset"] == "bottom");

    ExperimentConfig config;
    config.settings = settings_from_json(params);
    config.datasets.push_back(load_csv(testing::data_file("pima.csv")));
    const auto direct = json::parse(render_report(run_experiment(config), ReportFormat::json));
    CHECK(report == direct);

    // Same parameters: same job, same report.
    CHECK(json::parse(api.evaluate(id, params).body)["id"] == job_id);
    CHECK(json::parse(api.job(job_id).body)["report"] == report);
  }

  TEST_CASE("evaluate errors") {
    Api api;
    const auto id = upload_id(api, "pima.csv");
    CHECK(api.evaluate("nope", "{}").status == 404);
    CHECK(api.evaluate(id, R"({"folds": 1})").status == 422);
    CHECK(api.evaluate(id, R"({"classifiers": ["knn"]})").status == 422);
    CHECK(api.evaluate(id, R"({"unknown": 1})").status == 422);
    CHECK(api.evaluate(id, "not json").status == 422);
    CHECK(api.job("nope").status == 404);
  }

  TEST_CASE("http transport") {
    ServerOptions options;
    options.max_upload_bytes = 1 << 20;
    const auto static_dir = std::filesystem::temp_directory_path() / "famex_static_test";
    std::filesystem::create_directories(static_dir);
    std::ofstream(static_dir / "index.html") << "<html>famex</html>";
    options.static_dir = static_dir.string();

    Api api(options);
    HttpServer server(api, options);
    const int port = server.bind("127.0.0.1", 0);
    std::thread loop([&] { server.listen(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    const auto csv = read_file(testing::data_file("wisconsin.csv"));
    auto up = client.Post("/api/datasets?name=wisconsin", csv, "text/csv");
    REQUIRE(up);
    CHECK(up->status == 200);
    CHECK(up->get_header_value("Access-Control-Allow-Origin") == "*");
    const auto id = json::parse(up->body)["id"].get<std::string>();

    auto scores = client.Get("/api/datasets/" + id + "/scores?bins=10");
    REQUIRE(scores);
    CHECK(scores->status == 200);
    CHECK(scores->body == api.scores(id, {{"bins", "10"}}).body);

    auto graph = client.Get("/api/datasets/" + id + "/graph");
    REQUIRE(graph);
    CHECK(json::parse(graph->body)["features"].size() == 9);

    auto missing = client.Get("/api/datasets/zzz/scores");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto bad_class = client.Post("/api/datasets?class_col=nope", csv, "text/csv");
    REQUIRE(bad_class);
    CHECK(bad_class->status == 400);

    auto too_big = client.Post("/api/datasets", std::string((1 << 20) + 10, '1'), "text/csv");
    REQUIRE(too_big);
    CHECK(too_big->status == 413);

    auto eval = client.Post("/api/datasets/" + id + "/evaluate", R"({"folds": 1})", "application/json");
    REQUIRE(eval);
    CHECK(eval->status == 422);

    auto job = client.Get("/api/jobs/unknown");
    REQUIRE(job);
    CHECK(job->status == 404);

    auto preflight = client.Options("/api/datasets");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);
    CHECK(preflight->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

    auto index = client.Get("/index.html");
    REQUIRE(index);
    CHECK(index->status == 200);
    CHECK(index->body == "<html>famex</html>");

    server.stop();
    loop.join();
    std::filesystem::remove_all(static_dir);
  }
}
