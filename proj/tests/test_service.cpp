#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sbpm/persistence.hpp"
#include "sbpm/service.hpp"

using namespace sbpm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string{SBPM_FIXTURES} + "/" + name, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path()
           / ("sbpm-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::remove_all(path);
  }
  ~TempDir() {
    fs::remove_all(path);
  }
};

struct Fixture {
  TempDir dir;
  Service service{ServiceConfig{"127.0.0.1", 0, dir.path, std::chrono::seconds{3600}}};

  HttpResponse call(std::string method, std::string path, std::string body = {},
                    std::string content_type = "application/xml",
                    std::string accept = {},
                    std::map<std::string, std::string> params = {}) {
    return service.handle({std::move(method), std::move(path), std::move(body),
                           std::move(content_type), std::move(accept),
                           std::move(params)});
  }

  json call_json(std::string method, std::string path, json body = nullptr) {
    auto r = call(std::move(method), std::move(path),
                  body.is_null() ? std::string{} : body.dump(), "application/json");
    return json::parse(r.body);
  }

  void put_fixture(const std::string& id, const std::string& file) {
    auto r = call("PUT", "/models/" + id, slurp(file));
    REQUIRE(r.status / 100 == 2);
  }
};

} // namespace

TEST_SUITE("repository") {
  TEST_CASE("put then get returns the exact bytes") {
    Fixture f;
    auto text = slurp("pingpong.xml");
    auto r = f.call("PUT", "/models/pingpong", text);
    CHECK(r.status == 201);
    auto meta = json::parse(r.body);
    CHECK(meta["id"] == "pingpong");
    CHECK(meta["created"] == meta["updated"]);
    CHECK(f.call("PUT", "/models/pingpong", text).status == 200);
    auto got = f.call("GET", "/models/pingpong");
    CHECK(got.status == 200);
    CHECK(got.content_type == "application/xml");
    CHECK(got.body == text);
    CHECK(fs::exists(f.dir.path / "models" / "pingpong.xml"));
    CHECK(fs::exists(f.dir.path / "models" / "pingpong.meta.json"));
  }

  TEST_CASE("json representation in both directions") {
    Fixture f;
    auto text = slurp("pingpong.xml");
    auto as_json = xml_to_json(text);
    CHECK(f.call("PUT", "/models/pingpong", as_json, "application/json").status
          == 201);
    CHECK(f.call("GET", "/models/pingpong").body == text);
    auto got = f.call("GET", "/models/pingpong", {}, {}, "application/json");
    CHECK(got.content_type == "application/json");
    CHECK(json::parse(got.body) == json::parse(as_json));
  }

  TEST_CASE("documents survive a restart") {
    TempDir dir;
    ServiceConfig c{"127.0.0.1", 0, dir.path, std::chrono::seconds{60}};
    {
      Service s{c};
      s.handle({"PUT", "/notations/sbpm", slurp("sbpm_notation.xml"), "", "", {}});
    }
    Service s{c};
    auto r = s.handle({"GET", "/notations/sbpm", "", "", "", {}});
    CHECK(r.status == 200);
    CHECK(r.body == slurp("sbpm_notation.xml"));
  }

  TEST_CASE("error statuses") {
    Fixture f;
    auto text = slurp("pingpong.xml");
    CHECK(f.call("GET", "/models/nothing").status == 404);
    CHECK(f.call("PUT", "/models/other", text).status == 422);
    CHECK(json::parse(f.call("PUT", "/models/other", text).body)["code"]
          == "IdMismatch");
    CHECK(f.call("PUT", "/models/pingpong", "<document").status == 400);
    CHECK(json::parse(f.call("PUT", "/models/pingpong", "<document").body)["code"]
          == "MalformedDocument");
    auto v9999 = text;
    v9999.replace(v9999.find("format_version=\"1\""), 18, "format_version=\"9999\"");
    CHECK(f.call("PUT", "/models/pingpong", v9999).status == 400);
    auto broken = text;
    broken.replace(broken.find("to=\"B\">"), 7, "to=\"Q\">");
    auto r = f.call("PUT", "/models/pingpong", broken);
    CHECK(r.status == 422);
    auto body = json::parse(r.body);
    CHECK(body["code"] == "SemanticViolation");
    CHECK(body["violations"].size() >= 1);
    CHECK(f.call("DELETE", "/models/pingpong").status == 405);
    CHECK(f.call("GET", "/models/..%2Fetc").status == 400);
    CHECK(f.call("GET", "/models/.hidden").status == 400);
    CHECK(f.call("GET", "/nowhere").status == 404);
    CHECK_FALSE(fs::exists(f.dir.path / "models" / "pingpong.xml"));
  }
}

TEST_SUITE("analysis routes") {
  TEST_CASE("validate uses the default notation and its cache") {
    Fixture f;
    f.put_fixture("pingpong", "pingpong.xml");
    auto r = f.call_json("POST", "/models/pingpong/validate");
    CHECK(r["ok"] == true);
    CHECK(r["violations"].empty());
    CHECK(f.call_json("POST", "/models/pingpong/validate") == r);
  }

  TEST_CASE("validate against a stored notation") {
    Fixture f;
    f.put_fixture("pingpong", "pingpong.xml");
    auto r = f.call("POST", "/models/pingpong/validate", {}, {}, {},
                    {{"notation", "missing"}});
    CHECK(r.status == 404);
    f.call("PUT", "/notations/sbpm", slurp("sbpm_notation.xml"));
    r = f.call("POST", "/models/pingpong/validate", {}, {}, {},
               {{"notation", "sbpm"}});
    CHECK(r.status == 200);
    CHECK(json::parse(r.body)["ok"] == true);
  }

  TEST_CASE("explore reports deadlocks with witnesses") {
    Fixture f;
    f.put_fixture("cyclicwait", "cyclicwait.xml");
    auto r = f.call_json("POST", "/models/cyclicwait/explore", {{"max_states", 100}});
    CHECK(r["complete"] == true);
    REQUIRE(r["deadlocks"].size() == 1);
    CHECK(r["terminal_statuses"] == json::array({"Deadlocked"}));
    auto bad = f.call("POST", "/models/cyclicwait/explore", R"({"max_states":-1})",
                      "application/json");
    CHECK(bad.status == 400);
    bad = f.call("POST", "/models/cyclicwait/explore", R"({"max_states":0})",
                 "application/json");
    CHECK(bad.status == 422);
  }

  TEST_CASE("notation analysis") {
    Fixture f;
    f.call("PUT", "/notations/sbpm", slurp("sbpm_notation.xml"));
    auto r = f.call_json("POST", "/notations/sbpm/analyze");
    CHECK(r["ok"] == true);
    CHECK(r["anomalies"]["deficits"].empty());
    CHECK(r["lints"].size() == 1);
  }
}

TEST_SUITE("instances") {
  TEST_CASE("create, step and read the trace") {
    Fixture f;
    f.put_fixture("pingpong", "pingpong.xml");
    auto created = f.call("POST", "/instances",
                          R"({"model":"pingpong","policy":"round-robin"})",
                          "application/json");
    CHECK(created.status == 201);
    auto id = json::parse(created.body)["id"].get<std::string>();
    auto step = f.call_json("POST", "/instances/" + id + "/step", {{"steps", 2}});
    CHECK(step["events"].size() == 2);
    CHECK(step["status"] == "Running");
    step = f.call_json("POST", "/instances/" + id + "/step", {{"steps", 100}});
    CHECK(step["events"].size() == 4);
    CHECK(step["status"] == "Completed");
    auto lines = f.call("GET", "/instances/" + id + "/trace", {}, {}, "text/plain");
    CHECK(lines.content_type == "text/plain");
    CHECK(std::count(lines.body.begin(), lines.body.end(), '\n') == 6);
    auto xml = f.call("GET", "/instances/" + id + "/trace");
    auto doc = trace_from_xml(xml.body);
    CHECK(doc.status == InstanceStatus::Completed);
    CHECK(to_lines(doc.trace) == lines.body);
    CHECK(f.call("GET", "/instances/i999/trace").status == 404);
  }

  TEST_CASE("external messages") {
    Fixture f;
    f.put_fixture("shop", "shop.xml");
    auto id = f.call_json("POST", "/instances", {{"model", "shop"}})["id"]
                .get<std::string>();
    auto path = "/instances/" + id + "/messages";
    auto ok = f.call("POST", path,
                     R"({"from":"Customer","to":"Shop","message":"order",)"
                     R"("payload":{"item":"tea"}})",
                     "application/json");
    CHECK(ok.status == 202);
    CHECK(json::parse(ok.body)["event"]["kind"] == "Sent");
    auto r = f.call("POST", path, R"({"from":"Shop","to":"Shop","message":"order"})",
                    "application/json");
    CHECK(r.status == 409);
    r = f.call("POST", path, R"({"from":"Customer","to":"Shop","message":"refund"})",
               "application/json");
    CHECK(r.status == 409);
    r = f.call("POST", path,
               R"({"from":"Customer","to":"Shop","message":"order","payload":{"x":"1"}})",
               "application/json");
    CHECK(r.status == 422);
    r = f.call("POST", path, R"({"from":"Nobody","to":"Shop","message":"order"})",
               "application/json");
    CHECK(r.status == 404);
    auto done = f.call_json("POST", "/instances/" + id + "/step", {{"steps", 10}});
    CHECK(done["status"] == "Completed");
  }

  TEST_CASE("invalid models cannot be instantiated") {
    Fixture f;
    auto text = slurp("pingpong.xml");
    // A send with no channel still parses but fails validation.
    const std::string channel =
        "    <channel from=\"B\" to=\"A\">\n      <carries message=\"pong\"/>\n"
        "    </channel>\n";
    text.erase(text.find(channel), channel.size());
    auto put = f.call("PUT", "/models/pingpong", text);
    REQUIRE(put.status == 201);
    auto v = f.call_json("POST", "/models/pingpong/validate");
    CHECK(v["ok"] == false);
    auto r = f.call("POST", "/instances", R"({"model":"pingpong"})", "application/json");
    CHECK(r.status == 422);
    CHECK(json::parse(r.body)["code"] == "ModelInvalid");
  }

  TEST_CASE("idle instances expire") {
    TempDir dir;
    Service s{ServiceConfig{"127.0.0.1", 0, dir.path, std::chrono::seconds{0}}};
    s.handle({"PUT", "/models/pingpong", slurp("pingpong.xml"), "", "", {}});
    auto r = s.handle({"POST", "/instances", R"({"model":"pingpong"})",
                       "application/json", "", {}});
    auto id = json::parse(r.body)["id"].get<std::string>();
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    CHECK(s.handle({"GET", "/instances/" + id + "/trace", "", "", "", {}}).status
          == 404);
  }
}

TEST_SUITE("http") {
  TEST_CASE("requests over a real socket") {
    TempDir dir;
    Service service{ServiceConfig{"127.0.0.1", 0, dir.path, std::chrono::seconds{60}}};
    httplib::Server server;
    service.install(server);
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    auto put = client.Put("/models/pingpong", slurp("pingpong.xml"), "application/xml");
    REQUIRE(put);
    CHECK(put->status == 201);
    auto inst = client.Post("/instances", R"({"model":"pingpong","seed":3})",
                            "application/json");
    REQUIRE(inst);
    CHECK(inst->status == 201);
    auto id = json::parse(inst->body)["id"].get<std::string>();
    auto step = client.Post("/instances/" + id + "/step", R"({"steps":50})",
                            "application/json");
    REQUIRE(step);
    CHECK(json::parse(step->body)["status"] == "Completed");
    auto v = client.Post("/models/pingpong/validate?notation=none", "", "application/json");
    REQUIRE(v);
    CHECK(v->status == 404);
    server.stop();
    t.join();
  }
}
