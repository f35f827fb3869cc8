#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rttqe/error.hpp"
#include "rttqe/http_translator.hpp"
#include "rttqe/rtt.hpp"

using namespace rttqe;
using nlohmann::json;

namespace {

/// Local mock MT service: upper-cases ASCII, or answers with `status`.
class MockService {
 public:
  MockService() {
    server_.Post("/translate", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      last_auth = req.get_header_value("Authorization");
      if (status != 200) {
        res.status = status;
        return;
      }
      const auto body = json::parse(req.body);
      last_body = body;
      std::vector<std::string> out;
      for (const auto& t : body["texts"]) {
        std::string s = t.get<std::string>();
        for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out.push_back(s);
      }
      if (short_reply) out.pop_back();
      res.set_content(json{{"translations", out}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockService() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> requests{0};
  int status = 200;
  bool short_reply = false;
  std::string last_auth;
  json last_body;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpTranslatorConfig config_for(const std::string& endpoint) {
  HttpTranslatorConfig config;
  config.system_id = "mock-http";
  config.endpoint = endpoint;
  config.timeout = std::chrono::milliseconds(2000);
  return config;
}

}  // namespace

TEST_CASE("http adapter speaks the wire contract") {
  MockService service;
  ::setenv("RTTQE_TEST_TOKEN", "s3cret", 1);
  auto config = config_for(service.endpoint());
  config.auth_env = "RTTQE_TEST_TOKEN";
  HttpTranslator http(config);
  const std::vector<std::string> texts = {"hello", "world"};
  CHECK(http.translate(texts, "en", "de") == std::vector<std::string>{"HELLO", "WORLD"});
  CHECK(service.last_auth == "Bearer s3cret");
  CHECK(service.last_body["source_lang"] == "en");
  CHECK(service.last_body["target_lang"] == "de");
  CHECK(service.last_body["texts"].size() == 2);
  CHECK(http.translate({}, "en", "de").empty());
  CHECK(service.requests == 1);
}

TEST_CASE("http adapter batches through the cache") {
  MockService service;
  HttpTranslator http(config_for(service.endpoint()));
  std::vector<std::string> texts;
  for (int i = 0; i < 10; ++i) texts.push_back("t" + std::to_string(i));
  auto r = cached_translate(nullptr, http, texts, "en", "fr", {3, 2});
  CHECK(r.texts[9] == "T9");
  CHECK(service.requests == 4);
}

TEST_CASE("non-2xx answers are not retried") {
  MockService service;
  service.status = 503;
  int sleeps = 0;
  HttpTranslator http(config_for(service.endpoint()), [&](auto) { ++sleeps; });
  CHECK_THROWS_AS(http.translate(std::vector<std::string>{"x"}, "en", "de"), TranslatorError);
  CHECK(service.requests == 1);
  CHECK(sleeps == 0);
}

TEST_CASE("short replies are rejected") {
  MockService service;
  service.short_reply = true;
  HttpTranslator http(config_for(service.endpoint()));
  CHECK_THROWS_AS(http.translate(std::vector<std::string>{"a", "b"}, "en", "de"), TranslatorError);
}

TEST_CASE("transport failures retry with exponential backoff") {
  std::string dead;
  {
    MockService service;
    dead = service.endpoint();
  }
  std::vector<std::chrono::milliseconds> waits;
  auto config = config_for(dead);
  config.max_retries = 3;
  config.timeout = std::chrono::milliseconds(300);
  HttpTranslator http(config, [&](std::chrono::milliseconds d) { waits.push_back(d); });
  CHECK_THROWS_AS(http.translate(std::vector<std::string>{"x"}, "en", "de"), TranslatorError);
  REQUIRE(waits.size() == 3);
  CHECK(waits[0].count() == 200);
  CHECK(waits[1].count() == 400);
  CHECK(waits[2].count() == 800);
}
