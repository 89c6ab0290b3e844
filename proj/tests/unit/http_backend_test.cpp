#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

#include "anssim/error.hpp"
#include "anssim/semantic_metrics.hpp"

using namespace anssim;
using nlohmann::json;

namespace {

// Minimal stand-in for the inference sidecar.
class FakeSidecar {
 public:
  FakeSidecar() {
    server_.Get("/v1/models", [this](const httplib::Request&, httplib::Response& res) {
      ++requests;
      res.set_content(json{{"models",
                            {{{"alias", "tok"}, {"hub_id", "org/tok"}, {"kind", "token_encoder"}, {"num_layers", 3},
                              {"dim", 2}, {"snapshot", "abc123"}},
                             {{"alias", "sent"}, {"kind", "sentence_encoder"}, {"num_layers", 1}, {"dim", 2}},
                             {{"alias", "cross"}, {"kind", "cross_encoder"}, {"num_layers", 1}, {"dim", 0}}}}}
                          .dump(),
                      "application/json");
    });
    server_.Post("/v1/embed_tokens", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      const json body = json::parse(req.body);
      if (body["model"] != "tok") return error(res, 404, "UnknownModel");
      json results = json::array();
      for (const auto& text : body["texts"]) {
        const std::string s = text.get<std::string>();
        json tokens = json::array();
        std::string cur;
        for (char c : s + " ") {
          if (c == ' ') {
            if (!cur.empty()) tokens.push_back(cur);
            cur.clear();
          } else {
            cur += c;
          }
        }
        const bool truncated = tokens.size() > 4;
        if (truncated) tokens.erase(tokens.begin() + 4, tokens.end());
        json layers = json::object();
        for (const auto& l : body["layers"]) {
          const int layer = l.get<int>();
          if (layer < 0 || layer > 3) return error(res, 422, "LayerOutOfRange");
          json rows = json::array();
          for (const auto& t : tokens) {
            const double h = static_cast<double>(std::hash<std::string>{}(t.get<std::string>()) % 97) + 1.0;
            rows.push_back({h, static_cast<double>(layer) + 0.5});
          }
          layers[std::to_string(layer)] = rows;
        }
        if (broken) layers[std::to_string(body["layers"][0].get<int>())].push_back({1.0, 1.0});
        results.push_back({{"tokens", tokens}, {"layers", layers}, {"truncated", truncated}});
      }
      res.set_content(json{{"results", results}}.dump(), "application/json");
    });
    server_.Post("/v1/embed_sentence", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      const json body = json::parse(req.body);
      json vectors = json::array();
      for (const auto& t : body["texts"]) vectors.push_back({t.get<std::string>().size(), 1.0});
      res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
    });
    server_.Post("/v1/cross_score", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      const json body = json::parse(req.body);
      json scores = json::array();
      for (const auto& p : body["pairs"]) scores.push_back(p[0] == p[1] ? 1.2 : 0.25);
      res.set_content(json{{"scores", scores}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeSidecar() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> requests{0};
  std::atomic<bool> broken{false};

 private:
  static void error(httplib::Response& res, int status, const std::string& code) {
    res.status = status;
    res.set_content(json{{"error", code}, {"detail", "test"}}.dump(), "application/json");
  }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an anssim::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("roster round-trip") {
  FakeSidecar sidecar;
  HttpBackend backend(sidecar.url());
  const auto roster = backend.models();
  REQUIRE(roster.size() == 3);
  CHECK(roster[0].alias == "tok");
  CHECK(roster[0].hub_id == "org/tok");
  CHECK(roster[0].kind == ModelKind::TokenEncoder);
  CHECK(roster[0].num_layers == 3);
  CHECK(roster[0].dim == 2);
  CHECK(roster[0].snapshot == "abc123");
  CHECK(roster[2].kind == ModelKind::CrossEncoder);
  CHECK(backend.model("sent").kind == ModelKind::SentenceEncoder);
  CHECK(code_of([&] { backend.model("nope"); }) == ErrorCode::UnknownModel);
}

TEST_CASE("embed_tokens shapes, determinism and truncation") {
  FakeSidecar sidecar;
  HttpBackend backend(sidecar.url());
  const std::vector<std::string> texts{"uv light", "one two three four five six"};
  const int layers[] = {0, 3};
  const auto a = backend.embed_tokens(texts, "tok", layers);
  const auto b = backend.embed_tokens(texts, "tok", layers);
  REQUIRE(a.size() == 2);
  CHECK(a[0].tokens == std::vector<std::string>{"uv", "light"});
  CHECK_FALSE(a[0].truncated);
  CHECK(a[1].truncated);
  CHECK(a[1].tokens.size() == 4);
  CHECK(a[0].layers.size() == 2);
  CHECK(a[0].layers.at(3).rows() == 2);
  CHECK(a[0].layers.at(3).dim() == 2);
  CHECK(a[0].layers.at(3).row(0)[1] == 3.5);
  for (std::size_t i = 0; i < 2; ++i) {
    for (int l : layers) {
      const auto& x = a[i].layers.at(l);
      const auto& y = b[i].layers.at(l);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        CHECK(std::equal(x.row(r).begin(), x.row(r).end(), y.row(r).begin(), y.row(r).end()));
      }
    }
  }
}

TEST_CASE("server errors map to error codes") {
  FakeSidecar sidecar;
  HttpBackend backend(sidecar.url());
  const std::vector<std::string> texts{"x"};
  CHECK(code_of([&] { backend.embed_tokens(texts, "other", std::vector<int>{0}); }) == ErrorCode::UnknownModel);
  CHECK(code_of([&] { backend.embed_tokens(texts, "tok", std::vector<int>{7}); }) == ErrorCode::LayerOutOfRange);
  sidecar.broken = true;
  CHECK(code_of([&] { backend.embed_tokens(texts, "tok", std::vector<int>{0}); }) == ErrorCode::BackendError);
}

TEST_CASE("sentence and cross endpoints feed the metrics") {
  FakeSidecar sidecar;
  HttpBackend backend(sidecar.url());
  CHECK(sas_score("a", "a", backend, "cross") == 1.0);
  CHECK(sas_score("a", "b", backend, "cross") == 0.25);
  CHECK(bi_encoder_score("ab", "ab", backend, "sent") == doctest::Approx(1.0));
  const auto bs = bertscore("uv light", "uv light", backend, "tok", 2);
  CHECK(bs.f1 == doctest::Approx(1.0));
}

TEST_CASE("empty batches make no request") {
  FakeSidecar sidecar;
  HttpBackend backend(sidecar.url());
  CHECK(backend.embed_tokens({}, "tok", std::vector<int>{0}).empty());
  CHECK(backend.embed_sentence({}, "sent").empty());
  CHECK(backend.cross_score({}, "cross").empty());
  CHECK(sidecar.requests == 0);
}

TEST_CASE("unreachable sidecar") {
  HttpBackendOptions options;
  options.connect_timeout = std::chrono::milliseconds(200);
  HttpBackend backend("http://127.0.0.1:9", options);
  CHECK(code_of([&] { backend.models(); }) == ErrorCode::BackendUnreachable);
  const std::vector<std::string> texts{"x"};
  CHECK(code_of([&] { backend.embed_sentence(texts, "sent"); }) == ErrorCode::BackendUnreachable);
}

TEST_CASE("make_backend") {
  CHECK(dynamic_cast<SyntheticBackend*>(make_backend("synthetic").get()) != nullptr);
  CHECK(dynamic_cast<HttpBackend*>(make_backend("http://localhost:8000").get()) != nullptr);
}
