#include <atomic>
#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "httplib.h"
#include "rarephen/error.hpp"
#include "rarephen/io.hpp"
#include "rarephen/represent.hpp"
#include "rarephen/text.hpp"

using namespace rarephen;
using namespace rarephen::testing;

namespace {

TokenEmbeddingSequence seq_of(const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                              std::size_t dim = 2) {
  TokenEmbeddingSequence s;
  s.dim = dim;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    s.tokens.push_back({"t", spans[i].first, spans[i].second,
                        std::vector<double>(dim, static_cast<double>(i))});
  }
  return s;
}

// Serves recorded replies from the fixture directory on a local port.
class RecordedService {
 public:
  explicit RecordedService(std::string embed_body, std::string health_body, int health_status = 200)
      : embed_(std::move(embed_body)), health_(std::move(health_body)) {
    server_.Get("/health", [this, health_status](const httplib::Request&, httplib::Response& res) {
      res.status = health_status;
      res.set_content(health_, "application/json");
    });
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++embed_calls;
      last_request = req.body;
      res.set_content(embed_, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~RecordedService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> embed_calls{0};
  std::string last_request;

 private:
  std::string embed_;
  std::string health_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RemoteConfig remote_at(const std::string& url, std::size_t dim = 4) {
  RemoteConfig c;
  c.base_url = url;
  c.dim = dim;
  c.timeout = std::chrono::milliseconds(2000);
  return c;
}

}  // namespace

TEST_CASE("compose appends the structure name") {
  const auto c = compose_input("on HD line pulled", std::string("Hospital_course"), {3, 5}, {});
  CHECK(c.text == "on HD line pulled [SEP] Hospital_course");
  CHECK(c.mention.start == 3);
  CHECK(c.mention.end == 5);
}

TEST_CASE("compose without structure leaves the context unchanged") {
  CHECK(compose_input("on HD line pulled", std::nullopt, {3, 5}, {}).text == "on HD line pulled");
  EncodingOptions off;
  off.use_structure = false;
  CHECK(compose_input("on HD line pulled", std::string("Hospital_course"), {3, 5}, off).text ==
        "on HD line pulled");
}

TEST_CASE("compose masks the mention") {
  EncodingOptions mask;
  mask.mask_mention = true;
  mask.use_structure = false;
  const auto c = compose_input("on HD line pulled", std::nullopt, {3, 5}, mask);
  CHECK(c.text == "on [MASK] line pulled");
  CHECK(c.mention.start == 3);
  CHECK(c.mention.end == 9);
  CHECK_THROWS_AS(compose_input("abc", std::nullopt, {2, 9}, {}), Error);
}

TEST_CASE("alignment of a span to tokens") {
  const auto s = seq_of({{0, 2}, {3, 5}, {6, 10}, {11, 13}, {13, 14}, {15, 20}, {21, 22}});
  CHECK(char_span_to_token_span(s, 3, 5) == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(char_span_to_token_span(s, 11, 20) == std::pair<std::size_t, std::size_t>{3, 5});
  CHECK(char_span_to_token_span(s, 4, 7) == std::pair<std::size_t, std::size_t>{1, 2});
  CHECK_THROWS_AS(char_span_to_token_span(s, 10, 11), Error);
  CHECK_THROWS_AS(char_span_to_token_span(s, 5, 5), Error);
}

TEST_CASE("property: alignment is the minimal covering run") {
  Gen gen(21);
  for (int round = 0; round < 300; ++round) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t pos = 0;
    for (std::size_t i = 0, n = gen.size(1, 8); i < n; ++i) {
      pos += gen.size(0, 2);
      const std::size_t len = gen.size(1, 4);
      spans.emplace_back(pos, pos + len);
      pos += len;
    }
    const auto s = seq_of(spans);
    const std::size_t a = gen.size(0, pos - 1);
    const std::size_t b = gen.size(a + 1, pos);
    // enumerate all runs, keep the shortest one covering every overlapping token
    std::optional<std::pair<std::size_t, std::size_t>> want;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      for (std::size_t j = i; j < spans.size(); ++j) {
        bool covers = true;
        for (std::size_t k = 0; k < spans.size(); ++k) {
          const bool overlaps = spans[k].first < b && spans[k].second > a;
          if (overlaps && (k < i || k > j)) covers = false;
        }
        bool tight = spans[i].first < b && spans[i].second > a && spans[j].first < b &&
                     spans[j].second > a;
        if (covers && tight && (!want || j - i < want->second - want->first)) want = {{i, j}};
      }
    }
    if (want) {
      REQUIRE(char_span_to_token_span(s, a, b) == *want);
    } else {
      REQUIRE_THROWS_AS(char_span_to_token_span(s, a, b), Error);
    }
  }
}

TEST_CASE("mean pooling") {
  TokenEmbeddingSequence s;
  s.dim = 3;
  s.tokens = {{"a", 0, 1, {1.0, 2.0, 3.0}}, {"b", 2, 3, {3.0, 0.0, -1.0}}, {"c", 4, 5, {5, 5, 5}}};
  CHECK(mention_vector(s, {0, 0}).values == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(mention_vector(s, {0, 1}).values == std::vector<double>{2.0, 1.0, 1.0});
  TokenEmbeddingSequence same;
  same.dim = 2;
  for (std::size_t i = 0; i < 5; ++i) same.tokens.push_back({"u", i * 2, i * 2 + 1, {0.25, -4.0}});
  CHECK(mention_vector(same, {1, 4}).values == std::vector<double>{0.25, -4.0});
  CHECK_THROWS_AS(mention_vector(s, {2, 1}), Error);
  CHECK_THROWS_AS(mention_vector(s, {0, 3}), Error);
}

TEST_CASE("baseline provider is deterministic per token") {
  const BaselineProvider p(16, 3);
  const auto s = p.embed("HD on HD line");
  REQUIRE(s.tokens.size() == 4);
  CHECK(s.tokens[0].vector == s.tokens[2].vector);
  CHECK(s.tokens[0].vector != s.tokens[1].vector);
  CHECK(p.embed("").tokens.empty());
  CHECK(BaselineProvider(16, 3).embed("hd").tokens[0].vector == s.tokens[0].vector);
  CHECK(BaselineProvider(16, 4).embed("HD").tokens[0].vector != s.tokens[0].vector);
  s.validate(13);
}

TEST_CASE("baseline vectors differ across ten fixture tokens") {
  const BaselineProvider p(32, 13);
  const auto s = p.embed("rheumatic fever calciphylaxis NEC ALS PML on HD line [SEP]");
  REQUIRE(s.tokens.size() == 10);
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    double norm = 0.0;
    for (double x : s.tokens[i].vector) norm += x * x;
    CHECK(norm == doctest::Approx(1.0));
    for (std::size_t j = i + 1; j < s.tokens.size(); ++j) {
      CHECK(s.tokens[i].vector != s.tokens[j].vector);
    }
  }
}

TEST_CASE("property: masking hides the surface from the pooled vector") {
  const BaselineProvider p(8, 1);
  Gen gen(22);
  EncodingOptions mask;
  mask.mask_mention = true;
  const std::vector<std::string> words{"alpha", "beta", "HD", "MS", "gamma", "delta"};
  for (int round = 0; round < 50; ++round) {
    MentionCandidate a;
    a.context = gen.pick(words) + " " + "XX" + " " + gen.pick(words);
    a.mention_in_context = {a.context.find("XX"), a.context.find("XX") + 2};
    a.m_end = 2;
    MentionCandidate b = a;
    b.context.replace(b.mention_in_context.start, 2, "YY");
    const auto va = represent_candidates({a}, p, mask);
    const auto vb = represent_candidates({b}, p, mask);
    REQUIRE(va[0].values == vb[0].values);
  }
}

TEST_CASE("represent_candidates pools the mention tokens") {
  const BaselineProvider p(8, 1);
  MentionCandidate c;
  c.context = "on HD line pulled";
  c.mention_in_context = {3, 5};
  c.structure_name = "Hospital_course";
  const auto v = represent_candidates({c}, p, {});
  REQUIRE(v.size() == 1);
  CHECK(v[0].values == p.token_vector(U"HD"));
  CHECK(v[0].provider_id == p.id());
}

TEST_CASE("sequence validation") {
  auto s = seq_of({{0, 2}, {3, 5}});
  CHECK_NOTHROW(s.validate(5));
  CHECK_THROWS_AS(s.validate(4), Error);
  s.tokens[1].vector.push_back(1.0);
  CHECK_THROWS_AS(s.validate(5), Error);
  auto overlap = seq_of({{0, 3}, {2, 5}});
  CHECK_THROWS_AS(overlap.validate(5), Error);
}

TEST_CASE("recorded reply parses into a three-token sequence") {
  const std::string body = io::read_file(fixture("embed_reply.json"));
  const std::vector<std::string> texts{"on HD line"};
  std::string model;
  const auto seqs = parse_embed_response(body, texts, 4, &model);
  REQUIRE(seqs.size() == 1);
  CHECK(seqs[0].tokens.size() == 3);
  CHECK(model == "recorded-encoder");
  CHECK(seqs[0].tokens[1].text == "HD");
  try {
    parse_embed_response(body, texts, 8);
    FAIL("expected a dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
  }
  CHECK_THROWS_AS(parse_embed_response("not json", texts, 4), Error);
  const std::vector<std::string> two{"on HD line", "x"};
  CHECK_THROWS_AS(parse_embed_response(body, two, 4), Error);
  // offsets past the end of the request text
  const std::vector<std::string> short_text{"on HD"};
  CHECK_THROWS_AS(parse_embed_response(body, short_text, 4), Error);
}

TEST_CASE("remote provider against the recorded service") {
  RecordedService svc(io::read_file(fixture("embed_reply.json")),
                      io::read_file(fixture("health_reply.json")));
  const RemoteProvider p(remote_at(svc.url()));
  CHECK(p.health().model_id == "recorded-encoder");
  const auto seq = p.embed("on HD line");
  CHECK(seq.tokens.size() == 3);
  CHECK(seq.dim == 4);
  CHECK(svc.embed_calls == 1);
  CHECK(nlohmann::json::parse(svc.last_request)["texts"][0] == "on HD line");

  MentionCandidate c;
  c.context = "on HD line";
  c.mention_in_context = {3, 5};
  EncodingOptions plain;
  plain.use_structure = false;
  const auto v = represent_candidates({c}, p, plain);
  CHECK(v[0].values == std::vector<double>{1.0, -1.0, 0.5, 0.0});
}

TEST_CASE("remote provider rejects a dimension disagreement") {
  RecordedService svc(io::read_file(fixture("embed_reply.json")),
                      io::read_file(fixture("health_reply.json")));
  const RemoteProvider p(remote_at(svc.url(), 8));
  try {
    p.embed("on HD line");
    FAIL("expected a dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
  }
  CHECK(svc.embed_calls == 0);
}

TEST_CASE("remote provider rejects the wrong layer and a loading service") {
  RecordedService wrong(io::read_file(fixture("embed_reply.json")),
                        R"({"model_id": "m", "dim": 4, "layer": "last"})");
  try {
    RemoteProvider(remote_at(wrong.url())).health();
    FAIL("expected a protocol error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kProtocol);
  }
  RecordedService loading("{}", R"({"detail": "loading"})", 503);
  try {
    RemoteProvider(remote_at(loading.url())).embed("x");
    FAIL("expected a transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTransport);
  }
}

TEST_CASE("unreachable service is a transport error") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  auto cfg = remote_at("http://127.0.0.1:" + std::to_string(port));
  cfg.timeout = std::chrono::milliseconds(500);
  const RemoteProvider p(cfg);
  try {
    p.embed("on HD line");
    FAIL("expected a transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTransport);
  }
}
