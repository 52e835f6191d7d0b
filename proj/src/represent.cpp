#include "rarephen/represent.hpp"

#include <cmath>
#include <numbers>

#include "httplib.h"
#include "json.hpp"
#include "rarephen/error.hpp"
#include "rarephen/text.hpp"

namespace rarephen {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double unit_uniform(std::uint64_t& state) {
  // 53 random bits in (0, 1)
  return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void TokenEmbeddingSequence::validate(std::size_t text_length) const {
  if (dim == 0) throw Error(ErrorKind::kDimensionMismatch, "embedding dimension is zero");
  std::size_t previous_end = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.vector.size() != dim) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "token " + std::to_string(i) + " has " + std::to_string(t.vector.size()) +
                      " components, expected " + std::to_string(dim));
    }
    if (t.start >= t.end || t.end > text_length || t.start < previous_end) {
      throw Error(ErrorKind::kOffsetMismatch,
                  "token " + std::to_string(i) + " offsets [" + std::to_string(t.start) + ", " +
                      std::to_string(t.end) + ") do not fit a text of length " +
                      std::to_string(text_length));
    }
    previous_end = t.end;
  }
}

std::vector<TokenEmbeddingSequence> EmbeddingProvider::embed_batch(
    std::span<const std::string> texts) const {
  std::vector<TokenEmbeddingSequence> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

BaselineProvider::BaselineProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw Error(ErrorKind::kInvalidArgument, "baseline dimension must be positive");
}

std::string BaselineProvider::id() const {
  return "baseline-d" + std::to_string(dim_) + "-s" + std::to_string(seed_);
}

std::vector<double> BaselineProvider::token_vector(std::u32string_view token) const {
  // Markers hash in their own namespace so no text token can collide with them.
  const bool marker = token == text::kSepMarker || token == text::kMaskMarker;
  std::u32string key(token);
  if (!marker) {
    for (char32_t& c : key) c = text::fold(c);
  }
  std::uint64_t state = fnv1a(text::encode_utf8(key), marker ? 0x6d61726b6572ULL : 0xcbf29ce484222325ULL);
  state ^= seed_ * 0x9e3779b97f4a7c15ULL;

  std::vector<double> v(dim_);
  for (std::size_t i = 0; i < dim_; i += 2) {
    // Box-Muller
    const double r = std::sqrt(-2.0 * std::log(unit_uniform(state)));
    const double theta = 2.0 * std::numbers::pi * unit_uniform(state);
    v[i] = r * std::cos(theta);
    if (i + 1 < dim_) v[i + 1] = r * std::sin(theta);
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

TokenEmbeddingSequence BaselineProvider::embed(std::string_view utf8) const {
  const std::u32string text = text::decode_utf8(utf8);
  TokenEmbeddingSequence seq;
  seq.dim = dim_;
  for (const auto& t : text::tokenize(text, /*special_markers=*/true)) {
    const std::u32string_view piece = std::u32string_view(text).substr(t.start, t.end - t.start);
    seq.tokens.push_back({text::encode_utf8(piece), t.start, t.end, token_vector(piece)});
  }
  return seq;
}

RemoteProvider::RemoteProvider(RemoteConfig config)
    : config_(std::move(config)),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(config_.max_in_flight, 1))) {
  if (config_.dim == 0) throw Error(ErrorKind::kInvalidArgument, "remote dimension must be positive");
  if (config_.batch_size == 0) config_.batch_size = 1;
}

std::string RemoteProvider::id() const {
  return "remote-d" + std::to_string(config_.dim) + "-" + config_.base_url;
}

ServiceHealth RemoteProvider::health() const {
  httplib::Client client(config_.base_url);
  const auto secs = config_.timeout.count() / 1000;
  const auto usecs = (config_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  auto res = client.Get("/health");
  if (!res) {
    throw Error(ErrorKind::kTransport,
                "GET " + config_.base_url + "/health failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kTransport, "GET /health returned HTTP " + std::to_string(res->status));
  }
  ServiceHealth h;
  try {
    const json j = json::parse(res->body);
    h.model_id = j.at("model_id").get<std::string>();
    h.dim = j.at("dim").get<std::size_t>();
    h.layer = j.at("layer").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kProtocol, std::string("malformed /health reply: ") + e.what());
  }
  if (h.dim != config_.dim) {
    throw Error(ErrorKind::kDimensionMismatch, "service advertises dim " + std::to_string(h.dim) +
                                                   ", configured " + std::to_string(config_.dim));
  }
  if (h.layer != "second_to_last") {
    throw Error(ErrorKind::kProtocol, "service exposes layer '" + h.layer +
                                          "', expected second_to_last");
  }
  return h;
}

void RemoteProvider::ensure_healthy() const {
  std::call_once(health_once_, [this] { model_id_ = health().model_id; });
}

TokenEmbeddingSequence RemoteProvider::embed(std::string_view text) const {
  const std::string owned(text);
  return std::move(embed_batch(std::span<const std::string>(&owned, 1)).front());
}

std::vector<TokenEmbeddingSequence> RemoteProvider::embed_batch(
    std::span<const std::string> texts) const {
  ensure_healthy();
  std::vector<TokenEmbeddingSequence> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); i += config_.batch_size) {
    auto chunk = texts.subspan(i, std::min(config_.batch_size, texts.size() - i));
    for (auto& seq : post_embed(chunk)) out.push_back(std::move(seq));
  }
  return out;
}

std::vector<TokenEmbeddingSequence> RemoteProvider::post_embed(
    std::span<const std::string> texts) const {
  const json request = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  in_flight_.acquire();
  httplib::Result res;
  {
    httplib::Client client(config_.base_url);
    const auto secs = config_.timeout.count() / 1000;
    const auto usecs = (config_.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    res = client.Post("/embed", request.dump(), "application/json");
  }
  in_flight_.release();
  if (!res) {
    throw Error(ErrorKind::kTransport,
                "POST " + config_.base_url + "/embed failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kTransport, "POST /embed returned HTTP " + std::to_string(res->status) +
                                           ": " + res->body);
  }
  return parse_embed_response(res->body, texts, config_.dim);
}

std::vector<TokenEmbeddingSequence> parse_embed_response(std::string_view body,
                                                         std::span<const std::string> texts,
                                                         std::size_t dim, std::string* model_id) {
  json reply;
  try {
    reply = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kProtocol, std::string("/embed reply is not JSON: ") + e.what());
  }
  std::vector<TokenEmbeddingSequence> out;
  try {
    const std::size_t advertised = reply.at("dim").get<std::size_t>();
    if (advertised != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "reply dim " + std::to_string(advertised) +
                                                     ", configured " + std::to_string(dim));
    }
    if (model_id != nullptr) *model_id = reply.at("model_id").get<std::string>();
    const json& sequences = reply.at("sequences");
    if (!sequences.is_array() || sequences.size() != texts.size()) {
      throw Error(ErrorKind::kProtocol, "reply has " + std::to_string(sequences.size()) +
                                            " sequences for " + std::to_string(texts.size()) +
                                            " texts");
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const json& entry = sequences[i];
      const json& tokens = entry.is_object() ? entry.at("tokens") : entry;
      TokenEmbeddingSequence seq;
      seq.dim = dim;
      for (const json& t : tokens) {
        seq.tokens.push_back({t.at("text").get<std::string>(), t.at("start").get<std::size_t>(),
                              t.at("end").get<std::size_t>(),
                              t.at("vector").get<std::vector<double>>()});
      }
      seq.validate(text::decode_utf8(texts[i]).size());
      out.push_back(std::move(seq));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kProtocol, std::string("malformed /embed reply: ") + e.what());
  }
  return out;
}

ComposedInput compose_input(std::string_view context,
                            const std::optional<std::string>& structure_name,
                            Span mention_in_context, const EncodingOptions& options) {
  std::u32string text = text::decode_utf8(context);
  if (mention_in_context.start >= mention_in_context.end ||
      mention_in_context.end > text.size()) {
    throw Error(ErrorKind::kInvalidArgument, "mention span outside its context");
  }
  Span mention = mention_in_context;
  if (options.mask_mention) {
    text.replace(mention.start, mention.length(), text::kMaskMarker);
    mention.end = mention.start + text::kMaskMarker.size();
  }
  if (options.use_structure && structure_name && !structure_name->empty()) {
    text += U" ";
    text += text::kSepMarker;
    text += U" ";
    text += text::decode_utf8(*structure_name);
  }
  return {text::encode_utf8(text), mention};
}

std::pair<std::size_t, std::size_t> char_span_to_token_span(const TokenEmbeddingSequence& seq,
                                                            std::size_t m_start,
                                                            std::size_t m_end) {
  if (m_start >= m_end) throw Error(ErrorKind::kInvalidArgument, "empty mention span");
  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    const auto& t = seq.tokens[i];
    if (t.start < m_end && t.end > m_start) {
      if (!first) first = i;
      last = i;
    }
  }
  if (!first) {
    throw Error(ErrorKind::kOffsetMismatch, "no token overlaps [" + std::to_string(m_start) +
                                                ", " + std::to_string(m_end) + ")");
  }
  return {*first, last};
}

MentionVector mention_vector(const TokenEmbeddingSequence& seq,
                             std::pair<std::size_t, std::size_t> token_span,
                             std::string provider_id, EncodingOptions options) {
  const auto [first, last] = token_span;
  if (first > last || last >= seq.tokens.size()) {
    throw Error(ErrorKind::kInvalidArgument, "empty or out-of-range token span");
  }
  MentionVector out{std::vector<double>(seq.dim, 0.0), std::move(provider_id), options};
  for (std::size_t i = first; i <= last; ++i) {
    const auto& v = seq.tokens[i].vector;
    if (v.size() != seq.dim) throw Error(ErrorKind::kDimensionMismatch, "token vector length");
    for (std::size_t k = 0; k < seq.dim; ++k) out.values[k] += v[k];
  }
  const double count = static_cast<double>(last - first + 1);
  for (double& x : out.values) {
    x /= count;
    if (!std::isfinite(x)) throw Error(ErrorKind::kInvalidArgument, "non-finite mention vector");
  }
  return out;
}

std::vector<MentionVector> represent_candidates(const std::vector<MentionCandidate>& candidates,
                                                const EmbeddingProvider& provider,
                                                const EncodingOptions& options) {
  std::vector<ComposedInput> inputs;
  std::vector<std::string> texts;
  inputs.reserve(candidates.size());
  texts.reserve(candidates.size());
  for (const auto& c : candidates) {
    inputs.push_back(compose_input(c.context, c.structure_name, c.mention_in_context, options));
    texts.push_back(inputs.back().text);
  }
  const auto sequences = provider.embed_batch(texts);
  if (sequences.size() != candidates.size()) {
    throw Error(ErrorKind::kProtocol, "provider returned the wrong number of sequences");
  }
  std::vector<MentionVector> out;
  out.reserve(candidates.size());
  const std::string id = provider.id();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto span = char_span_to_token_span(sequences[i], inputs[i].mention.start,
                                              inputs[i].mention.end);
    out.push_back(mention_vector(sequences[i], span, id, options));
  }
  return out;
}

}  // namespace rarephen
