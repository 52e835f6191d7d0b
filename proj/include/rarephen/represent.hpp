#pragma once

// Contextual mention representation: compose the encoder input, align the
// mention to encoder tokens and mean-pool the token vectors.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rarephen/nerl.hpp"

namespace rarephen {

struct EncodingOptions {
  bool mask_mention = false;
  bool use_structure = true;
  std::size_t window_tokens = 5;

  friend bool operator==(const EncodingOptions&, const EncodingOptions&) = default;
};

struct TokenVector {
  std::string text;
  std::size_t start = 0;  // offsets into the embedded text
  std::size_t end = 0;
  std::vector<double> vector;
};

struct TokenEmbeddingSequence {
  std::vector<TokenVector> tokens;
  std::size_t dim = 0;

  // Throws kOffsetMismatch / kDimensionMismatch when the invariants do not
  // hold for a text of `text_length` scalar values.
  void validate(std::size_t text_length) const;
};

struct MentionVector {
  std::vector<double> values;
  std::string provider_id;
  EncodingOptions options;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual TokenEmbeddingSequence embed(std::string_view text) const = 0;
  virtual std::vector<TokenEmbeddingSequence> embed_batch(
      std::span<const std::string> texts) const;
};

// Deterministic stand-in encoder. Each token maps to a pseudo-random unit
// vector derived from a seeded hash of its case-folded text, so the vectors
// carry no context but have every structural property of a real encoder.
class BaselineProvider final : public EmbeddingProvider {
 public:
  explicit BaselineProvider(std::size_t dim = 64, std::uint64_t seed = 0x5eed);

  std::string id() const override;
  std::size_t dim() const override { return dim_; }
  TokenEmbeddingSequence embed(std::string_view text) const override;

  std::vector<double> token_vector(std::u32string_view token) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

struct RemoteConfig {
  std::string base_url = "http://127.0.0.1:8000";
  std::size_t dim = 768;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight = 4;
  std::size_t batch_size = 32;
};

struct ServiceHealth {
  std::string model_id;
  std::size_t dim = 0;
  std::string layer;
};

// Client for the embedding service (GET /health, POST /embed).
class RemoteProvider final : public EmbeddingProvider {
 public:
  explicit RemoteProvider(RemoteConfig config);

  std::string id() const override;
  std::size_t dim() const override { return config_.dim; }
  TokenEmbeddingSequence embed(std::string_view text) const override;
  std::vector<TokenEmbeddingSequence> embed_batch(
      std::span<const std::string> texts) const override;

  // Fetches /health and checks the advertised dimension and layer.
  ServiceHealth health() const;

 private:
  std::vector<TokenEmbeddingSequence> post_embed(std::span<const std::string> texts) const;
  void ensure_healthy() const;

  RemoteConfig config_;
  mutable std::counting_semaphore<> in_flight_;
  mutable std::once_flag health_once_;
  mutable std::string model_id_;
};

// Parses an /embed reply for `texts`; exposed for testing the wire format.
std::vector<TokenEmbeddingSequence> parse_embed_response(std::string_view body,
                                                         std::span<const std::string> texts,
                                                         std::size_t dim,
                                                         std::string* model_id = nullptr);

struct ComposedInput {
  std::string text;
  Span mention;
};

ComposedInput compose_input(std::string_view context,
                            const std::optional<std::string>& structure_name,
                            Span mention_in_context, const EncodingOptions& options);

// Smallest contiguous run of tokens whose offsets cover [m_start, m_end);
// partially overlapping tokens are included. Returns inclusive indices.
std::pair<std::size_t, std::size_t> char_span_to_token_span(const TokenEmbeddingSequence& seq,
                                                            std::size_t m_start,
                                                            std::size_t m_end);

MentionVector mention_vector(const TokenEmbeddingSequence& seq,
                             std::pair<std::size_t, std::size_t> token_span,
                             std::string provider_id = {}, EncodingOptions options = {});

// compose -> embed -> align -> pool for a batch of candidates.
std::vector<MentionVector> represent_candidates(const std::vector<MentionCandidate>& candidates,
                                                const EmbeddingProvider& provider,
                                                const EncodingOptions& options);

}  // namespace rarephen
