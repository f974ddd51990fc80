#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cosplade/contextualize.hpp"
#include "cosplade/conversation.hpp"
#include "cosplade/encoder.hpp"
#include "cosplade/sparse.hpp"
#include "cosplade/tokenizer.hpp"

namespace cosplade {

/// Minimal trainable encoder: per-token logits are an embedding lookup
/// followed by a linear projection plus bias, aggregated by the standard
/// ReLU / log-saturation / max-pool pipeline.
struct ToyEncoderParams {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 0;
  std::vector<double> embedding;   // vocab_size x embed_dim, row-major
  std::vector<double> projection;  // embed_dim x vocab_size, row-major
  std::vector<double> bias;        // vocab_size

  static ToyEncoderParams zeros(std::size_t vocab_size, std::size_t embed_dim);
  static ToyEncoderParams random_init(std::size_t vocab_size, std::size_t embed_dim,
                                      std::uint64_t seed, double scale = 0.1);

  /// Versioned binary checkpoint.
  void save(const std::string& path) const;
  static ToyEncoderParams load(const std::string& path);

  std::size_t parameter_count() const {
    return embedding.size() + projection.size() + bias.size();
  }

  friend bool operator==(const ToyEncoderParams&, const ToyEncoderParams&) = default;
};

struct ToyForward {
  TokenLogits logits;
  SparseVec vec;
};

/// logits[t] = embedding[token_t] * projection + bias; vec = aggregated.
/// Token ids must be < vocab_size.
ToyForward toy_forward(const ToyEncoderParams& params, std::span<const TermId> tokens);

/// Parameter gradients, same shapes as the parameters.
struct ToyEncoderGrads {
  std::vector<double> embedding;
  std::vector<double> projection;
  std::vector<double> bias;

  void accumulate(const ToyEncoderGrads& other, double factor = 1.0);
  void scale_by(double factor);
};

/// Chain rule from an upstream gradient over the |V| output dims back to
/// the parameters: max-pool routes to the first argmax token position,
/// log saturation contributes 1/(1+x), and the ReLU mask zeroes
/// coordinates whose best logit is not positive.
ToyEncoderGrads toy_backward(const ToyEncoderParams& params, std::span<const TermId> tokens,
                             std::span<const double> upstream);

/// Encoder-interface adapter: tokenizes text and runs the forward pass.
class ToyEncoder final : public Encoder {
 public:
  ToyEncoder(ToyEncoderParams params, const Vocabulary& vocab,
             std::size_t max_tokens = Tokenizer::kDefaultMaxTokens);

  SparseVec encode(std::string_view text) const override;
  std::size_t vocab_size() const override { return params_.vocab_size; }

  const ToyEncoderParams& params() const { return params_; }
  ToyEncoderParams& params() { return params_; }
  const Tokenizer& tokenizer() const { return tokenizer_; }

 private:
  ToyEncoderParams params_;
  Tokenizer tokenizer_;
};

/// Standard Adam with bias correction.
struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(std::size_t parameter_count)
      : first_moment_(parameter_count, 0.0), second_moment_(parameter_count, 0.0) {}

  void step(std::span<double> params, std::span<const double> grads, const AdamConfig& cfg);

 private:
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
  std::uint64_t steps_ = 0;
};

struct TrainConfig {
  std::size_t batch_size = 16;
  double lr_queries = 2e-5;
  double lr_answers = 3e-5;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  AnswerScope scope = AnswerScope::kLast;
  std::size_t embed_dim = 32;
  std::size_t max_tokens = Tokenizer::kDefaultMaxTokens;
  double init_scale = 0.1;
};

struct TrainResult {
  ToyEncoderParams queries;
  ToyEncoderParams answers;
  /// loss_trace[0] is the dataset mean combined loss before training,
  /// loss_trace[e] the mean after epoch e.
  std::vector<double> loss_trace;
};

/// Fine-tunes the query-history and answer-history encoders against the
/// frozen gold representations by minimizing the combined loss with Adam,
/// one learning rate per encoder. Every turn of every conversation is a
/// training example and must carry a gold query. Deterministic under
/// (seed, config, data).
TrainResult train(std::span<const Conversation> conversations, const Vocabulary& vocab,
                  const Encoder& frozen, const TrainConfig& cfg);

}  // namespace cosplade
