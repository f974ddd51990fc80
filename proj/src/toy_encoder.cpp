#include "cosplade/toy_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "cosplade/losses.hpp"
#include "cosplade/util.hpp"

namespace cosplade {

ToyEncoderParams ToyEncoderParams::zeros(std::size_t vocab_size, std::size_t embed_dim) {
  if (vocab_size == 0 || embed_dim == 0) {
    throw std::invalid_argument("vocab_size and embed_dim must be >= 1");
  }
  ToyEncoderParams p;
  p.vocab_size = vocab_size;
  p.embed_dim = embed_dim;
  p.embedding.assign(vocab_size * embed_dim, 0.0);
  p.projection.assign(embed_dim * vocab_size, 0.0);
  p.bias.assign(vocab_size, 0.0);
  return p;
}

ToyEncoderParams ToyEncoderParams::random_init(std::size_t vocab_size, std::size_t embed_dim,
                                               std::uint64_t seed, double scale) {
  ToyEncoderParams p = zeros(vocab_size, embed_dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  for (double& w : p.embedding) w = dist(rng);
  for (double& w : p.projection) w = dist(rng);
  // bias stays zero
  return p;
}

namespace {

constexpr char kCheckpointMagic[8] = {'C', 'O', 'S', 'P', 'T', 'O', 'Y', '\n'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::vector<double>& v, const char* what) {
  auto bytes = static_cast<std::streamsize>(v.size() * sizeof(double));
  in.read(reinterpret_cast<char*>(v.data()), bytes);
  if (in.gcount() != bytes) {
    throw std::runtime_error(std::string("truncated checkpoint while reading ") + what);
  }
}

}  // namespace

void ToyEncoderParams::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  std::uint32_t version = kCheckpointVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  std::uint64_t v = vocab_size, d = embed_dim;
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  write_doubles(out, embedding);
  write_doubles(out, projection);
  write_doubles(out, bias);
  if (!out) throw std::runtime_error("write failure on checkpoint: " + path);
}

ToyEncoderParams ToyEncoderParams::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (in.gcount() != sizeof(version) || version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version in " + path);
  }
  std::uint64_t v = 0, d = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  in.read(reinterpret_cast<char*>(&d), sizeof(d));
  if (!in || v == 0 || d == 0) throw std::runtime_error("corrupt checkpoint header: " + path);
  ToyEncoderParams p = zeros(v, d);
  read_doubles(in, p.embedding, "embedding");
  read_doubles(in, p.projection, "projection");
  read_doubles(in, p.bias, "bias");
  return p;
}

ToyForward toy_forward(const ToyEncoderParams& params, std::span<const TermId> tokens) {
  if (tokens.empty()) throw std::invalid_argument("empty input");
  const std::size_t V = params.vocab_size;
  const std::size_t D = params.embed_dim;
  TokenLogits logits(tokens.size(), V);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    TermId tok = tokens[t];
    if (tok >= V) {
      throw std::invalid_argument("token id " + std::to_string(tok) + " >= vocabulary size " +
                                  std::to_string(V));
    }
    const double* embed_row = params.embedding.data() + static_cast<std::size_t>(tok) * D;
    for (std::size_t v = 0; v < V; ++v) logits.at(t, v) = params.bias[v];
    for (std::size_t j = 0; j < D; ++j) {
      double e = embed_row[j];
      if (e == 0.0) continue;
      const double* proj_row = params.projection.data() + j * V;
      for (std::size_t v = 0; v < V; ++v) logits.at(t, v) += e * proj_row[v];
    }
  }
  SparseVec vec = splade_aggregate(logits);
  return {std::move(logits), std::move(vec)};
}

void ToyEncoderGrads::accumulate(const ToyEncoderGrads& other, double factor) {
  for (std::size_t i = 0; i < embedding.size(); ++i) embedding[i] += factor * other.embedding[i];
  for (std::size_t i = 0; i < projection.size(); ++i) {
    projection[i] += factor * other.projection[i];
  }
  for (std::size_t i = 0; i < bias.size(); ++i) bias[i] += factor * other.bias[i];
}

void ToyEncoderGrads::scale_by(double factor) {
  for (double& g : embedding) g *= factor;
  for (double& g : projection) g *= factor;
  for (double& g : bias) g *= factor;
}

ToyEncoderGrads toy_backward(const ToyEncoderParams& params, std::span<const TermId> tokens,
                             std::span<const double> upstream) {
  const std::size_t V = params.vocab_size;
  const std::size_t D = params.embed_dim;
  if (upstream.size() != V) {
    throw std::invalid_argument("upstream gradient length must equal the vocabulary size");
  }
  ToyForward fwd = toy_forward(params, tokens);

  ToyEncoderGrads grads;
  grads.embedding.assign(params.embedding.size(), 0.0);
  grads.projection.assign(params.projection.size(), 0.0);
  grads.bias.assign(params.bias.size(), 0.0);

  for (std::size_t v = 0; v < V; ++v) {
    double g = upstream[v];
    if (g == 0.0) continue;
    // Max-pool subgradient: first argmax token position.
    std::size_t best_t = 0;
    double best = fwd.logits.at(0, v);
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      double z = fwd.logits.at(t, v);
      if (z > best) {
        best = z;
        best_t = t;
      }
    }
    if (best <= 0.0) continue;  // killed by ReLU
    double gz = g / (1.0 + best);  // log-saturation derivative

    grads.bias[v] += gz;
    TermId tok = tokens[best_t];
    const double* embed_row = params.embedding.data() + static_cast<std::size_t>(tok) * D;
    double* embed_grad = grads.embedding.data() + static_cast<std::size_t>(tok) * D;
    for (std::size_t j = 0; j < D; ++j) {
      grads.projection[j * V + v] += gz * embed_row[j];
      embed_grad[j] += gz * params.projection[j * V + v];
    }
  }
  return grads;
}

ToyEncoder::ToyEncoder(ToyEncoderParams params, const Vocabulary& vocab, std::size_t max_tokens)
    : params_(std::move(params)), tokenizer_(vocab, max_tokens) {
  if (params_.vocab_size != vocab.size()) {
    throw std::invalid_argument("encoder parameters disagree with the vocabulary size");
  }
}

SparseVec ToyEncoder::encode(std::string_view text) const {
  auto tokens = tokenizer_.tokenize(text);
  if (tokens.empty()) return SparseVec(params_.vocab_size);
  return toy_forward(params_, tokens).vec;
}

void AdamState::step(std::span<double> params, std::span<const double> grads,
                     const AdamConfig& cfg) {
  if (params.size() != first_moment_.size() || grads.size() != first_moment_.size()) {
    throw std::invalid_argument("Adam state size mismatch");
  }
  ++steps_;
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(steps_));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grads[i];
    first_moment_[i] = cfg.beta1 * first_moment_[i] + (1.0 - cfg.beta1) * g;
    second_moment_[i] = cfg.beta2 * second_moment_[i] + (1.0 - cfg.beta2) * g * g;
    double m_hat = first_moment_[i] / bc1;
    double v_hat = second_moment_[i] / bc2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

namespace {

struct TrainExample {
  const Conversation* conv;
  int turn;  // 1-based
};

struct ExampleGrads {
  ToyEncoderGrads queries;
  ToyEncoderGrads answers;
  double loss = 0.0;
};

ExampleGrads example_pass(const TrainExample& ex, const Tokenizer& tokenizer,
                          const ToyEncoderParams& theta_q, const ToyEncoderParams& theta_a,
                          const Encoder& frozen, AnswerScope scope, bool with_grads) {
  const auto V = theta_q.vocab_size;

  auto query_tokens = tokenizer.tokenize(build_query_history_input(*ex.conv, ex.turn));
  std::vector<std::vector<TermId>> answer_tokens;
  for (const auto& input : build_answer_inputs(*ex.conv, ex.turn, scope)) {
    answer_tokens.push_back(tokenizer.tokenize(input));
  }

  auto encode_tokens = [V](const ToyEncoderParams& p, std::span<const TermId> toks) {
    if (toks.empty()) return SparseVec(V);
    return toy_forward(p, toks).vec;
  };

  SparseVec query_vec = encode_tokens(theta_q, query_tokens);
  std::vector<SparseVec> answer_vecs;
  answer_vecs.reserve(answer_tokens.size());
  for (const auto& toks : answer_tokens) answer_vecs.push_back(encode_tokens(theta_a, toks));
  SparseVec answers_rep = mean(answer_vecs);
  SparseVec pred = add(query_vec, answers_rep);
  SparseVec gold = gold_representation(*ex.conv, ex.turn, frozen);

  LossValue loss = combined_loss(pred, answers_rep, gold);

  ExampleGrads out;
  out.loss = loss.value;
  if (!with_grads) return out;

  out.queries.embedding.assign(theta_q.embedding.size(), 0.0);
  out.queries.projection.assign(theta_q.projection.size(), 0.0);
  out.queries.bias.assign(theta_q.bias.size(), 0.0);
  out.answers = out.queries;

  if (!query_tokens.empty()) {
    out.queries = toy_backward(theta_q, query_tokens, loss.grad_queries);
  }
  // The answer representation is the mean of the per-answer encodings, so
  // each input receives 1/k of the upstream gradient.
  double inv_k = 1.0 / static_cast<double>(answer_tokens.size());
  std::vector<double> upstream(loss.grad_answers);
  for (double& g : upstream) g *= inv_k;
  for (const auto& toks : answer_tokens) {
    if (toks.empty()) continue;
    out.answers.accumulate(toy_backward(theta_a, toks, upstream));
  }
  return out;
}

double dataset_mean_loss(std::span<const TrainExample> examples, const Tokenizer& tokenizer,
                         const ToyEncoderParams& theta_q, const ToyEncoderParams& theta_a,
                         const Encoder& frozen, AnswerScope scope) {
  double total = 0.0;
  for (const auto& ex : examples) {
    total += example_pass(ex, tokenizer, theta_q, theta_a, frozen, scope, false).loss;
  }
  return examples.empty() ? 0.0 : total / static_cast<double>(examples.size());
}

}  // namespace

TrainResult train(std::span<const Conversation> conversations, const Vocabulary& vocab,
                  const Encoder& frozen, const TrainConfig& cfg) {
  if (cfg.batch_size == 0 || cfg.epochs == 0) {
    throw std::invalid_argument("batch_size and epochs must be >= 1");
  }
  if (frozen.vocab_size() != vocab.size()) {
    throw std::invalid_argument("frozen encoder disagrees with the vocabulary size");
  }

  std::vector<TrainExample> examples;
  for (const auto& conv : conversations) {
    for (int n = 1; n <= conv.size(); ++n) {
      if (!conv.turn(n).gold) {
        throw std::runtime_error("conversation " + conv.id + " turn " + std::to_string(n) +
                                 " has no gold query; training requires gold queries");
      }
      examples.push_back({&conv, n});
    }
  }

  TrainResult result;
  result.queries = ToyEncoderParams::random_init(
      vocab.size(), cfg.embed_dim, derive_seed(cfg.seed, "train.init.queries"), cfg.init_scale);
  result.answers = ToyEncoderParams::random_init(
      vocab.size(), cfg.embed_dim, derive_seed(cfg.seed, "train.init.answers"), cfg.init_scale);

  Tokenizer tokenizer(vocab, cfg.max_tokens);

  if (examples.empty()) {
    result.loss_trace.push_back(0.0);
    return result;
  }

  result.loss_trace.push_back(dataset_mean_loss(examples, tokenizer, result.queries,
                                                result.answers, frozen, cfg.scope));

  // One Adam state per parameter tensor.
  AdamState adam_q_embed(result.queries.embedding.size());
  AdamState adam_q_proj(result.queries.projection.size());
  AdamState adam_q_bias(result.queries.bias.size());
  AdamState adam_a_embed(result.answers.embedding.size());
  AdamState adam_a_proj(result.answers.projection.size());
  AdamState adam_a_bias(result.answers.bias.size());
  AdamConfig adam_cfg_q{cfg.lr_queries};
  AdamConfig adam_cfg_a{cfg.lr_answers};

  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, "train.shuffle"));
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::size_t stop = std::min(order.size(), start + cfg.batch_size);

      ToyEncoderGrads batch_q;
      batch_q.embedding.assign(result.queries.embedding.size(), 0.0);
      batch_q.projection.assign(result.queries.projection.size(), 0.0);
      batch_q.bias.assign(result.queries.bias.size(), 0.0);
      ToyEncoderGrads batch_a = batch_q;

      for (std::size_t i = start; i < stop; ++i) {
        ExampleGrads g = example_pass(examples[order[i]], tokenizer, result.queries,
                                      result.answers, frozen, cfg.scope, true);
        batch_q.accumulate(g.queries);
        batch_a.accumulate(g.answers);
      }
      double inv_batch = 1.0 / static_cast<double>(stop - start);
      batch_q.scale_by(inv_batch);
      batch_a.scale_by(inv_batch);

      adam_q_embed.step(result.queries.embedding, batch_q.embedding, adam_cfg_q);
      adam_q_proj.step(result.queries.projection, batch_q.projection, adam_cfg_q);
      adam_q_bias.step(result.queries.bias, batch_q.bias, adam_cfg_q);
      adam_a_embed.step(result.answers.embedding, batch_a.embedding, adam_cfg_a);
      adam_a_proj.step(result.answers.projection, batch_a.projection, adam_cfg_a);
      adam_a_bias.step(result.answers.bias, batch_a.bias, adam_cfg_a);
    }
    result.loss_trace.push_back(dataset_mean_loss(examples, tokenizer, result.queries,
                                                  result.answers, frozen, cfg.scope));
  }
  return result;
}

}  // namespace cosplade
