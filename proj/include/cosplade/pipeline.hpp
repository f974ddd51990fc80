#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cosplade/eval.hpp"
#include "cosplade/toy_encoder.hpp"

namespace cosplade {

/// Batch pipeline configuration: a flat TOML-style file (`key = value`,
/// `#` comments, quoted strings, bare numbers and booleans) plus flag
/// overrides applied by the CLI. Unknown keys are rejected.
struct PipelineConfig {
  // Paths.
  std::string vocab;
  std::string corpus;
  std::string conversations;
  std::string index;
  std::string checkpoints;  // directory: queries.ckpt, answers.ckpt, loss_trace.tsv
  std::string run;
  std::string qrels;
  std::string enriched;
  std::string pairs;
  std::string report;
  std::string per_query_report;  // optional

  // Pipeline switches.
  std::string variant = "dual";  // raw | flat | dual
  std::string scope = "last";    // last | all
  std::size_t keywords = 10;
  std::size_t topk = 1000;
  std::uint64_t seed = 42;
  std::size_t pairs_per_query = 16;
  std::size_t max_tokens = 256;

  // Evaluation cutoffs.
  std::size_t eval_depth = 0;  // 0 = use topk
  std::size_t ndcg_cut = 3;
  bool include_missing = false;

  // Training.
  std::size_t batch_size = 16;
  double lr_queries = 2e-5;
  double lr_answers = 3e-5;
  std::size_t epochs = 1;
  std::size_t embed_dim = 32;
  double init_scale = 0.1;

  // Synthetic suite generation.
  std::size_t synth_terms = 200;
  std::size_t synth_conversations = 500;
  std::size_t synth_distractors = 20;

  static PipelineConfig load(const std::string& path);
};

struct SynthSummary {
  std::size_t conversations = 0;
  std::size_t documents = 0;
  std::size_t judged_queries = 0;
};

struct RerankPrepSummary {
  std::size_t prompts = 0;
  std::size_t pairs = 0;
  std::size_t short_runs_skipped = 0;
};

/// Generates the synthetic conversational suite and writes vocab, corpus,
/// conversations and qrels to the configured paths.
SynthSummary run_synth(const PipelineConfig& cfg);

/// Builds the inverted index from the corpus JSONL; returns the doc count.
std::size_t run_index(const PipelineConfig& cfg);

/// Trains the two encoders and writes checkpoints plus the loss trace.
TrainResult run_train(const PipelineConfig& cfg);

/// Writes a TREC run over every conversation turn, tagged with the
/// pipeline variant; returns the number of queries written.
std::size_t run_search(const PipelineConfig& cfg);

/// Exports enriched reranker prompts (JSONL) and sampled distillation
/// pairs (TSV) from an existing run.
RerankPrepSummary run_rerank_prep(const PipelineConfig& cfg);

/// Reads run + qrels and writes the metric report TSV.
std::vector<std::pair<std::string, MetricResult>> run_eval(const PipelineConfig& cfg);

}  // namespace cosplade
