// cosplade: batch pipelines for conversational sparse retrieval.
//
// Subcommands: synth, index, train, search, rerank-prep, eval. Every
// command reads an optional TOML-style config file; command-line flags win
// over config values. All randomness flows from the single configured seed.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cosplade/pipeline.hpp"

namespace {

struct Overrides {
  std::optional<std::string> vocab, corpus, conversations, index, checkpoints, run, qrels,
      enriched, pairs, report, per_query_report, variant, scope;
  std::optional<std::size_t> keywords, topk, epochs, pairs_per_query, eval_depth;
  std::optional<std::uint64_t> seed;
  std::optional<bool> include_missing;
};

void add_common_options(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "TOML-style config file");
  cmd->add_option("--seed", ov.seed, "base seed for all randomness");
  cmd->add_option("--variant", ov.variant, "pipeline variant: raw|flat|dual");
  cmd->add_option("--scope", ov.scope, "answer scope: last|all");
  cmd->add_option("--keywords", ov.keywords, "keyword budget K");
  cmd->add_option("--topk", ov.topk, "retrieval depth");
  cmd->add_option("--vocab", ov.vocab, "vocabulary file (one term per line)");
  cmd->add_option("--corpus", ov.corpus, "corpus JSONL");
  cmd->add_option("--conversations", ov.conversations, "conversations JSONL");
  cmd->add_option("--index", ov.index, "index file");
  cmd->add_option("--checkpoints", ov.checkpoints, "checkpoint directory");
  cmd->add_option("--run", ov.run, "TREC run file");
  cmd->add_option("--qrels", ov.qrels, "TREC qrels file");
  cmd->add_option("--enriched", ov.enriched, "enriched-query JSONL output");
  cmd->add_option("--pairs", ov.pairs, "sampled pair TSV output");
  cmd->add_option("--report", ov.report, "metric report TSV output");
  cmd->add_option("--per-query", ov.per_query_report, "per-query metric TSV output");
  cmd->add_option("--epochs", ov.epochs, "training epochs");
  cmd->add_option("--pairs-per-query", ov.pairs_per_query, "sampled pairs per query");
  cmd->add_option("--eval-depth", ov.eval_depth, "metric cutoff X (defaults to topk)");
  cmd->add_flag("--include-missing", ov.include_missing,
                "score judged queries missing from the run as 0");
}

cosplade::PipelineConfig resolve_config(const std::string& config_path, const Overrides& ov) {
  cosplade::PipelineConfig cfg;
  if (!config_path.empty()) cfg = cosplade::PipelineConfig::load(config_path);

  auto apply = [](auto& target, const auto& value) {
    if (value) target = *value;
  };
  apply(cfg.vocab, ov.vocab);
  apply(cfg.corpus, ov.corpus);
  apply(cfg.conversations, ov.conversations);
  apply(cfg.index, ov.index);
  apply(cfg.checkpoints, ov.checkpoints);
  apply(cfg.run, ov.run);
  apply(cfg.qrels, ov.qrels);
  apply(cfg.enriched, ov.enriched);
  apply(cfg.pairs, ov.pairs);
  apply(cfg.report, ov.report);
  apply(cfg.per_query_report, ov.per_query_report);
  apply(cfg.variant, ov.variant);
  apply(cfg.scope, ov.scope);
  apply(cfg.keywords, ov.keywords);
  apply(cfg.topk, ov.topk);
  apply(cfg.seed, ov.seed);
  apply(cfg.epochs, ov.epochs);
  apply(cfg.pairs_per_query, ov.pairs_per_query);
  apply(cfg.eval_depth, ov.eval_depth);
  apply(cfg.include_missing, ov.include_missing);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conversational sparse retrieval pipelines"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto* synth = app.add_subcommand("synth", "generate the synthetic conversational suite");
  auto* index = app.add_subcommand("index", "build the inverted index from a corpus");
  auto* train = app.add_subcommand("train", "train the query/answer encoders");
  auto* search = app.add_subcommand("search", "retrieve per conversation turn, write a run");
  auto* rerank = app.add_subcommand("rerank-prep", "export reranker prompts and pairs");
  auto* eval = app.add_subcommand("eval", "score a run against qrels");
  for (auto* cmd : {synth, index, train, search, rerank, eval}) {
    add_common_options(cmd, config_path, ov);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    cosplade::PipelineConfig cfg = resolve_config(config_path, ov);
    if (synth->parsed()) {
      auto summary = cosplade::run_synth(cfg);
      std::printf("generated %zu conversations, %zu documents, %zu judged queries\n",
                  summary.conversations, summary.documents, summary.judged_queries);
    } else if (index->parsed()) {
      std::size_t docs = cosplade::run_index(cfg);
      std::printf("indexed %zu documents into %s\n", docs, cfg.index.c_str());
    } else if (train->parsed()) {
      auto result = cosplade::run_train(cfg);
      std::printf("trained %zu epoch(s); mean loss %.6f -> %.6f\n", result.loss_trace.size() - 1,
                  result.loss_trace.front(), result.loss_trace.back());
    } else if (search->parsed()) {
      std::size_t queries = cosplade::run_search(cfg);
      std::printf("wrote run for %zu queries to %s\n", queries, cfg.run.c_str());
    } else if (rerank->parsed()) {
      auto summary = cosplade::run_rerank_prep(cfg);
      std::printf("wrote %zu prompts and %zu pairs (%zu short runs skipped)\n", summary.prompts,
                  summary.pairs, summary.short_runs_skipped);
    } else if (eval->parsed()) {
      auto results = cosplade::run_eval(cfg);
      for (const auto& [name, metric] : results) {
        std::printf("%-12s %.4f +/- %.4f over %zu queries\n", name.c_str(), metric.mean,
                    metric.std_error, metric.per_query.size());
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
