#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "cosplade/pipeline.hpp"

using namespace cosplade;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Self-cleaning pipeline workspace with a small synthetic dataset.
struct Workspace {
  fs::path dir;
  PipelineConfig cfg;

  Workspace() {
    dir = fs::temp_directory_path() / "cosplade_pipeline_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    cfg.vocab = (dir / "vocab.txt").string();
    cfg.corpus = (dir / "corpus.jsonl").string();
    cfg.conversations = (dir / "conversations.jsonl").string();
    cfg.index = (dir / "index.bin").string();
    cfg.checkpoints = (dir / "ckpt").string();
    cfg.run = (dir / "run.trec").string();
    cfg.qrels = (dir / "qrels.txt").string();
    cfg.enriched = (dir / "enriched.jsonl").string();
    cfg.pairs = (dir / "pairs.tsv").string();
    cfg.report = (dir / "report.tsv").string();
    cfg.seed = 11;
    cfg.synth_conversations = 30;
    cfg.synth_terms = 60;
    cfg.synth_distractors = 6;
    cfg.topk = 20;
    cfg.epochs = 1;
    cfg.lr_queries = 0.05;
    cfg.lr_answers = 0.05;
    cfg.embed_dim = 16;
    cfg.keywords = 5;
    cfg.pairs_per_query = 4;
  }
  ~Workspace() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("pipeline end to end") {
  Workspace ws;
  auto synth = run_synth(ws.cfg);
  CHECK(synth.conversations == 30);
  CHECK(synth.documents > 0);

  std::size_t docs = run_index(ws.cfg);
  CHECK(docs == synth.documents);

  SUBCASE("raw search is deterministic and evaluable") {
    ws.cfg.variant = "raw";
    std::size_t queries = run_search(ws.cfg);
    CHECK(queries > 0);
    std::string first = slurp(ws.cfg.run);
    run_search(ws.cfg);
    CHECK(slurp(ws.cfg.run) == first);  // byte-identical rerun

    auto results = run_eval(ws.cfg);
    CHECK(results.size() == 5);
    CHECK(fs::exists(ws.cfg.report));
    for (const auto& [name, metric] : results) {
      CHECK(metric.mean >= 0.0);
      CHECK(metric.mean <= 1.0);
    }
  }

  SUBCASE("trained dual search differs from raw") {
    TrainResult trained = run_train(ws.cfg);
    CHECK(trained.loss_trace.back() < trained.loss_trace.front());
    CHECK(fs::exists(fs::path(ws.cfg.checkpoints) / "queries.ckpt"));
    CHECK(fs::exists(fs::path(ws.cfg.checkpoints) / "answers.ckpt"));
    CHECK(fs::exists(fs::path(ws.cfg.checkpoints) / "loss_trace.tsv"));

    ws.cfg.variant = "raw";
    run_search(ws.cfg);
    std::string raw_run = slurp(ws.cfg.run);

    ws.cfg.variant = "dual";
    run_search(ws.cfg);
    CHECK(slurp(ws.cfg.run) != raw_run);

    ws.cfg.variant = "flat";
    run_search(ws.cfg);  // flat uses the queries checkpoint on the flat input
  }

  SUBCASE("rerank prep exports prompts and pairs") {
    ws.cfg.variant = "raw";
    run_search(ws.cfg);
    auto summary = run_rerank_prep(ws.cfg);
    CHECK(summary.prompts > 0);
    CHECK(summary.pairs > 0);
    std::string enriched = slurp(ws.cfg.enriched);
    CHECK(enriched.find("Context:") != std::string::npos);
    CHECK(enriched.find("Keywords:") != std::string::npos);

    auto again = run_rerank_prep(ws.cfg);
    CHECK(again.pairs == summary.pairs);  // seeded, reproducible
    CHECK(slurp(ws.cfg.pairs).find('\t') != std::string::npos);
  }

  SUBCASE("missing inputs fail loudly") {
    ws.cfg.variant = "dual";
    CHECK_THROWS_WITH_AS(run_search(ws.cfg), doctest::Contains("missing checkpoint"),
                         std::runtime_error);

    PipelineConfig no_qrels = ws.cfg;
    no_qrels.variant = "raw";
    run_search(no_qrels);
    no_qrels.qrels = (ws.dir / "nonexistent.txt").string();
    CHECK_THROWS_WITH_AS(run_eval(no_qrels), doctest::Contains("missing qrels"),
                         std::runtime_error);
  }

  SUBCASE("malformed corpus reports the line") {
    std::ofstream out(ws.cfg.corpus, std::ios::app);
    out << "this is not json\n";
    out.close();
    CHECK_THROWS_WITH_AS(run_index(ws.cfg), doctest::Contains("malformed"), std::runtime_error);
  }
}

TEST_CASE("empty corpus indexes zero documents") {
  Workspace ws;
  {
    std::ofstream vocab(ws.cfg.vocab);
    vocab << "[CLS]\n[SEP]\nterm\n";
    std::ofstream corpus(ws.cfg.corpus);
  }
  CHECK(run_index(ws.cfg) == 0);
}

TEST_CASE("empty conversation file searches nothing") {
  Workspace ws;
  run_synth(ws.cfg);
  run_index(ws.cfg);
  std::ofstream(ws.cfg.conversations, std::ios::trunc).close();
  ws.cfg.variant = "raw";
  CHECK(run_search(ws.cfg) == 0);
  CHECK(slurp(ws.cfg.run).empty());
}

TEST_CASE("config file parsing") {
  Workspace ws;
  auto config_path = (ws.dir / "config.toml").string();
  {
    std::ofstream out(config_path);
    out << "# pipeline configuration\n";
    out << "vocab = \"" << ws.cfg.vocab << "\"\n";
    out << "variant = \"flat\"\n";
    out << "topk = 77\n";
    out << "seed = 123\n";
    out << "include_missing = true\n";
    out << "lr_queries = 0.01\n";
  }
  PipelineConfig cfg = PipelineConfig::load(config_path);
  CHECK(cfg.vocab == ws.cfg.vocab);
  CHECK(cfg.variant == "flat");
  CHECK(cfg.topk == 77);
  CHECK(cfg.seed == 123);
  CHECK(cfg.include_missing);
  CHECK(cfg.lr_queries == doctest::Approx(0.01));
  CHECK(cfg.keywords == 10);  // untouched default

  {
    std::ofstream out(config_path);
    out << "mystery_key = 5\n";
  }
  CHECK_THROWS_WITH_AS(PipelineConfig::load(config_path), doctest::Contains("unknown config key"),
                       std::runtime_error);
  {
    std::ofstream out(config_path);
    out << "topk = notanumber\n";
  }
  CHECK_THROWS_AS(PipelineConfig::load(config_path), std::runtime_error);
}
