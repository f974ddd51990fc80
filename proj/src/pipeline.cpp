#include "cosplade/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cosplade/contextualize.hpp"
#include "cosplade/index.hpp"
#include "cosplade/second_stage.hpp"
#include "cosplade/synthetic.hpp"
#include "cosplade/util.hpp"

namespace cosplade {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string parse_config_value(const std::string& raw, const std::string& key,
                               std::size_t line_no, const std::string& path) {
  if (raw.empty()) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty value for " + key);
  }
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": unterminated string for " + key);
    }
    return raw.substr(1, raw.size() - 2);
  }
  return raw;
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  T out{};
  if (!(in >> out) || !in.eof()) {
    throw std::runtime_error("config key " + key + ": cannot parse number from '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw std::runtime_error("config key " + key + ": expected true or false, got '" + value + "'");
}

void check_variant(const std::string& variant) {
  if (variant != "raw" && variant != "flat" && variant != "dual") {
    throw std::runtime_error("unknown pipeline variant: " + variant +
                             " (expected raw|flat|dual)");
  }
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);

  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = parse_config_value(trim(stripped.substr(eq + 1)), key, line_no, path);

    if (key == "vocab") cfg.vocab = value;
    else if (key == "corpus") cfg.corpus = value;
    else if (key == "conversations") cfg.conversations = value;
    else if (key == "index") cfg.index = value;
    else if (key == "checkpoints") cfg.checkpoints = value;
    else if (key == "run") cfg.run = value;
    else if (key == "qrels") cfg.qrels = value;
    else if (key == "enriched") cfg.enriched = value;
    else if (key == "pairs") cfg.pairs = value;
    else if (key == "report") cfg.report = value;
    else if (key == "per_query_report") cfg.per_query_report = value;
    else if (key == "variant") cfg.variant = value;
    else if (key == "scope") cfg.scope = value;
    else if (key == "keywords") cfg.keywords = parse_number<std::size_t>(value, key);
    else if (key == "topk") cfg.topk = parse_number<std::size_t>(value, key);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(value, key);
    else if (key == "pairs_per_query") cfg.pairs_per_query = parse_number<std::size_t>(value, key);
    else if (key == "max_tokens") cfg.max_tokens = parse_number<std::size_t>(value, key);
    else if (key == "eval_depth") cfg.eval_depth = parse_number<std::size_t>(value, key);
    else if (key == "ndcg_cut") cfg.ndcg_cut = parse_number<std::size_t>(value, key);
    else if (key == "include_missing") cfg.include_missing = parse_bool(value, key);
    else if (key == "batch_size") cfg.batch_size = parse_number<std::size_t>(value, key);
    else if (key == "lr_queries") cfg.lr_queries = parse_number<double>(value, key);
    else if (key == "lr_answers") cfg.lr_answers = parse_number<double>(value, key);
    else if (key == "epochs") cfg.epochs = parse_number<std::size_t>(value, key);
    else if (key == "embed_dim") cfg.embed_dim = parse_number<std::size_t>(value, key);
    else if (key == "init_scale") cfg.init_scale = parse_number<double>(value, key);
    else if (key == "synth_terms") cfg.synth_terms = parse_number<std::size_t>(value, key);
    else if (key == "synth_conversations")
      cfg.synth_conversations = parse_number<std::size_t>(value, key);
    else if (key == "synth_distractors")
      cfg.synth_distractors = parse_number<std::size_t>(value, key);
    else {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown config key " +
                               key);
    }
  }
  return cfg;
}

namespace {

void require_path(const std::string& value, const char* key) {
  if (value.empty()) {
    throw std::runtime_error(std::string("missing required path: ") + key);
  }
}

std::string query_id(const Conversation& conv, int n) {
  return conv.id + "_" + std::to_string(n);
}

// Encoders backing one pipeline variant. The frozen reference encoder is
// always available; the trained pair is loaded only when the variant
// needs it.
struct VariantEncoders {
  std::unique_ptr<LexicalEncoder> frozen;
  std::unique_ptr<ToyEncoder> queries;
  std::unique_ptr<ToyEncoder> answers;
};

VariantEncoders make_variant_encoders(const PipelineConfig& cfg, const Vocabulary& vocab) {
  check_variant(cfg.variant);
  VariantEncoders enc;
  enc.frozen = std::make_unique<LexicalEncoder>(vocab, cfg.max_tokens);
  if (cfg.variant == "raw") return enc;

  require_path(cfg.checkpoints, "checkpoints");
  namespace fs = std::filesystem;
  fs::path dir(cfg.checkpoints);
  auto queries_path = (dir / "queries.ckpt").string();
  if (!fs::exists(queries_path)) {
    throw std::runtime_error("missing checkpoint: " + queries_path);
  }
  enc.queries = std::make_unique<ToyEncoder>(ToyEncoderParams::load(queries_path), vocab,
                                             cfg.max_tokens);
  if (cfg.variant == "dual") {
    auto answers_path = (dir / "answers.ckpt").string();
    if (!fs::exists(answers_path)) {
      throw std::runtime_error("missing checkpoint: " + answers_path);
    }
    enc.answers = std::make_unique<ToyEncoder>(ToyEncoderParams::load(answers_path), vocab,
                                               cfg.max_tokens);
  }
  return enc;
}

SparseVec variant_query_vec(const PipelineConfig& cfg, const VariantEncoders& enc,
                            const Conversation& conv, int n) {
  if (cfg.variant == "raw") {
    return enc.frozen->encode(std::string(Vocabulary::kClsToken) + " " + conv.turn(n).query);
  }
  if (cfg.variant == "flat") {
    return enc.queries->encode(flat_context_input(conv, n));
  }
  EncoderSet set{enc.queries.get(), enc.answers.get(), enc.frozen.get()};
  return compose_query(conv, n, answer_scope_from_string(cfg.scope), set);
}

}  // namespace

SynthSummary run_synth(const PipelineConfig& cfg) {
  require_path(cfg.vocab, "vocab");
  require_path(cfg.corpus, "corpus");
  require_path(cfg.conversations, "conversations");
  require_path(cfg.qrels, "qrels");

  SyntheticConfig synth;
  synth.content_terms = cfg.synth_terms;
  synth.conversations = cfg.synth_conversations;
  synth.distractors_per_turn = cfg.synth_distractors;
  synth.seed = cfg.seed;
  SyntheticSuite suite = generate_synthetic_suite(synth);

  suite.vocab.save(cfg.vocab);

  {
    AtomicFile corpus(cfg.corpus);
    for (const auto& [id, vec] : suite.corpus) {
      nlohmann::json j;
      j["id"] = id;
      j["vector"] = vec.to_text();
      corpus.stream() << j.dump() << '\n';
    }
    corpus.commit();
  }
  write_conversations_jsonl(cfg.conversations, suite.conversations);
  {
    Qrels qrels;
    for (const auto& rec : suite.qrels) qrels.add(rec.query_id, rec.doc_id, rec.relevance);
    qrels.save_trec(cfg.qrels);
  }

  return {suite.conversations.size(), suite.corpus.size(), suite.qrels.size()};
}

std::size_t run_index(const PipelineConfig& cfg) {
  require_path(cfg.vocab, "vocab");
  require_path(cfg.corpus, "corpus");
  require_path(cfg.index, "index");

  Vocabulary vocab = Vocabulary::load(cfg.vocab);
  auto docs = read_corpus_jsonl(cfg.corpus, vocab.size());
  InvertedIndex index = InvertedIndex::build(vocab.size(), docs);

  // Save through a temporary so failures leave no partial index behind.
  std::string tmp = cfg.index + ".tmp";
  index.save(tmp);
  std::filesystem::rename(tmp, cfg.index);
  return index.doc_count();
}

TrainResult run_train(const PipelineConfig& cfg) {
  require_path(cfg.vocab, "vocab");
  require_path(cfg.conversations, "conversations");
  require_path(cfg.checkpoints, "checkpoints");

  Vocabulary vocab = Vocabulary::load(cfg.vocab);
  auto conversations = read_conversations_jsonl(cfg.conversations);
  LexicalEncoder frozen(vocab, cfg.max_tokens);

  TrainConfig train_cfg;
  train_cfg.batch_size = cfg.batch_size;
  train_cfg.lr_queries = cfg.lr_queries;
  train_cfg.lr_answers = cfg.lr_answers;
  train_cfg.epochs = cfg.epochs;
  train_cfg.seed = derive_seed(cfg.seed, "train");
  train_cfg.scope = answer_scope_from_string(cfg.scope);
  train_cfg.embed_dim = cfg.embed_dim;
  train_cfg.max_tokens = cfg.max_tokens;
  train_cfg.init_scale = cfg.init_scale;

  TrainResult result = train(conversations, vocab, frozen, train_cfg);

  namespace fs = std::filesystem;
  fs::path dir(cfg.checkpoints);
  fs::create_directories(dir);
  auto save_atomic = [](const ToyEncoderParams& params, const fs::path& path) {
    fs::path tmp = path.string() + ".tmp";
    params.save(tmp.string());
    fs::rename(tmp, path);
  };
  save_atomic(result.queries, dir / "queries.ckpt");
  save_atomic(result.answers, dir / "answers.ckpt");

  AtomicFile trace((dir / "loss_trace.tsv").string());
  trace.stream() << "epoch\tmean_loss\n";
  for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu\t%.12f\n", e, result.loss_trace[e]);
    trace.stream() << buf;
  }
  trace.commit();
  return result;
}

std::size_t run_search(const PipelineConfig& cfg) {
  require_path(cfg.vocab, "vocab");
  require_path(cfg.index, "index");
  require_path(cfg.conversations, "conversations");
  require_path(cfg.run, "run");
  if (!std::filesystem::exists(cfg.index)) {
    throw std::runtime_error("missing index: " + cfg.index);
  }

  Vocabulary vocab = Vocabulary::load(cfg.vocab);
  InvertedIndex index = InvertedIndex::load(cfg.index);
  if (index.vocab_size() != vocab.size()) {
    throw std::runtime_error("index was built on a different vocabulary size");
  }
  auto conversations = read_conversations_jsonl(cfg.conversations);
  VariantEncoders enc = make_variant_encoders(cfg, vocab);

  RunList run;
  std::size_t queries = 0;
  for (const auto& conv : conversations) {
    for (int n = 1; n <= conv.size(); ++n) {
      SparseVec qvec = variant_query_vec(cfg, enc, conv, n);
      auto scored = index.retrieve(qvec, cfg.topk);
      std::vector<RunEntry> entries;
      entries.reserve(scored.size());
      for (auto& s : scored) entries.push_back({std::move(s.doc_id), s.score});
      run.set(query_id(conv, n), std::move(entries));
      ++queries;
    }
  }
  run.save_trec(cfg.run, cfg.variant);
  return queries;
}

RerankPrepSummary run_rerank_prep(const PipelineConfig& cfg) {
  require_path(cfg.vocab, "vocab");
  require_path(cfg.conversations, "conversations");
  require_path(cfg.run, "run");
  require_path(cfg.enriched, "enriched");
  require_path(cfg.pairs, "pairs");

  Vocabulary vocab = Vocabulary::load(cfg.vocab);
  Tokenizer tokenizer(vocab, cfg.max_tokens);
  auto conversations = read_conversations_jsonl(cfg.conversations);
  RunList run = RunList::load_trec(cfg.run);
  VariantEncoders enc = make_variant_encoders(cfg, vocab);

  RerankPrepSummary summary;
  AtomicFile enriched_out(cfg.enriched);
  AtomicFile pairs_out(cfg.pairs);

  for (const auto& conv : conversations) {
    for (int n = 1; n <= conv.size(); ++n) {
      std::string qid = query_id(conv, n);
      SparseVec qvec = variant_query_vec(cfg, enc, conv, n);
      auto keywords = extract_keywords(qvec, conv, n, cfg.keywords, tokenizer);
      EnrichedQuery eq = build_enriched_query(conv, n, std::move(keywords), cfg.keywords);

      nlohmann::json j;
      j["qid"] = qid;
      j["text"] = eq.text;
      j["keywords"] = eq.keywords;
      enriched_out.stream() << j.dump() << '\n';
      ++summary.prompts;

      auto rit = run.by_query().find(qid);
      if (rit == run.by_query().end() || rit->second.size() < 4) {
        ++summary.short_runs_skipped;
        continue;
      }
      std::vector<ScoredDoc> ranked;
      ranked.reserve(rit->second.size());
      for (const auto& e : rit->second) ranked.push_back({e.doc_id, e.score});
      auto samples =
          sample_pairs(ranked, cfg.pairs_per_query, derive_seed(cfg.seed, "pairs." + qid));
      for (const auto& s : samples) {
        pairs_out.stream() << qid << '\t' << s.d1 << '\t' << s.d2 << '\n';
        ++summary.pairs;
      }
    }
  }
  enriched_out.commit();
  pairs_out.commit();
  return summary;
}

std::vector<std::pair<std::string, MetricResult>> run_eval(const PipelineConfig& cfg) {
  require_path(cfg.run, "run");
  require_path(cfg.qrels, "qrels");
  require_path(cfg.report, "report");
  if (!std::filesystem::exists(cfg.qrels)) {
    throw std::runtime_error("missing qrels: " + cfg.qrels);
  }

  RunList run = RunList::load_trec(cfg.run);
  Qrels qrels = Qrels::load_trec(cfg.qrels);
  std::size_t depth = cfg.eval_depth == 0 ? cfg.topk : cfg.eval_depth;

  std::vector<std::pair<std::string, MetricResult>> results;
  results.emplace_back("ndcg@" + std::to_string(cfg.ndcg_cut),
                       ndcg_at(run, qrels, cfg.ndcg_cut, cfg.include_missing));
  results.emplace_back("mrr", mrr(run, qrels, cfg.include_missing));
  results.emplace_back("recall@" + std::to_string(depth),
                       recall_at(run, qrels, depth, cfg.include_missing));
  results.emplace_back("map@" + std::to_string(depth),
                       map_at(run, qrels, depth, cfg.include_missing));
  results.emplace_back("ndcg@" + std::to_string(depth),
                       ndcg_at(run, qrels, depth, cfg.include_missing));

  AtomicFile report(cfg.report);
  report.stream() << "metric\tmean\tstd_error\tqueries\n";
  char buf[128];
  for (const auto& [name, metric] : results) {
    std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.6f\t%zu\n", name.c_str(), metric.mean,
                  metric.std_error, metric.per_query.size());
    report.stream() << buf;
  }
  report.commit();

  if (!cfg.per_query_report.empty()) {
    AtomicFile per_query(cfg.per_query_report);
    per_query.stream() << "metric\tquery\tvalue\n";
    for (const auto& [name, metric] : results) {
      for (const auto& [qid, value] : metric.per_query) {
        std::snprintf(buf, sizeof(buf), "%s\t%s\t%.6f\n", name.c_str(), qid.c_str(), value);
        per_query.stream() << buf;
      }
    }
    per_query.commit();
  }
  return results;
}

}  // namespace cosplade
