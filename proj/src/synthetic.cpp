#include "cosplade/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "cosplade/encoder.hpp"
#include "cosplade/util.hpp"

namespace cosplade {

namespace {

std::vector<std::string> sample_terms(std::mt19937_64& rng,
                                      const std::vector<std::string>& pool, std::size_t count,
                                      const std::unordered_set<std::string>* exclude = nullptr) {
  std::vector<std::string> out;
  std::unordered_set<std::string> used;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  while (out.size() < count) {
    const std::string& t = pool[pick(rng)];
    if (used.count(t) || (exclude && exclude->count(t))) continue;
    used.insert(t);
    out.push_back(t);
  }
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text += ' ';
    text += words[i];
  }
  return text;
}

std::size_t sample_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

SyntheticSuite generate_synthetic_suite(const SyntheticConfig& cfg) {
  if (cfg.content_terms == 0 || cfg.conversations == 0 || cfg.min_turns == 0 ||
      cfg.min_turns > cfg.max_turns || cfg.min_query_terms > cfg.max_query_terms ||
      cfg.min_answer_terms > cfg.max_answer_terms || cfg.min_gold_extra > cfg.max_gold_extra ||
      cfg.min_filler_terms > cfg.max_filler_terms) {
    throw std::invalid_argument("inconsistent synthetic suite configuration");
  }
  if (cfg.max_gold_extra > cfg.min_answer_terms) {
    throw std::invalid_argument("gold extras cannot exceed the answer term count");
  }

  std::vector<std::string> terms;
  terms.reserve(cfg.content_terms);
  char buf[32];
  for (std::size_t i = 0; i < cfg.content_terms; ++i) {
    std::snprintf(buf, sizeof(buf), "t%03zu", i);
    terms.emplace_back(buf);
  }

  SyntheticSuite suite{Vocabulary::with_markers(terms), {}, {}, {}};
  LexicalEncoder reference(suite.vocab);

  std::mt19937_64 rng(derive_seed(cfg.seed, "synth.data"));
  std::size_t doc_counter = 0;
  auto next_doc_id = [&doc_counter, &buf]() {
    std::snprintf(buf, sizeof(buf), "d%06zu", doc_counter++);
    return std::string(buf);
  };

  for (std::size_t c = 0; c < cfg.conversations; ++c) {
    Conversation conv;
    std::snprintf(buf, sizeof(buf), "c%04zu", c);
    conv.id = buf;

    std::size_t turn_count = sample_size(rng, cfg.min_turns, cfg.max_turns);
    std::vector<std::vector<std::string>> query_terms(turn_count);
    std::vector<std::vector<std::string>> answer_terms(turn_count);
    std::vector<std::vector<std::string>> gold_terms(turn_count);

    for (std::size_t i = 0; i < turn_count; ++i) {
      query_terms[i] =
          sample_terms(rng, terms, sample_size(rng, cfg.min_query_terms, cfg.max_query_terms));
      answer_terms[i] =
          sample_terms(rng, terms, sample_size(rng, cfg.min_answer_terms, cfg.max_answer_terms));

      gold_terms[i] = query_terms[i];
      if (i > 0) {
        // Gold query = raw query plus a couple of terms from the previous
        // answer that are not already in the query.
        std::unordered_set<std::string> in_query(query_terms[i].begin(), query_terms[i].end());
        std::vector<std::string> candidates;
        for (const auto& t : answer_terms[i - 1]) {
          if (!in_query.count(t)) candidates.push_back(t);
        }
        std::size_t extra =
            std::min(candidates.size(), sample_size(rng, cfg.min_gold_extra, cfg.max_gold_extra));
        std::shuffle(candidates.begin(), candidates.end(), rng);
        for (std::size_t e = 0; e < extra; ++e) gold_terms[i].push_back(candidates[e]);
      }

      Turn turn;
      turn.query = join(query_terms[i]);
      turn.answer = join(answer_terms[i]);
      turn.gold = join(gold_terms[i]);
      conv.turns.push_back(std::move(turn));
    }

    // One relevant document per contextual turn, hidden among distractors
    // that share the turn's raw-query terms but none of its answer context.
    for (std::size_t i = 1; i < turn_count; ++i) {
      std::unordered_set<std::string> forbidden(answer_terms[i - 1].begin(),
                                                answer_terms[i - 1].end());
      for (const auto& t : gold_terms[i]) forbidden.insert(t);

      std::vector<std::string> cohort_texts;
      cohort_texts.push_back(join(gold_terms[i]));  // the relevant document
      for (std::size_t dst = 0; dst < cfg.distractors_per_turn; ++dst) {
        std::vector<std::string> words = query_terms[i];
        auto filler = sample_terms(
            rng, terms, sample_size(rng, cfg.min_filler_terms, cfg.max_filler_terms), &forbidden);
        words.insert(words.end(), filler.begin(), filler.end());
        cohort_texts.push_back(join(words));
      }
      // Shuffle so the relevant document's ordinal is uniform within the
      // cohort; ordinal order is the retrieval tie-break.
      std::vector<std::size_t> perm(cohort_texts.size());
      for (std::size_t p = 0; p < perm.size(); ++p) perm[p] = p;
      std::shuffle(perm.begin(), perm.end(), rng);

      std::string qid = conv.id + "_" + std::to_string(i + 1);
      for (std::size_t p : perm) {
        std::string doc_id = next_doc_id();
        suite.corpus.emplace_back(doc_id, reference.encode(cohort_texts[p]));
        if (p == 0) suite.qrels.push_back({qid, doc_id, 1});
      }
    }

    suite.conversations.push_back(std::move(conv));
  }
  return suite;
}

}  // namespace cosplade
