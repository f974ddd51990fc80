#include "cosplade/second_stage.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace cosplade {

std::vector<std::string> extract_keywords(const SparseVec& query_vec, const Conversation& conv,
                                          int n, std::size_t budget, const Tokenizer& tokenizer) {
  if (budget == 0) return {};
  if (n < 1 || n > conv.size()) {
    throw std::out_of_range("turn index " + std::to_string(n) + " out of range");
  }

  struct Candidate {
    std::string word;
    double score;
    std::size_t first_pos;
  };
  std::vector<Candidate> candidates;
  std::unordered_map<std::string, std::size_t> seen;  // word -> candidate slot
  std::size_t position = 0;

  auto consume = [&](const std::string& text) {
    for (const auto& raw : Tokenizer::split_words(text)) {
      std::size_t pos = position++;
      std::string word = tokenizer.normalize_word(raw);
      if (word.empty()) continue;  // out of vocabulary, unscorable
      if (seen.count(word)) continue;
      double score = query_vec.weight(*tokenizer.vocab().id_of(word));
      seen.emplace(word, candidates.size());
      candidates.push_back({std::move(word), score, pos});
    }
  };
  for (int i = 1; i < n; ++i) {
    const Turn& turn = conv.turn(i);
    consume(turn.query);
    if (turn.answer) consume(*turn.answer);
  }

  std::erase_if(candidates, [](const Candidate& c) { return c.score <= 0.0; });
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.first_pos != b.first_pos) return a.first_pos < b.first_pos;
    return a.word < b.word;
  });
  if (candidates.size() > budget) candidates.resize(budget);

  // Selected by weight, returned in order of first appearance in the context.
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.first_pos < b.first_pos; });

  std::vector<std::string> keywords;
  keywords.reserve(candidates.size());
  for (auto& c : candidates) keywords.push_back(std::move(c.word));
  return keywords;
}

EnrichedQuery build_enriched_query(const Conversation& conv, int n,
                                   std::vector<std::string> keywords, std::size_t budget) {
  const Turn& current = conv.turn(n);
  if (keywords.size() > budget) {
    throw std::invalid_argument("keyword list exceeds the keyword budget");
  }

  std::string text = current.query + ". Context:";
  for (int i = 1; i < n; ++i) {
    text += " " + conv.turn(i).query;
  }
  if (n == 1) text += " ";  // degenerate segment keeps the separator space
  text += ". Keywords: ";
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (i) text += ", ";
    text += keywords[i];
  }

  EnrichedQuery out;
  out.text = std::move(text);
  out.keywords = std::move(keywords);
  out.budget = budget;
  return out;
}

std::vector<PairSample> sample_pairs(std::span<const ScoredDoc> run, std::size_t count,
                                     std::uint64_t seed) {
  if (run.size() < 4) {
    throw std::invalid_argument("pair sampling requires a run of at least 4 documents");
  }
  std::size_t tail_end = std::min<std::size_t>(1000, run.size());  // ranks 4..tail_end
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> head(0, 2);
  std::uniform_int_distribution<std::size_t> tail(3, tail_end - 1);

  std::vector<PairSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({run[head(rng)].doc_id, run[tail(rng)].doc_id});
  }
  return out;
}

}  // namespace cosplade
