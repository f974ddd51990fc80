#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cosplade/conversation.hpp"
#include "cosplade/index.hpp"
#include "cosplade/sparse.hpp"
#include "cosplade/tokenizer.hpp"

namespace cosplade {

/// Top-K context words by first-stage query weight.
///
/// Candidates are the unique words of q_1..q_{n-1} and a_1..a_{n-1}; each
/// word is scored by the maximum query weight over its vocabulary tokens
/// (0 when out of vocabulary, and zero-scored words are never selected).
/// Membership is decided by score, ties by earlier first appearance then
/// lexicographically; the selected words are returned in first-appearance
/// order, not weight order.
std::vector<std::string> extract_keywords(const SparseVec& query_vec, const Conversation& conv,
                                          int n, std::size_t budget, const Tokenizer& tokenizer);

struct EnrichedQuery {
  std::string text;
  std::vector<std::string> keywords;
  std::size_t budget = 0;
};

/// Reranker prompt: "q_n. Context: q_1 q_2 ... q_{n-1}. Keywords: w_1, w_2,
/// ..., w_K". At n = 1 the Context segment lists nothing and an empty
/// keyword list yields an empty Keywords segment.
EnrichedQuery build_enriched_query(const Conversation& conv, int n,
                                   std::vector<std::string> keywords, std::size_t budget);

/// A distillation training pair from one first-stage run: d1 from the top
/// ranks, d2 from the tail.
struct PairSample {
  std::string d1;
  std::string d2;
};

/// `count` seeded pairs: d1 uniform over ranks 1-3, d2 uniform over ranks
/// 4-min(1000, run length). The run must have at least 4 entries.
std::vector<PairSample> sample_pairs(std::span<const ScoredDoc> run, std::size_t count,
                                     std::uint64_t seed);

}  // namespace cosplade
