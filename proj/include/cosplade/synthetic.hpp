#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cosplade/conversation.hpp"
#include "cosplade/sparse.hpp"

namespace cosplade {

/// Synthetic conversational retrieval suite: conversations whose gold query
/// is the raw query plus a couple of terms taken from the previous answer,
/// a corpus where each turn's relevant document carries exactly the gold
/// terms, and hard distractors that share the raw-query terms but not the
/// answer terms. A raw-query searcher cannot separate the relevant document
/// from its distractors; a contextualized one can.
struct SyntheticConfig {
  std::size_t content_terms = 200;
  std::size_t conversations = 500;
  std::size_t min_turns = 2;
  std::size_t max_turns = 4;
  std::size_t min_query_terms = 2;
  std::size_t max_query_terms = 3;
  std::size_t min_answer_terms = 4;
  std::size_t max_answer_terms = 8;
  std::size_t min_gold_extra = 1;  // terms copied from the previous answer
  std::size_t max_gold_extra = 2;
  std::size_t distractors_per_turn = 20;
  std::size_t min_filler_terms = 3;
  std::size_t max_filler_terms = 6;
  std::uint64_t seed = 0;
};

struct QrelRecord {
  std::string query_id;  // "<conversation id>_<turn>"
  std::string doc_id;
  int relevance;
};

struct SyntheticSuite {
  Vocabulary vocab;  // [CLS], [SEP], then the content terms
  std::vector<Conversation> conversations;
  std::vector<std::pair<std::string, SparseVec>> corpus;  // reference-encoded documents
  std::vector<QrelRecord> qrels;  // one relevant document per turn with n >= 2
};

SyntheticSuite generate_synthetic_suite(const SyntheticConfig& cfg);

}  // namespace cosplade
