#pragma once

#include <string>
#include <vector>

#include "cosplade/conversation.hpp"
#include "cosplade/encoder.hpp"
#include "cosplade/sparse.hpp"

namespace cosplade {

/// How many past answers feed the answer-history representation:
/// the last one (k = 1) or all of them (k = n - 1).
enum class AnswerScope { kLast, kAll };

AnswerScope answer_scope_from_string(const std::string& name);
const char* to_string(AnswerScope scope);

/// "[CLS] q_n [SEP] q_1 [SEP] ... [SEP] q_{n-1}": current query first, then
/// the history in ascending turn order. n is 1-based.
std::string build_query_history_input(const Conversation& conv, int n);

/// One input per considered answer, "q_n [SEP] a_i" for i in [n-k, n-1].
/// At n = 1 there are no answers yet and the single bare input "q_n" is
/// returned so the answer-history representation is defined at every turn.
/// Missing answers in range raise an error.
std::vector<std::string> build_answer_inputs(const Conversation& conv, int n, AnswerScope scope);

/// Single-sequence ablation input:
/// "[CLS] q_n [SEP] q_1 [SEP] a_1 [SEP] ... [SEP] q_{n-1} [SEP] a_{n-1}".
std::string flat_context_input(const Conversation& conv, int n);

/// The two halves and the sum of the contextualized query representation.
struct ComposedQuery {
  SparseVec query_history;  // encoded query-history input
  SparseVec answers;        // mean of encoded answer inputs
  SparseVec combined;       // query_history + answers
};

ComposedQuery compose_query_parts(const Conversation& conv, int n, AnswerScope scope,
                                  const EncoderSet& encoders);

/// Contextualized query representation: the query-history encoding plus the
/// mean answer-history encoding.
SparseVec compose_query(const Conversation& conv, int n, AnswerScope scope,
                        const EncoderSet& encoders);

/// Representation of the turn's gold query under the frozen reference
/// encoder. Raises an error when the turn has no gold query.
SparseVec gold_representation(const Conversation& conv, int n, const Encoder& frozen);

}  // namespace cosplade
