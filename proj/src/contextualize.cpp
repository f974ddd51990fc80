#include "cosplade/contextualize.hpp"

#include <stdexcept>

namespace cosplade {

AnswerScope answer_scope_from_string(const std::string& name) {
  if (name == "last") return AnswerScope::kLast;
  if (name == "all") return AnswerScope::kAll;
  throw std::invalid_argument("unknown answer scope: " + name + " (expected last|all)");
}

const char* to_string(AnswerScope scope) {
  return scope == AnswerScope::kLast ? "last" : "all";
}

std::string build_query_history_input(const Conversation& conv, int n) {
  const Turn& current = conv.turn(n);
  std::string text = std::string(Vocabulary::kClsToken) + " " + current.query;
  for (int i = 1; i < n; ++i) {
    text += std::string(" ") + Vocabulary::kSepToken + " " + conv.turn(i).query;
  }
  return text;
}

std::vector<std::string> build_answer_inputs(const Conversation& conv, int n, AnswerScope scope) {
  const Turn& current = conv.turn(n);
  if (n == 1) {
    // No answers exist yet; encode the bare query so the answer-history
    // representation is defined at every turn.
    return {current.query};
  }
  int k = scope == AnswerScope::kLast ? 1 : n - 1;
  std::vector<std::string> inputs;
  inputs.reserve(static_cast<std::size_t>(k));
  for (int i = n - k; i <= n - 1; ++i) {
    const Turn& past = conv.turn(i);
    if (!past.answer) {
      throw std::runtime_error("turn " + std::to_string(i) + " of conversation " + conv.id +
                               " has no answer");
    }
    inputs.push_back(current.query + " " + Vocabulary::kSepToken + " " + *past.answer);
  }
  return inputs;
}

std::string flat_context_input(const Conversation& conv, int n) {
  const Turn& current = conv.turn(n);
  std::string text = std::string(Vocabulary::kClsToken) + " " + current.query;
  for (int i = 1; i < n; ++i) {
    const Turn& past = conv.turn(i);
    if (!past.answer) {
      throw std::runtime_error("turn " + std::to_string(i) + " of conversation " + conv.id +
                               " has no answer");
    }
    text += std::string(" ") + Vocabulary::kSepToken + " " + past.query;
    text += std::string(" ") + Vocabulary::kSepToken + " " + *past.answer;
  }
  return text;
}

ComposedQuery compose_query_parts(const Conversation& conv, int n, AnswerScope scope,
                                  const EncoderSet& encoders) {
  if (encoders.queries == nullptr || encoders.answers == nullptr) {
    throw std::invalid_argument("query and answer encoders are required");
  }
  ComposedQuery out;
  out.query_history = encoders.queries->encode(build_query_history_input(conv, n));

  std::vector<SparseVec> answer_vecs;
  for (const auto& input : build_answer_inputs(conv, n, scope)) {
    answer_vecs.push_back(encoders.answers->encode(input));
  }
  out.answers = mean(answer_vecs);
  out.combined = add(out.query_history, out.answers);
  return out;
}

SparseVec compose_query(const Conversation& conv, int n, AnswerScope scope,
                        const EncoderSet& encoders) {
  return compose_query_parts(conv, n, scope, encoders).combined;
}

SparseVec gold_representation(const Conversation& conv, int n, const Encoder& frozen) {
  const Turn& turn = conv.turn(n);
  if (!turn.gold) {
    throw std::runtime_error("turn " + std::to_string(n) + " of conversation " + conv.id +
                             " has no gold query");
  }
  return frozen.encode(*turn.gold);
}

}  // namespace cosplade
