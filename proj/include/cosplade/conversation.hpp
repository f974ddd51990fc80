#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cosplade {

struct Turn {
  std::string query;
  std::optional<std::string> answer;
  std::optional<std::string> gold;  // manually rewritten, self-contained query
};

/// Ordered conversation turns. Turn indices are 1-based throughout the API.
struct Conversation {
  std::string id;
  std::vector<Turn> turns;

  const Turn& turn(int n) const;  // 1-based, throws std::out_of_range
  int size() const { return static_cast<int>(turns.size()); }
};

/// JSONL ingestion, one conversation per line:
///   {"id": str, "turns": [{"query": str, "answer": str|null, "gold": str|null}]}
/// Covers both gold-bearing and judgment-only records ("answer"/"gold" may
/// be omitted entirely). Parse errors report the line number.
std::vector<Conversation> read_conversations_jsonl(const std::string& path);

void write_conversations_jsonl(const std::string& path,
                               const std::vector<Conversation>& conversations);

}  // namespace cosplade
