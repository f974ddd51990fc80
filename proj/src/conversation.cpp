#include "cosplade/conversation.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cosplade {

const Turn& Conversation::turn(int n) const {
  if (n < 1 || n > size()) {
    throw std::out_of_range("turn index " + std::to_string(n) + " out of range [1, " +
                            std::to_string(size()) + "]");
  }
  return turns[static_cast<std::size_t>(n - 1)];
}

std::vector<Conversation> read_conversations_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open conversations file: " + path);

  std::vector<Conversation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Conversation conv;
      conv.id = j.at("id").get<std::string>();
      for (const auto& jt : j.at("turns")) {
        Turn turn;
        turn.query = jt.at("query").get<std::string>();
        if (jt.contains("answer") && !jt["answer"].is_null()) {
          turn.answer = jt["answer"].get<std::string>();
        }
        if (jt.contains("gold") && !jt["gold"].is_null()) {
          turn.gold = jt["gold"].get<std::string>();
        }
        conv.turns.push_back(std::move(turn));
      }
      if (conv.turns.empty()) {
        throw std::runtime_error("conversation has no turns");
      }
      out.push_back(std::move(conv));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed conversation line: " + e.what());
    }
  }
  return out;
}

void write_conversations_jsonl(const std::string& path,
                               const std::vector<Conversation>& conversations) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write conversations file: " + path);
  for (const auto& conv : conversations) {
    nlohmann::json j;
    j["id"] = conv.id;
    auto& turns = j["turns"] = nlohmann::json::array();
    for (const auto& t : conv.turns) {
      nlohmann::json jt;
      jt["query"] = t.query;
      jt["answer"] = t.answer ? nlohmann::json(*t.answer) : nlohmann::json(nullptr);
      jt["gold"] = t.gold ? nlohmann::json(*t.gold) : nlohmann::json(nullptr);
      turns.push_back(std::move(jt));
    }
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failure on conversations file: " + path);
}

}  // namespace cosplade
