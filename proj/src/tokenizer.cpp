#include "cosplade/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace cosplade {

Tokenizer::Tokenizer(const Vocabulary& vocab, std::size_t max_tokens)
    : vocab_(&vocab), max_tokens_(max_tokens) {
  if (max_tokens_ == 0) throw std::invalid_argument("max_tokens must be >= 1");
}

std::vector<std::string> Tokenizer::split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    words.emplace_back(text.substr(start, pos - start));
  }
  return words;
}

std::string Tokenizer::normalize_word(std::string_view word) const {
  if (vocab_->id_of(word)) return std::string(word);
  std::size_t begin = 0;
  std::size_t end = word.size();
  while (begin < end && std::ispunct(static_cast<unsigned char>(word[begin]))) ++begin;
  while (end > begin && std::ispunct(static_cast<unsigned char>(word[end - 1]))) --end;
  if (begin >= end) return {};
  std::string_view stripped = word.substr(begin, end - begin);
  if (vocab_->id_of(stripped)) return std::string(stripped);
  return {};
}

std::vector<TermId> Tokenizer::tokenize(std::string_view text) const {
  std::vector<TermId> ids;
  for (const auto& word : split_words(text)) {
    std::string canon = normalize_word(word);
    if (canon.empty()) continue;  // out of vocabulary
    ids.push_back(*vocab_->id_of(canon));
  }
  if (ids.size() <= max_tokens_) return ids;

  auto sep = std::find(ids.begin(), ids.end(), Vocabulary::kSepId);
  if (sep == ids.end()) return ids;  // single segment: keep the query whole
  std::size_t first_sep = static_cast<std::size_t>(sep - ids.begin());
  ids.resize(std::max(max_tokens_, first_sep));
  return ids;
}

}  // namespace cosplade
