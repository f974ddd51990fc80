#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cosplade/sparse.hpp"

namespace cosplade {

/// Whitespace word tokenizer with vocabulary lookup and an
/// out-of-vocabulary drop rule. A word that misses the vocabulary as-is is
/// retried with leading/trailing punctuation stripped, so "Obama?" matches
/// the term "Obama" while the marker "[CLS]" still matches exactly.
///
/// Sequences longer than max_tokens are truncated from the right, except
/// that the leading segment (everything before the first [SEP], i.e. the
/// current query) is always kept whole.
class Tokenizer {
 public:
  explicit Tokenizer(const Vocabulary& vocab, std::size_t max_tokens = kDefaultMaxTokens);

  static constexpr std::size_t kDefaultMaxTokens = 256;

  std::vector<TermId> tokenize(std::string_view text) const;

  /// Raw whitespace split, no vocabulary filtering.
  static std::vector<std::string> split_words(std::string_view text);

  /// Vocabulary form of a single word: exact match first, then with
  /// punctuation stripped. Empty when out of vocabulary.
  std::string normalize_word(std::string_view word) const;

  const Vocabulary& vocab() const { return *vocab_; }
  std::size_t max_tokens() const { return max_tokens_; }

 private:
  const Vocabulary* vocab_;
  std::size_t max_tokens_;
};

}  // namespace cosplade
