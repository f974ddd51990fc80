#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>

#include "cosplade/sparse.hpp"
#include "cosplade/tokenizer.hpp"

namespace cosplade {

/// Text -> sparse vocabulary-weight representation. Implementations must be
/// deterministic: equal input and parameters give equal output. How text is
/// tokenized is an implementation detail hidden behind this interface.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual SparseVec encode(std::string_view text) const = 0;
  virtual std::size_t vocab_size() const = 0;
};

/// Frozen bag-of-terms reference encoder: every in-vocabulary non-marker
/// term present in the input gets the saturation weight log(1 + 1). Plays
/// the role of the pretrained, never-trained document/gold encoder.
class LexicalEncoder final : public Encoder {
 public:
  explicit LexicalEncoder(const Vocabulary& vocab,
                          std::size_t max_tokens = Tokenizer::kDefaultMaxTokens);

  SparseVec encode(std::string_view text) const override;
  std::size_t vocab_size() const override { return tokenizer_.vocab().size(); }

 private:
  Tokenizer tokenizer_;
};

/// File-backed lookup encoder over precomputed vectors, frozen by
/// construction. The map file is text, one entry per line:
///   <16-hex FNV-1a hash of the input text> TAB <sparse vector text>
/// Unknown inputs raise an error naming the absent input.
class PrecomputedEncoder final : public Encoder {
 public:
  explicit PrecomputedEncoder(std::size_t vocab_size) : vocab_size_(vocab_size) {}

  static PrecomputedEncoder load(const std::string& path, std::size_t vocab_size);
  void save(const std::string& path) const;

  void add(std::string_view text, SparseVec vec);

  SparseVec encode(std::string_view text) const override;
  std::size_t vocab_size() const override { return vocab_size_; }

  static std::uint64_t text_hash(std::string_view text);

 private:
  std::size_t vocab_size_;
  std::unordered_map<std::uint64_t, SparseVec> vectors_;
};

/// The three encoder roles of the contextualized query model: one for the
/// query history, one for the answer history, and the frozen reference
/// parameterization used for documents and gold queries.
struct EncoderSet {
  const Encoder* queries = nullptr;
  const Encoder* answers = nullptr;
  const Encoder* frozen = nullptr;
};

}  // namespace cosplade
