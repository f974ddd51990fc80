#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cosplade/sparse.hpp"

namespace cosplade {

struct ScoredDoc {
  std::string doc_id;  // external identifier
  double score;        // exact dot(query, document)

  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Impact-sorted inverted index over sparse document vectors with exact
/// top-k retrieval. Documents get internal ordinals in insertion order;
/// ties in score are broken by ascending ordinal. Immutable after build,
/// safe for concurrent retrieve calls.
class InvertedIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  InvertedIndex() = default;

  /// Identifiers must be unique and all vectors on one vocabulary.
  static InvertedIndex build(std::size_t vocab_size,
                             std::span<const std::pair<std::string, SparseVec>> docs);

  /// The min(k, number of docs with score > 0) highest-scoring documents,
  /// descending score, ties by ascending insertion ordinal. Scores are
  /// exact term-at-a-time accumulations in 64-bit floating point.
  std::vector<ScoredDoc> retrieve(const SparseVec& query, std::size_t k) const;

  void save(const std::string& path) const;
  static InvertedIndex load(const std::string& path);

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t doc_count() const { return doc_ids_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }

 private:
  struct Posting {
    std::uint32_t doc;
    double weight;
  };

  std::size_t vocab_size_ = 0;
  std::vector<std::string> doc_ids_;
  std::vector<std::vector<Posting>> postings_;  // one list per term id
};

/// Corpus ingestion: JSONL, one document per line with fields `id` (string)
/// and `vector` (the `id:weight` text encoding). Parse errors report the
/// line number.
std::vector<std::pair<std::string, SparseVec>> read_corpus_jsonl(const std::string& path,
                                                                 std::size_t vocab_size);

}  // namespace cosplade
