#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cosplade {

using TermId = std::uint32_t;

/// Fixed term-string <-> id mapping. Immutable after construction; the id of
/// a term is its position in the input list.
class Vocabulary {
 public:
  // Reserved marker tokens used by the conversational input builders.
  static constexpr TermId kClsId = 0;
  static constexpr TermId kSepId = 1;
  static constexpr const char* kClsToken = "[CLS]";
  static constexpr const char* kSepToken = "[SEP]";

  explicit Vocabulary(std::vector<std::string> terms);

  /// Builds a vocabulary whose first two entries are [CLS] and [SEP],
  /// followed by the given content terms.
  static Vocabulary with_markers(std::vector<std::string> content_terms);

  /// One term per line, id = line number.
  static Vocabulary load(const std::string& path);
  void save(const std::string& path) const;

  std::size_t size() const { return terms_.size(); }
  const std::string& term(TermId id) const;
  std::optional<TermId> id_of(std::string_view term) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> ids_;
};

struct SparseEntry {
  TermId id;
  double weight;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Non-negative weights over a fixed vocabulary, stored as a sorted
/// coordinate list. Entries below kWeightEps are never stored, so `empty()`
/// means "all weights zero". Immutable after construction.
class SparseVec {
 public:
  /// Weights smaller than this are treated as zero and dropped.
  static constexpr double kWeightEps = 1e-12;

  SparseVec() = default;
  explicit SparseVec(std::size_t vocab_size) : vocab_size_(vocab_size) {}

  /// Entries must have strictly increasing ids < vocab_size and
  /// non-negative weights; sub-tolerance weights are dropped.
  SparseVec(std::size_t vocab_size, std::vector<SparseEntry> entries);

  static SparseVec from_dense(std::span<const double> dense);
  std::vector<double> to_dense() const;

  std::size_t vocab_size() const { return vocab_size_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Weight at `id`, 0 when absent. O(log nnz).
  double weight(TermId id) const;
  double norm() const;

  /// `id:weight` pairs, space separated, ids ascending, 6 decimal places.
  std::string to_text() const;
  static SparseVec from_text(std::string_view line, std::size_t vocab_size);

  friend bool operator==(const SparseVec&, const SparseVec&) = default;

 private:
  std::size_t vocab_size_ = 0;
  std::vector<SparseEntry> entries_;
};

/// Per-token raw scores over the vocabulary (pre-aggregation encoder
/// output). Row-major, rows = token positions, cols = vocabulary size.
class TokenLogits {
 public:
  TokenLogits(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t t, std::size_t v) const { return data_[t * cols_ + v]; }
  double& at(std::size_t t, std::size_t v) { return data_[t * cols_ + v]; }
  std::span<const double> row(std::size_t t) const {
    return {data_.data() + t * cols_, cols_};
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// ReLU, log saturation, and max pooling over token positions:
/// out[v] = max_t log(1 + max(logits[t,v], 0)), zero entries dropped.
/// Natural log. Throws std::invalid_argument on zero token rows.
SparseVec splade_aggregate(const TokenLogits& logits);

/// Sparse dot product. Operands must share a vocabulary size.
double dot(const SparseVec& a, const SparseVec& b);

/// Componentwise sum.
SparseVec add(const SparseVec& a, const SparseVec& b);

/// Componentwise arithmetic mean over a non-empty list.
SparseVec mean(std::span<const SparseVec> vecs);

/// Every weight multiplied by factor > 0.
SparseVec scale(const SparseVec& a, double factor);

}  // namespace cosplade
