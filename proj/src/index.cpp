#include "cosplade/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace cosplade {

InvertedIndex InvertedIndex::build(std::size_t vocab_size,
                                   std::span<const std::pair<std::string, SparseVec>> docs) {
  InvertedIndex index;
  index.vocab_size_ = vocab_size;
  index.postings_.resize(vocab_size);
  index.doc_ids_.reserve(docs.size());

  std::unordered_set<std::string> seen;
  seen.reserve(docs.size());
  for (const auto& [id, vec] : docs) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument("duplicate document identifier: " + id);
    }
    if (vec.vocab_size() != vocab_size) {
      throw std::invalid_argument("vocabulary size mismatch for document " + id);
    }
    auto ordinal = static_cast<std::uint32_t>(index.doc_ids_.size());
    index.doc_ids_.push_back(id);
    for (const auto& e : vec.entries()) {
      index.postings_[e.id].push_back({ordinal, e.weight});
    }
  }
  // Postings are naturally sorted by ordinal because documents are ingested
  // in order and each contributes at most one posting per term.
  return index;
}

std::vector<ScoredDoc> InvertedIndex::retrieve(const SparseVec& query, std::size_t k) const {
  if (query.vocab_size() != vocab_size_) {
    throw std::invalid_argument("query vocabulary size mismatch");
  }
  if (k == 0) throw std::invalid_argument("k must be >= 1");

  std::vector<double> scores(doc_ids_.size(), 0.0);
  for (const auto& e : query.entries()) {
    for (const auto& p : postings_[e.id]) {
      scores[p.doc] += e.weight * p.weight;
    }
  }

  std::vector<std::uint32_t> hits;
  for (std::uint32_t d = 0; d < scores.size(); ++d) {
    if (scores[d] > 0.0) hits.push_back(d);
  }
  auto better = [&scores](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::size_t take = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(),
                    better);
  hits.resize(take);

  std::vector<ScoredDoc> out;
  out.reserve(take);
  for (auto d : hits) out.push_back({doc_ids_[d], scores[d]});
  return out;
}

namespace {

constexpr char kMagic[8] = {'C', 'O', 'S', 'P', 'I', 'D', 'X', '\n'};

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ofstream& out, T value) {
  write_bytes(out, &value, sizeof(T));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n, const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw std::runtime_error(std::string("truncated index file while reading ") + what);
  }
}

template <typename T>
T read_pod(std::ifstream& in, const char* what) {
  T value;
  read_bytes(in, &value, sizeof(T), what);
  return value;
}

}  // namespace

void InvertedIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write index file: " + path);

  write_bytes(out, kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kFormatVersion);
  write_pod<std::uint64_t>(out, vocab_size_);
  write_pod<std::uint64_t>(out, doc_ids_.size());
  for (const auto& id : doc_ids_) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    write_bytes(out, id.data(), id.size());
  }
  for (const auto& list : postings_) {
    write_pod<std::uint64_t>(out, list.size());
    for (const auto& p : list) {
      write_pod<std::uint32_t>(out, p.doc);
      write_pod<double>(out, p.weight);
    }
  }
  if (!out) throw std::runtime_error("write failure on index file: " + path);
}

InvertedIndex InvertedIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index file: " + path);

  char magic[8];
  read_bytes(in, magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not an index file: " + path);
  }
  auto version = read_pod<std::uint32_t>(in, "version");
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported index format version " + std::to_string(version) +
                             " (expected " + std::to_string(kFormatVersion) + ")");
  }

  InvertedIndex index;
  index.vocab_size_ = read_pod<std::uint64_t>(in, "vocabulary size");
  auto doc_count = read_pod<std::uint64_t>(in, "document count");
  index.doc_ids_.reserve(doc_count);
  for (std::uint64_t i = 0; i < doc_count; ++i) {
    auto len = read_pod<std::uint32_t>(in, "document id length");
    std::string id(len, '\0');
    read_bytes(in, id.data(), len, "document id");
    index.doc_ids_.push_back(std::move(id));
  }
  index.postings_.resize(index.vocab_size_);
  for (auto& list : index.postings_) {
    auto count = read_pod<std::uint64_t>(in, "posting count");
    list.resize(count);
    for (auto& p : list) {
      p.doc = read_pod<std::uint32_t>(in, "posting doc");
      p.weight = read_pod<double>(in, "posting weight");
      if (p.doc >= doc_count) throw std::runtime_error("corrupt index: posting doc out of range");
    }
  }
  return index;
}

std::vector<std::pair<std::string, SparseVec>> read_corpus_jsonl(const std::string& path,
                                                                 std::size_t vocab_size) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);

  std::vector<std::pair<std::string, SparseVec>> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      docs.emplace_back(j.at("id").get<std::string>(),
                        SparseVec::from_text(j.at("vector").get<std::string>(), vocab_size));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed corpus line: " + e.what());
    }
  }
  return docs;
}

}  // namespace cosplade
