#include "cosplade/encoder.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cosplade {

LexicalEncoder::LexicalEncoder(const Vocabulary& vocab, std::size_t max_tokens)
    : tokenizer_(vocab, max_tokens) {}

SparseVec LexicalEncoder::encode(std::string_view text) const {
  std::vector<bool> present(vocab_size(), false);
  for (TermId id : tokenizer_.tokenize(text)) {
    if (id == Vocabulary::kClsId || id == Vocabulary::kSepId) continue;
    present[id] = true;
  }
  const double weight = std::log1p(1.0);
  std::vector<SparseEntry> entries;
  for (TermId id = 0; id < present.size(); ++id) {
    if (present[id]) entries.push_back({id, weight});
  }
  return SparseVec(vocab_size(), std::move(entries));
}

std::uint64_t PrecomputedEncoder::text_hash(std::string_view text) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

PrecomputedEncoder PrecomputedEncoder::load(const std::string& path, std::size_t vocab_size) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open precomputed vector file: " + path);
  PrecomputedEncoder enc(vocab_size);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected <hash> TAB <vector>");
    }
    std::uint64_t key = 0;
    try {
      key = std::stoull(line.substr(0, tab), nullptr, 16);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed hash key");
    }
    enc.vectors_.emplace(key, SparseVec::from_text(
                                  std::string_view(line).substr(tab + 1), vocab_size));
  }
  return enc;
}

void PrecomputedEncoder::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write precomputed vector file: " + path);
  char key[32];
  for (const auto& [hash, vec] : vectors_) {
    std::snprintf(key, sizeof(key), "%016llx", static_cast<unsigned long long>(hash));
    out << key << '\t' << vec.to_text() << '\n';
  }
}

void PrecomputedEncoder::add(std::string_view text, SparseVec vec) {
  if (vec.vocab_size() != vocab_size_) {
    throw std::invalid_argument("vocabulary size mismatch in precomputed vector");
  }
  vectors_[text_hash(text)] = std::move(vec);
}

SparseVec PrecomputedEncoder::encode(std::string_view text) const {
  auto it = vectors_.find(text_hash(text));
  if (it == vectors_.end()) {
    throw std::runtime_error("no precomputed vector for input: " + std::string(text));
  }
  return it->second;
}

}  // namespace cosplade
