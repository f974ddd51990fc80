#include "cosplade/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cosplade {

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) {
    throw std::invalid_argument("vocabulary must contain at least one term");
  }
  ids_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    auto [it, inserted] = ids_.emplace(terms_[i], static_cast<TermId>(i));
    if (!inserted) {
      throw std::invalid_argument("duplicate vocabulary term: " + terms_[i]);
    }
  }
}

Vocabulary Vocabulary::with_markers(std::vector<std::string> content_terms) {
  std::vector<std::string> terms;
  terms.reserve(content_terms.size() + 2);
  terms.emplace_back(kClsToken);
  terms.emplace_back(kSepToken);
  for (auto& t : content_terms) terms.push_back(std::move(t));
  return Vocabulary(std::move(terms));
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    terms.push_back(line);
  }
  return Vocabulary(std::move(terms));
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary file: " + path);
  for (const auto& t : terms_) out << t << '\n';
}

const std::string& Vocabulary::term(TermId id) const {
  if (id >= terms_.size()) {
    throw std::out_of_range("term id " + std::to_string(id) + " >= vocabulary size " +
                            std::to_string(terms_.size()));
  }
  return terms_[id];
}

std::optional<TermId> Vocabulary::id_of(std::string_view term) const {
  auto it = ids_.find(std::string(term));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

SparseVec::SparseVec(std::size_t vocab_size, std::vector<SparseEntry> entries)
    : vocab_size_(vocab_size) {
  entries_.reserve(entries.size());
  TermId prev = 0;
  bool first = true;
  for (const auto& e : entries) {
    if (e.id >= vocab_size_) {
      throw std::invalid_argument("sparse entry id " + std::to_string(e.id) +
                                  " >= vocabulary size " + std::to_string(vocab_size_));
    }
    if (!first && e.id <= prev) {
      throw std::invalid_argument("sparse entry ids must be strictly increasing");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw std::invalid_argument("sparse weights must be finite and non-negative");
    }
    prev = e.id;
    first = false;
    if (e.weight < kWeightEps) continue;
    entries_.push_back(e);
  }
}

SparseVec SparseVec::from_dense(std::span<const double> dense) {
  std::vector<SparseEntry> entries;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] >= kWeightEps) {
      entries.push_back({static_cast<TermId>(i), dense[i]});
    } else if (!std::isfinite(dense[i]) || dense[i] < 0.0) {
      throw std::invalid_argument("dense weights must be finite and non-negative");
    }
  }
  return SparseVec(dense.size(), std::move(entries));
}

std::vector<double> SparseVec::to_dense() const {
  std::vector<double> dense(vocab_size_, 0.0);
  for (const auto& e : entries_) dense[e.id] = e.weight;
  return dense;
}

double SparseVec::weight(TermId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const SparseEntry& e, TermId v) { return e.id < v; });
  if (it != entries_.end() && it->id == id) return it->weight;
  return 0.0;
}

double SparseVec::norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.weight * e.weight;
  return std::sqrt(s);
}

std::string SparseVec::to_text() const {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    int len = std::snprintf(buf, sizeof(buf), "%s%u:%.6f", i == 0 ? "" : " ",
                            entries_[i].id, entries_[i].weight);
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

SparseVec SparseVec::from_text(std::string_view line, std::size_t vocab_size) {
  std::vector<SparseEntry> entries;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    std::string_view token = line.substr(pos, end - pos);
    std::size_t colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("malformed sparse vector token: " + std::string(token));
    }
    std::string id_str(token.substr(0, colon));
    std::string w_str(token.substr(colon + 1));
    std::size_t consumed = 0;
    unsigned long id = 0;
    double w = 0.0;
    try {
      id = std::stoul(id_str, &consumed);
      if (consumed != id_str.size()) throw std::invalid_argument(id_str);
      w = std::stod(w_str, &consumed);
      if (consumed != w_str.size()) throw std::invalid_argument(w_str);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed sparse vector token: " + std::string(token));
    }
    entries.push_back({static_cast<TermId>(id), w});
    pos = end;
  }
  return SparseVec(vocab_size, std::move(entries));
}

SparseVec splade_aggregate(const TokenLogits& logits) {
  if (logits.rows() == 0) throw std::invalid_argument("empty input");
  std::vector<SparseEntry> entries;
  for (std::size_t v = 0; v < logits.cols(); ++v) {
    double best = 0.0;
    for (std::size_t t = 0; t < logits.rows(); ++t) {
      best = std::max(best, logits.at(t, v));
    }
    if (best > 0.0) {
      double w = std::log1p(best);
      if (w >= SparseVec::kWeightEps) {
        entries.push_back({static_cast<TermId>(v), w});
      }
    }
  }
  return SparseVec(logits.cols(), std::move(entries));
}

namespace {

void check_same_vocab(const SparseVec& a, const SparseVec& b) {
  if (a.vocab_size() != b.vocab_size()) {
    throw std::invalid_argument("vocabulary size mismatch: " + std::to_string(a.vocab_size()) +
                                " vs " + std::to_string(b.vocab_size()));
  }
}

}  // namespace

double dot(const SparseVec& a, const SparseVec& b) {
  check_same_vocab(a, b);
  double sum = 0.0;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    if (ia->id < ib->id) {
      ++ia;
    } else if (ib->id < ia->id) {
      ++ib;
    } else {
      sum += ia->weight * ib->weight;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

SparseVec add(const SparseVec& a, const SparseVec& b) {
  check_same_vocab(a, b);
  std::vector<SparseEntry> entries;
  entries.reserve(a.nnz() + b.nnz());
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() || ib != b.entries().end()) {
    if (ib == b.entries().end() || (ia != a.entries().end() && ia->id < ib->id)) {
      entries.push_back(*ia++);
    } else if (ia == a.entries().end() || ib->id < ia->id) {
      entries.push_back(*ib++);
    } else {
      entries.push_back({ia->id, ia->weight + ib->weight});
      ++ia;
      ++ib;
    }
  }
  return SparseVec(a.vocab_size(), std::move(entries));
}

SparseVec mean(std::span<const SparseVec> vecs) {
  if (vecs.empty()) throw std::invalid_argument("mean of an empty list");
  SparseVec acc = vecs.front();
  for (std::size_t i = 1; i < vecs.size(); ++i) acc = add(acc, vecs[i]);
  if (vecs.size() == 1) return acc;
  return scale(acc, 1.0 / static_cast<double>(vecs.size()));
}

SparseVec scale(const SparseVec& a, double factor) {
  if (!std::isfinite(factor) || factor <= 0.0) {
    throw std::invalid_argument("scale factor must be positive");
  }
  std::vector<SparseEntry> entries;
  entries.reserve(a.nnz());
  for (const auto& e : a.entries()) entries.push_back({e.id, e.weight * factor});
  return SparseVec(a.vocab_size(), std::move(entries));
}

}  // namespace cosplade
