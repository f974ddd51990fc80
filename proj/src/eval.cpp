#include "cosplade/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "cosplade/util.hpp"

namespace cosplade {

void Qrels::add(const std::string& query_id, const std::string& doc_id, int relevance) {
  if (relevance < 0) throw std::invalid_argument("relevance must be non-negative");
  auto [it, inserted] = judged_[query_id].emplace(doc_id, relevance);
  if (!inserted) {
    throw std::invalid_argument("duplicate qrels entry for (" + query_id + ", " + doc_id + ")");
  }
}

Qrels Qrels::load_trec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open qrels file: " + path);
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string qid, iteration, docid;
    int rel = 0;
    if (!(fields >> qid >> iteration >> docid >> rel)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed qrels line");
    }
    qrels.add(qid, docid, rel);
  }
  return qrels;
}

void Qrels::save_trec(const std::string& path) const {
  AtomicFile file(path);
  for (const auto& [qid, docs] : judged_) {
    for (const auto& [docid, rel] : docs) {
      file.stream() << qid << " 0 " << docid << ' ' << rel << '\n';
    }
  }
  file.commit();
}

bool Qrels::has_query(const std::string& query_id) const { return judged_.count(query_id) > 0; }

int Qrels::relevance(const std::string& query_id, const std::string& doc_id) const {
  auto qit = judged_.find(query_id);
  if (qit == judged_.end()) return 0;
  auto dit = qit->second.find(doc_id);
  return dit == qit->second.end() ? 0 : dit->second;
}

std::size_t Qrels::relevant_count(const std::string& query_id) const {
  auto qit = judged_.find(query_id);
  if (qit == judged_.end()) return 0;
  std::size_t count = 0;
  for (const auto& [docid, rel] : qit->second) {
    if (rel >= 1) ++count;
  }
  return count;
}

std::vector<int> Qrels::sorted_gains(const std::string& query_id) const {
  std::vector<int> gains;
  auto qit = judged_.find(query_id);
  if (qit == judged_.end()) return gains;
  for (const auto& [docid, rel] : qit->second) gains.push_back(rel);
  std::sort(gains.begin(), gains.end(), std::greater<int>());
  return gains;
}

void RunList::set(const std::string& query_id, std::vector<RunEntry> entries) {
  std::unordered_set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.doc_id).second) {
      throw std::invalid_argument("duplicate doc id " + e.doc_id + " in run for query " +
                                  query_id);
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const RunEntry& a, const RunEntry& b) { return a.score > b.score; });
  runs_[query_id] = std::move(entries);
}

RunList RunList::load_trec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run file: " + path);
  std::map<std::string, std::vector<RunEntry>> parsed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string qid, q0, docid, tag;
    long rank = 0;
    double score = 0.0;
    if (!(fields >> qid >> q0 >> docid >> rank >> score >> tag)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed run line");
    }
    parsed[qid].push_back({docid, score});
  }
  RunList run;
  for (auto& [qid, entries] : parsed) run.set(qid, std::move(entries));
  return run;
}

void RunList::save_trec(const std::string& path, const std::string& tag) const {
  AtomicFile file(path);
  char score_buf[64];
  for (const auto& [qid, entries] : runs_) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      std::snprintf(score_buf, sizeof(score_buf), "%.6f", entries[i].score);
      file.stream() << qid << " Q0 " << entries[i].doc_id << ' ' << i + 1 << ' ' << score_buf
                    << ' ' << tag << '\n';
    }
  }
  file.commit();
}

namespace {

// Shared walk: per-query metric over every evaluable query. A query is
// evaluable when it has at least one relevant judged document. Run queries
// without judgments are counted as skipped; judged queries missing from the
// run score 0 when include_missing is set.
MetricResult evaluate(const RunList& run, const Qrels& qrels, bool include_missing,
                      const std::function<double(const std::vector<RunEntry>&,
                                                 const std::map<std::string, int>&)>& score_one) {
  MetricResult result;
  static const std::vector<RunEntry> kEmptyRun;

  for (const auto& [qid, entries] : run.by_query()) {
    if (!qrels.has_query(qid) || qrels.relevant_count(qid) == 0) {
      ++result.skipped_unknown;
      continue;
    }
    result.per_query.emplace_back(qid, score_one(entries, qrels.by_query().at(qid)));
  }
  if (include_missing) {
    for (const auto& [qid, judged] : qrels.by_query()) {
      if (run.by_query().count(qid) || qrels.relevant_count(qid) == 0) continue;
      result.per_query.emplace_back(qid, score_one(kEmptyRun, judged));
    }
    std::sort(result.per_query.begin(), result.per_query.end());
  }

  if (!result.per_query.empty()) {
    double sum = 0.0;
    for (const auto& [qid, v] : result.per_query) sum += v;
    result.mean = sum / static_cast<double>(result.per_query.size());
    double sq = 0.0;
    for (const auto& [qid, v] : result.per_query) sq += (v - result.mean) * (v - result.mean);
    double population_sd = std::sqrt(sq / static_cast<double>(result.per_query.size()));
    result.std_error = population_sd / std::sqrt(static_cast<double>(result.per_query.size()));
  }
  return result;
}

double log2_discount(std::size_t rank) { return std::log2(static_cast<double>(rank) + 1.0); }

}  // namespace

MetricResult ndcg_at(const RunList& run, const Qrels& qrels, std::size_t k,
                     bool include_missing) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  return evaluate(run, qrels, include_missing,
                  [k](const std::vector<RunEntry>& entries,
                      const std::map<std::string, int>& judged) {
                    double dcg = 0.0;
                    for (std::size_t i = 0; i < entries.size() && i < k; ++i) {
                      auto it = judged.find(entries[i].doc_id);
                      if (it != judged.end() && it->second > 0) {
                        dcg += static_cast<double>(it->second) / log2_discount(i + 1);
                      }
                    }
                    std::vector<int> gains;
                    for (const auto& [docid, rel] : judged) gains.push_back(rel);
                    std::sort(gains.begin(), gains.end(), std::greater<int>());
                    double idcg = 0.0;
                    for (std::size_t i = 0; i < gains.size() && i < k && gains[i] > 0; ++i) {
                      idcg += static_cast<double>(gains[i]) / log2_discount(i + 1);
                    }
                    return idcg > 0.0 ? dcg / idcg : 0.0;
                  });
}

MetricResult mrr(const RunList& run, const Qrels& qrels, bool include_missing) {
  return evaluate(run, qrels, include_missing,
                  [](const std::vector<RunEntry>& entries,
                     const std::map<std::string, int>& judged) {
                    for (std::size_t i = 0; i < entries.size(); ++i) {
                      auto it = judged.find(entries[i].doc_id);
                      if (it != judged.end() && it->second >= 1) {
                        return 1.0 / static_cast<double>(i + 1);
                      }
                    }
                    return 0.0;
                  });
}

MetricResult recall_at(const RunList& run, const Qrels& qrels, std::size_t k,
                       bool include_missing) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  return evaluate(run, qrels, include_missing,
                  [k](const std::vector<RunEntry>& entries,
                      const std::map<std::string, int>& judged) {
                    std::size_t relevant = 0;
                    for (const auto& [docid, rel] : judged) {
                      if (rel >= 1) ++relevant;
                    }
                    std::size_t hit = 0;
                    for (std::size_t i = 0; i < entries.size() && i < k; ++i) {
                      auto it = judged.find(entries[i].doc_id);
                      if (it != judged.end() && it->second >= 1) ++hit;
                    }
                    return static_cast<double>(hit) / static_cast<double>(relevant);
                  });
}

MetricResult map_at(const RunList& run, const Qrels& qrels, std::size_t k,
                    bool include_missing) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  return evaluate(run, qrels, include_missing,
                  [k](const std::vector<RunEntry>& entries,
                      const std::map<std::string, int>& judged) {
                    std::size_t relevant = 0;
                    for (const auto& [docid, rel] : judged) {
                      if (rel >= 1) ++relevant;
                    }
                    double precision_sum = 0.0;
                    std::size_t hits = 0;
                    for (std::size_t i = 0; i < entries.size() && i < k; ++i) {
                      auto it = judged.find(entries[i].doc_id);
                      if (it != judged.end() && it->second >= 1) {
                        ++hits;
                        precision_sum +=
                            static_cast<double>(hits) / static_cast<double>(i + 1);
                      }
                    }
                    return precision_sum / static_cast<double>(relevant);
                  });
}

}  // namespace cosplade
