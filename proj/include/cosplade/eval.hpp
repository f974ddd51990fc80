#pragma once

#include <map>
#include <string>
#include <vector>

namespace cosplade {

/// Graded relevance judgments keyed by (query id, doc id). Duplicate keys
/// are rejected. A query is evaluable only when it has at least one
/// document with relevance >= 1, matching standard TREC tooling.
class Qrels {
 public:
  void add(const std::string& query_id, const std::string& doc_id, int relevance);

  /// TREC qrels format: `qid 0 docid rel`, whitespace separated.
  static Qrels load_trec(const std::string& path);
  void save_trec(const std::string& path) const;

  bool has_query(const std::string& query_id) const;
  int relevance(const std::string& query_id, const std::string& doc_id) const;  // 0 if unjudged
  std::size_t relevant_count(const std::string& query_id) const;  // docs with rel >= 1
  /// Graded relevances of the query's judged docs, descending.
  std::vector<int> sorted_gains(const std::string& query_id) const;
  const std::map<std::string, std::map<std::string, int>>& by_query() const { return judged_; }

 private:
  std::map<std::string, std::map<std::string, int>> judged_;
};

struct RunEntry {
  std::string doc_id;
  double score;
};

/// Ranked retrieval output per query id, descending score with ranks
/// contiguous from 1. Ties keep their input order; the harness never
/// re-sorts equal scores.
class RunList {
 public:
  void set(const std::string& query_id, std::vector<RunEntry> entries);

  /// TREC run format: `qid Q0 docid rank score tag`.
  static RunList load_trec(const std::string& path);
  void save_trec(const std::string& path, const std::string& tag) const;

  const std::map<std::string, std::vector<RunEntry>>& by_query() const { return runs_; }

 private:
  std::map<std::string, std::vector<RunEntry>>& mutable_runs() { return runs_; }
  std::map<std::string, std::vector<RunEntry>> runs_;
};

/// Per-query values plus their aggregate: mean and the standard error of
/// the mean (population standard deviation / sqrt(#queries)).
struct MetricResult {
  std::vector<std::pair<std::string, double>> per_query;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t skipped_unknown = 0;  // run queries without judgments
};

/// Normalized discounted cumulative gain at k: linear gain, 1/log2(rank+1)
/// discount. include_missing adds judged queries absent from the run as 0.
MetricResult ndcg_at(const RunList& run, const Qrels& qrels, std::size_t k,
                     bool include_missing = false);

/// Reciprocal rank of the first document with relevance >= 1, 0 if none.
MetricResult mrr(const RunList& run, const Qrels& qrels, bool include_missing = false);

/// |relevant in top-k| / |relevant|.
MetricResult recall_at(const RunList& run, const Qrels& qrels, std::size_t k,
                       bool include_missing = false);

/// Mean of precision at each relevant hit within top-k, divided by the
/// total relevant count.
MetricResult map_at(const RunList& run, const Qrels& qrels, std::size_t k,
                    bool include_missing = false);

}  // namespace cosplade
