#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <doctest.h>

#include "cosplade/eval.hpp"

using namespace cosplade;

namespace {

RunList make_run(const std::string& qid, const std::vector<std::string>& docs) {
  RunList run;
  std::vector<RunEntry> entries;
  double score = static_cast<double>(docs.size());
  for (const auto& d : docs) entries.push_back({d, score--});
  run.set(qid, std::move(entries));
  return run;
}

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempPath() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("qrels") {
  Qrels qrels;
  qrels.add("q1", "d1", 2);
  qrels.add("q1", "d2", 0);
  CHECK_THROWS_AS(qrels.add("q1", "d1", 1), std::invalid_argument);
  CHECK(qrels.relevance("q1", "d1") == 2);
  CHECK(qrels.relevance("q1", "unjudged") == 0);
  CHECK(qrels.relevant_count("q1") == 1);
  CHECK(!qrels.has_query("q2"));
}

TEST_CASE("ndcg") {
  Qrels qrels;
  qrels.add("q", "d1", 2);
  qrels.add("q", "d2", 1);

  SUBCASE("perfect ranking scores 1") {
    auto result = ndcg_at(make_run("q", {"d1", "d2"}), qrels, 10);
    CHECK(result.mean == doctest::Approx(1.0));
  }
  SUBCASE("swapped ranking against the convention oracle") {
    auto result = ndcg_at(make_run("q", {"d2", "d1"}), qrels, 2);
    double dcg = 1.0 / std::log2(2.0) + 2.0 / std::log2(3.0);
    double idcg = 2.0 / std::log2(2.0) + 1.0 / std::log2(3.0);
    CHECK(result.mean == doctest::Approx(dcg / idcg).epsilon(1e-12));
  }
  SUBCASE("no relevant docs retrieved scores 0") {
    auto result = ndcg_at(make_run("q", {"x", "y"}), qrels, 10);
    CHECK(result.mean == 0.0);
  }
  SUBCASE("unknown run queries are skipped and counted") {
    RunList run = make_run("mystery", {"d1"});
    auto result = ndcg_at(run, qrels, 10);
    CHECK(result.per_query.empty());
    CHECK(result.skipped_unknown == 1);
  }
}

TEST_CASE("mrr") {
  Qrels qrels;
  qrels.add("q", "rel", 1);
  qrels.add("q", "also", 2);
  CHECK(mrr(make_run("q", {"rel", "x"}), qrels).mean == doctest::Approx(1.0));
  CHECK(mrr(make_run("q", {"x", "y", "z", "rel"}), qrels).mean == doctest::Approx(0.25));
  CHECK(mrr(make_run("q", {"x", "y"}), qrels).mean == 0.0);
}

TEST_CASE("recall") {
  Qrels qrels;
  qrels.add("q", "a", 1);
  qrels.add("q", "b", 1);
  qrels.add("q", "c", 0);  // judged non-relevant
  CHECK(recall_at(make_run("q", {"a", "b"}), qrels, 10).mean == doctest::Approx(1.0));
  CHECK(recall_at(make_run("q", {"a", "x"}), qrels, 10).mean == doctest::Approx(0.5));
  CHECK(recall_at(make_run("q", {"x", "a", "b"}), qrels, 1).mean == 0.0);
  CHECK(recall_at(make_run("q", {"a", "b"}), qrels, 1000).mean == doctest::Approx(1.0));
}

TEST_CASE("map") {
  Qrels qrels;
  qrels.add("q", "a", 1);
  CHECK(map_at(make_run("q", {"a"}), qrels, 10).mean == doctest::Approx(1.0));
  CHECK(map_at(make_run("q", {"x", "a"}), qrels, 10).mean == doctest::Approx(0.5));

  Qrels two;
  two.add("q", "a", 1);
  two.add("q", "b", 1);
  auto result = map_at(make_run("q", {"a", "x", "b"}), two, 10);
  CHECK(result.mean == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
  // Relevant docs outside the cutoff contribute nothing.
  CHECK(map_at(make_run("q", {"a", "x", "b"}), two, 2).mean == doctest::Approx(0.5));
}

TEST_CASE("aggregation over queries") {
  Qrels qrels;
  qrels.add("q1", "d", 1);
  qrels.add("q2", "d", 1);
  RunList run;
  run.set("q1", {{"d", 5.0}});       // mrr 1.0
  run.set("q2", {{"x", 5.0}, {"d", 4.0}});  // mrr 0.5

  auto result = mrr(run, qrels);
  REQUIRE(result.per_query.size() == 2);
  CHECK(result.mean == doctest::Approx(0.75));
  // Population standard deviation 0.25 over 2 queries.
  CHECK(result.std_error == doctest::Approx(0.25 / std::sqrt(2.0)).epsilon(1e-12));

  SUBCASE("identical values have zero dispersion") {
    RunList same;
    same.set("q1", {{"d", 1.0}});
    same.set("q2", {{"d", 1.0}});
    CHECK(mrr(same, qrels).std_error == 0.0);
  }
  SUBCASE("include_missing adds judged queries absent from the run as zero") {
    RunList partial;
    partial.set("q1", {{"d", 1.0}});
    auto strict = mrr(partial, qrels, true);
    REQUIRE(strict.per_query.size() == 2);
    CHECK(strict.mean == doctest::Approx(0.5));
    CHECK(mrr(partial, qrels, false).per_query.size() == 1);
  }
}

TEST_CASE("rank-only dependence") {
  Qrels qrels;
  qrels.add("q", "a", 2);
  qrels.add("q", "b", 1);
  RunList run;
  run.set("q", {{"x", 9.0}, {"a", 3.0}, {"b", 2.0}});
  RunList shifted;
  shifted.set("q", {{"x", 109.0}, {"a", 103.0}, {"b", 102.0}});
  for (std::size_t k : {1, 2, 3}) {
    CHECK(ndcg_at(run, qrels, k).mean == ndcg_at(shifted, qrels, k).mean);
    CHECK(recall_at(run, qrels, k).mean == recall_at(shifted, qrels, k).mean);
    CHECK(map_at(run, qrels, k).mean == map_at(shifted, qrels, k).mean);
  }
  CHECK(mrr(run, qrels).mean == mrr(shifted, qrels).mean);
}

TEST_CASE("run ties keep input order") {
  RunList run;
  run.set("q", {{"first", 1.0}, {"second", 1.0}, {"third", 1.0}});
  const auto& entries = run.by_query().at("q");
  CHECK(entries[0].doc_id == "first");
  CHECK(entries[1].doc_id == "second");
  CHECK(entries[2].doc_id == "third");

  CHECK_THROWS_AS(run.set("dup", {{"d", 1.0}, {"d", 0.5}}), std::invalid_argument);
}

TEST_CASE("trec file round trips") {
  Qrels qrels;
  qrels.add("q1", "d1", 2);
  qrels.add("q1", "d2", 0);
  qrels.add("q2", "d9", 1);
  TempPath qrels_file("cosplade_qrels_test.txt");
  qrels.save_trec(qrels_file.path);
  Qrels loaded = Qrels::load_trec(qrels_file.path);
  CHECK(loaded.relevance("q1", "d1") == 2);
  CHECK(loaded.relevance("q2", "d9") == 1);

  RunList run;
  run.set("q1", {{"d1", 2.5}, {"d2", 1.25}});
  run.set("q2", {{"d9", 0.75}});
  TempPath run_file("cosplade_run_test.txt");
  run.save_trec(run_file.path, "tag");
  RunList run_loaded = RunList::load_trec(run_file.path);
  REQUIRE(run_loaded.by_query().size() == 2);
  CHECK(run_loaded.by_query().at("q1")[0].doc_id == "d1");
  CHECK(run_loaded.by_query().at("q1")[1].doc_id == "d2");

  {
    std::ifstream in(run_file.path);
    std::string first_line;
    std::getline(in, first_line);
    CHECK(first_line == "q1 Q0 d1 1 2.500000 tag");
  }

  {
    std::ofstream bad(run_file.path);
    bad << "q1 Q0 d1 notanumber\n";
  }
  CHECK_THROWS_WITH_AS(RunList::load_trec(run_file.path), doctest::Contains(":1:"),
                       std::runtime_error);
}
