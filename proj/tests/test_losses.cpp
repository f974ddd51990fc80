#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "cosplade/losses.hpp"

using namespace cosplade;

namespace {

constexpr double kFdStep = 1e-5;

SparseVec random_vec(std::mt19937_64& rng, std::size_t vocab_size, double density = 0.4) {
  std::uniform_real_distribution<double> weight(0.05, 2.0);
  std::bernoulli_distribution keep(density);
  std::vector<SparseEntry> entries;
  for (std::size_t v = 0; v < vocab_size; ++v) {
    if (keep(rng)) entries.push_back({static_cast<TermId>(v), weight(rng)});
  }
  return SparseVec(vocab_size, std::move(entries));
}

// Dense re-implementations of the loss formulas, independent of the sparse
// code path. They extend to negative coordinates, which makes them valid
// targets for central finite differences.
double mse_dense(const std::vector<double>& p, const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) s += (p[v] - g[v]) * (p[v] - g[v]);
  return s / static_cast<double>(p.size());
}

double asym_dense(const std::vector<double>& a, const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    double shortfall = std::max(g[v] - a[v], 0.0);
    s += shortfall * shortfall;
  }
  return s / static_cast<double>(a.size());
}

double cosine_dense(const std::vector<double>& p, const std::vector<double>& g) {
  double pg = 0.0, pp = 0.0, gg = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) {
    pg += p[v] * g[v];
    pp += p[v] * p[v];
    gg += g[v] * g[v];
  }
  return 1.0 - pg / (std::sqrt(pp) * std::sqrt(gg));
}

template <typename LossFn>
std::vector<double> fd_gradient(std::vector<double> at, const LossFn& loss) {
  std::vector<double> grad(at.size(), 0.0);
  for (std::size_t v = 0; v < at.size(); ++v) {
    double original = at[v];
    at[v] = original + kFdStep;
    double up = loss(at);
    at[v] = original - kFdStep;
    double down = loss(at);
    at[v] = original;
    grad[v] = (up - down) / (2.0 * kFdStep);
  }
  return grad;
}

void check_close(const std::vector<double>& analytic, const std::vector<double>& numeric,
                 double rel_tol, const std::vector<bool>* skip = nullptr) {
  REQUIRE(analytic.size() == numeric.size());
  for (std::size_t v = 0; v < analytic.size(); ++v) {
    if (skip && (*skip)[v]) continue;
    double denom = std::max({std::abs(analytic[v]), std::abs(numeric[v]), 1e-8});
    CHECK(std::abs(analytic[v] - numeric[v]) / denom <= rel_tol);
  }
}

// The one-sided penalty is only C^1 at answers = gold, so central finite
// differences carry O(h) error on coordinates at the boundary; those are
// excluded from the comparison.
std::vector<bool> asym_kink_mask(const SparseVec& answers, const SparseVec& gold) {
  auto a = answers.to_dense();
  auto g = gold.to_dense();
  std::vector<bool> mask(a.size(), false);
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (std::abs(g[v] - a[v]) < 1e-3) mask[v] = true;
  }
  return mask;
}

}  // namespace

TEST_CASE("mse loss") {
  SparseVec x(4, {{0, 1.0}, {2, 0.5}});
  CHECK(mse_loss(x, x).value == 0.0);

  SparseVec pred(4, {{0, 1.0}});
  SparseVec gold(4, {{0, 3.0}});
  LossValue loss = mse_loss(pred, gold);
  CHECK(loss.value == doctest::Approx(1.0));  // (1-3)^2 / 4
  CHECK(loss.grad_queries[0] == doctest::Approx(2.0 * (1.0 - 3.0) / 4.0));
  CHECK(loss.grad_answers == loss.grad_queries);
  CHECK_THROWS_AS(mse_loss(pred, SparseVec(5)), std::invalid_argument);

  std::mt19937_64 rng(42);
  for (int i = 0; i < 30; ++i) {
    SparseVec p = random_vec(rng, 50);
    SparseVec g = random_vec(rng, 50);
    auto gd = g.to_dense();
    LossValue l = mse_loss(p, g);
    CHECK(l.value == doctest::Approx(mse_dense(p.to_dense(), gd)).epsilon(1e-12));
    auto fd = fd_gradient(p.to_dense(),
                          [&](const std::vector<double>& at) { return mse_dense(at, gd); });
    check_close(l.grad_queries, fd, 1e-6);
  }
}

TEST_CASE("asym loss") {
  SUBCASE("covered gold costs nothing") {
    SparseVec answers(3, {{0, 2.0}, {1, 1.0}, {2, 0.5}});
    SparseVec gold(3, {{0, 1.0}, {2, 0.5}});
    CHECK(asym_loss(answers, gold).value == 0.0);
  }
  SUBCASE("shortfall is penalized") {
    SparseVec answers(2, {{0, 0.5}});
    SparseVec gold(2, {{0, 1.0}});
    LossValue loss = asym_loss(answers, gold);
    CHECK(loss.value == doctest::Approx(0.125));  // 0.25 / 2
    CHECK(loss.grad_answers[0] == doctest::Approx(-2.0 * 0.5 / 2.0));
    CHECK(loss.grad_queries[0] == 0.0);  // no query-path dependence
  }
  SUBCASE("no upper bound: overshooting leaves the loss unchanged") {
    SparseVec gold(2, {{0, 1.0}, {1, 0.5}});
    SparseVec at(2, {{0, 2.0}, {1, 0.25}});
    SparseVec higher(2, {{0, 5.0}, {1, 0.25}});
    CHECK(asym_loss(at, gold).value == asym_loss(higher, gold).value);
  }
  SUBCASE("gradient is zero where answers cover gold") {
    SparseVec answers(3, {{0, 2.0}, {1, 0.1}});
    SparseVec gold(3, {{0, 1.0}, {1, 0.5}});
    LossValue loss = asym_loss(answers, gold);
    CHECK(loss.grad_answers[0] == 0.0);
    CHECK(loss.grad_answers[1] != 0.0);
    CHECK(loss.grad_answers[2] == 0.0);
  }
  SUBCASE("gradient matches finite differences") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 30; ++i) {
      SparseVec a = random_vec(rng, 50);
      SparseVec g = random_vec(rng, 50);
      auto mask = asym_kink_mask(a, g);
      auto gd = g.to_dense();
      LossValue l = asym_loss(a, g);
      CHECK(l.value == doctest::Approx(asym_dense(a.to_dense(), gd)).epsilon(1e-12));
      auto fd = fd_gradient(a.to_dense(),
                            [&](const std::vector<double>& at) { return asym_dense(at, gd); });
      check_close(l.grad_answers, fd, 1e-5, &mask);
    }
  }
}

TEST_CASE("combined loss") {
  std::mt19937_64 rng(44);
  SUBCASE("vanishes at the fixed point") {
    SparseVec x = random_vec(rng, 20);
    CHECK(combined_loss(x, x, x).value == 0.0);
  }
  SUBCASE("decomposes exactly into its parts") {
    for (int i = 0; i < 200; ++i) {
      SparseVec pred = random_vec(rng, 30);
      SparseVec answers = random_vec(rng, 30);
      SparseVec gold = random_vec(rng, 30);
      double parts = mse_loss(pred, gold).value + asym_loss(answers, gold).value;
      CHECK(combined_loss(pred, answers, gold).value == parts);
    }
  }
  SUBCASE("gradients route both paths") {
    // pred = queries + answers: perturbing the answer half moves both the
    // MSE term (through pred) and the asym term.
    for (int i = 0; i < 30; ++i) {
      SparseVec queries = random_vec(rng, 40);
      SparseVec answers = random_vec(rng, 40);
      SparseVec gold = random_vec(rng, 40);
      auto mask = asym_kink_mask(answers, gold);
      SparseVec pred = add(queries, answers);
      LossValue loss = combined_loss(pred, answers, gold);

      auto qd = queries.to_dense();
      auto ad = answers.to_dense();
      auto gd = gold.to_dense();
      auto combined_dense = [&gd](const std::vector<double>& q, const std::vector<double>& a) {
        std::vector<double> p(q.size());
        for (std::size_t v = 0; v < q.size(); ++v) p[v] = q[v] + a[v];
        return mse_dense(p, gd) + asym_dense(a, gd);
      };
      auto fd_a = fd_gradient(
          ad, [&](const std::vector<double>& at) { return combined_dense(qd, at); });
      check_close(loss.grad_answers, fd_a, 1e-5, &mask);
      auto fd_q = fd_gradient(
          qd, [&](const std::vector<double>& at) { return combined_dense(at, ad); });
      check_close(loss.grad_queries, fd_q, 1e-5);
    }
  }
}

TEST_CASE("cosine loss") {
  SparseVec x(4, {{0, 1.0}, {2, 2.0}});
  for (double c : {0.5, 2.0, 10.0}) {
    CHECK(std::abs(cosine_loss(x, scale(x, c)).value) <= 1e-12);
  }
  SparseVec orthogonal(4, {{1, 3.0}});
  CHECK(cosine_loss(x, orthogonal).value == doctest::Approx(1.0));
  CHECK_THROWS_AS(cosine_loss(SparseVec(4), x), std::invalid_argument);

  std::mt19937_64 rng(45);
  int checked = 0;
  while (checked < 30) {
    SparseVec p = random_vec(rng, 50);
    SparseVec g = random_vec(rng, 50);
    if (p.empty() || g.empty()) continue;
    auto gd = g.to_dense();
    LossValue l = cosine_loss(p, g);
    CHECK(l.value == doctest::Approx(cosine_dense(p.to_dense(), gd)).epsilon(1e-12));
    auto fd = fd_gradient(p.to_dense(),
                          [&](const std::vector<double>& at) { return cosine_dense(at, gd); });
    check_close(l.grad_queries, fd, 1e-5);
    ++checked;
  }
}

TEST_CASE("t5 relevance score") {
  CHECK(t5_relevance_score(0.6, 0.2) == doctest::Approx(0.75));
  CHECK(t5_relevance_score(0.3, 0.3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(t5_relevance_score(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(t5_relevance_score(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(t5_relevance_score(1.5, 0.5), std::invalid_argument);

  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> p(0.01, 0.99);
  for (int i = 0; i < 100; ++i) {
    double s = t5_relevance_score(p(rng), p(rng));
    CHECK(s > 0.0);
    CHECK(s < 1.0);
  }
}

TEST_CASE("margin mse loss") {
  CHECK(margin_mse_loss({2.0, 1.0, 3.0, 2.0}).value == 0.0);  // equal margins
  CHECK(margin_mse_loss({1.0, 0.0, 0.5, 0.5}).value == doctest::Approx(1.0));

  SUBCASE("shift invariance in the student scores") {
    ScoreQuadruple q{1.4, 0.3, 0.9, 0.1};
    ScoreQuadruple shifted{q.student_d1 + 5.0, q.student_d2 + 5.0, q.teacher_d1, q.teacher_d2};
    CHECK(margin_mse_loss(q).value == doctest::Approx(margin_mse_loss(shifted).value));
  }
  SUBCASE("gradients match finite differences") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> score(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
      ScoreQuadruple q{score(rng), score(rng), score(rng), score(rng)};
      MarginLossValue loss = margin_mse_loss(q);
      auto at = [&](double s1, double s2) {
        return margin_mse_loss({s1, s2, q.teacher_d1, q.teacher_d2}).value;
      };
      double fd1 = (at(q.student_d1 + kFdStep, q.student_d2) -
                    at(q.student_d1 - kFdStep, q.student_d2)) /
                   (2.0 * kFdStep);
      double fd2 = (at(q.student_d1, q.student_d2 + kFdStep) -
                    at(q.student_d1, q.student_d2 - kFdStep)) /
                   (2.0 * kFdStep);
      CHECK(loss.grad_student_d1 == doctest::Approx(fd1).epsilon(1e-6));
      CHECK(loss.grad_student_d2 == doctest::Approx(fd2).epsilon(1e-6));
    }
  }
}
