#include "cosplade/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace cosplade {

namespace {

void check_same_vocab(const SparseVec& a, const SparseVec& b, const char* what) {
  if (a.vocab_size() != b.vocab_size()) {
    throw std::invalid_argument(std::string("vocabulary size mismatch in ") + what);
  }
}

void snap_to_zero(std::vector<double>& grad) {
  for (double& g : grad) {
    if (std::abs(g) < SparseVec::kWeightEps) g = 0.0;
  }
}

}  // namespace

LossValue mse_loss(const SparseVec& pred, const SparseVec& gold) {
  check_same_vocab(pred, gold, "mse_loss");
  const auto dims = static_cast<double>(pred.vocab_size());
  auto p = pred.to_dense();
  auto g = gold.to_dense();

  LossValue out;
  out.grad_queries.assign(p.size(), 0.0);
  for (std::size_t v = 0; v < p.size(); ++v) {
    double diff = p[v] - g[v];
    out.value += diff * diff;
    out.grad_queries[v] = 2.0 * diff / dims;
  }
  out.value /= dims;
  // pred depends additively on both representation halves, so the gradient
  // along each path equals the gradient w.r.t. pred.
  out.grad_answers = out.grad_queries;
  snap_to_zero(out.grad_queries);
  snap_to_zero(out.grad_answers);
  return out;
}

LossValue asym_loss(const SparseVec& answers_rep, const SparseVec& gold) {
  check_same_vocab(answers_rep, gold, "asym_loss");
  const auto dims = static_cast<double>(answers_rep.vocab_size());
  auto a = answers_rep.to_dense();
  auto g = gold.to_dense();

  LossValue out;
  out.grad_queries.assign(a.size(), 0.0);
  out.grad_answers.assign(a.size(), 0.0);
  for (std::size_t v = 0; v < a.size(); ++v) {
    double shortfall = g[v] - a[v];
    if (shortfall > 0.0) {
      out.value += shortfall * shortfall;
      out.grad_answers[v] = -2.0 * shortfall / dims;
    }
  }
  out.value /= dims;
  snap_to_zero(out.grad_answers);
  return out;
}

LossValue combined_loss(const SparseVec& pred, const SparseVec& answers_rep,
                        const SparseVec& gold) {
  check_same_vocab(pred, gold, "combined_loss");
  check_same_vocab(answers_rep, gold, "combined_loss");
  LossValue mse = mse_loss(pred, gold);
  LossValue asym = asym_loss(answers_rep, gold);

  LossValue out;
  out.value = mse.value + asym.value;
  out.grad_queries = std::move(mse.grad_queries);
  out.grad_answers = std::move(mse.grad_answers);
  for (std::size_t v = 0; v < out.grad_answers.size(); ++v) {
    out.grad_answers[v] += asym.grad_answers[v];
  }
  snap_to_zero(out.grad_answers);
  return out;
}

LossValue cosine_loss(const SparseVec& pred, const SparseVec& gold) {
  check_same_vocab(pred, gold, "cosine_loss");
  double pn = pred.norm();
  double gn = gold.norm();
  if (pn == 0.0 || gn == 0.0) {
    throw std::invalid_argument("cosine_loss requires nonzero-norm inputs");
  }
  double cos = dot(pred, gold) / (pn * gn);

  LossValue out;
  out.value = 1.0 - cos;
  auto p = pred.to_dense();
  auto g = gold.to_dense();
  out.grad_queries.assign(p.size(), 0.0);
  for (std::size_t v = 0; v < p.size(); ++v) {
    out.grad_queries[v] = -g[v] / (pn * gn) + cos * p[v] / (pn * pn);
  }
  out.grad_answers = out.grad_queries;
  snap_to_zero(out.grad_queries);
  snap_to_zero(out.grad_answers);
  return out;
}

double t5_relevance_score(double p_true, double p_false) {
  if (!std::isfinite(p_true) || !std::isfinite(p_false) || p_true < 0.0 || p_false < 0.0 ||
      p_true > 1.0 || p_false > 1.0) {
    throw std::invalid_argument("token probabilities must lie in [0, 1]");
  }
  double denom = p_true + p_false;
  if (denom <= 0.0) throw std::invalid_argument("both token probabilities are zero");
  return p_true / denom;
}

MarginLossValue margin_mse_loss(const ScoreQuadruple& scores) {
  if (!std::isfinite(scores.student_d1) || !std::isfinite(scores.student_d2) ||
      !std::isfinite(scores.teacher_d1) || !std::isfinite(scores.teacher_d2)) {
    throw std::invalid_argument("margin_mse_loss requires finite scores");
  }
  double margin = (scores.student_d1 - scores.student_d2) -
                  (scores.teacher_d1 - scores.teacher_d2);
  MarginLossValue out;
  out.value = margin * margin;
  out.grad_student_d1 = 2.0 * margin;
  out.grad_student_d2 = -2.0 * margin;
  return out;
}

}  // namespace cosplade
