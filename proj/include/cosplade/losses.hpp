#pragma once

#include <vector>

#include "cosplade/sparse.hpp"

namespace cosplade {

/// Loss value plus dense length-|V| gradients along the two paths of the
/// contextualized query representation. The combined representation is the
/// sum of the query-history and answer-history halves, so the gradient
/// w.r.t. the answer half accumulates both the direct term and the path
/// through the sum:
///   grad_queries = d loss / d (combined representation),
///   grad_answers = d loss / d (answer representation), all paths.
/// Gold representations are constants and get no gradient. Entries with
/// magnitude below SparseVec::kWeightEps are snapped to zero on return.
struct LossValue {
  double value = 0.0;
  std::vector<double> grad_queries;
  std::vector<double> grad_answers;
};

/// Mean over all |V| dims of (pred_v - gold_v)^2.
LossValue mse_loss(const SparseVec& pred, const SparseVec& gold);

/// Mean over all |V| dims of max(gold_v - answers_v, 0)^2: a one-sided
/// penalty that pushes the answer-history representation to cover the gold
/// terms without bounding it from above.
LossValue asym_loss(const SparseVec& answers_rep, const SparseVec& gold);

/// mse_loss(pred, gold) + asym_loss(answers_rep, gold), with the gradients
/// routed per path (pred contains answers_rep additively).
LossValue combined_loss(const SparseVec& pred, const SparseVec& answers_rep,
                        const SparseVec& gold);

/// 1 - pred.gold / (|pred| |gold|). Inputs must have nonzero norm.
LossValue cosine_loss(const SparseVec& pred, const SparseVec& gold);

/// Relevance score from the generation probabilities of the "true" and
/// "false" tokens: p_true / (p_true + p_false).
double t5_relevance_score(double p_true, double p_false);

/// Student and teacher scores for a sampled document pair. Teacher scores
/// come from the fixed reference scorer on the gold query and are constants.
struct ScoreQuadruple {
  double student_d1 = 0.0;
  double student_d2 = 0.0;
  double teacher_d1 = 0.0;
  double teacher_d2 = 0.0;
};

struct MarginLossValue {
  double value = 0.0;
  double grad_student_d1 = 0.0;
  double grad_student_d2 = 0.0;
};

/// Squared difference of score margins:
/// ((s1 - s2) - (t1 - t2))^2, gradients w.r.t. the student scores only.
MarginLossValue margin_mse_loss(const ScoreQuadruple& scores);

}  // namespace cosplade
