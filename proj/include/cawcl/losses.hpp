#ifndef CAWCL_LOSSES_HPP
#define CAWCL_LOSSES_HPP

#include <optional>
#include <vector>

#include "cawcl/model.hpp"
#include "cawcl/tape.hpp"

namespace cawcl::losses {

struct LossWeights {
    double delta1 = 1.0;
    double delta2 = 0.2;
    double delta3 = 1.0;
};

// Weighted sum delta1*ce + delta2*cam + delta3*contr.
double total_loss(double ce, double cam, double contr, const LossWeights& w);

// ---- tape builders ----
// Losses are means over the rows of the logit/score matrix they receive;
// the caller selects source or target rows beforehand.

// Mean over rows of -log softmax(logits)[label].
ValueId cross_entropy(Tape& t, ValueId logits, std::vector<int> labels);

// Confusion objective over raw camera scores (n x N_c):
//   (1/n^2) * [sum_i log softmax(c_i)[y_i]] * [sum_i log softmax(1 - c_i)[y_i]]
// The classifier descends this (confident either way); through the reversal
// layer the encoder climbs it toward maximal camera uncertainty.
ValueId camera_confusion(Tape& t, ValueId scores, std::vector<int> labels);

// sum_i sum_j w_ij * l_ij over key similarities (queries x keys), where
// l_ij = logsumexp over the row's contrast columns minus s_ij. Weight entries
// outside a row's contrast set must be zero. Rows with an empty contrast set
// contribute nothing.
ValueId weighted_key_nce(Tape& t, ValueId sims,
                         const std::vector<std::vector<int>>& contrast_cols,
                         const Tensor2& weights);

// ---- plain evaluators (same math, no tape) ----

double cross_entropy_value(const Tensor2& logits, const std::vector<int>& labels);
double camera_confusion_value(const Tensor2& scores, const std::vector<int>& labels);
// First bracketed sum of the confusion objective, exposed for invariance tests.
double camera_confusion_bracket1(const Tensor2& scores, const std::vector<int>& labels);

// Pairwise loss over a set of l2-normalized representations (N x F):
//   l_ij = -log( exp(r_i . r_j) / sum_{j' != i} exp(r_i . r_j') )
double pair_loss(const Tensor2& reps, int i, int j);
Tensor2 pair_loss_matrix(const Tensor2& reps); // zero diagonal

// (1/N) * sum_i sum_{j != i} w_ij * l_ij, optionally plus the linear
// self-paced term -gamma*w_ij per pair. All weights must lie in [0,1].
// With all weights 1 and gamma omitted this is the plain contrastive loss.
double contrastive(const Tensor2& reps, const Tensor2& weights,
                   std::optional<double> gamma = std::nullopt);

} // namespace cawcl::losses

#endif
