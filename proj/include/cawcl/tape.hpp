#ifndef CAWCL_TAPE_HPP
#define CAWCL_TAPE_HPP

#include <functional>
#include <vector>

#include "cawcl/tensor.hpp"

namespace cawcl {

struct ValueId {
    int idx = -1;
    bool valid() const { return idx >= 0; }
};

// Reverse-mode accumulation over an explicit operation tape. Each primitive
// records its own backward rule as a closure; backward() replays them in
// reverse creation order. A tape belongs to one training step on one thread.
class Tape {
public:
    // Leaves.
    ValueId input(Tensor2 v);               // constant w.r.t. backward
    ValueId constant(double c);             // 1x1 constant
    ValueId param(Tensor2* p);              // leaf whose gradient is retrievable by pointer

    // Primitives. Shapes follow from the inputs; mismatches throw ShapeMismatch.
    ValueId matmul(ValueId a, ValueId b);
    ValueId add(ValueId a, ValueId b);
    ValueId add_rowvec(ValueId a, ValueId v);            // v broadcast over rows of a
    ValueId affine(ValueId a, double mul, double shift); // mul*a + shift elementwise
    ValueId elu(ValueId a);
    ValueId grl(ValueId a, double scale);                // identity fwd, -scale on the gradient
    ValueId detach(ValueId a);                           // identity fwd, stops the gradient
    ValueId select_rows(ValueId a, std::vector<int> rows);
    ValueId group_mean_rows(ValueId a, std::vector<int> group_sizes);
    ValueId l2_normalize_rows(ValueId a);
    ValueId log_softmax_rows(ValueId a);
    // Column vector of a[rows[i], cols[i]].
    ValueId select_entries(ValueId a, std::vector<int> rows, std::vector<int> cols);
    // Per-row logsumexp restricted to the listed columns; rows with an empty
    // list yield 0 and propagate nothing.
    ValueId masked_logsumexp_rows(ValueId a, std::vector<std::vector<int>> cols);
    ValueId weighted_sum_all(ValueId a, Tensor2 w);      // sum_ij w_ij * a_ij -> 1x1
    ValueId sum_all(ValueId a);
    ValueId mean_all(ValueId a);
    ValueId mul(ValueId a, ValueId b);                   // elementwise
    ValueId scale(ValueId a, double c);

    const Tensor2& value(ValueId id) const { return nodes_[id.idx].value; }
    const Tensor2& grad(ValueId id) const { return nodes_[id.idx].grad; }
    double scalar(ValueId id) const;

    // Runs reverse accumulation from a 1x1 root (seed gradient 1).
    void backward(ValueId root);

    // Gradient of the most recent backward() w.r.t. a registered parameter.
    const Tensor2& grad_of(const Tensor2* p) const;
    std::vector<GradRecord> param_grads() const;

    size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Tensor2 value;
        Tensor2 grad;
        std::function<void(Tape&)> back; // empty for leaves
    };

    ValueId push(Tensor2 v, std::function<void(Tape&)> back);
    Tensor2& grad_mut(ValueId id) { return nodes_[id.idx].grad; }
    void check(ValueId id) const;

    std::vector<Node> nodes_;
    std::vector<std::pair<const Tensor2*, int>> params_;
};

} // namespace cawcl

#endif
