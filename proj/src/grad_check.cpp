#include "cawcl/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace cawcl {

namespace {

double evaluate(const LossBuilder& build) {
    Tape t;
    const ValueId root = build(t);
    const double v = t.scalar(root);
    if (!std::isfinite(v)) throw NonFiniteLoss("grad_check: non-finite loss probe");
    return v;
}

} // namespace

double grad_check(const LossBuilder& build, const std::vector<Tensor2*>& params, double eps) {
    if (!(eps > 0.0) || eps > 1e-2) throw BadEps("grad_check: eps must be in (0, 1e-2]");

    Tape t;
    const ValueId root = build(t);
    if (!std::isfinite(t.scalar(root))) throw NonFiniteLoss("grad_check: non-finite loss");
    t.backward(root);

    std::vector<Tensor2> analytic;
    analytic.reserve(params.size());
    for (const Tensor2* p : params) analytic.push_back(t.grad_of(p));

    double max_rel = 0.0;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        Tensor2& p = *params[pi];
        for (int i = 0; i < p.size(); ++i) {
            const double saved = p.vec()[i];
            p.vec()[i] = saved + eps;
            const double fp = evaluate(build);
            p.vec()[i] = saved - eps;
            const double fm = evaluate(build);
            p.vec()[i] = saved;
            const double fd = (fp - fm) / (2.0 * eps);
            const double a = analytic[pi].vec()[i];
            const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-8});
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

} // namespace cawcl
