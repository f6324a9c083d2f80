#ifndef CAWCL_GRAD_CHECK_HPP
#define CAWCL_GRAD_CHECK_HPP

#include <functional>
#include <vector>

#include "cawcl/tape.hpp"

namespace cawcl {

// Builds a scalar loss on a fresh tape. The builder must register every
// tensor in `params` via Tape::param and be deterministic given their values.
using LossBuilder = std::function<ValueId(Tape&)>;

// Max over all parameter entries of
//   |analytic - central_fd| / max(|analytic|, |fd|, 1e-8).
// Throws BadEps unless eps is in (0, 1e-2]; NonFiniteLoss if any probe
// evaluation is non-finite.
double grad_check(const LossBuilder& build, const std::vector<Tensor2*>& params, double eps);

} // namespace cawcl

#endif
