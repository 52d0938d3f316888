#pragma once

#include "cir/autodiff/node.hpp"

#include <functional>

namespace cir::ad {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst_param;
    long worst_index = -1;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
};

/// Compares the analytic gradient of a scalar-valued expression against
/// central finite differences, entry by entry over `params`. `loss_builder`
/// must rebuild the expression from the current parameter values. Relative
/// error uses the denominator max(|analytic|, |numeric|, eps_fd).
GradCheckResult grad_check(const std::function<NodePtr()>& loss_builder,
                           const std::vector<NodePtr>& params, double eps_fd = 1e-6);

} // namespace cir::ad
