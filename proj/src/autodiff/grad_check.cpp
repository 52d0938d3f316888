#include "cir/autodiff/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace cir::ad {

GradCheckResult grad_check(const std::function<NodePtr()>& loss_builder,
                           const std::vector<NodePtr>& params, double eps_fd) {
    if (eps_fd <= 0.0) {
        throw std::invalid_argument("grad_check: eps_fd must be positive");
    }

    NodePtr loss = loss_builder();
    if (!loss->is_scalar()) {
        throw std::invalid_argument("grad_check: expression must be scalar");
    }
    for (const auto& p : params) {
        p->zero_grad();
    }
    loss = loss_builder();
    backward(loss);

    std::vector<Mat> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) {
        analytic.push_back(p->grad);
    }

    auto eval = [&]() {
        NoGradGuard ng;
        return loss_builder()->scalar();
    };

    GradCheckResult res;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        Node& p = *params[pi];
        for (long i = 0; i < p.value.size(); ++i) {
            const double original = p.value.data()[i];
            p.value.data()[i] = original + eps_fd;
            const double up = eval();
            p.value.data()[i] = original - eps_fd;
            const double down = eval();
            p.value.data()[i] = original;

            const double numeric = (up - down) / (2.0 * eps_fd);
            const double a = analytic[pi].data()[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), eps_fd});
            const double rel = std::abs(a - numeric) / denom;
            if (rel > res.max_rel_err) {
                res.max_rel_err = rel;
                res.worst_param = p.name.empty() ? ("param" + std::to_string(pi)) : p.name;
                res.worst_index = i;
                res.analytic_at_worst = a;
                res.numeric_at_worst = numeric;
            }
        }
    }
    for (const auto& p : params) {
        p->zero_grad();
    }
    return res;
}

} // namespace cir::ad
