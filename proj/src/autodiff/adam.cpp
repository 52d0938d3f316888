#include "cir/autodiff/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace cir::ad {

Adam::Adam(std::vector<NodePtr> params, double beta1, double beta2, double eps)
    : params_(std::move(params)) {
    state_.beta1 = beta1;
    state_.beta2 = beta2;
    state_.eps = eps;
    state_.first_moment.reserve(params_.size());
    state_.second_moment.reserve(params_.size());
    for (const auto& p : params_) {
        state_.first_moment.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
        state_.second_moment.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
    }
}

void Adam::step(double lr) {
    if (lr <= 0.0) {
        throw std::invalid_argument("Adam::step: lr must be positive");
    }
    ++state_.step_count;
    const double bc1 = 1.0 - std::pow(state_.beta1, static_cast<double>(state_.step_count));
    const double bc2 = 1.0 - std::pow(state_.beta2, static_cast<double>(state_.step_count));
    for (size_t i = 0; i < params_.size(); ++i) {
        Node& p = *params_[i];
        if (!p.grad.allFinite()) {
            throw std::runtime_error("Adam::step: non-finite gradient in parameter '" +
                                     (p.name.empty() ? "<unnamed>" : p.name) + "'");
        }
        Mat& m = state_.first_moment[i];
        Mat& v = state_.second_moment[i];
        m = state_.beta1 * m + (1.0 - state_.beta1) * p.grad;
        v.array() = state_.beta2 * v.array() + (1.0 - state_.beta2) * p.grad.array().square();
        p.value.array() -=
            lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state_.eps);
    }
}

void Adam::zero_grad() {
    for (const auto& p : params_) {
        p->zero_grad();
    }
}

} // namespace cir::ad
