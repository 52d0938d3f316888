#pragma once

#include "cir/autodiff/node.hpp"

namespace cir::ad {

/// Per-parameter-group Adam state. Moment arrays mirror parameter shapes;
/// step_count increases by exactly 1 per step.
struct AdamState {
    std::vector<Mat> first_moment;
    std::vector<Mat> second_moment;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction over a fixed parameter list. Reads gradients
/// from the bound nodes; a NaN gradient aborts with the parameter's name.
class Adam {
  public:
    explicit Adam(std::vector<NodePtr> params, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

    void step(double lr);
    void zero_grad();

    const AdamState& state() const { return state_; }
    const std::vector<NodePtr>& params() const { return params_; }

  private:
    std::vector<NodePtr> params_;
    AdamState state_;
};

} // namespace cir::ad
