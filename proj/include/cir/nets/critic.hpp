#pragma once

#include "cir/nets/layers.hpp"

#include <vector>

namespace cir::nets {

struct CriticConfig {
    long obs_dim = 0;
    long act_dim = 0;
    long hidden = 512; // h, constant width through the whole U-shape
    long depth = 2;    // L down-sampling layers and L up-sampling layers
    double avg_c = 0.1;
    Activation activation = Activation::Tanh;
    bool use_layer_norm = true;
    bool use_skip = true;
    bool orthogonal_init = false;
};

/// Q(s, a) as a U-shape network over the constrained initial representation:
/// z = act(AvgRNorm(LayerNorm(Linear([s; a])))), a down pass of L
/// (Linear, LayerNorm, elu) blocks, a symmetric up pass where layer l adds
/// the matching down output x^l, and a scalar head.
class CriticNet {
  public:
    CriticNet(CriticConfig cfg, std::mt19937_64& rng, std::string prefix = "critic");

    /// Constrained initial representation of a (obs+act) x B input.
    ad::NodePtr constrain_initial(const ad::NodePtr& o) const;

    /// Full forward pass; input is (obs+act) x B, output 1 x B.
    ad::NodePtr forward(const ad::NodePtr& state_action) const;

    /// Same as forward but records every hidden representation x^1..x^2L.
    ad::NodePtr forward_traced(const ad::NodePtr& state_action,
                               std::vector<ad::NodePtr>* trace) const;

    /// No-grad batch evaluation; states obs x B, actions act x B.
    Eigen::RowVectorXd values(const ad::Mat& states, const ad::Mat& actions) const;
    double value(const Eigen::VectorXd& s, const Eigen::VectorXd& a) const;

    const std::vector<ad::NodePtr>& parameters() const { return params_; }
    const CriticConfig& config() const { return cfg_; }
    long parameter_count() const;

    /// Copies parameter values (not gradients) from a same-shaped critic.
    void copy_from(const CriticNet& other);

  private:
    CriticConfig cfg_;
    LinearLayer initial_;
    LayerNormLayer initial_ln_;
    struct DownBlock {
        LinearLayer lin;
        LayerNormLayer ln;
    };
    struct UpBlock {
        LinearLayer lin_in;
        LayerNormLayer ln;
        LinearLayer lin_out;
    };
    std::vector<DownBlock> down_;
    std::vector<UpBlock> up_;
    LinearLayer head_;
    std::vector<ad::NodePtr> params_;
};

/// Closed-form parameter count for the architecture; the ~3M figure at
/// h = 512, L = 2 refers to the two-critic ensemble.
long critic_parameter_count_formula(const CriticConfig& cfg);

} // namespace cir::nets
