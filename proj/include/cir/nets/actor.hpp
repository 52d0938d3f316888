#pragma once

#include "cir/nets/layers.hpp"

#include <vector>

namespace cir::nets {

struct ActorConfig {
    long obs_dim = 0;
    long act_dim = 0;
    long hidden = 512; // two hidden layers of this width
    double log_std_min = -20.0;
    double log_std_max = 2.0;
};

/// Plain-MLP squashed-Gaussian policy: two elu hidden layers, mean and
/// log-std heads (log-std hard-clamped), actions are tanh of a
/// reparameterized Gaussian sample with the change-of-variables correction
/// in the log-density.
class ActorNet {
  public:
    ActorNet(ActorConfig cfg, std::mt19937_64& rng, std::string prefix = "actor");

    struct Sample {
        ad::NodePtr action;   // act_dim x B, every entry strictly inside (-1, 1)
        ad::NodePtr log_prob; // 1 x B
    };

    /// Reparameterized sample as a graph over the actor parameters. `states`
    /// is obs x B; `noise` is a act_dim x B standard-normal draw treated as
    /// constant.
    Sample sample_graph(const ad::NodePtr& states, const ad::Mat& noise) const;

    /// No-grad batch sampling; fills actions (act x B) and log-probs (1 x B).
    void sample(const ad::Mat& states, std::mt19937_64& rng, ad::Mat* actions,
                Eigen::RowVectorXd* log_prob) const;

    Eigen::VectorXd act_stochastic(const Eigen::VectorXd& s, std::mt19937_64& rng) const;
    Eigen::VectorXd act_deterministic(const Eigen::VectorXd& s) const;

    const std::vector<ad::NodePtr>& parameters() const { return params_; }
    const ActorConfig& config() const { return cfg_; }

  private:
    ad::NodePtr trunk(const ad::NodePtr& states) const;

    ActorConfig cfg_;
    LinearLayer l1_, l2_, mean_head_, log_std_head_;
    std::vector<ad::NodePtr> params_;
};

} // namespace cir::nets
