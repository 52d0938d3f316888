#include "cir/nets/actor.hpp"

#include <cmath>
#include <stdexcept>

namespace cir::nets {

using ad::Mat;
using ad::NodePtr;

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178; // 0.5 * log(2*pi)
constexpr double kLog2 = 0.69314718055994530942;
} // namespace

ActorNet::ActorNet(ActorConfig cfg, std::mt19937_64& rng, std::string prefix) : cfg_(cfg) {
    if (cfg_.obs_dim <= 0 || cfg_.act_dim <= 0 || cfg_.hidden < 1) {
        throw std::invalid_argument("ActorNet: bad config");
    }
    if (cfg_.log_std_min >= cfg_.log_std_max) {
        throw std::invalid_argument("ActorNet: log_std bounds inverted");
    }
    l1_ = make_linear(cfg_.hidden, cfg_.obs_dim, rng, prefix + ".l1");
    l2_ = make_linear(cfg_.hidden, cfg_.hidden, rng, prefix + ".l2");
    mean_head_ = make_linear(cfg_.act_dim, cfg_.hidden, rng, prefix + ".mean_head");
    log_std_head_ = make_linear(cfg_.act_dim, cfg_.hidden, rng, prefix + ".log_std_head");
    for (const LinearLayer* l : {&l1_, &l2_, &mean_head_, &log_std_head_}) {
        params_.push_back(l->W);
        params_.push_back(l->b);
    }
}

NodePtr ActorNet::trunk(const NodePtr& states) const {
    return ad::elu_act(l2_(ad::elu_act(l1_(states))));
}

ActorNet::Sample ActorNet::sample_graph(const NodePtr& states, const Mat& noise) const {
    if (states->value.rows() != cfg_.obs_dim || noise.rows() != cfg_.act_dim ||
        noise.cols() != states->value.cols()) {
        throw std::invalid_argument("ActorNet::sample_graph: shape mismatch");
    }
    NodePtr h = trunk(states);
    NodePtr mean = mean_head_(h);
    NodePtr log_std = ad::clamp(log_std_head_(h), cfg_.log_std_min, cfg_.log_std_max);
    NodePtr u = ad::add(mean, ad::mul(ad::exp_act(log_std), ad::constant(noise)));
    NodePtr action = ad::tanh_act(u);

    // log N(u; mean, std) with u reparameterized: the quadratic term reduces
    // to the fixed noise, so only -log_std carries gradient from the
    // Gaussian part.
    Mat gauss_const = (-0.5 * noise.array().square() - kHalfLog2Pi).matrix();
    NodePtr gauss = ad::col_sum(ad::sub(ad::constant(std::move(gauss_const)), log_std));

    // Tanh correction: log(1 - tanh(u)^2) = 2*(log 2 - u - softplus(-2u)).
    NodePtr corr = ad::col_sum(ad::scale(
        ad::sub(ad::add_scalar(ad::scale(u, -1.0), kLog2), ad::softplus_act(ad::scale(u, -2.0))),
        2.0));
    return Sample{action, ad::sub(gauss, corr)};
}

void ActorNet::sample(const Mat& states, std::mt19937_64& rng, Mat* actions,
                      Eigen::RowVectorXd* log_prob) const {
    ad::NoGradGuard ng;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat noise(cfg_.act_dim, states.cols());
    for (long i = 0; i < noise.size(); ++i) {
        noise.data()[i] = gauss(rng);
    }
    Sample s = sample_graph(ad::constant(states), noise);
    if (actions) {
        *actions = s.action->value;
    }
    if (log_prob) {
        *log_prob = s.log_prob->value.row(0);
    }
}

Eigen::VectorXd ActorNet::act_stochastic(const Eigen::VectorXd& s,
                                         std::mt19937_64& rng) const {
    Mat a;
    sample(s, rng, &a, nullptr);
    return a.col(0);
}

Eigen::VectorXd ActorNet::act_deterministic(const Eigen::VectorXd& s) const {
    ad::NoGradGuard ng;
    NodePtr h = trunk(ad::constant(s));
    return mean_head_(h)->value.array().tanh();
}

} // namespace cir::nets
