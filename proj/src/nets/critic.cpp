#include "cir/nets/critic.hpp"

#include <stdexcept>

namespace cir::nets {

using ad::NodePtr;

CriticNet::CriticNet(CriticConfig cfg, std::mt19937_64& rng, std::string prefix)
    : cfg_(cfg) {
    if (cfg_.obs_dim <= 0 || cfg_.act_dim <= 0 || cfg_.hidden < 2 || cfg_.depth < 1) {
        throw std::invalid_argument("CriticNet: bad config");
    }
    const long d0 = cfg_.obs_dim + cfg_.act_dim;
    const long h = cfg_.hidden;

    auto track = [this](const LinearLayer& l) {
        params_.push_back(l.W);
        params_.push_back(l.b);
    };
    auto track_ln = [this](const LayerNormLayer& l) {
        params_.push_back(l.gain);
        params_.push_back(l.bias);
    };

    initial_ = make_linear(h, d0, rng, prefix + ".initial", cfg_.orthogonal_init);
    track(initial_);
    if (cfg_.use_layer_norm) {
        initial_ln_ = make_layer_norm(h, prefix + ".initial_ln");
        track_ln(initial_ln_);
    }
    for (long l = 1; l <= cfg_.depth; ++l) {
        DownBlock blk;
        blk.lin = make_linear(h, h, rng, prefix + ".down" + std::to_string(l),
                              cfg_.orthogonal_init);
        track(blk.lin);
        if (cfg_.use_layer_norm) {
            blk.ln = make_layer_norm(h, prefix + ".down" + std::to_string(l) + "_ln");
            track_ln(blk.ln);
        }
        down_.push_back(std::move(blk));
    }
    for (long l = 1; l <= cfg_.depth; ++l) {
        UpBlock blk;
        blk.lin_in = make_linear(h, h, rng, prefix + ".up" + std::to_string(l) + "_in",
                                 cfg_.orthogonal_init);
        track(blk.lin_in);
        if (cfg_.use_layer_norm) {
            blk.ln = make_layer_norm(h, prefix + ".up" + std::to_string(l) + "_ln");
            track_ln(blk.ln);
        }
        blk.lin_out = make_linear(h, h, rng, prefix + ".up" + std::to_string(l) + "_out",
                                  cfg_.orthogonal_init);
        track(blk.lin_out);
        up_.push_back(std::move(blk));
    }
    head_ = make_linear(1, h, rng, prefix + ".head", cfg_.orthogonal_init);
    track(head_);
}

NodePtr CriticNet::constrain_initial(const NodePtr& o) const {
    if (!o->value.allFinite()) {
        throw std::invalid_argument("constrain_initial: non-finite input");
    }
    NodePtr u = initial_(o);
    if (cfg_.use_layer_norm) {
        u = initial_ln_(u);
    }
    u = ad::avg_rnorm(u, cfg_.avg_c);
    switch (cfg_.activation) {
    case Activation::Tanh: return ad::tanh_act(u);
    case Activation::Sigmoid: return ad::sigmoid_act(u);
    case Activation::Softmax: return ad::softmax_act(u);
    case Activation::LayerNorm: return ad::layer_norm(u, nullptr, nullptr);
    case Activation::None: return u;
    }
    return u;
}

NodePtr CriticNet::forward(const NodePtr& state_action) const {
    return forward_traced(state_action, nullptr);
}

NodePtr CriticNet::forward_traced(const NodePtr& state_action,
                                  std::vector<NodePtr>* trace) const {
    if (state_action->value.rows() != cfg_.obs_dim + cfg_.act_dim) {
        throw std::invalid_argument(
            "critic forward: input has " + std::to_string(state_action->value.rows()) +
            " rows, expected " + std::to_string(cfg_.obs_dim + cfg_.act_dim));
    }
    NodePtr x = constrain_initial(state_action); // x^0

    std::vector<NodePtr> down_out; // x^1 .. x^L, the skip sources
    down_out.reserve(down_.size());
    for (const DownBlock& blk : down_) {
        NodePtr u = blk.lin(x);
        if (cfg_.use_layer_norm) {
            u = blk.ln(u);
        }
        x = ad::elu_act(u);
        down_out.push_back(x);
        if (trace) {
            trace->push_back(x);
        }
    }

    // Up pass: the block producing x^{2L-l+1} reads x^{2L-l} and adds x^l,
    // so the first up block pairs with the deepest down output.
    for (long l = cfg_.depth; l >= 1; --l) {
        const UpBlock& blk = up_[static_cast<size_t>(cfg_.depth - l)];
        NodePtr u = blk.lin_in(x);
        if (cfg_.use_layer_norm) {
            u = blk.ln(u);
        }
        u = blk.lin_out(ad::elu_act(u));
        x = cfg_.use_skip ? ad::add(down_out[static_cast<size_t>(l - 1)], u) : u;
        if (trace) {
            trace->push_back(x);
        }
    }
    return head_(x);
}

Eigen::RowVectorXd CriticNet::values(const ad::Mat& states, const ad::Mat& actions) const {
    ad::NoGradGuard ng;
    ad::Mat sa(states.rows() + actions.rows(), states.cols());
    sa.topRows(states.rows()) = states;
    sa.bottomRows(actions.rows()) = actions;
    return forward(ad::constant(std::move(sa)))->value.row(0);
}

double CriticNet::value(const Eigen::VectorXd& s, const Eigen::VectorXd& a) const {
    return values(s, a)(0);
}

long CriticNet::parameter_count() const {
    long n = 0;
    for (const auto& p : params_) {
        n += p->value.size();
    }
    return n;
}

void CriticNet::copy_from(const CriticNet& other) {
    if (other.params_.size() != params_.size()) {
        throw std::invalid_argument("CriticNet::copy_from: structure mismatch");
    }
    for (size_t i = 0; i < params_.size(); ++i) {
        params_[i]->value = other.params_[i]->value;
    }
}

long critic_parameter_count_formula(const CriticConfig& cfg) {
    const long h = cfg.hidden;
    const long d0 = cfg.obs_dim + cfg.act_dim;
    const long ln = cfg.use_layer_norm ? 2 * h : 0;
    long n = h * d0 + h + ln;            // initial linear + layer norm
    n += cfg.depth * (h * h + h + ln);   // down blocks
    n += cfg.depth * (2 * (h * h + h) + ln); // up blocks: two linears each
    n += h + 1;                          // head
    return n;
}

} // namespace cir::nets
