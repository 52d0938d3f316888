#include "cir/nets/layers.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace cir::nets {

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::Tanh;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "softmax") return Activation::Softmax;
    if (s == "layernorm") return Activation::LayerNorm;
    if (s == "none") return Activation::None;
    throw std::invalid_argument("unknown activation '" + s +
                                "' (expected tanh|sigmoid|softmax|layernorm|none)");
}

std::string to_string(Activation a) {
    switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
    case Activation::LayerNorm: return "layernorm";
    case Activation::None: return "none";
    }
    return "?";
}

LinearLayer make_linear(long out, long in, std::mt19937_64& rng, const std::string& name,
                        bool orthogonal) {
    ad::Mat W(out, in);
    if (orthogonal) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        ad::Mat G(out, in);
        for (long i = 0; i < G.size(); ++i) {
            G.data()[i] = gauss(rng);
        }
        Eigen::HouseholderQR<ad::Mat> qr(G);
        ad::Mat Q = qr.householderQ() * ad::Mat::Identity(out, std::min(out, in));
        W = Q.leftCols(in);
    } else {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> unif(-bound, bound);
        for (long i = 0; i < W.size(); ++i) {
            W.data()[i] = unif(rng);
        }
    }
    return LinearLayer{ad::parameter(std::move(W), name + ".W"),
                       ad::parameter(ad::Mat::Zero(out, 1), name + ".b")};
}

LayerNormLayer make_layer_norm(long n, const std::string& name) {
    return LayerNormLayer{ad::parameter(ad::Mat::Ones(n, 1), name + ".gain"),
                          ad::parameter(ad::Mat::Zero(n, 1), name + ".bias")};
}

} // namespace cir::nets
