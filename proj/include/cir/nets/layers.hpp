#pragma once

#include "cir/autodiff/node.hpp"
#include "cir/autodiff/ops.hpp"

#include <random>
#include <string>

namespace cir::nets {

/// Activation applied to the constrained initial representation. The
/// non-tanh choices exist as ablation switches.
enum class Activation { Tanh, Sigmoid, Softmax, LayerNorm, None };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

struct LinearLayer {
    ad::NodePtr W;
    ad::NodePtr b;

    ad::NodePtr operator()(const ad::NodePtr& x) const { return ad::linear(W, b, x); }
};

struct LayerNormLayer {
    ad::NodePtr gain;
    ad::NodePtr bias;

    ad::NodePtr operator()(const ad::NodePtr& x) const {
        return ad::layer_norm(x, gain, bias);
    }
};

/// Uniform fan-in initialization (+-1/sqrt(fan_in)) with zero bias; the
/// orthogonal variant replaces the weight by the Q factor of a Gaussian draw.
LinearLayer make_linear(long out, long in, std::mt19937_64& rng, const std::string& name,
                        bool orthogonal = false);
LayerNormLayer make_layer_norm(long n, const std::string& name);

} // namespace cir::nets
