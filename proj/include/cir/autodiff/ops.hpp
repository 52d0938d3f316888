#pragma once

#include "cir/autodiff/node.hpp"

namespace cir::ad {

// Batch convention: a vector is an n x 1 matrix; a batch of vectors stores
// one sample per column (n x B). Per-sample ops (layer_norm, avg_rnorm,
// softmax) act on each column independently.

/// y = W x + b, columnwise over the batch. `b` may be null (no bias).
NodePtr linear(const NodePtr& W, const NodePtr& b, const NodePtr& x);

NodePtr add(const NodePtr& a, const NodePtr& b);
NodePtr sub(const NodePtr& a, const NodePtr& b);
NodePtr mul(const NodePtr& a, const NodePtr& b); // elementwise
NodePtr scale(const NodePtr& x, double k);
NodePtr add_scalar(const NodePtr& x, double k);

NodePtr tanh_act(const NodePtr& x);
NodePtr sigmoid_act(const NodePtr& x);
NodePtr elu_act(const NodePtr& x);
NodePtr softplus_act(const NodePtr& x);
NodePtr exp_act(const NodePtr& x);
NodePtr square(const NodePtr& x);

/// Columnwise softmax; each output column sums to 1.
NodePtr softmax_act(const NodePtr& x);

/// Columnwise standardization (x - mean) / sqrt(var + eps), then an optional
/// learnable per-row scale and shift. Requires at least 2 rows. Pass null
/// gain/bias for the parameterless variant.
NodePtr layer_norm(const NodePtr& x, const NodePtr& gain, const NodePtr& bias,
                   double eps = 1e-5);

/// Columnwise average representation normalization: c * x / mean(|x|), with
/// the denominator floored at `guard` so an all-zero column stays defined.
/// The denominator is part of the differentiable graph.
NodePtr avg_rnorm(const NodePtr& x, double c, double guard = 1e-8);

/// Hard clamp; gradient passes only where lo < x < hi.
NodePtr clamp(const NodePtr& x, double lo, double hi);

NodePtr sum(const NodePtr& x);  // 1x1
NodePtr mean(const NodePtr& x); // 1x1
NodePtr col_sum(const NodePtr& x); // 1xB, sums each column

/// Stack a on top of b: [a; b]. Column counts must match.
NodePtr concat_rows(const NodePtr& a, const NodePtr& b);

namespace detail {
constexpr double kLayerNormEps = 1e-5;
constexpr double kAvgRNormGuard = 1e-8;
} // namespace detail

} // namespace cir::ad
