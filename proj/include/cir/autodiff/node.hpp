#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cir::ad {

using Mat = Eigen::MatrixXd;

class Node;
using NodePtr = std::shared_ptr<Node>;

/// A differentiable value in a define-by-run computation graph.
///
/// Holds a dense rank-<=2 array, a same-shape gradient slot and edges to the
/// nodes it was computed from. Each edge carries a local-gradient closure that
/// maps the child's gradient (and value) to a contribution on the parent's
/// gradient. Graphs are rebuilt per forward pass and are strictly acyclic:
/// closures may capture upstream nodes and plain matrices, never the node
/// they belong to.
class Node {
  public:
    /// Local backward rule: receives the child's accumulated gradient and the
    /// child's value, accumulates into the parent's grad.
    using PullFn = std::function<void(const Mat& child_grad, const Mat& child_value)>;

    struct Edge {
        NodePtr parent;
        PullFn pull;
    };

    Mat value;
    Mat grad; // same shape as value whenever requires_grad
    bool requires_grad = false;
    std::vector<Edge> parents;
    std::string name; // optional, used by the optimizer and checkpoints

    explicit Node(Mat v, bool req_grad = false, std::string label = {});

    long rows() const { return value.rows(); }
    long cols() const { return value.cols(); }
    bool is_scalar() const { return value.rows() == 1 && value.cols() == 1; }
    double scalar() const { return value(0, 0); }

    void zero_grad();
    void accumulate(const Mat& g);
};

/// A constant leaf (no gradient tracking).
NodePtr constant(Mat v);

/// A trainable leaf; grad is allocated and zeroed on construction.
NodePtr parameter(Mat v, std::string name = {});

/// Scoped switch that disables graph construction; forwards still compute
/// values. Nestable, thread-local.
class NoGradGuard {
  public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
};

bool grad_enabled();

/// Reverse-mode sweep from a scalar loss. Every requires_grad node reachable
/// from `loss` receives its total gradient; unreachable grads are untouched.
/// Leaf (parameter) gradients accumulate across repeated calls until zeroed;
/// interior-node gradients are reset at the start of each sweep. Visits each
/// node exactly once in reverse topological order; deterministic for a fixed
/// graph.
void backward(const NodePtr& loss);

} // namespace cir::ad
