#include "cir/autodiff/node.hpp"

#include <stdexcept>
#include <unordered_set>

namespace cir::ad {

namespace {
thread_local int no_grad_depth = 0;
}

Node::Node(Mat v, bool req_grad, std::string label)
    : value(std::move(v)), requires_grad(req_grad), name(std::move(label)) {
    if (requires_grad) {
        grad = Mat::Zero(value.rows(), value.cols());
    }
}

void Node::zero_grad() {
    grad = Mat::Zero(value.rows(), value.cols());
}

void Node::accumulate(const Mat& g) {
    if (grad.size() == 0) {
        grad = g;
    } else {
        grad += g;
    }
}

NodePtr constant(Mat v) {
    return std::make_shared<Node>(std::move(v), false);
}

NodePtr parameter(Mat v, std::string name) {
    return std::make_shared<Node>(std::move(v), true, std::move(name));
}

NoGradGuard::NoGradGuard() { ++no_grad_depth; }
NoGradGuard::~NoGradGuard() { --no_grad_depth; }

bool grad_enabled() { return no_grad_depth == 0; }

void backward(const NodePtr& loss) {
    if (!loss) {
        throw std::invalid_argument("backward: null loss node");
    }
    if (!loss->is_scalar()) {
        throw std::invalid_argument("backward: loss must be scalar, got " +
                                    std::to_string(loss->rows()) + "x" +
                                    std::to_string(loss->cols()));
    }

    // Iterative post-order DFS; each node appears once, parents after all
    // their children along graph edges.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    struct Frame {
        Node* node;
        size_t next_edge;
    };
    std::vector<Frame> stack;
    stack.push_back({loss.get(), 0});
    visited.insert(loss.get());
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next_edge < top.node->parents.size()) {
            Node* p = top.node->parents[top.next_edge].parent.get();
            ++top.next_edge;
            if (visited.insert(p).second) {
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(top.node);
            stack.pop_back();
        }
    }

    // Interior nodes are rebuilt per forward pass; their grads belong to this
    // sweep only. Leaves (parameters) accumulate across sweeps until zeroed.
    for (Node* node : order) {
        if (node->requires_grad && !node->parents.empty()) {
            node->zero_grad();
        }
    }

    loss->accumulate(Mat::Ones(1, 1));

    // Children precede parents in post-order reversal, so each node's grad is
    // complete before it is pushed upstream.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->grad.size() == 0 || node->parents.empty()) {
            continue;
        }
        for (const Node::Edge& e : node->parents) {
            e.pull(node->grad, node->value);
        }
    }
}

} // namespace cir::ad
