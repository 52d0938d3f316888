#include "cir/autodiff/ops.hpp"

#include <cmath>
#include <stdexcept>

namespace cir::ad {

namespace {

std::string shape_str(const Mat& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

NodePtr make_out(Mat v) { return std::make_shared<Node>(std::move(v), false); }

void attach(const NodePtr& out, const NodePtr& in, Node::PullFn fn) {
    if (!grad_enabled() || !in || !in->requires_grad) {
        return;
    }
    if (!out->requires_grad) {
        out->requires_grad = true;
        out->grad = Mat::Zero(out->value.rows(), out->value.cols());
    }
    out->parents.push_back({in, std::move(fn)});
}

void check_same_shape(const char* op, const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a) +
                                    " vs " + shape_str(b));
    }
}

} // namespace

NodePtr linear(const NodePtr& W, const NodePtr& b, const NodePtr& x) {
    if (W->value.cols() != x->value.rows()) {
        throw std::invalid_argument("linear: W is " + shape_str(W->value) + " but x is " +
                                    shape_str(x->value));
    }
    if (b && (b->value.rows() != W->value.rows() || b->value.cols() != 1)) {
        throw std::invalid_argument("linear: bias is " + shape_str(b->value) +
                                    ", expected " + std::to_string(W->value.rows()) + "x1");
    }
    Mat y;
    y.noalias() = W->value * x->value;
    if (b) {
        y.colwise() += b->value.col(0);
    }
    auto out = make_out(std::move(y));
    attach(out, W, [W, x](const Mat& g, const Mat&) {
        W->grad.noalias() += g * x->value.transpose();
    });
    if (b) {
        attach(out, b, [b](const Mat& g, const Mat&) {
            b->grad.col(0).noalias() += g.rowwise().sum();
        });
    }
    attach(out, x, [W, x](const Mat& g, const Mat&) {
        x->grad.noalias() += W->value.transpose() * g;
    });
    return out;
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
    check_same_shape("add", a->value, b->value);
    auto out = make_out(a->value + b->value);
    attach(out, a, [a](const Mat& g, const Mat&) { a->grad += g; });
    attach(out, b, [b](const Mat& g, const Mat&) { b->grad += g; });
    return out;
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
    check_same_shape("sub", a->value, b->value);
    auto out = make_out(a->value - b->value);
    attach(out, a, [a](const Mat& g, const Mat&) { a->grad += g; });
    attach(out, b, [b](const Mat& g, const Mat&) { b->grad -= g; });
    return out;
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
    check_same_shape("mul", a->value, b->value);
    auto out = make_out(a->value.cwiseProduct(b->value));
    attach(out, a, [a, b](const Mat& g, const Mat&) {
        a->grad.array() += g.array() * b->value.array();
    });
    attach(out, b, [a, b](const Mat& g, const Mat&) {
        b->grad.array() += g.array() * a->value.array();
    });
    return out;
}

NodePtr scale(const NodePtr& x, double k) {
    auto out = make_out(x->value * k);
    attach(out, x, [x, k](const Mat& g, const Mat&) { x->grad += k * g; });
    return out;
}

NodePtr add_scalar(const NodePtr& x, double k) {
    auto out = make_out(x->value.array() + k);
    attach(out, x, [x](const Mat& g, const Mat&) { x->grad += g; });
    return out;
}

NodePtr tanh_act(const NodePtr& x) {
    auto out = make_out(x->value.array().tanh());
    attach(out, x, [x](const Mat& g, const Mat& y) {
        x->grad.array() += g.array() * (1.0 - y.array().square());
    });
    return out;
}

NodePtr sigmoid_act(const NodePtr& x) {
    auto out = make_out(x->value.array().logistic());
    attach(out, x, [x](const Mat& g, const Mat& y) {
        x->grad.array() += g.array() * y.array() * (1.0 - y.array());
    });
    return out;
}

NodePtr elu_act(const NodePtr& x) {
    Mat y = x->value.unaryExpr([](double v) { return v >= 0.0 ? v : std::expm1(v); });
    auto out = make_out(std::move(y));
    attach(out, x, [x](const Mat& g, const Mat& y) {
        // d elu = 1 for x >= 0, exp(x) = y + 1 otherwise
        x->grad.array() += g.array() * (y.array() < 0.0).select(y.array() + 1.0, 1.0);
    });
    return out;
}

NodePtr softplus_act(const NodePtr& x) {
    Mat y = x->value.unaryExpr(
        [](double v) { return std::log1p(std::exp(-std::abs(v))) + std::max(v, 0.0); });
    auto out = make_out(std::move(y));
    attach(out, x, [x](const Mat& g, const Mat&) {
        x->grad.array() += g.array() * x->value.array().logistic();
    });
    return out;
}

NodePtr exp_act(const NodePtr& x) {
    auto out = make_out(x->value.array().exp());
    attach(out, x, [x](const Mat& g, const Mat& y) {
        x->grad.array() += g.array() * y.array();
    });
    return out;
}

NodePtr square(const NodePtr& x) {
    auto out = make_out(x->value.array().square());
    attach(out, x, [x](const Mat& g, const Mat&) {
        x->grad.array() += 2.0 * g.array() * x->value.array();
    });
    return out;
}

NodePtr softmax_act(const NodePtr& x) {
    Mat shifted = x->value.rowwise() - x->value.colwise().maxCoeff();
    Mat e = shifted.array().exp();
    Mat y = e.array().rowwise() / e.colwise().sum().array();
    auto out = make_out(std::move(y));
    attach(out, x, [x](const Mat& g, const Mat& y) {
        // per column: dx = y .* (g - <g, y>)
        Eigen::RowVectorXd dots = (g.array() * y.array()).colwise().sum();
        x->grad.array() += y.array() * (g.array().rowwise() - dots.array());
    });
    return out;
}

NodePtr layer_norm(const NodePtr& x, const NodePtr& gain, const NodePtr& bias, double eps) {
    const long n = x->value.rows();
    if (n < 2) {
        throw std::invalid_argument("layer_norm: needs at least 2 rows, got " +
                                    shape_str(x->value));
    }
    if (gain && (gain->value.rows() != n || gain->value.cols() != 1)) {
        throw std::invalid_argument("layer_norm: gain is " + shape_str(gain->value) +
                                    ", expected " + std::to_string(n) + "x1");
    }
    if (bias && (bias->value.rows() != n || bias->value.cols() != 1)) {
        throw std::invalid_argument("layer_norm: bias is " + shape_str(bias->value) +
                                    ", expected " + std::to_string(n) + "x1");
    }
    Eigen::RowVectorXd mu = x->value.colwise().mean();
    Mat centered = x->value.rowwise() - mu;
    Eigen::RowVectorXd inv_std =
        (centered.array().square().colwise().mean() + eps).sqrt().inverse();
    auto xhat = std::make_shared<Mat>((centered.array().rowwise() * inv_std.array()).matrix());

    Mat y;
    if (gain) {
        y = xhat->array().colwise() * gain->value.col(0).array();
        if (bias) {
            y.colwise() += bias->value.col(0);
        }
    } else {
        y = *xhat;
    }
    auto out = make_out(std::move(y));

    auto inv_std_sp = std::make_shared<Eigen::RowVectorXd>(std::move(inv_std));
    attach(out, x, [x, gain, xhat, inv_std_sp](const Mat& g, const Mat&) {
        Mat gx = gain ? Mat(g.array().colwise() * gain->value.col(0).array()) : g;
        Eigen::RowVectorXd m1 = gx.colwise().mean();
        Eigen::RowVectorXd m2 = (gx.array() * xhat->array()).colwise().mean();
        x->grad.array() += ((gx.array().rowwise() - m1.array()) -
                            xhat->array().rowwise() * m2.array())
                               .rowwise() *
                           inv_std_sp->array();
    });
    if (gain) {
        attach(out, gain, [gain, xhat](const Mat& g, const Mat&) {
            gain->grad.col(0).noalias() += (g.array() * xhat->array()).matrix().rowwise().sum();
        });
    }
    if (bias) {
        attach(out, bias, [bias](const Mat& g, const Mat&) {
            bias->grad.col(0).noalias() += g.rowwise().sum();
        });
    }
    return out;
}

NodePtr avg_rnorm(const NodePtr& x, double c, double guard) {
    const long n = x->value.rows();
    if (n < 1) {
        throw std::invalid_argument("avg_rnorm: empty input");
    }
    Eigen::RowVectorXd mabs = x->value.array().abs().colwise().mean();
    auto denom = std::make_shared<Eigen::RowVectorXd>(mabs.cwiseMax(guard));
    Mat y = x->value.array().rowwise() * (c * denom->array().inverse());
    auto out = make_out(std::move(y));

    // Columns where the guard is inactive have a denominator that depends on
    // x; guarded columns see a constant denominator.
    auto guarded = std::make_shared<Eigen::Array<bool, 1, Eigen::Dynamic>>(
        mabs.array() < guard);
    attach(out, x, [x, c, n, denom, guarded](const Mat& g, const Mat&) {
        Eigen::RowVectorXd coef = c * denom->array().inverse();
        x->grad.array() += g.array().rowwise() * coef.array();
        Eigen::RowVectorXd dots = (g.array() * x->value.array()).colwise().sum();
        Eigen::RowVectorXd through =
            guarded->select(0.0, (coef.array() * dots.array()) /
                                     (denom->array() * static_cast<double>(n)));
        x->grad.array() -= x->value.array().sign().rowwise() * through.array();
    });
    return out;
}

NodePtr clamp(const NodePtr& x, double lo, double hi) {
    auto out = make_out(x->value.array().max(lo).min(hi));
    attach(out, x, [x, lo, hi](const Mat& g, const Mat&) {
        x->grad.array() +=
            g.array() * ((x->value.array() > lo) && (x->value.array() < hi)).cast<double>();
    });
    return out;
}

NodePtr sum(const NodePtr& x) {
    Mat y(1, 1);
    y(0, 0) = x->value.sum();
    auto out = make_out(std::move(y));
    attach(out, x, [x](const Mat& g, const Mat&) {
        x->grad.array() += g(0, 0);
    });
    return out;
}

NodePtr mean(const NodePtr& x) {
    const double inv_n = 1.0 / static_cast<double>(x->value.size());
    Mat y(1, 1);
    y(0, 0) = x->value.sum() * inv_n;
    auto out = make_out(std::move(y));
    attach(out, x, [x, inv_n](const Mat& g, const Mat&) {
        x->grad.array() += g(0, 0) * inv_n;
    });
    return out;
}

NodePtr col_sum(const NodePtr& x) {
    Mat y = x->value.colwise().sum();
    auto out = make_out(std::move(y));
    attach(out, x, [x](const Mat& g, const Mat&) {
        x->grad.rowwise() += g.row(0);
    });
    return out;
}

NodePtr concat_rows(const NodePtr& a, const NodePtr& b) {
    if (a->value.cols() != b->value.cols()) {
        throw std::invalid_argument("concat_rows: column mismatch " + shape_str(a->value) +
                                    " vs " + shape_str(b->value));
    }
    const long ra = a->value.rows();
    const long rb = b->value.rows();
    Mat y(ra + rb, a->value.cols());
    y.topRows(ra) = a->value;
    y.bottomRows(rb) = b->value;
    auto out = make_out(std::move(y));
    attach(out, a, [a, ra](const Mat& g, const Mat&) { a->grad += g.topRows(ra); });
    attach(out, b, [b, ra, rb](const Mat& g, const Mat&) { b->grad += g.middleRows(ra, rb); });
    return out;
}

} // namespace cir::ad
