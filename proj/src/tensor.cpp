#include "sectk/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace sectk::nn {

namespace {

Value make_node(Eigen::MatrixXd v, std::vector<Value> parents) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->parents = std::move(parents);
    for (const auto& p : n->parents)
        if (p->requires_grad) n->requires_grad = true;
    return n;
}

void check_same_shape(const Value& a, const Value& b, const char* op) {
    if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace

Value constant(Eigen::MatrixXd v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    return n;
}

Value parameter(Eigen::MatrixXd v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->requires_grad = true;
    n->ensure_grad();
    return n;
}

Value add(const Value& a, const Value& b) {
    check_same_shape(a, b, "add");
    auto n = make_node(a->value + b->value, {a, b});
    n->backprop = [self = n.get(), a, b] {
        if (a->requires_grad) a->grad += self->grad;
        if (b->requires_grad) b->grad += self->grad;
    };
    return n;
}

Value add_rowwise(const Value& a, const Value& row) {
    if (row->value.rows() != 1 || row->value.cols() != a->value.cols())
        throw std::invalid_argument("add_rowwise: row must be 1 x cols");
    auto n = make_node(a->value.rowwise() + row->value.row(0), {a, row});
    n->backprop = [self = n.get(), a, row] {
        if (a->requires_grad) a->grad += self->grad;
        if (row->requires_grad) row->grad.row(0) += self->grad.colwise().sum();
    };
    return n;
}

Value scale(const Value& a, double s) {
    auto n = make_node(a->value * s, {a});
    n->backprop = [self = n.get(), a, s] {
        if (a->requires_grad) a->grad += self->grad * s;
    };
    return n;
}

Value matmul(const Value& a, const Value& b) {
    if (a->value.cols() != b->value.rows()) throw std::invalid_argument("matmul: inner dim mismatch");
    auto n = make_node(a->value * b->value, {a, b});
    n->backprop = [self = n.get(), a, b] {
        if (a->requires_grad) a->grad += self->grad * b->value.transpose();
        if (b->requires_grad) b->grad += a->value.transpose() * self->grad;
    };
    return n;
}

Value matmul_nt(const Value& a, const Value& b) {
    if (a->value.cols() != b->value.cols()) throw std::invalid_argument("matmul_nt: inner dim mismatch");
    auto n = make_node(a->value * b->value.transpose(), {a, b});
    n->backprop = [self = n.get(), a, b] {
        if (a->requires_grad) a->grad += self->grad * b->value;
        if (b->requires_grad) b->grad += self->grad.transpose() * a->value;
    };
    return n;
}

Value relu(const Value& a) {
    auto n = make_node(a->value.cwiseMax(0.0), {a});
    n->backprop = [self = n.get(), a] {
        if (!a->requires_grad) return;
        a->grad += (a->value.array() > 0.0).cast<double>().matrix().cwiseProduct(self->grad);
    };
    return n;
}

Value softmax_rows(const Value& a) {
    Eigen::MatrixXd out = a->value;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        Eigen::ArrayXd row = out.row(r).array();
        row -= row.maxCoeff();
        row = row.exp();
        out.row(r) = (row / row.sum()).matrix();
    }
    auto n = make_node(std::move(out), {a});
    n->backprop = [self = n.get(), a] {
        if (!a->requires_grad) return;
        for (Eigen::Index r = 0; r < self->value.rows(); ++r) {
            Eigen::RowVectorXd y = self->value.row(r);
            Eigen::RowVectorXd g = self->grad.row(r);
            double dot = y.dot(g);
            a->grad.row(r) += (g.array() - dot).matrix().cwiseProduct(y);
        }
    };
    return n;
}

Value log_softmax_rows(const Value& a) {
    Eigen::MatrixXd out = a->value;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        Eigen::ArrayXd row = out.row(r).array();
        double m = row.maxCoeff();
        double lse = m + std::log((row - m).exp().sum());
        out.row(r) = (row - lse).matrix();
    }
    auto n = make_node(std::move(out), {a});
    n->backprop = [self = n.get(), a] {
        if (!a->requires_grad) return;
        for (Eigen::Index r = 0; r < self->value.rows(); ++r) {
            Eigen::RowVectorXd g = self->grad.row(r);
            double gsum = g.sum();
            Eigen::RowVectorXd softmax = self->value.row(r).array().exp().matrix();
            a->grad.row(r) += g - gsum * softmax;
        }
    };
    return n;
}

Value layer_norm(const Value& a, const Value& gain, const Value& bias, double eps) {
    const Eigen::Index cols = a->value.cols();
    if (gain->value.cols() != cols || bias->value.cols() != cols)
        throw std::invalid_argument("layer_norm: gain/bias must be 1 x cols");

    Eigen::MatrixXd normalized(a->value.rows(), cols);
    Eigen::VectorXd inv_std(a->value.rows());
    for (Eigen::Index r = 0; r < a->value.rows(); ++r) {
        Eigen::ArrayXd row = a->value.row(r).array();
        double mean = row.mean();
        double var = (row - mean).square().mean();
        double inv = 1.0 / std::sqrt(var + eps);
        inv_std(r) = inv;
        normalized.row(r) = ((row - mean) * inv).matrix();
    }
    Eigen::MatrixXd out =
        (normalized.array().rowwise() * gain->value.row(0).array()).rowwise() + bias->value.row(0).array();

    auto n = make_node(std::move(out), {a, gain, bias});
    auto norm = std::make_shared<Eigen::MatrixXd>(std::move(normalized));
    auto istd = std::make_shared<Eigen::VectorXd>(std::move(inv_std));
    n->backprop = [self = n.get(), a, gain, bias, norm, istd] {
        if (gain->requires_grad)
            gain->grad.row(0) += (self->grad.array() * norm->array()).colwise().sum().matrix();
        if (bias->requires_grad) bias->grad.row(0) += self->grad.colwise().sum();
        if (!a->requires_grad) return;
        for (Eigen::Index r = 0; r < self->value.rows(); ++r) {
            Eigen::ArrayXd dnorm = (self->grad.row(r).array() * gain->value.row(0).array()).transpose();
            Eigen::ArrayXd x_hat = norm->row(r).array().transpose();
            double mean_d = dnorm.mean();
            double mean_dx = (dnorm * x_hat).mean();
            Eigen::ArrayXd dx = ((dnorm - mean_d - x_hat * mean_dx) * (*istd)(r));
            a->grad.row(r) += dx.matrix().transpose();
        }
    };
    return n;
}

Value gather_rows(const Value& table, const std::vector<int>& indices) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), table->value.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= table->value.rows())
            throw std::out_of_range("gather_rows: index out of range");
        out.row(static_cast<Eigen::Index>(i)) = table->value.row(indices[i]);
    }
    auto n = make_node(std::move(out), {table});
    n->backprop = [self = n.get(), table, indices] {
        if (!table->requires_grad) return;
        for (std::size_t i = 0; i < indices.size(); ++i)
            table->grad.row(indices[i]) += self->grad.row(static_cast<Eigen::Index>(i));
    };
    return n;
}

Value slice_cols(const Value& a, int start, int count) {
    if (start < 0 || start + count > a->value.cols()) throw std::out_of_range("slice_cols: out of range");
    auto n = make_node(a->value.middleCols(start, count), {a});
    n->backprop = [self = n.get(), a, start, count] {
        if (a->requires_grad) a->grad.middleCols(start, count) += self->grad;
    };
    return n;
}

Value concat_cols(const std::vector<Value>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
    Eigen::Index rows = parts[0]->value.rows(), cols = 0;
    for (const auto& p : parts) cols += p->value.cols();
    Eigen::MatrixXd out(rows, cols);
    Eigen::Index offset = 0;
    for (const auto& p : parts) {
        out.middleCols(offset, p->value.cols()) = p->value;
        offset += p->value.cols();
    }
    auto n = make_node(std::move(out), {parts.begin(), parts.end()});
    n->backprop = [self = n.get()] {
        Eigen::Index offset = 0;
        for (const auto& p : self->parents) {
            if (p->requires_grad) p->grad += self->grad.middleCols(offset, p->value.cols());
            offset += p->value.cols();
        }
    };
    return n;
}

Value nll(const Value& logp, const std::vector<int>& targets) {
    if (static_cast<Eigen::Index>(targets.size()) != logp->value.rows())
        throw std::invalid_argument("nll: target count must equal row count");
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i)
        total -= logp->value(static_cast<Eigen::Index>(i), targets[i]);
    Eigen::MatrixXd out(1, 1);
    out(0, 0) = total / static_cast<double>(targets.size());
    auto n = make_node(std::move(out), {logp});
    n->backprop = [self = n.get(), logp, targets] {
        if (!logp->requires_grad) return;
        double g = self->grad(0, 0) / static_cast<double>(targets.size());
        for (std::size_t i = 0; i < targets.size(); ++i)
            logp->grad(static_cast<Eigen::Index>(i), targets[i]) -= g;
    };
    return n;
}

void backward(const Value& loss) {
    if (loss->value.rows() != 1 || loss->value.cols() != 1)
        throw std::invalid_argument("backward: loss must be a scalar");

    // Topological order by DFS.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Value, std::size_t>> stack{{loss, 0}};
    std::vector<Value> keep_alive;
    while (!stack.empty()) {
        auto& [node, child] = stack.back();
        if (child < node->parents.size()) {
            Value next = node->parents[child++];
            if (!seen.count(next.get()) && next->requires_grad && next->backprop)
                stack.emplace_back(std::move(next), 0);
            continue;
        }
        if (seen.insert(node.get()).second) order.push_back(node.get());
        keep_alive.push_back(node);
        stack.pop_back();
    }

    for (Node* n : order) {
        n->ensure_grad();
        n->grad.setZero();
    }
    // Leaf parameters may sit outside `order` (no backprop fn); their grads
    // are zeroed by the optimizer between steps, here they accumulate.
    loss->ensure_grad();
    loss->grad(0, 0) = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backprop) (*it)->backprop();
}

}  // namespace sectk::nn
