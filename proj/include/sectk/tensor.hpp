#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

namespace sectk::nn {

// One node of the autodiff tape. All values are 2-D (scalars are 1x1).
struct Node {
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Pulls this->grad into parent grads. Empty for leaves.
    std::function<void()> backprop;

    void ensure_grad() {
        if (grad.rows() != value.rows() || grad.cols() != value.cols())
            grad = Eigen::MatrixXd::Zero(value.rows(), value.cols());
    }
};

using Value = std::shared_ptr<Node>;

Value constant(Eigen::MatrixXd v);
Value parameter(Eigen::MatrixXd v);

Value add(const Value& a, const Value& b);           // same shape
Value add_rowwise(const Value& a, const Value& row); // row is 1 x cols
Value scale(const Value& a, double s);
Value matmul(const Value& a, const Value& b);
Value matmul_nt(const Value& a, const Value& b);     // a * b^T
Value relu(const Value& a);
Value softmax_rows(const Value& a);
Value log_softmax_rows(const Value& a);
// Per-row normalization with learned gain/bias (both 1 x cols).
Value layer_norm(const Value& a, const Value& gain, const Value& bias, double eps = 1e-5);
Value gather_rows(const Value& table, const std::vector<int>& indices);
Value slice_cols(const Value& a, int start, int count);
Value concat_cols(const std::vector<Value>& parts);
// Mean negative log-likelihood of per-row targets; logp from log_softmax_rows.
Value nll(const Value& logp, const std::vector<int>& targets);

// Reverse-mode sweep from a scalar loss. Zeroes reachable grads first.
void backward(const Value& loss);

}  // namespace sectk::nn
