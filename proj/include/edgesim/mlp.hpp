#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace edgesim {

enum class OutputActivation { Sigmoid, Identity };

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

// Cached pre-activations from one forward pass; consumed by exactly one
// backward pass.
struct GradientTape {
    Eigen::MatrixXd input;                  // rows = batch
    std::vector<Eigen::MatrixXd> pre_acts;  // one per layer
    bool consumed = true;
};

// Dense feed-forward network with leaky-rectifier hidden units and a sigmoid
// or identity head. Batches are row-major: forward maps (B x in) to (B x out).
class Mlp {
public:
    Mlp() = default;
    Mlp(std::vector<int> layer_sizes, OutputActivation head, std::uint64_t seed,
        double leaky_slope = 0.01);

    Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
    Eigen::MatrixXd forward(const Eigen::MatrixXd& input, GradientTape& tape) const;
    Eigen::VectorXd forward_vec(const Eigen::VectorXd& input) const;

    // Exact gradients of the forward map, contracted against dL/d(output).
    Gradients backward(GradientTape& tape, const Eigen::MatrixXd& output_grad) const;

    int input_dim() const { return layer_sizes_.front(); }
    int output_dim() const { return layer_sizes_.back(); }
    int n_layers() const { return static_cast<int>(weights_.size()); }
    const std::vector<int>& layer_sizes() const { return layer_sizes_; }
    OutputActivation head() const { return head_; }
    double leaky_slope() const { return leaky_slope_; }

    std::vector<Eigen::MatrixXd>& weights() { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

    std::int64_t n_params() const;
    // flat row-major parameter view, weights then bias per layer; used by the
    // finite-difference tests and the optimizer
    double get_param(std::int64_t i) const;
    void set_param(std::int64_t i, double v);

    void save(std::ostream& out) const;
    static Mlp load(std::istream& in);
    bool operator==(const Mlp& other) const;

private:
    std::vector<int> layer_sizes_;
    OutputActivation head_ = OutputActivation::Identity;
    double leaky_slope_ = 0.01;
    std::vector<Eigen::MatrixXd> weights_;  // (out x in) per layer
    std::vector<Eigen::VectorXd> biases_;
};

// Gradient-descent step: params -= lr * grad. Ascent is expressed by negating
// the loss gradient upstream.
void sgd_step(Mlp& net, const Gradients& grads, double lr);

// Adam state for one network; apply() performs a descent step.
class AdamState {
public:
    AdamState() = default;
    explicit AdamState(const Mlp& net, double beta1 = 0.9, double beta2 = 0.999,
                       double eps = 1e-8);
    void apply(Mlp& net, const Gradients& grads, double lr);

private:
    double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    std::int64_t step_ = 0;
    std::vector<Eigen::MatrixXd> mw_, vw_;
    std::vector<Eigen::VectorXd> mb_, vb_;
};

}  // namespace edgesim
