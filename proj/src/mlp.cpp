#include "edgesim/mlp.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

constexpr std::uint32_t kMagic = 0x4d4c5031;  // "MLP1"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("mlp checkpoint: truncated stream");
    return v;
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation head, std::uint64_t seed,
         double leaky_slope)
    : layer_sizes_(std::move(layer_sizes)), head_(head), leaky_slope_(leaky_slope) {
    if (layer_sizes_.size() < 2) throw std::invalid_argument("mlp: need at least two layer sizes");
    RngStream rng(mix_seed(seed, "mlp-init"));
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
        const int in = layer_sizes_[l];
        const int out = layer_sizes_[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        Eigen::MatrixXd w(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) w(r, c) = rng.uniform(-bound, bound);
        Eigen::VectorXd b(out);
        for (int r = 0; r < out; ++r) b(r) = rng.uniform(-bound, bound);
        weights_.push_back(std::move(w));
        biases_.push_back(std::move(b));
    }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
    GradientTape tape;
    return forward(input, tape);
}

Eigen::VectorXd Mlp::forward_vec(const Eigen::VectorXd& input) const {
    return forward(input.transpose()).row(0).transpose();
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, GradientTape& tape) const {
    if (input.cols() != input_dim()) throw std::invalid_argument("mlp forward: dimension mismatch");
    tape.input = input;
    tape.pre_acts.clear();
    tape.pre_acts.reserve(weights_.size());
    tape.consumed = false;

    Eigen::MatrixXd a = input;
    const int last = n_layers() - 1;
    for (int l = 0; l <= last; ++l) {
        Eigen::MatrixXd z = (a * weights_[static_cast<std::size_t>(l)].transpose()).rowwise() +
                            biases_[static_cast<std::size_t>(l)].transpose();
        tape.pre_acts.push_back(z);
        if (l < last) {
            a = z.unaryExpr([s = leaky_slope_](double x) { return x > 0.0 ? x : s * x; });
        } else if (head_ == OutputActivation::Sigmoid) {
            a = z.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
        } else {
            a = z;
        }
    }
    return a;
}

Gradients Mlp::backward(GradientTape& tape, const Eigen::MatrixXd& output_grad) const {
    if (tape.consumed) throw std::logic_error("mlp backward: tape already consumed or never filled");
    if (static_cast<int>(tape.pre_acts.size()) != n_layers())
        throw std::logic_error("mlp backward: tape does not match network");
    tape.consumed = true;

    const int last = n_layers() - 1;
    Gradients g;
    g.weights.resize(weights_.size());
    g.biases.resize(biases_.size());

    // delta at the head
    Eigen::MatrixXd delta;
    if (head_ == OutputActivation::Sigmoid) {
        Eigen::MatrixXd y = tape.pre_acts[static_cast<std::size_t>(last)].unaryExpr(
            [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
        delta = output_grad.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
    } else {
        delta = output_grad;
    }

    for (int l = last; l >= 0; --l) {
        Eigen::MatrixXd a_prev;
        if (l == 0) {
            a_prev = tape.input;
        } else {
            a_prev = tape.pre_acts[static_cast<std::size_t>(l - 1)].unaryExpr(
                [s = leaky_slope_](double x) { return x > 0.0 ? x : s * x; });
        }
        g.weights[static_cast<std::size_t>(l)] = delta.transpose() * a_prev;
        g.biases[static_cast<std::size_t>(l)] = delta.colwise().sum().transpose();
        if (l > 0) {
            Eigen::MatrixXd dz = (delta * weights_[static_cast<std::size_t>(l)]);
            const Eigen::MatrixXd& z = tape.pre_acts[static_cast<std::size_t>(l - 1)];
            delta = dz.binaryExpr(z, [s = leaky_slope_](double d, double zz) {
                return zz > 0.0 ? d : s * d;
            });
        }
    }
    return g;
}

std::int64_t Mlp::n_params() const {
    std::int64_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l)
        n += weights_[l].size() + biases_[l].size();
    return n;
}

double Mlp::get_param(std::int64_t i) const {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (i < weights_[l].size()) {
            const auto in = weights_[l].cols();
            return weights_[l](i / in, i % in);
        }
        i -= weights_[l].size();
        if (i < biases_[l].size()) return biases_[l](i);
        i -= biases_[l].size();
    }
    throw std::out_of_range("mlp get_param");
}

void Mlp::set_param(std::int64_t i, double v) {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (i < weights_[l].size()) {
            const auto in = weights_[l].cols();
            weights_[l](i / in, i % in) = v;
            return;
        }
        i -= weights_[l].size();
        if (i < biases_[l].size()) {
            biases_[l](i) = v;
            return;
        }
        i -= biases_[l].size();
    }
    throw std::out_of_range("mlp set_param");
}

void Mlp::save(std::ostream& out) const {
    write_pod(out, kMagic);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint8_t>(head_ == OutputActivation::Sigmoid ? 1 : 0));
    write_pod(out, leaky_slope_);
    write_pod(out, static_cast<std::uint32_t>(layer_sizes_.size()));
    for (int s : layer_sizes_) write_pod(out, static_cast<std::uint32_t>(s));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        out.write(reinterpret_cast<const char*>(weights_[l].data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(weights_[l].size())));
        out.write(reinterpret_cast<const char*>(biases_[l].data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(biases_[l].size())));
    }
}

Mlp Mlp::load(std::istream& in) {
    if (read_pod<std::uint32_t>(in) != kMagic) throw std::runtime_error("mlp checkpoint: bad magic");
    if (read_pod<std::uint32_t>(in) != kVersion)
        throw std::runtime_error("mlp checkpoint: unsupported version");
    const auto head = read_pod<std::uint8_t>(in) ? OutputActivation::Sigmoid : OutputActivation::Identity;
    const double slope = read_pod<double>(in);
    const auto n_sizes = read_pod<std::uint32_t>(in);
    std::vector<int> sizes(n_sizes);
    for (auto& s : sizes) s = static_cast<int>(read_pod<std::uint32_t>(in));
    Mlp net(sizes, head, 0, slope);
    for (std::size_t l = 0; l < net.weights_.size(); ++l) {
        in.read(reinterpret_cast<char*>(net.weights_[l].data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(net.weights_[l].size())));
        in.read(reinterpret_cast<char*>(net.biases_[l].data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(net.biases_[l].size())));
        if (!in) throw std::runtime_error("mlp checkpoint: truncated parameters");
    }
    return net;
}

bool Mlp::operator==(const Mlp& other) const {
    if (layer_sizes_ != other.layer_sizes_ || head_ != other.head_) return false;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (weights_[l] != other.weights_[l]) return false;
        if (biases_[l] != other.biases_[l]) return false;
    }
    return true;
}

void sgd_step(Mlp& net, const Gradients& grads, double lr) {
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        net.weights()[l] -= lr * grads.weights[l];
        net.biases()[l] -= lr * grads.biases[l];
    }
}

AdamState::AdamState(const Mlp& net, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        mw_.push_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
        vw_.push_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
        mb_.push_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
        vb_.push_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
    }
}

void AdamState::apply(Mlp& net, const Gradients& grads, double lr) {
    ++step_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * grads.weights[l];
        vw_[l] = beta2_ * vw_[l] + (1.0 - beta2_) * grads.weights[l].cwiseProduct(grads.weights[l]);
        net.weights()[l] -= (lr * (mw_[l] / bc1).array() /
                             ((vw_[l] / bc2).array().sqrt() + eps_))
                                .matrix();
        mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.biases[l];
        vb_[l] = beta2_ * vb_[l] + (1.0 - beta2_) * grads.biases[l].cwiseProduct(grads.biases[l]);
        net.biases()[l] -= (lr * (mb_[l] / bc1).array() /
                            ((vb_[l] / bc2).array().sqrt() + eps_))
                               .matrix();
    }
}

}  // namespace edgesim
