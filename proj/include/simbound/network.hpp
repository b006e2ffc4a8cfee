#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "simbound/activation.hpp"

namespace simbound {

/// One affine stage: maps an n_in vector to W * v + b with W of size
/// n_out x n_in.
struct Layer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
};

/// A feed-forward network
///
///     x^0     = x
///     x^{k+1} = phi(W^k x^k + b^k),   k = 0..l-1
///     f(x)    = W^l x^l + b^l
///
/// `layers()[0..l-1]` feed the activation, `layers()[l]` is the affine output
/// stage. Immutable after construction; construction validates that adjacent
/// dimensions chain, that every parameter is finite and that there is at
/// least one hidden neuron.
class NeuralNetwork {
public:
    NeuralNetwork(std::vector<Layer> layers, Activation activation);

    int input_dim() const { return static_cast<int>(layers_.front().W.cols()); }
    int output_dim() const { return static_cast<int>(layers_.back().W.rows()); }

    /// Number of hidden layers l.
    int depth() const { return static_cast<int>(layers_.size()) - 1; }

    /// Widths n_1..n_l of the hidden layers.
    const std::vector<int> &hidden_widths() const { return hidden_widths_; }

    /// Total number of hidden neurons M.
    int total_hidden_neurons() const { return total_hidden_; }

    const std::vector<Layer> &layers() const { return layers_; }
    Activation activation() const { return activation_; }

private:
    std::vector<Layer> layers_;
    Activation activation_;
    std::vector<int> hidden_widths_;
    int total_hidden_ = 0;
};

/// Returns true when the two networks have identical input/output dims,
/// hidden widths and activation.
bool same_architecture(const NeuralNetwork &a, const NeuralNetwork &b);

/// Forward pass with the full per-layer trace. pre_activations holds
/// xi^1..xi^l (the affine values fed into phi), post_activations holds
/// x^1..x^l.
struct EvalTrace {
    Eigen::VectorXd output;
    std::vector<Eigen::VectorXd> pre_activations;
    std::vector<Eigen::VectorXd> post_activations;
};

EvalTrace evaluate(const NeuralNetwork &net, const Eigen::VectorXd &x);

/// JSON model file layout:
///   { "input_dim": n, "activation": "relu",
///     "layers": [ { "W": [[...]], "b": [...] }, ... ] }
/// The last layer is the affine output stage.
NeuralNetwork load_model(const std::filesystem::path &path);
void save_model(const NeuralNetwork &net, const std::filesystem::path &path);

NeuralNetwork model_from_json_text(const std::string &text);
std::string model_to_json_text(const NeuralNetwork &net);

} // namespace simbound
