#pragma once

#include <Eigen/Core>

#include "simbound/network.hpp"

namespace simbound {

/// Index layout of the stacked vector eta = [x1; x2; phi(xi1); phi(xi2); 1].
struct EtaLayout {
    int n_x = 0;
    int M = 0;

    int x_offset(int net) const { return net * n_x; }
    int phi_offset(int net) const { return 2 * n_x + net * M; }
    int const_index() const { return 2 * (n_x + M); }
    int dim() const { return 2 * (n_x + M) + 1; }
};

/// Index layout of the stacked vector mu = [xi1; xi2; phi(xi1); phi(xi2); 1].
struct MuLayout {
    int M = 0;

    int xi_offset(int net) const { return net * M; }
    int phi_offset(int net) const { return 2 * M + net * M; }
    int const_index() const { return 4 * M; }
    int dim() const { return 4 * M + 1; }
};

/// Couples two equal-architecture networks to the stacked bases. The rows of
/// E that produce xi_i are block-banded weights against [x_i; phi(xi_i)] plus
/// the bias against the constant coordinate, the phi rows are selectors, and
/// the last row selects the constant — so mu = E * eta holds exactly along
/// any pair of forward passes.
class CompactForm {
public:
    static CompactForm build(const NeuralNetwork &net1, const NeuralNetwork &net2);

    const Eigen::MatrixXd &E() const { return E_; }
    const EtaLayout &eta() const { return eta_; }
    const MuLayout &mu() const { return mu_; }

    /// Offset of hidden layer k (1-based, k = 1..l) inside the M-sized
    /// phi/xi blocks. (layer, neuron) -> layer_offset(layer) + neuron is a
    /// bijection onto 0..M-1.
    int layer_offset(int layer) const;
    int num_layers() const { return static_cast<int>(widths_.size()); }
    int layer_width(int layer) const { return widths_[static_cast<size_t>(layer - 1)]; }

    Eigen::VectorXd stack_eta(const Eigen::VectorXd &x1, const EvalTrace &trace1, const Eigen::VectorXd &x2,
                              const EvalTrace &trace2) const;
    Eigen::VectorXd stack_mu(const EvalTrace &trace1, const EvalTrace &trace2) const;

private:
    Eigen::MatrixXd E_;
    EtaLayout eta_;
    MuLayout mu_;
    std::vector<int> widths_;
    std::vector<int> offsets_;
};

} // namespace simbound
