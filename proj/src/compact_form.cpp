#include "simbound/compact_form.hpp"

#include <string>

#include "simbound/error.hpp"

namespace simbound {

CompactForm CompactForm::build(const NeuralNetwork &net1, const NeuralNetwork &net2) {
    if (net1.input_dim() != net2.input_dim() || net1.output_dim() != net2.output_dim())
        throw DimensionError("networks must share input/output dimensions for a similarity bound");
    if (net1.hidden_widths() != net2.hidden_widths())
        throw DimensionError("networks must share the hidden architecture; differing layer widths are unsupported");
    if (net1.activation() != net2.activation())
        throw DimensionError("networks must share the activation function");

    CompactForm cf;
    cf.widths_ = net1.hidden_widths();
    cf.eta_ = EtaLayout{net1.input_dim(), net1.total_hidden_neurons()};
    cf.mu_ = MuLayout{net1.total_hidden_neurons()};

    cf.offsets_.reserve(cf.widths_.size());
    int running = 0;
    for (int w : cf.widths_) {
        cf.offsets_.push_back(running);
        running += w;
    }

    const int M = cf.mu_.M;
    cf.E_ = Eigen::MatrixXd::Zero(cf.mu_.dim(), cf.eta_.dim());
    const NeuralNetwork *nets[2] = {&net1, &net2};
    for (int i = 0; i < 2; ++i) {
        const NeuralNetwork &net = *nets[i];
        for (int k = 0; k < net.depth(); ++k) {
            const Layer &layer = net.layers()[static_cast<size_t>(k)];
            const int row = cf.mu_.xi_offset(i) + cf.offsets_[static_cast<size_t>(k)];
            const int col = k == 0 ? cf.eta_.x_offset(i)
                                   : cf.eta_.phi_offset(i) + cf.offsets_[static_cast<size_t>(k - 1)];
            cf.E_.block(row, col, layer.W.rows(), layer.W.cols()) = layer.W;
            cf.E_.block(row, cf.eta_.const_index(), layer.b.size(), 1) = layer.b;
        }
        for (int t = 0; t < M; ++t)
            cf.E_(cf.mu_.phi_offset(i) + t, cf.eta_.phi_offset(i) + t) = 1.0;
    }
    cf.E_(cf.mu_.const_index(), cf.eta_.const_index()) = 1.0;
    return cf;
}

int CompactForm::layer_offset(int layer) const {
    if (layer < 1 || layer > num_layers())
        throw DimensionError("layer index " + std::to_string(layer) + " out of range 1.." +
                             std::to_string(num_layers()));
    return offsets_[static_cast<size_t>(layer - 1)];
}

namespace {

void fill_stacked(Eigen::VectorXd &out, int offset, const std::vector<Eigen::VectorXd> &parts) {
    for (const Eigen::VectorXd &part : parts) {
        out.segment(offset, part.size()) = part;
        offset += static_cast<int>(part.size());
    }
}

} // namespace

Eigen::VectorXd CompactForm::stack_eta(const Eigen::VectorXd &x1, const EvalTrace &trace1, const Eigen::VectorXd &x2,
                                       const EvalTrace &trace2) const {
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(eta_.dim());
    eta.segment(eta_.x_offset(0), eta_.n_x) = x1;
    eta.segment(eta_.x_offset(1), eta_.n_x) = x2;
    fill_stacked(eta, eta_.phi_offset(0), trace1.post_activations);
    fill_stacked(eta, eta_.phi_offset(1), trace2.post_activations);
    eta[eta_.const_index()] = 1.0;
    return eta;
}

Eigen::VectorXd CompactForm::stack_mu(const EvalTrace &trace1, const EvalTrace &trace2) const {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(mu_.dim());
    fill_stacked(mu, mu_.xi_offset(0), trace1.pre_activations);
    fill_stacked(mu, mu_.xi_offset(1), trace2.pre_activations);
    fill_stacked(mu, mu_.phi_offset(0), trace1.post_activations);
    fill_stacked(mu, mu_.phi_offset(1), trace2.post_activations);
    mu[mu_.const_index()] = 1.0;
    return mu;
}

} // namespace simbound
