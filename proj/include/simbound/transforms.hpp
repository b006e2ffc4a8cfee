#pragma once

#include <optional>

#include "simbound/fixed_point.hpp"
#include "simbound/network.hpp"

namespace simbound {

/// Quantizes every weight and bias elementwise onto the format's grid.
/// Architecture is unchanged. SaturationError reports the offending layer
/// and index.
NeuralNetwork quantize_network(const NeuralNetwork &net, const FixedPointFormat &fmt);

/// Selects which hidden neurons to zero out. Neurons are ranked by the
/// p-norm of their incoming weight row, with the bias included in the score
/// vector by default (a zero-weight, large-bias neuron is not unimportant).
/// Exactly one of count/threshold must be set; ties break toward the lowest
/// (layer, index) position.
struct PruneSpec {
    std::optional<int> count;
    std::optional<double> threshold;
    double norm = 2.0;
    bool include_bias = true;

    static PruneSpec by_count(int n);
    static PruneSpec by_threshold(double t);
};

/// Zeroes the selected neurons' incoming row, bias and outgoing column.
/// Errors when the selection would empty the hidden part of the network.
NeuralNetwork prune_network(const NeuralNetwork &net, const PruneSpec &spec);

/// Scores of all hidden neurons in (layer, index) order, as used by
/// prune_network's ranking.
std::vector<double> prune_scores(const NeuralNetwork &net, const PruneSpec &spec);

} // namespace simbound
