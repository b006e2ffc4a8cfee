#include "simbound/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "simbound/error.hpp"

namespace simbound {

NeuralNetwork quantize_network(const NeuralNetwork &net, const FixedPointFormat &fmt) {
    std::vector<Layer> layers = net.layers();
    for (size_t k = 0; k < layers.size(); ++k) {
        Layer &layer = layers[k];
        for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.W.cols(); ++c) {
                try {
                    layer.W(r, c) = quantize_scalar(layer.W(r, c), fmt);
                } catch (const SaturationError &e) {
                    throw SaturationError("layer " + std::to_string(k) + " weight (" + std::to_string(r) + "," +
                                          std::to_string(c) + "): " + e.what());
                }
            }
        for (Eigen::Index r = 0; r < layer.b.size(); ++r) {
            try {
                layer.b[r] = quantize_scalar(layer.b[r], fmt);
            } catch (const SaturationError &e) {
                throw SaturationError("layer " + std::to_string(k) + " bias (" + std::to_string(r) +
                                      "): " + e.what());
            }
        }
    }
    return NeuralNetwork(std::move(layers), net.activation());
}

PruneSpec PruneSpec::by_count(int n) {
    PruneSpec spec;
    spec.count = n;
    return spec;
}

PruneSpec PruneSpec::by_threshold(double t) {
    PruneSpec spec;
    spec.threshold = t;
    return spec;
}

namespace {

double score_vector_norm(const Eigen::VectorXd &v, double p) {
    if (std::isinf(p))
        return v.lpNorm<Eigen::Infinity>();
    if (p == 2.0)
        return v.norm();
    if (p == 1.0)
        return v.lpNorm<1>();
    if (p < 1.0)
        throw FormatError("prune norm must be >= 1, got " + std::to_string(p));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        acc += std::pow(std::abs(v[i]), p);
    return std::pow(acc, 1.0 / p);
}

void validate(const PruneSpec &spec, int total_hidden) {
    if (spec.count.has_value() == spec.threshold.has_value())
        throw FormatError("prune spec needs exactly one of count/threshold");
    if (spec.count && (*spec.count < 0 || *spec.count >= total_hidden))
        throw FormatError("prune count must be in [0, M), got " + std::to_string(*spec.count) + " with M = " +
                          std::to_string(total_hidden));
    if (spec.threshold && *spec.threshold < 0.0)
        throw FormatError("prune threshold must be >= 0");
}

} // namespace

std::vector<double> prune_scores(const NeuralNetwork &net, const PruneSpec &spec) {
    validate(spec, net.total_hidden_neurons());
    std::vector<double> scores;
    scores.reserve(net.total_hidden_neurons());
    for (int k = 0; k < net.depth(); ++k) {
        const Layer &layer = net.layers()[k];
        for (Eigen::Index r = 0; r < layer.W.rows(); ++r) {
            Eigen::VectorXd row = layer.W.row(r).transpose();
            if (spec.include_bias) {
                row.conservativeResize(row.size() + 1);
                row[row.size() - 1] = layer.b[r];
            }
            scores.push_back(score_vector_norm(row, spec.norm));
        }
    }
    return scores;
}

NeuralNetwork prune_network(const NeuralNetwork &net, const PruneSpec &spec) {
    const std::vector<double> scores = prune_scores(net, spec);
    const int total = net.total_hidden_neurons();

    std::vector<int> selected;
    if (spec.count) {
        std::vector<int> order(scores.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });
        selected.assign(order.begin(), order.begin() + *spec.count);
    } else {
        for (size_t i = 0; i < scores.size(); ++i)
            if (scores[i] <= *spec.threshold)
                selected.push_back(static_cast<int>(i));
        if (static_cast<int>(selected.size()) >= total)
            throw FormatError("prune threshold " + std::to_string(*spec.threshold) +
                              " would zero every hidden neuron");
    }

    std::vector<Layer> layers = net.layers();
    int base = 0;
    for (int k = 0; k < net.depth(); ++k) {
        const int width = static_cast<int>(layers[k].W.rows());
        for (int flat : selected) {
            if (flat < base || flat >= base + width)
                continue;
            const int r = flat - base;
            layers[k].W.row(r).setZero();
            layers[k].b[r] = 0.0;
            layers[k + 1].W.col(r).setZero();
        }
        base += width;
    }
    return NeuralNetwork(std::move(layers), net.activation());
}

} // namespace simbound
