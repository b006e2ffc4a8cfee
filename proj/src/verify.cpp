#include "simbound/verify.hpp"

#include <algorithm>
#include <cmath>

#include "simbound/error.hpp"

namespace simbound {

TightnessSample tightness(const BoundCertificate &cert, const NeuralNetwork &net1, const NeuralNetwork &net2,
                          const Eigen::VectorXd &x1, const Eigen::VectorXd &x2, double tolerance) {
    TightnessSample sample;
    sample.x1 = x1;
    sample.x2 = x2;
    sample.error_sq = (evaluate(net1, x1).output - evaluate(net2, x2).output).squaredNorm();
    sample.bound_value = cert.gammas.bound(x1, x2);
    sample.sound = sample.error_sq <= sample.bound_value + tolerance;
    if (sample.error_sq == 0.0)
        sample.T = -std::numeric_limits<double>::infinity();
    else if (sample.bound_value <= 0.0)
        sample.T = std::numeric_limits<double>::infinity();
    else
        sample.T = std::log(sample.error_sq) - std::log(sample.bound_value);
    return sample;
}

namespace {

Eigen::VectorXd grid_point(const Eigen::VectorXd &lo, const Eigen::VectorXd &hi, const std::vector<int> &index,
                           int offset, int resolution) {
    Eigen::VectorXd x(lo.size());
    for (Eigen::Index j = 0; j < lo.size(); ++j) {
        const double t = resolution == 1 ? 0.0 : static_cast<double>(index[static_cast<size_t>(offset + j)]) /
                                                     static_cast<double>(resolution - 1);
        x[j] = lo[j] + t * (hi[j] - lo[j]);
    }
    return x;
}

} // namespace

WorstCase brute_force_worst_error(const NeuralNetwork &net1, const NeuralNetwork &net2, const InputSpec &spec,
                                  int resolution) {
    spec.validate(net1.input_dim());
    const int n_x = net1.input_dim();
    if (n_x > 3)
        throw DimensionError("brute-force grid is limited to n_x <= 3, got " + std::to_string(n_x));
    if (resolution < 100)
        throw FormatError("brute-force grid needs at least 100 points per dimension");
    const int dims = spec.coupling == Coupling::Independent ? 2 * n_x : n_x;
    double total = 1.0;
    for (int d = 0; d < dims; ++d)
        total *= resolution;
    if (total > 2e7)
        throw FormatError("brute-force grid would need " + std::to_string(total) + " points; lower the resolution");

    WorstCase best;
    std::vector<int> index(static_cast<size_t>(dims), 0);
    while (true) {
        Eigen::VectorXd x1 = grid_point(spec.lower1, spec.upper1, index, 0, resolution);
        Eigen::VectorXd x2;
        switch (spec.coupling) {
        case Coupling::Independent:
            x2 = grid_point(spec.lower2, spec.upper2, index, n_x, resolution);
            break;
        case Coupling::Quantised:
            x2.resize(n_x);
            for (int j = 0; j < n_x; ++j)
                x2[j] = quantize_scalar(x1[j], *spec.format);
            break;
        case Coupling::Identical:
            x2 = x1;
            break;
        }
        const double err = (evaluate(net1, x1).output - evaluate(net2, x2).output).squaredNorm();
        if (err > best.max_error_sq || best.x1.size() == 0) {
            best.max_error_sq = err;
            best.x1 = std::move(x1);
            best.x2 = std::move(x2);
        }
        int d = 0;
        while (d < dims && ++index[static_cast<size_t>(d)] == resolution) {
            index[static_cast<size_t>(d)] = 0;
            ++d;
        }
        if (d == dims)
            break;
    }
    return best;
}

WorstCase hill_climb_worst_error(const NeuralNetwork &net1, const NeuralNetwork &net2, const InputSpec &spec,
                                 int restarts, int steps, std::uint64_t seed) {
    spec.validate(net1.input_dim());
    const int n_x = net1.input_dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto derive_x2 = [&](const Eigen::VectorXd &x1, Eigen::VectorXd &x2) {
        if (spec.coupling == Coupling::Quantised) {
            for (int j = 0; j < n_x; ++j)
                x2[j] = quantize_scalar(x1[j], *spec.format);
        } else if (spec.coupling == Coupling::Identical) {
            x2 = x1;
        }
    };
    auto error_at = [&](const Eigen::VectorXd &x1, const Eigen::VectorXd &x2) {
        return (evaluate(net1, x1).output - evaluate(net2, x2).output).squaredNorm();
    };

    WorstCase best;
    for (int r = 0; r < restarts; ++r) {
        auto [x1, x2] = sample_admissible(spec, rng);
        double current = error_at(x1, x2);
        double sigma = 0.25;
        for (int s = 0; s < steps; ++s) {
            Eigen::VectorXd cand1 = x1;
            Eigen::VectorXd cand2 = x2;
            for (int j = 0; j < n_x; ++j) {
                cand1[j] = std::clamp(cand1[j] + sigma * gauss(rng) * (spec.upper1[j] - spec.lower1[j]),
                                      spec.lower1[j], spec.upper1[j]);
                if (spec.coupling == Coupling::Independent)
                    cand2[j] = std::clamp(cand2[j] + sigma * gauss(rng) * (spec.upper2[j] - spec.lower2[j]),
                                          spec.lower2[j], spec.upper2[j]);
            }
            derive_x2(cand1, cand2);
            const double value = error_at(cand1, cand2);
            if (value > current) {
                current = value;
                x1 = std::move(cand1);
                x2 = std::move(cand2);
            } else {
                sigma *= 0.97;
            }
        }
        if (current > best.max_error_sq || best.x1.size() == 0) {
            best.max_error_sq = current;
            best.x1 = x1;
            best.x2 = x2;
        }
    }
    return best;
}

NeuralNetwork random_network(std::mt19937_64 &rng, int n_x, const std::vector<int> &hidden_widths, int n_f,
                             Activation activation) {
    if (hidden_widths.empty())
        throw DimensionError("random_network needs at least one hidden layer");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Layer> layers;
    int fan_in = n_x;
    auto make_layer = [&](int rows) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Layer layer;
        layer.W.resize(rows, fan_in);
        layer.b.resize(rows);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < fan_in; ++c)
                layer.W(r, c) = gauss(rng) * scale;
            layer.b[r] = gauss(rng) * scale;
        }
        fan_in = rows;
        return layer;
    };
    for (int width : hidden_widths)
        layers.push_back(make_layer(width));
    layers.push_back(make_layer(n_f));
    return NeuralNetwork(std::move(layers), activation);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    // splitmix64 rounds over the three components
    std::uint64_t z = a;
    auto round = [](std::uint64_t v) {
        v += 0x9e3779b97f4a7c15ULL;
        v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
        v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
        return v ^ (v >> 31);
    };
    z = round(z ^ round(b));
    z = round(z ^ round(c));
    return z;
}

} // namespace simbound
