#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "simbound/certificate.hpp"
#include "simbound/transforms.hpp"

namespace simbound {

/// One bound-vs-error evaluation at an input pair. T is the natural-log gap
/// ln(error^2) - ln(bound); zero error yields the -inf sentinel (reported,
/// never dropped), and `sound` is false when the error exceeds the bound by
/// more than the tolerance — such samples are flagged, not averaged away.
struct TightnessSample {
    Eigen::VectorXd x1, x2;
    double error_sq = 0.0;
    double bound_value = 0.0;
    double T = 0.0;
    bool sound = true;
};

TightnessSample tightness(const BoundCertificate &cert, const NeuralNetwork &net1, const NeuralNetwork &net2,
                          const Eigen::VectorXd &x1, const Eigen::VectorXd &x2, double tolerance = 1e-7);

struct WorstCase {
    double max_error_sq = 0.0;
    Eigen::VectorXd x1, x2;
};

/// Exhaustive grid maximum of |f1(x1) - f2(x2)|^2 over the admissible set.
/// Quantised/identical couplings grid x1 only (x2 follows); independent
/// coupling grids both inputs. Guards: n_x <= 3, resolution >= 100 points
/// per dimension, and at most ~2e7 total grid points.
WorstCase brute_force_worst_error(const NeuralNetwork &net1, const NeuralNetwork &net2, const InputSpec &spec,
                                  int resolution);

/// Random-restart local search for the same maximum; a second opinion next
/// to the grid, not a certified value.
WorstCase hill_climb_worst_error(const NeuralNetwork &net1, const NeuralNetwork &net2, const InputSpec &spec,
                                 int restarts = 100, int steps = 300, std::uint64_t seed = 7);

/// Random network with i.i.d. N(0, 1/fan_in) weights and biases.
NeuralNetwork random_network(std::mt19937_64 &rng, int n_x, const std::vector<int> &hidden_widths, int n_f,
                             Activation activation = Activation::ReLU);

/// Deterministic per-instance RNG stream seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

} // namespace simbound
