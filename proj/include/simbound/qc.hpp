#pragma once

#include <functional>
#include <optional>

#include <Eigen/Core>

#include "simbound/compact_form.hpp"
#include "simbound/input_spec.hpp"
#include "simbound/multipliers.hpp"

namespace simbound {

enum class QcKind { Input, Activation, Quantisation, Error };

/// A symmetric quadratic form on the eta basis. Every builder returns an
/// exactly symmetric matrix and is linear in its multiplier argument.
struct QuadraticForm {
    QcKind kind;
    Eigen::MatrixXd matrix;

    double evaluate(const Eigen::VectorXd &eta) const { return eta.dot(matrix * eta); }
};

/// Box constraints on each input plus, when the two boxes coincide, the
/// joint constraints on x1 + x2 and x2 - x1. The form is non-negative for
/// every in-box input pair whenever the multipliers are sign-feasible.
QuadraticForm input_qc(const InputSpec &spec, const MultiplierSet &mult, const EtaLayout &eta);

/// The ReLU constraint catalogue, assembled on the mu basis as the block
/// matrix Lambda and lifted to eta through E. Covers per-network
/// complementarity (free sign), positivity and complement positivity rows
/// against the constant, the three cross-network product matrices, and
/// (optionally) same-index cross-network slope restriction.
QuadraticForm activation_qc(const CompactForm &cf, const NeuralNetwork &net1, const NeuralNetwork &net2,
                            const MultiplierSet &mult);

/// Quantised-coupling constraints identifying x2 with the rounded x1:
/// the sector product, the two affine bracketing rows against the constant,
/// and the bracket cross-products. Returns the zero form under any other
/// coupling.
QuadraticForm quantisation_qc(const InputSpec &spec, const std::optional<FixedPointFormat> &fmt,
                              const MultiplierSet &mult, const EtaLayout &eta);

/// The bound-gap quadratic: along any pair of forward passes its value is
///   |f1(x1) - f2(x2)|^2 - (gamma + gamma_x1 |x1|^2 + gamma_x2 |x2|^2
///                                 + gamma_x |x1 - x2|^2).
QuadraticForm error_qc(const NeuralNetwork &net1, const NeuralNetwork &net2, const CompactForm &cf,
                       const GammaValues &gammas);

namespace detail {

/// Multiplier groups of the activation catalogue, used to enumerate the
/// Lambda entries one scalar variable at a time.
enum class ActGroup { Comp1, Comp2, Pos1, Pos2, Cpos1, Cpos2, Crx1, Crx2, CrxPhi, Slope };

/// Visits the contributions of one unit multiplier: each (a, b, v) call
/// means "mu^T Lambda mu gains v * mu_a * mu_b". For matrix groups the flat
/// index is column-major.
void activation_lambda_entries(ActGroup group, int flat_index, const MuLayout &mu,
                               const std::function<void(int, int, double)> &sink);

} // namespace detail

} // namespace simbound
