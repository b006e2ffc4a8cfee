#pragma once

#include <vector>

#include <Eigen/Core>

#include "simbound/qc.hpp"

namespace simbound {

/// One lower-triangle entry (row >= col) of a symmetric matrix.
struct LmiEntry {
    int row;
    int col;
    double value;
};

/// The affine matrix map L(v) = L0 + sum_i v_i * L_i whose negativity is the
/// certificate condition: L collects the input, activation, quantisation and
/// bound-gap forms over the flat variable layout.
///
/// Under identical coupling the x2 coordinates alias x1 (an exact linear
/// identification, not a penalty), so L lives on the reduced basis
/// [x1; phi1; phi2; 1]; otherwise the basis is the full eta.
class LmiSystem {
public:
    static LmiSystem assemble(const NeuralNetwork &net1, const NeuralNetwork &net2, const CompactForm &cf,
                              const InputSpec &spec, const VariableLayout &layout);

    int dim() const { return dim_; }
    int num_vars() const { return static_cast<int>(coefficients_.size()); }
    const std::vector<LmiEntry> &constant() const { return constant_; }
    const std::vector<LmiEntry> &coefficient(int var) const { return coefficients_[static_cast<size_t>(var)]; }

    /// Dense L(v) on the (possibly reduced) basis.
    Eigen::MatrixXd evaluate(const Eigen::VectorXd &vars) const;

    /// Maps full-eta indices to basis indices (identity unless reduced).
    const std::vector<int> &eta_index_map() const { return eta_map_; }
    bool reduced() const { return reduced_; }

private:
    int dim_ = 0;
    bool reduced_ = false;
    std::vector<int> eta_map_;
    std::vector<LmiEntry> constant_;
    std::vector<std::vector<LmiEntry>> coefficients_;
};

} // namespace simbound
