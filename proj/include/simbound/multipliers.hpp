#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "simbound/input_spec.hpp"

namespace simbound {

/// Optional constraint families toggled at assembly time.
struct ActivationQcOptions {
    /// Adds the slope-restriction constraints tying same-index neurons across
    /// the two networks (one non-negative scalar per hidden neuron).
    bool cross_slope = false;
};

/// Which multiplier groups exist for a given problem.
struct ProblemStructure {
    int n_x = 0;
    int M = 0;
    bool joint_box = false;   // boxes equal -> joint sum/difference constraints
    bool quantised = false;   // coupling == Quantised
    bool cross_slope = false;

    static ProblemStructure from(const InputSpec &spec, int n_x, int M, const ActivationQcOptions &options);

    bool operator==(const ProblemStructure &) const = default;
};

/// Every scaling variable of the constraint catalogue, shaped per group.
/// Vectors hold diagonal or row multipliers; crx* are full elementwise
/// non-negative matrices. comp1/comp2 are the complementarity equality
/// multipliers and carry no sign constraint. Groups absent from the problem
/// structure have size zero.
struct MultiplierSet {
    // input boxes
    Eigen::VectorXd box1, box2;          // n_x, >= 0
    Eigen::VectorXd joint_sum, joint_diff; // n_x, >= 0 (only when boxes are equal)
    // ReLU catalogue
    Eigen::VectorXd comp1, comp2;        // M, free sign
    Eigen::VectorXd pos1, pos2;          // M, >= 0
    Eigen::VectorXd cpos1, cpos2;        // M, >= 0
    Eigen::MatrixXd crx1, crx2, crx_phi; // M x M, >= 0
    Eigen::VectorXd slope;               // M, >= 0 (only when cross_slope)
    // quantised input coupling
    Eigen::VectorXd q_sec, q_low, q_up;                      // n_x, >= 0
    Eigen::VectorXd q_quad11, q_quad12, q_quad21, q_quad22;  // n_x, >= 0

    static MultiplierSet zeros(const ProblemStructure &st);

    struct SignViolation {
        std::string group;
        int index;
        double value;
    };
    /// Entries of sign-constrained groups below -tol.
    std::vector<SignViolation> sign_violations(double tol) const;
    /// Clamps tiny negative entries of sign-constrained groups to zero.
    void clamp_small_negatives(double tol);
};

/// The four bound coefficients of the certificate,
/// bound(x1, x2) = affine + x1 * |x1|^2 + x2 * |x2|^2 + x * |x1 - x2|^2.
struct GammaValues {
    double x1 = 0.0;
    double x2 = 0.0;
    double x = 0.0;
    double affine = 0.0;

    double bound(const Eigen::VectorXd &a, const Eigen::VectorXd &b) const {
        return affine + x1 * a.squaredNorm() + x2 * b.squaredNorm() + x * (a - b).squaredNorm();
    }
};

/// Flat decision-variable vector layout: the four gammas first, then the
/// multiplier groups in a fixed order. Matrices flatten column-major.
class VariableLayout {
public:
    struct Group {
        std::string name;
        int offset;
        int count;
        bool nonneg;
    };

    explicit VariableLayout(const ProblemStructure &st);

    int size() const { return size_; }
    const std::vector<Group> &groups() const { return groups_; }
    const ProblemStructure &structure() const { return structure_; }
    std::vector<int> nonneg_indices() const;

    Eigen::VectorXd flatten(const GammaValues &gammas, const MultiplierSet &mult) const;
    void unflatten(const Eigen::VectorXd &v, GammaValues &gammas, MultiplierSet &mult) const;

private:
    ProblemStructure structure_;
    std::vector<Group> groups_;
    int size_ = 0;
};

} // namespace simbound
