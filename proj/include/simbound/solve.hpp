#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simbound/certificate.hpp"
#include "simbound/conic.hpp"

namespace simbound {

struct SolveOptions {
    SolverOptions solver;
    ActivationQcOptions qc;
};

/// Minimizes the weighted bound coefficients subject to negativity of the
/// assembled constraint matrix (posed as <= -epsilon * I) plus the sign
/// constraints. Infeasibility is a reported outcome, not an error: the
/// negativity condition is sufficient only, so "no certificate" does not
/// mean no bound exists. On an accepted certificate the top LMI eigenvalue
/// has been recomputed independently of the backend and is negative, and
/// the coefficients are clamped at zero (values below -1e-9 invalidate the
/// result instead).
BoundCertificate solve_similarity_bound(const NeuralNetwork &net1, const NeuralNetwork &net2,
                                        const InputSpec &spec, const ObjectiveWeights &weights,
                                        const SolveOptions &options = {});

struct CheckOptions {
    int samples = 10000;
    std::uint64_t seed = 0x5eedu;
    double bound_tolerance = 1e-7; // allowed slack in the pointwise bound
    double sign_tolerance = 1e-9;
    int max_recorded_witnesses = 20;
};

struct CheckViolation {
    std::string kind; // "status", "fingerprint", "gamma_sign", "multiplier_sign", "lmi", "bound"
    std::string detail;
    Eigen::VectorXd x1, x2; // witness for "bound" violations
    double error_sq = 0.0;
    double bound = 0.0;
};

struct CheckReport {
    bool valid = false;
    double lmi_max_eigenvalue = 0.0;
    int samples = 0;
    int bound_violations = 0;
    std::vector<CheckViolation> violations;

    std::string summary() const;
};

/// Re-derives everything the certificate claims: fingerprint match, sign
/// feasibility, negativity of the re-assembled LMI (eigenvalue computed
/// here, not by the solver), and the pointwise bound on sampled admissible
/// input pairs. Violations are report content, not errors.
CheckReport check_certificate(const BoundCertificate &cert, const NeuralNetwork &net1, const NeuralNetwork &net2,
                              const InputSpec &spec, const CheckOptions &options = {});

} // namespace simbound
