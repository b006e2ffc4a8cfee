#pragma once

#include <filesystem>
#include <limits>
#include <string>

#include "simbound/conic.hpp"
#include "simbound/input_spec.hpp"
#include "simbound/multipliers.hpp"
#include "simbound/network.hpp"

namespace simbound {

enum class SolveStatus { Optimal, NearOptimal, Infeasible, NumericalFailure };

std::string to_string(SolveStatus s);
SolveStatus solve_status_from_string(const std::string &tag);

/// A solved bound
///   |f1(x1) - f2(x2)|^2 <= gamma + gamma_x1 |x1|^2 + gamma_x2 |x2|^2
///                               + gamma_x |x1 - x2|^2
/// together with everything needed to re-check it: the solved multipliers,
/// the independently recomputed top LMI eigenvalue, and a fingerprint of the
/// problem data the certificate belongs to.
struct BoundCertificate {
    SolveStatus status = SolveStatus::NumericalFailure;
    GammaValues gammas;
    ObjectiveWeights weights;
    ProblemStructure structure;
    MultiplierSet multipliers;
    double lmi_max_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    std::string fingerprint;
    std::string backend;
    std::string backend_status;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
    int iterations = 0;
    double epsilon_shift = 0.0;

    bool accepted() const { return status == SolveStatus::Optimal || status == SolveStatus::NearOptimal; }
};

/// Stable hash (FNV-1a over a canonical text rendering) of the two networks
/// and the input spec, so a certificate can be matched to its problem.
std::string problem_fingerprint(const NeuralNetwork &net1, const NeuralNetwork &net2, const InputSpec &spec);

std::string certificate_to_json_text(const BoundCertificate &cert);
BoundCertificate certificate_from_json_text(const std::string &text);

void save_certificate(const BoundCertificate &cert, const std::filesystem::path &path);
BoundCertificate load_certificate(const std::filesystem::path &path);

} // namespace simbound
