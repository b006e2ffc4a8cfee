#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "simbound/lmi.hpp"
#include "simbound/multipliers.hpp"

namespace simbound {

/// Backend-independent solver knobs. The default backend comes from the
/// SIMBOUND_SDP_BACKEND environment variable and falls back to clarabel.
struct SolverOptions {
    std::string backend;
    /// Tried once when the primary backend's solution fails the independent
    /// validation; empty disables.
    std::string fallback_backend = "cvxopt";
    int max_iterations = 200;
    /// Backend feasibility/gap tolerance. Kept below the 1e-9 sign gate on
    /// the returned coefficients so accepted solutions clamp cleanly.
    double tolerance = 1e-9;
    /// Strictness margin: the negativity constraint is posed as
    /// L(v) + epsilon_shift * I <= 0 so interior-point backends can return a
    /// closed-cone point, and wide enough that reduced-accuracy solutions
    /// still verify as negative. Inflates the bound by at most its own size.
    double epsilon_shift = 1e-5;
    bool verbose = false;
    std::string python;      // interpreter, default "python3"
    std::string driver_path; // empty -> SIMBOUND_SOLVER_DRIVER or built-in default

    SolverOptions();
};

std::string default_sdp_backend();

/// Standard primal conic form
///     min c'x   s.t.  A x + s = b,   s in NonNeg(nonneg_rows) x PSD(m) ...
/// PSD blocks use the scaled lower-triangle column-major vectorization
/// (off-diagonal entries times sqrt(2)).
struct ConicProblem {
    int num_vars = 0;
    Eigen::VectorXd objective;
    std::vector<int> a_rows;
    std::vector<int> a_cols;
    std::vector<double> a_vals;
    std::vector<double> b;
    int nonneg_rows = 0;
    std::vector<int> psd_dims;
};

enum class ConicStatus { Optimal, NearOptimal, Infeasible, Unbounded, Failure };

std::string to_string(ConicStatus s);

struct ConicSolution {
    ConicStatus status = ConicStatus::Failure;
    std::string backend;
    std::string backend_status;
    Eigen::VectorXd x;
    double objective = 0.0;
    double solve_seconds = 0.0;
    int iterations = 0;
};

/// Weights on the four bound coefficients in the objective.
struct ObjectiveWeights {
    double w_x1 = 1.0;
    double w_x2 = 1.0;
    double w_x = 1.0;
    double w_affine = 1.0;

    void validate() const; // all >= 0, not all zero
};

/// Exports the negativity problem over the LMI into the standard primal
/// form: one non-negativity row per sign-constrained variable, then the PSD
/// block for -L(v) - epsilon * I.
ConicProblem export_conic(const LmiSystem &lmi, const VariableLayout &layout, const ObjectiveWeights &weights,
                          double epsilon_shift);

class ConicSolver {
public:
    virtual ~ConicSolver() = default;
    virtual ConicSolution solve(const ConicProblem &problem, const SolverOptions &options) = 0;
};

/// Serializes the problem to JSON and runs the Python driver, which wraps
/// the actual conic backends (clarabel, cvxopt, scs). The driver is the only
/// place a third-party solver is touched.
class SubprocessConicSolver : public ConicSolver {
public:
    ConicSolution solve(const ConicProblem &problem, const SolverOptions &options) override;
};

} // namespace simbound
