#include "simbound/solve.hpp"

#include <chrono>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "simbound/error.hpp"
#include "simbound/lmi.hpp"

namespace simbound {

namespace {

// Raw negatives up to this size are solver slack. Clamping a multiplier to
// zero only drops constraint contributions and clamping a gamma grows the
// bound; the eigenvalue recheck below runs on the clamped values either
// way, so acceptance stays sound.
constexpr double kMultiplierTol = 1e-6;

CheckViolation make_violation(std::string kind, std::string detail) {
    CheckViolation v;
    v.kind = std::move(kind);
    v.detail = std::move(detail);
    return v;
}

double max_eigenvalue(const Eigen::MatrixXd &sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

BoundCertificate solve_with_backend(const NeuralNetwork &net1, const NeuralNetwork &net2, const InputSpec &spec,
                                    const ObjectiveWeights &weights, const LmiSystem &lmi,
                                    const VariableLayout &layout, const ProblemStructure &st,
                                    const SolverOptions &solver_options) {
    const auto t_start = std::chrono::steady_clock::now();
    const ConicProblem problem = export_conic(lmi, layout, weights, solver_options.epsilon_shift);
    SubprocessConicSolver solver;
    const ConicSolution sol = solver.solve(problem, solver_options);

    BoundCertificate cert;
    cert.weights = weights;
    cert.structure = st;
    cert.multipliers = MultiplierSet::zeros(st);
    cert.fingerprint = problem_fingerprint(net1, net2, spec);
    cert.backend = sol.backend;
    cert.backend_status = sol.backend_status;
    cert.solve_seconds = sol.solve_seconds;
    cert.iterations = sol.iterations;
    cert.epsilon_shift = solver_options.epsilon_shift;

    auto finish = [&](SolveStatus status) {
        cert.status = status;
        cert.total_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return cert;
    };

    if (sol.status == ConicStatus::Infeasible)
        return finish(SolveStatus::Infeasible);
    if (sol.status == ConicStatus::Failure || sol.status == ConicStatus::Unbounded)
        return finish(SolveStatus::NumericalFailure);

    layout.unflatten(sol.x, cert.gammas, cert.multipliers);

    // Coefficients slightly below zero are solver noise and get clamped.
    // Clamping a gamma up to zero grows the reported bound and pushes the
    // matrix map further negative, so both soundness checks below run on the
    // clamped values; the raw gate only screens out genuinely junk output.
    for (double g : {cert.gammas.x1, cert.gammas.x2, cert.gammas.x, cert.gammas.affine})
        if (g < -kMultiplierTol)
            return finish(SolveStatus::NumericalFailure);
    cert.gammas.x1 = std::max(cert.gammas.x1, 0.0);
    cert.gammas.x2 = std::max(cert.gammas.x2, 0.0);
    cert.gammas.x = std::max(cert.gammas.x, 0.0);
    cert.gammas.affine = std::max(cert.gammas.affine, 0.0);
    if (!cert.multipliers.sign_violations(kMultiplierTol).empty())
        return finish(SolveStatus::NumericalFailure);
    cert.multipliers.clamp_small_negatives(kMultiplierTol);

    cert.objective_value = weights.w_x1 * cert.gammas.x1 + weights.w_x2 * cert.gammas.x2 +
                           weights.w_x * cert.gammas.x + weights.w_affine * cert.gammas.affine;

    // Negativity check, independent of whatever the backend reported.
    cert.lmi_max_eigenvalue = max_eigenvalue(lmi.evaluate(layout.flatten(cert.gammas, cert.multipliers)));
    if (!(cert.lmi_max_eigenvalue < 0.0))
        return finish(SolveStatus::NumericalFailure);

    return finish(sol.status == ConicStatus::Optimal ? SolveStatus::Optimal : SolveStatus::NearOptimal);
}

} // namespace

BoundCertificate solve_similarity_bound(const NeuralNetwork &net1, const NeuralNetwork &net2,
                                        const InputSpec &spec, const ObjectiveWeights &weights,
                                        const SolveOptions &options) {
    spec.validate(net1.input_dim());
    weights.validate();

    const CompactForm cf = CompactForm::build(net1, net2);
    const ProblemStructure st = ProblemStructure::from(spec, cf.eta().n_x, cf.eta().M, options.qc);
    const VariableLayout layout(st);
    const LmiSystem lmi = LmiSystem::assemble(net1, net2, cf, spec, layout);

    BoundCertificate cert =
        solve_with_backend(net1, net2, spec, weights, lmi, layout, st, options.solver);
    if (cert.status == SolveStatus::NumericalFailure && !options.solver.fallback_backend.empty() &&
        options.solver.fallback_backend != options.solver.backend) {
        SolverOptions retry = options.solver;
        retry.backend = options.solver.fallback_backend;
        BoundCertificate second = solve_with_backend(net1, net2, spec, weights, lmi, layout, st, retry);
        if (second.status != SolveStatus::NumericalFailure)
            return second;
    }
    return cert;
}

std::string CheckReport::summary() const {
    std::ostringstream out;
    out << (valid ? "valid" : "INVALID") << " (lmi_max_eigenvalue=" << lmi_max_eigenvalue << ", samples=" << samples
        << ", bound_violations=" << bound_violations << ")";
    for (const CheckViolation &v : violations) {
        out << "\n  - " << v.kind << ": " << v.detail;
    }
    return out.str();
}

CheckReport check_certificate(const BoundCertificate &cert, const NeuralNetwork &net1, const NeuralNetwork &net2,
                              const InputSpec &spec, const CheckOptions &options) {
    spec.validate(net1.input_dim());
    CheckReport report;

    if (!cert.accepted())
        report.violations.push_back(
            make_violation("status", "certificate status is " + to_string(cert.status) + ", nothing to validate"));

    if (cert.fingerprint != problem_fingerprint(net1, net2, spec))
        report.violations.push_back(make_violation("fingerprint", "certificate was produced for different problem data"));

    for (auto [name, value] : {std::pair<const char *, double>{"gamma_x1", cert.gammas.x1},
                               {"gamma_x2", cert.gammas.x2},
                               {"gamma_x", cert.gammas.x},
                               {"gamma", cert.gammas.affine}})
        if (value < 0.0)
            report.violations.push_back(make_violation("gamma_sign", std::string(name) + " = " + std::to_string(value)));

    for (const MultiplierSet::SignViolation &v : cert.multipliers.sign_violations(options.sign_tolerance))
        report.violations.push_back(make_violation(
            "multiplier_sign", v.group + "[" + std::to_string(v.index) + "] = " + std::to_string(v.value)));

    // Re-assemble the LMI with the certificate's numbers and recompute the
    // top eigenvalue here. Structure must match the problem for the layout
    // to make sense.
    const CompactForm cf = CompactForm::build(net1, net2);
    ActivationQcOptions qc_options;
    qc_options.cross_slope = cert.structure.cross_slope;
    const ProblemStructure st = ProblemStructure::from(spec, cf.eta().n_x, cf.eta().M, qc_options);
    if (st != cert.structure) {
        report.violations.push_back(make_violation("structure", "certificate multiplier layout does not match the problem"));
        report.samples = 0;
        report.valid = false;
        return report;
    }
    const VariableLayout layout(st);
    const LmiSystem lmi = LmiSystem::assemble(net1, net2, cf, spec, layout);
    MultiplierSet clamped = cert.multipliers;
    clamped.clamp_small_negatives(std::numeric_limits<double>::infinity());
    GammaValues gammas = cert.gammas;
    gammas.x1 = std::max(gammas.x1, 0.0);
    gammas.x2 = std::max(gammas.x2, 0.0);
    gammas.x = std::max(gammas.x, 0.0);
    gammas.affine = std::max(gammas.affine, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lmi.evaluate(layout.flatten(gammas, clamped)),
                                                       Eigen::EigenvaluesOnly);
    report.lmi_max_eigenvalue = eig.eigenvalues().maxCoeff();
    if (!(report.lmi_max_eigenvalue < 0.0))
        report.violations.push_back(
            make_violation("lmi", "max eigenvalue " + std::to_string(report.lmi_max_eigenvalue) + " is not negative"));

    // Pointwise bound on sampled admissible input pairs.
    std::mt19937_64 rng(options.seed);
    report.samples = options.samples;
    for (int i = 0; i < options.samples; ++i) {
        const auto [x1, x2] = sample_admissible(spec, rng);
        const double err = (evaluate(net1, x1).output - evaluate(net2, x2).output).squaredNorm();
        const double bound = cert.gammas.bound(x1, x2);
        if (err > bound + options.bound_tolerance) {
            ++report.bound_violations;
            if (static_cast<int>(report.violations.size()) < options.max_recorded_witnesses + 8) {
                CheckViolation v;
                v.kind = "bound";
                v.detail = "error^2 " + std::to_string(err) + " exceeds bound " + std::to_string(bound);
                v.x1 = x1;
                v.x2 = x2;
                v.error_sq = err;
                v.bound = bound;
                report.violations.push_back(std::move(v));
            }
        }
    }

    report.valid = report.violations.empty();
    return report;
}

} // namespace simbound
