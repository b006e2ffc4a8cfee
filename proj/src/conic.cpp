#include "simbound/conic.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "simbound/error.hpp"

#ifndef SIMBOUND_DEFAULT_DRIVER
#define SIMBOUND_DEFAULT_DRIVER ""
#endif

namespace simbound {

SolverOptions::SolverOptions() : backend(default_sdp_backend()), python("python3") {}

std::string default_sdp_backend() {
    if (const char *env = std::getenv("SIMBOUND_SDP_BACKEND"); env && *env)
        return env;
    return "clarabel";
}

std::string to_string(ConicStatus s) {
    switch (s) {
    case ConicStatus::Optimal:
        return "optimal";
    case ConicStatus::NearOptimal:
        return "near_optimal";
    case ConicStatus::Infeasible:
        return "infeasible";
    case ConicStatus::Unbounded:
        return "unbounded";
    case ConicStatus::Failure:
        return "numerical_failure";
    }
    return "numerical_failure";
}

void ObjectiveWeights::validate() const {
    for (double w : {w_x1, w_x2, w_x, w_affine})
        if (!(w >= 0.0))
            throw FormatError("objective weights must be non-negative");
    if (w_x1 == 0.0 && w_x2 == 0.0 && w_x == 0.0 && w_affine == 0.0)
        throw FormatError("objective weights must not all be zero");
}

ConicProblem export_conic(const LmiSystem &lmi, const VariableLayout &layout, const ObjectiveWeights &weights,
                          double epsilon_shift) {
    weights.validate();
    if (lmi.num_vars() != layout.size())
        throw DimensionError("LMI system and variable layout disagree on the variable count");

    ConicProblem p;
    p.num_vars = layout.size();
    p.objective = Eigen::VectorXd::Zero(p.num_vars);
    p.objective[0] = weights.w_x1;
    p.objective[1] = weights.w_x2;
    p.objective[2] = weights.w_x;
    p.objective[3] = weights.w_affine;

    const std::vector<int> nonneg = layout.nonneg_indices();
    p.nonneg_rows = static_cast<int>(nonneg.size());
    const int m = lmi.dim();
    p.psd_dims = {m};
    const int svec_len = m * (m + 1) / 2;
    p.b.assign(static_cast<size_t>(p.nonneg_rows + svec_len), 0.0);

    for (int row = 0; row < p.nonneg_rows; ++row) {
        p.a_rows.push_back(row);
        p.a_cols.push_back(nonneg[static_cast<size_t>(row)]);
        p.a_vals.push_back(-1.0);
    }

    // Scaled svec, lower triangle column-major: entry (r, c), r >= c, lands
    // at colstart(c) + r - c with off-diagonals scaled by sqrt(2).
    const double rt2 = std::sqrt(2.0);
    std::vector<int> colstart(static_cast<size_t>(m));
    for (int c = 0, acc = 0; c < m; ++c) {
        colstart[static_cast<size_t>(c)] = acc;
        acc += m - c;
    }
    auto svec_row = [&](int r, int c) { return p.nonneg_rows + colstart[static_cast<size_t>(c)] + (r - c); };

    // s_psd = b_psd - A_psd v must equal svec(-L(v) - eps I).
    for (int i = 0; i < m; ++i)
        p.b[static_cast<size_t>(svec_row(i, i))] = -epsilon_shift;
    for (const LmiEntry &e : lmi.constant())
        p.b[static_cast<size_t>(svec_row(e.row, e.col))] -= e.value * (e.row == e.col ? 1.0 : rt2);
    for (int var = 0; var < lmi.num_vars(); ++var)
        for (const LmiEntry &e : lmi.coefficient(var)) {
            p.a_rows.push_back(svec_row(e.row, e.col));
            p.a_cols.push_back(var);
            p.a_vals.push_back(e.value * (e.row == e.col ? 1.0 : rt2));
        }
    return p;
}

namespace {

namespace fs = std::filesystem;

std::string resolve_driver(const SolverOptions &options) {
    if (!options.driver_path.empty())
        return options.driver_path;
    if (const char *env = std::getenv("SIMBOUND_SOLVER_DRIVER"); env && *env)
        return env;
    const std::string compiled = SIMBOUND_DEFAULT_DRIVER;
    if (!compiled.empty())
        return compiled;
    throw SolverError("no conic driver configured: set SIMBOUND_SOLVER_DRIVER or SolverOptions::driver_path");
}

/// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;

    TempDir() {
        std::random_device rd;
        std::uniform_int_distribution<uint64_t> dist;
        for (int attempt = 0; attempt < 16; ++attempt) {
            fs::path candidate = fs::temp_directory_path() / ("simbound-" + std::to_string(dist(rd)));
            std::error_code ec;
            if (fs::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
        throw SolverError("could not create a scratch directory for the solver driver");
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

ConicStatus status_from_string(const std::string &s) {
    if (s == "optimal")
        return ConicStatus::Optimal;
    if (s == "near_optimal")
        return ConicStatus::NearOptimal;
    if (s == "infeasible")
        return ConicStatus::Infeasible;
    if (s == "unbounded")
        return ConicStatus::Unbounded;
    return ConicStatus::Failure;
}

std::string read_tail(const fs::path &p, size_t max_bytes = 2000) {
    std::ifstream in(p);
    if (!in)
        return "";
    std::stringstream buf;
    buf << in.rdbuf();
    std::string s = buf.str();
    if (s.size() > max_bytes)
        s = "..." + s.substr(s.size() - max_bytes);
    return s;
}

} // namespace

ConicSolution SubprocessConicSolver::solve(const ConicProblem &problem, const SolverOptions &options) {
    if (problem.num_vars == 0 && problem.b.empty()) {
        ConicSolution trivial;
        trivial.status = ConicStatus::Optimal;
        trivial.backend = options.backend;
        trivial.backend_status = "trivial";
        trivial.x = Eigen::VectorXd();
        return trivial;
    }

    nlohmann::json doc;
    doc["num_vars"] = problem.num_vars;
    doc["objective"] = std::vector<double>(problem.objective.data(), problem.objective.data() + problem.objective.size());
    doc["nonneg_rows"] = problem.nonneg_rows;
    doc["psd_dims"] = problem.psd_dims;
    doc["b"] = problem.b;
    doc["A"] = {{"rows", problem.a_rows}, {"cols", problem.a_cols}, {"vals", problem.a_vals}};
    doc["options"] = {{"max_iterations", options.max_iterations},
                      {"tolerance", options.tolerance},
                      {"verbose", options.verbose}};

    TempDir dir;
    const fs::path problem_path = dir.path / "problem.json";
    const fs::path solution_path = dir.path / "solution.json";
    const fs::path stderr_path = dir.path / "stderr.log";
    {
        std::ofstream out(problem_path);
        out << doc.dump();
    }

    const std::string driver = resolve_driver(options);
    std::ostringstream cmd;
    cmd << options.python << " \"" << driver << "\" --backend " << options.backend << " \"" << problem_path.string()
        << "\" \"" << solution_path.string() << "\" 2> \"" << stderr_path.string() << "\"";
    const int rc = std::system(cmd.str().c_str());
    if (rc != 0)
        throw SolverError("conic driver failed (backend " + options.backend + ", exit " + std::to_string(rc) +
                          "): " + read_tail(stderr_path));

    std::ifstream in(solution_path);
    if (!in)
        throw SolverError("conic driver produced no solution file: " + read_tail(stderr_path));
    nlohmann::json sol;
    try {
        in >> sol;
    } catch (const nlohmann::json::exception &e) {
        throw SolverError(std::string("malformed solution file: ") + e.what());
    }

    ConicSolution out;
    out.backend = sol.value("backend", options.backend);
    out.backend_status = sol.value("backend_status", "");
    out.status = status_from_string(sol.value("status", "numerical_failure"));
    out.objective = sol.value("objective", 0.0);
    out.solve_seconds = sol.value("solve_seconds", 0.0);
    out.iterations = sol.value("iterations", 0);
    const auto &x = sol["x"];
    out.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.size()));
    for (size_t i = 0; i < x.size(); ++i)
        out.x[static_cast<Eigen::Index>(i)] = x.at(i).get<double>();
    if (out.status != ConicStatus::Infeasible && out.x.size() != problem.num_vars &&
        out.status != ConicStatus::Failure)
        throw SolverError("solution has " + std::to_string(out.x.size()) + " variables, expected " +
                          std::to_string(problem.num_vars));
    return out;
}

} // namespace simbound
