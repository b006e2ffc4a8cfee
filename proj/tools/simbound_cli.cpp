// Command-line front end: certify / check / transform / experiment.
//
// Exit codes: 0 success or valid certificate, 1 usage or input errors,
// 2 infeasible problem or invalid certificate, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "simbound/error.hpp"
#include "simbound/experiments.hpp"
#include "simbound/solve.hpp"
#include "simbound/transforms.hpp"
#include "simbound/verify.hpp"

namespace fs = std::filesystem;
using namespace simbound;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_csv_doubles(const std::string &text, size_t expected, const std::string &what) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ','))
        values.push_back(std::stod(token));
    if (values.size() != expected)
        throw FormatError(what + " needs " + std::to_string(expected) + " comma-separated values, got \"" + text +
                          "\"");
    return values;
}

FixedPointFormat parse_format(const std::string &text) {
    const auto v = parse_csv_doubles(text, 2, "--quantise");
    return FixedPointFormat(static_cast<int>(v[0]), static_cast<int>(v[1]));
}

PruneSpec parse_prune(const std::string &text) {
    PruneSpec spec;
    std::stringstream stream(text);
    std::string token;
    bool selector_seen = false;
    while (std::getline(stream, token, ',')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw FormatError("--prune expects key=value pairs, got \"" + token + "\"");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "count") {
            spec.count = std::stoi(value);
            selector_seen = true;
        } else if (key == "threshold") {
            spec.threshold = std::stod(value);
            selector_seen = true;
        } else if (key == "norm") {
            spec.norm = value == "inf" ? std::numeric_limits<double>::infinity() : std::stod(value);
        } else if (key == "bias") {
            spec.include_bias = value != "0" && value != "false";
        } else {
            throw FormatError("--prune: unknown key \"" + key + "\"");
        }
    }
    if (!selector_seen)
        throw FormatError("--prune needs count=N or threshold=T");
    return spec;
}

struct ProblemArgs {
    std::string model_path;
    std::string model2_path;
    std::string quantise;
    std::string prune;
    std::string coupling;
    std::string box = "-1,1";
    std::string box2;
    bool cross_slope = false;

    void add_to(CLI::App *cmd, bool transform_only = false) {
        cmd->add_option("--model", model_path, "first/original model JSON file")->required();
        if (!transform_only) {
            cmd->add_option("--model2", model2_path, "second model JSON file (independent coupling)");
            cmd->add_option("--coupling", coupling, "independent | quantised | identical (overrides the default)");
            cmd->add_option("--box", box, "input box lo,hi applied to every coordinate (default -1,1)");
            cmd->add_option("--box2", box2, "second input box lo,hi (defaults to --box)");
            cmd->add_flag("--cross-slope", cross_slope, "add cross-network slope constraints");
        }
        cmd->add_option("--quantise", quantise, "derive the second model by quantising: IB,FB");
        cmd->add_option("--prune", prune,
                        "derive the second model by pruning: count=N|threshold=T[,norm=P][,bias=0|1]");
    }

    nlohmann::json snapshot() const {
        return {{"model", model_path},   {"model2", model2_path}, {"quantise", quantise},
                {"prune", prune},        {"coupling", coupling},  {"box", box},
                {"box2", box2},          {"cross_slope", cross_slope}};
    }
};

struct Problem {
    NeuralNetwork net1;
    NeuralNetwork net2;
    InputSpec spec;
};

Problem build_problem(const ProblemArgs &args) {
    if ((args.model2_path.empty() ? 0 : 1) + (args.quantise.empty() ? 0 : 1) + (args.prune.empty() ? 0 : 1) > 1)
        throw FormatError("--model2, --quantise and --prune are mutually exclusive");
    NeuralNetwork net1 = load_model(args.model_path);
    std::optional<FixedPointFormat> fmt;
    Coupling coupling = Coupling::Identical;
    std::optional<NeuralNetwork> net2;
    if (!args.model2_path.empty()) {
        net2 = load_model(args.model2_path);
        coupling = Coupling::Independent;
    } else if (!args.quantise.empty()) {
        fmt = parse_format(args.quantise);
        net2 = quantize_network(net1, *fmt);
        coupling = Coupling::Quantised;
    } else if (!args.prune.empty()) {
        net2 = prune_network(net1, parse_prune(args.prune));
    } else {
        net2 = net1; // self-comparison bounds a single network's output spread
    }
    if (!args.coupling.empty())
        coupling = coupling_from_string(args.coupling);
    if (coupling == Coupling::Quantised && !fmt)
        throw FormatError("quantised coupling needs --quantise IB,FB to define the grid");

    const int n_x = net1.input_dim();
    const auto b1 = parse_csv_doubles(args.box, 2, "--box");
    const auto b2 = args.box2.empty() ? b1 : parse_csv_doubles(args.box2, 2, "--box2");
    InputSpec spec;
    spec.lower1 = Eigen::VectorXd::Constant(n_x, b1[0]);
    spec.upper1 = Eigen::VectorXd::Constant(n_x, b1[1]);
    spec.lower2 = Eigen::VectorXd::Constant(n_x, b2[0]);
    spec.upper2 = Eigen::VectorXd::Constant(n_x, b2[1]);
    spec.coupling = coupling;
    spec.format = fmt;
    spec.validate(n_x);
    return Problem{std::move(net1), std::move(*net2), std::move(spec)};
}

void write_snapshot(const fs::path &beside, const nlohmann::json &doc) {
    fs::path path = beside;
    path += ".config.json";
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write config snapshot: " + path.string());
    out << doc.dump(2) << "\n";
}

nlohmann::json dense_matrix_json(const Eigen::MatrixXd &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

int run_certify(const ProblemArgs &pargs, const std::string &weights_text, const std::string &out_path,
                SolveOptions solve_options, bool audit) {
    const Problem problem = build_problem(pargs);
    const auto w = parse_csv_doubles(weights_text, 4, "--weights");
    ObjectiveWeights weights{w[0], w[1], w[2], w[3]};
    solve_options.qc.cross_slope = pargs.cross_slope;

    const BoundCertificate cert =
        solve_similarity_bound(problem.net1, problem.net2, problem.spec, weights, solve_options);
    save_certificate(cert, out_path);
    nlohmann::json snapshot = pargs.snapshot();
    snapshot["command"] = "certify";
    snapshot["weights"] = {weights.w_x1, weights.w_x2, weights.w_x, weights.w_affine};
    snapshot["backend"] = solve_options.solver.backend;
    snapshot["out"] = out_path;
    write_snapshot(out_path, snapshot);

    if (audit) {
        const CompactForm cf = CompactForm::build(problem.net1, problem.net2);
        nlohmann::json doc;
        doc["input_qc"] = dense_matrix_json(input_qc(problem.spec, cert.multipliers, cf.eta()).matrix);
        doc["activation_qc"] =
            dense_matrix_json(activation_qc(cf, problem.net1, problem.net2, cert.multipliers).matrix);
        doc["quantisation_qc"] = dense_matrix_json(
            quantisation_qc(problem.spec, problem.spec.format, cert.multipliers, cf.eta()).matrix);
        doc["error_qc"] = dense_matrix_json(error_qc(problem.net1, problem.net2, cf, cert.gammas).matrix);
        fs::path audit_path(out_path);
        audit_path += ".audit.json";
        std::ofstream out(audit_path);
        out << doc.dump() << "\n";
    }

    std::cout << "status: " << to_string(cert.status) << "\n";
    if (cert.accepted()) {
        std::cout << "gamma_x1 = " << cert.gammas.x1 << "\n"
                  << "gamma_x2 = " << cert.gammas.x2 << "\n"
                  << "gamma_x  = " << cert.gammas.x << "\n"
                  << "gamma    = " << cert.gammas.affine << "\n"
                  << "objective = " << cert.objective_value << "\n"
                  << "lmi_max_eigenvalue = " << cert.lmi_max_eigenvalue << "\n";
        return kExitOk;
    }
    return cert.status == SolveStatus::Infeasible ? kExitInvalid : kExitNumerical;
}

int run_check(const ProblemArgs &pargs, const std::string &cert_path, int samples, std::uint64_t seed,
              const std::string &report_path) {
    const Problem problem = build_problem(pargs);
    const BoundCertificate cert = load_certificate(cert_path);
    CheckOptions options;
    options.samples = samples;
    options.seed = seed;
    const CheckReport report = check_certificate(cert, problem.net1, problem.net2, problem.spec, options);
    std::cout << report.summary() << "\n";
    if (!report_path.empty()) {
        nlohmann::json doc;
        doc["valid"] = report.valid;
        doc["lmi_max_eigenvalue"] = report.lmi_max_eigenvalue;
        doc["samples"] = report.samples;
        doc["bound_violations"] = report.bound_violations;
        nlohmann::json violations = nlohmann::json::array();
        for (const CheckViolation &v : report.violations) {
            nlohmann::json entry{{"kind", v.kind}, {"detail", v.detail}};
            if (v.x1.size() > 0) {
                entry["x1"] = std::vector<double>(v.x1.data(), v.x1.data() + v.x1.size());
                entry["x2"] = std::vector<double>(v.x2.data(), v.x2.data() + v.x2.size());
                entry["error_sq"] = v.error_sq;
                entry["bound"] = v.bound;
            }
            violations.push_back(std::move(entry));
        }
        doc["violations"] = std::move(violations);
        std::ofstream out(report_path);
        if (!out)
            throw FormatError("cannot write report: " + report_path);
        out << doc.dump(2) << "\n";
        nlohmann::json snapshot = pargs.snapshot();
        snapshot["command"] = "check";
        snapshot["cert"] = cert_path;
        snapshot["samples"] = samples;
        snapshot["seed"] = seed;
        write_snapshot(report_path, snapshot);
    }
    return report.valid ? kExitOk : kExitInvalid;
}

int run_transform(const ProblemArgs &pargs, const std::string &out_path) {
    if (pargs.quantise.empty() == pargs.prune.empty())
        throw FormatError("transform needs exactly one of --quantise / --prune");
    const NeuralNetwork net = load_model(pargs.model_path);
    const NeuralNetwork result = pargs.quantise.empty() ? prune_network(net, parse_prune(pargs.prune))
                                                        : quantize_network(net, parse_format(pargs.quantise));
    save_model(result, out_path);
    nlohmann::json snapshot = pargs.snapshot();
    snapshot["command"] = "transform";
    snapshot["out"] = out_path;
    write_snapshot(out_path, snapshot);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int run_experiment(const std::string &suite, const std::string &config_path, const std::string &out_dir,
                   const std::string &backend) {
    ExperimentConfig config;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw FormatError("cannot open experiment config: " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        config = ExperimentConfig::from_json_text(buf.str());
        if (!suite.empty())
            config.suite = suite;
    } else {
        config = ExperimentConfig::defaults_for(suite);
    }
    if (!backend.empty())
        config.solve.solver.backend = backend;
    config.validate();
    const ExperimentReport report = run_experiment(config);
    write_experiment_outputs(report, out_dir);
    int rejected = 0;
    for (const SeedRow &row : report.rows)
        if (row.status != SolveStatus::Optimal && row.status != SolveStatus::NearOptimal)
            ++rejected;
    std::cout << "suite " << config.suite << ": " << report.rows.size() << " instances, " << rejected
              << " rejected; outputs in " << out_dir << "\n";
    return rejected == 0 ? kExitOk : kExitNumerical;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"worst-case output-error bound certifier for pairs of ReLU networks"};
    app.require_subcommand(1);

    ProblemArgs certify_args;
    std::string certify_weights = "1,1,1,1";
    std::string certify_out = "certificate.json";
    bool audit = false;
    SolveOptions solve_options;
    auto *certify = app.add_subcommand("certify", "solve for a bound certificate");
    certify_args.add_to(certify);
    certify->add_option("--weights", certify_weights, "objective weights w_x1,w_x2,w_x,w_affine");
    certify->add_option("--out", certify_out, "certificate output path");
    certify->add_option("--solver", solve_options.solver.backend,
                        "conic backend: clarabel | cvxopt | scs (env SIMBOUND_SDP_BACKEND)");
    certify->add_option("--max-iterations", solve_options.solver.max_iterations, "solver iteration cap");
    certify->add_option("--tolerance", solve_options.solver.tolerance, "solver tolerance");
    certify->add_option("--epsilon", solve_options.solver.epsilon_shift, "strictness margin for the LMI");
    certify->add_flag("--audit", audit, "also write the assembled constraint matrices");

    ProblemArgs check_args;
    std::string check_cert;
    std::string check_report;
    int check_samples = 10000;
    std::uint64_t check_seed = 0x5eedu;
    auto *check = app.add_subcommand("check", "re-validate a certificate against its problem");
    check_args.add_to(check);
    check->add_option("--cert", check_cert, "certificate JSON path")->required();
    check->add_option("--samples", check_samples, "admissible input pairs to sample");
    check->add_option("--seed", check_seed, "sampling seed");
    check->add_option("--report", check_report, "write the check report JSON here");

    ProblemArgs transform_args;
    std::string transform_out = "model_out.json";
    auto *transform = app.add_subcommand("transform", "quantise or prune a model file");
    transform_args.add_to(transform, /*transform_only=*/true);
    transform->add_option("--out", transform_out, "output model path");

    std::string exp_suite;
    std::string exp_config;
    std::string exp_out = "experiment_out";
    std::string exp_backend;
    auto *experiment = app.add_subcommand("experiment", "run a reproduction suite");
    experiment->add_option("--suite", exp_suite, "similarity | quantisation | worstcase | pruning");
    experiment->add_option("--config", exp_config, "experiment config JSON");
    experiment->add_option("--out-dir", exp_out, "output directory");
    experiment->add_option("--solver", exp_backend, "conic backend override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (certify->parsed())
            return run_certify(certify_args, certify_weights, certify_out, solve_options, audit);
        if (check->parsed())
            return run_check(check_args, check_cert, check_samples, check_seed, check_report);
        if (transform->parsed())
            return run_transform(transform_args, transform_out);
        if (experiment->parsed()) {
            if (exp_suite.empty() && exp_config.empty())
                throw FormatError("experiment needs --suite or --config");
            return run_experiment(exp_suite, exp_config, exp_out, exp_backend);
        }
    } catch (const SolverError &e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
