#include "simbound/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "simbound/error.hpp"

namespace simbound {

namespace {

nlohmann::json json_number(double v) {
    if (std::isfinite(v))
        return v;
    if (std::isnan(v))
        return "nan";
    return v > 0 ? "inf" : "-inf";
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ExperimentConfig ExperimentConfig::defaults_for(const std::string &suite) {
    ExperimentConfig cfg;
    cfg.suite = suite;
    if (suite == "similarity" || suite == "quantisation")
        return cfg;
    if (suite == "worstcase") {
        cfg.num_seeds = 20;
        cfg.layer_counts = {2};
        cfg.width = 10; // 20 hidden neurons over two layers
        return cfg;
    }
    if (suite == "pruning") {
        cfg.num_seeds = 1;
        cfg.layer_counts = {4};
        cfg.width = 5; // 20 hidden neurons over four layers
        cfg.input_dim = 2;
        return cfg;
    }
    throw FormatError("unknown experiment suite: \"" + suite + "\"");
}

void ExperimentConfig::validate() const {
    if (suite != "similarity" && suite != "quantisation" && suite != "worstcase" && suite != "pruning")
        throw FormatError("unknown experiment suite: \"" + suite + "\"");
    if (num_seeds <= 0)
        throw FormatError("experiment needs at least one seed");
    if (layer_counts.empty())
        throw FormatError("experiment needs at least one layer count");
    for (int l : layer_counts)
        if (l < 1)
            throw FormatError("layer counts must be >= 1");
    if (width < 1 || input_dim < 1 || output_dim < 1)
        throw FormatError("network dimensions must be >= 1");
    if (box_radius <= 0.0)
        throw FormatError("box radius must be positive");
    if (tightness_grid < 2)
        throw FormatError("tightness grid needs at least 2 points");
    weights.validate();
    if (suite == "quantisation" || suite == "worstcase") {
        FixedPointFormat check(integer_bits, fraction_bits); // throws on bad values
        (void)check;
    }
    if (suite == "worstcase") {
        if (fraction_bits_list.empty())
            throw FormatError("worst-case sweep needs at least one fraction-bit count");
        if (worst_case_grid < 2)
            throw FormatError("worst-case grid needs at least 2 points");
    }
    if (suite == "pruning") {
        if (surface_grid < 2)
            throw FormatError("surface grid needs at least 2 points");
        if (prune_count < 0)
            throw FormatError("prune count must be >= 0");
        for (int l : layer_counts)
            if (prune_count >= width * l)
                throw FormatError("prune count " + std::to_string(prune_count) + " must stay below M = " +
                                  std::to_string(width * l));
    }
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(std::string("experiment config parse error: ") + e.what());
    }
    ExperimentConfig cfg = defaults_for(doc.value("suite", "similarity"));
    cfg.base_seed = doc.value("base_seed", cfg.base_seed);
    cfg.num_seeds = doc.value("num_seeds", cfg.num_seeds);
    if (doc.contains("layer_counts"))
        cfg.layer_counts = doc.at("layer_counts").get<std::vector<int>>();
    cfg.width = doc.value("width", cfg.width);
    cfg.input_dim = doc.value("input_dim", cfg.input_dim);
    cfg.output_dim = doc.value("output_dim", cfg.output_dim);
    cfg.box_radius = doc.value("box_radius", cfg.box_radius);
    if (doc.contains("weights")) {
        const auto &w = doc.at("weights");
        cfg.weights.w_x1 = w.at(0).get<double>();
        cfg.weights.w_x2 = w.at(1).get<double>();
        cfg.weights.w_x = w.at(2).get<double>();
        cfg.weights.w_affine = w.at(3).get<double>();
    }
    cfg.tightness_grid = doc.value("tightness_grid", cfg.tightness_grid);
    cfg.integer_bits = doc.value("integer_bits", cfg.integer_bits);
    cfg.fraction_bits = doc.value("fraction_bits", cfg.fraction_bits);
    if (doc.contains("fraction_bits_list"))
        cfg.fraction_bits_list = doc.at("fraction_bits_list").get<std::vector<int>>();
    cfg.worst_case_grid = doc.value("worst_case_grid", cfg.worst_case_grid);
    cfg.prune_count = doc.value("prune_count", cfg.prune_count);
    cfg.surface_grid = doc.value("surface_grid", cfg.surface_grid);
    if (doc.contains("backend"))
        cfg.solve.solver.backend = doc.at("backend").get<std::string>();
    cfg.solve.solver.max_iterations = doc.value("max_iterations", cfg.solve.solver.max_iterations);
    cfg.solve.solver.tolerance = doc.value("tolerance", cfg.solve.solver.tolerance);
    cfg.solve.solver.epsilon_shift = doc.value("epsilon_shift", cfg.solve.solver.epsilon_shift);
    cfg.solve.qc.cross_slope = doc.value("cross_slope", cfg.solve.qc.cross_slope);
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::to_json_text() const {
    nlohmann::json doc;
    doc["suite"] = suite;
    doc["base_seed"] = base_seed;
    doc["num_seeds"] = num_seeds;
    doc["layer_counts"] = layer_counts;
    doc["width"] = width;
    doc["input_dim"] = input_dim;
    doc["output_dim"] = output_dim;
    doc["box_radius"] = box_radius;
    doc["weights"] = {weights.w_x1, weights.w_x2, weights.w_x, weights.w_affine};
    doc["tightness_grid"] = tightness_grid;
    doc["integer_bits"] = integer_bits;
    doc["fraction_bits"] = fraction_bits;
    doc["fraction_bits_list"] = fraction_bits_list;
    doc["worst_case_grid"] = worst_case_grid;
    doc["prune_count"] = prune_count;
    doc["surface_grid"] = surface_grid;
    doc["backend"] = solve.solver.backend;
    doc["max_iterations"] = solve.solver.max_iterations;
    doc["tolerance"] = solve.solver.tolerance;
    doc["epsilon_shift"] = solve.solver.epsilon_shift;
    doc["cross_slope"] = solve.qc.cross_slope;
    doc["random_nets"] = "weights and biases i.i.d. N(0, 1/fan_in)";
    return doc.dump(2);
}

namespace {

struct TStats {
    double mean_T = 0.0;
    double max_T = 0.0;
    double min_T = 0.0;
    int neg_inf = 0;
    int unsound = 0;
    int samples = 0;
};

TStats t_stats(const BoundCertificate &cert, const NeuralNetwork &net1, const NeuralNetwork &net2,
               const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> &pairs) {
    TStats stats;
    stats.samples = static_cast<int>(pairs.size());
    double sum = 0.0;
    int finite = 0;
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const auto &[x1, x2] : pairs) {
        const TightnessSample s = tightness(cert, net1, net2, x1, x2);
        if (!s.sound)
            ++stats.unsound;
        if (std::isfinite(s.T)) {
            sum += s.T;
            ++finite;
            best = std::max(best, s.T);
            worst = std::min(worst, s.T);
        } else if (s.T < 0.0) {
            ++stats.neg_inf;
        }
    }
    if (finite > 0) {
        stats.mean_T = sum / finite;
        stats.max_T = best;
        stats.min_T = worst;
    } else {
        stats.mean_T = -std::numeric_limits<double>::infinity();
        stats.max_T = -std::numeric_limits<double>::infinity();
        stats.min_T = -std::numeric_limits<double>::infinity();
    }
    return stats;
}

std::vector<double> even_grid(double lo, double hi, int points) {
    std::vector<double> xs(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
        xs[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return xs;
}

/// Input pairs for the T statistics: a deterministic grid when the input is
/// scalar, otherwise seeded uniform samples.
std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> tightness_pairs(const InputSpec &spec, int grid,
                                                                         std::uint64_t seed) {
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
    const int n_x = static_cast<int>(spec.lower1.size());
    if (n_x == 1 && spec.coupling == Coupling::Independent) {
        const auto xs1 = even_grid(spec.lower1[0], spec.upper1[0], grid);
        const auto xs2 = even_grid(spec.lower2[0], spec.upper2[0], grid);
        pairs.reserve(xs1.size() * xs2.size());
        for (double a : xs1)
            for (double b : xs2)
                pairs.emplace_back(Eigen::VectorXd::Constant(1, a), Eigen::VectorXd::Constant(1, b));
        return pairs;
    }
    if (n_x == 1 && spec.coupling == Coupling::Quantised) {
        for (double a : even_grid(spec.lower1[0], spec.upper1[0], grid))
            pairs.emplace_back(Eigen::VectorXd::Constant(1, a),
                               Eigen::VectorXd::Constant(1, quantize_scalar(a, *spec.format)));
        return pairs;
    }
    if (n_x == 1 && spec.coupling == Coupling::Identical) {
        for (double a : even_grid(spec.lower1[0], spec.upper1[0], grid))
            pairs.emplace_back(Eigen::VectorXd::Constant(1, a), Eigen::VectorXd::Constant(1, a));
        return pairs;
    }
    std::mt19937_64 rng(seed);
    const int count = grid * grid;
    pairs.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        pairs.push_back(sample_admissible(spec, rng));
    return pairs;
}

} // namespace

ExperimentReport run_similarity_experiment(const ExperimentConfig &config) {
    ExperimentConfig cfg = config;
    cfg.suite = "similarity";
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;
    const InputSpec spec = InputSpec::symmetric_box(cfg.box_radius, cfg.input_dim, Coupling::Independent);
    for (int layers : cfg.layer_counts) {
        const std::vector<int> widths(static_cast<size_t>(layers), cfg.width);
        for (int s = 0; s < cfg.num_seeds; ++s) {
            std::mt19937_64 rng(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(layers),
                                         static_cast<std::uint64_t>(s)));
            const NeuralNetwork net1 = random_network(rng, cfg.input_dim, widths, cfg.output_dim);
            const NeuralNetwork net2 = random_network(rng, cfg.input_dim, widths, cfg.output_dim);
            const BoundCertificate cert = solve_similarity_bound(net1, net2, spec, cfg.weights, cfg.solve);
            SeedRow row;
            row.seed = cfg.base_seed + static_cast<std::uint64_t>(s);
            row.layers = layers;
            row.status = cert.status;
            row.solve_seconds = cert.solve_seconds;
            row.total_seconds = cert.total_seconds;
            if (cert.accepted()) {
                row.gammas = cert.gammas;
                const auto pairs = tightness_pairs(spec, cfg.tightness_grid,
                                                   mix_seed(cfg.base_seed, 0x71u, static_cast<std::uint64_t>(s)));
                const TStats stats = t_stats(cert, net1, net2, pairs);
                row.mean_T = stats.mean_T;
                row.max_T = stats.max_T;
                row.min_T = stats.min_T;
                row.neg_inf_count = stats.neg_inf;
                row.unsound_count = stats.unsound;
                row.samples = stats.samples;
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

ExperimentReport run_quantisation_experiment(const ExperimentConfig &config) {
    ExperimentConfig cfg = config;
    cfg.suite = "quantisation";
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;
    const FixedPointFormat fmt(cfg.integer_bits, cfg.fraction_bits);
    const InputSpec spec = InputSpec::symmetric_box(cfg.box_radius, cfg.input_dim, Coupling::Quantised, fmt);
    for (int layers : cfg.layer_counts) {
        const std::vector<int> widths(static_cast<size_t>(layers), cfg.width);
        for (int s = 0; s < cfg.num_seeds; ++s) {
            std::mt19937_64 rng(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(layers),
                                         static_cast<std::uint64_t>(s)));
            const NeuralNetwork net1 = random_network(rng, cfg.input_dim, widths, cfg.output_dim);
            const NeuralNetwork net2 = quantize_network(net1, fmt);
            const BoundCertificate cert = solve_similarity_bound(net1, net2, spec, cfg.weights, cfg.solve);
            SeedRow row;
            row.seed = cfg.base_seed + static_cast<std::uint64_t>(s);
            row.layers = layers;
            row.fraction_bits = cfg.fraction_bits;
            row.delta = fmt.step();
            row.status = cert.status;
            row.solve_seconds = cert.solve_seconds;
            row.total_seconds = cert.total_seconds;
            if (cert.accepted()) {
                row.gammas = cert.gammas;
                const auto pairs = tightness_pairs(spec, cfg.tightness_grid,
                                                   mix_seed(cfg.base_seed, 0x72u, static_cast<std::uint64_t>(s)));
                const TStats stats = t_stats(cert, net1, net2, pairs);
                row.mean_T = stats.mean_T;
                row.max_T = stats.max_T;
                row.min_T = stats.min_T;
                row.neg_inf_count = stats.neg_inf;
                row.unsound_count = stats.unsound;
                row.samples = stats.samples;
                if (s == 0) {
                    std::vector<CurvePoint> curve;
                    for (const auto &[x1, x2] : pairs) {
                        const TightnessSample t = tightness(cert, net1, net2, x1, x2);
                        curve.push_back({x1[0], t.error_sq, t.bound_value});
                    }
                    report.curves[layers] = std::move(curve);
                }
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

ExperimentReport run_worst_case_experiment(const ExperimentConfig &config) {
    ExperimentConfig cfg = config;
    cfg.suite = "worstcase";
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;
    for (int layers : cfg.layer_counts) {
        const std::vector<int> widths(static_cast<size_t>(layers), cfg.width);
        for (int fb : cfg.fraction_bits_list) {
            const FixedPointFormat fmt(cfg.integer_bits, fb);
            const InputSpec spec =
                InputSpec::symmetric_box(cfg.box_radius, cfg.input_dim, Coupling::Quantised, fmt);
            for (int s = 0; s < cfg.num_seeds; ++s) {
                // Same seed stream across fraction-bit levels so each level
                // sees the same sequence of nets.
                std::mt19937_64 rng(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(layers),
                                             static_cast<std::uint64_t>(s)));
                const NeuralNetwork net1 = random_network(rng, cfg.input_dim, widths, cfg.output_dim);
                const NeuralNetwork net2 = quantize_network(net1, fmt);
                const BoundCertificate cert = solve_similarity_bound(net1, net2, spec, cfg.weights, cfg.solve);
                SeedRow row;
                row.seed = cfg.base_seed + static_cast<std::uint64_t>(s);
                row.layers = layers;
                row.fraction_bits = fb;
                row.delta = fmt.step();
                row.status = cert.status;
                row.solve_seconds = cert.solve_seconds;
                row.total_seconds = cert.total_seconds;
                if (cert.accepted()) {
                    row.gammas = cert.gammas;
                    double max_bound = -1.0, max_err = -1.0;
                    for (double a : even_grid(-cfg.box_radius, cfg.box_radius, cfg.worst_case_grid)) {
                        const Eigen::VectorXd x1 = Eigen::VectorXd::Constant(1, a);
                        Eigen::VectorXd x2(1);
                        x2[0] = quantize_scalar(a, fmt);
                        const double err = (evaluate(net1, x1).output - evaluate(net2, x2).output).squaredNorm();
                        const double bound = cert.gammas.bound(x1, x2);
                        if (bound > max_bound) {
                            max_bound = bound;
                            row.error_at_max_bound = err;
                        }
                        if (err > max_err) {
                            max_err = err;
                            row.bound_at_max_error = bound;
                        }
                    }
                    row.max_bound = max_bound;
                    row.max_error = max_err;
                }
                report.rows.push_back(row);
            }
        }
    }
    return report;
}

ExperimentReport run_pruning_experiment(const ExperimentConfig &config) {
    ExperimentConfig cfg = config;
    cfg.suite = "pruning";
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;
    const InputSpec spec = InputSpec::symmetric_box(cfg.box_radius, cfg.input_dim, Coupling::Identical);
    for (int layers : cfg.layer_counts) {
        const std::vector<int> widths(static_cast<size_t>(layers), cfg.width);
        for (int s = 0; s < cfg.num_seeds; ++s) {
            std::mt19937_64 rng(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(layers),
                                         static_cast<std::uint64_t>(s)));
            const NeuralNetwork net1 = random_network(rng, cfg.input_dim, widths, cfg.output_dim);
            const NeuralNetwork net2 =
                cfg.prune_count == 0 ? net1 : prune_network(net1, PruneSpec::by_count(cfg.prune_count));
            const BoundCertificate cert = solve_similarity_bound(net1, net2, spec, cfg.weights, cfg.solve);
            SeedRow row;
            row.seed = cfg.base_seed + static_cast<std::uint64_t>(s);
            row.layers = layers;
            row.status = cert.status;
            row.solve_seconds = cert.solve_seconds;
            row.total_seconds = cert.total_seconds;
            if (cert.accepted()) {
                row.gammas = cert.gammas;
                double worst = -std::numeric_limits<double>::infinity();
                const bool emit_surface = s == 0 && cfg.input_dim == 2;
                const auto xs = even_grid(-cfg.box_radius, cfg.box_radius, cfg.surface_grid);
                if (cfg.input_dim == 2) {
                    for (double a : xs)
                        for (double b : xs) {
                            Eigen::VectorXd x(2);
                            x << a, b;
                            const double err = (evaluate(net1, x).output - evaluate(net2, x).output).squaredNorm();
                            const double bound = cert.gammas.bound(x, x);
                            worst = std::max(worst, err - bound);
                            if (emit_surface)
                                report.surface.push_back({a, b, err, bound});
                        }
                } else {
                    for (double a : xs) {
                        const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, a);
                        const double err = (evaluate(net1, x).output - evaluate(net2, x).output).squaredNorm();
                        const double bound = cert.gammas.bound(x, x);
                        worst = std::max(worst, err - bound);
                    }
                }
                row.max_violation = worst;
                if (s == 0)
                    report.surface_max_violation = worst;
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig &config) {
    if (config.suite == "similarity")
        return run_similarity_experiment(config);
    if (config.suite == "quantisation")
        return run_quantisation_experiment(config);
    if (config.suite == "worstcase")
        return run_worst_case_experiment(config);
    if (config.suite == "pruning")
        return run_pruning_experiment(config);
    throw FormatError("unknown experiment suite: \"" + config.suite + "\"");
}

std::string ExperimentReport::rows_csv() const {
    std::ostringstream out;
    const std::string &suite = config.suite;
    if (suite == "worstcase") {
        out << "suite,layers,seed,fraction_bits,delta,status,max_bound,error_at_max_bound,max_error,"
               "bound_at_max_error,solve_seconds,total_seconds\n";
        for (const SeedRow &r : rows)
            out << suite << ',' << r.layers << ',' << r.seed << ',' << r.fraction_bits << ',' << fmt_double(r.delta)
                << ',' << to_string(r.status) << ',' << fmt_double(r.max_bound) << ','
                << fmt_double(r.error_at_max_bound) << ',' << fmt_double(r.max_error) << ','
                << fmt_double(r.bound_at_max_error) << ',' << fmt_double(r.solve_seconds) << ','
                << fmt_double(r.total_seconds) << '\n';
        return out.str();
    }
    if (suite == "pruning") {
        out << "suite,layers,seed,status,gamma_x,gamma_x1,gamma_x2,gamma,max_violation,solve_seconds,"
               "total_seconds\n";
        for (const SeedRow &r : rows)
            out << suite << ',' << r.layers << ',' << r.seed << ',' << to_string(r.status) << ','
                << fmt_double(r.gammas.x) << ',' << fmt_double(r.gammas.x1) << ',' << fmt_double(r.gammas.x2) << ','
                << fmt_double(r.gammas.affine) << ',' << fmt_double(r.max_violation) << ','
                << fmt_double(r.solve_seconds) << ',' << fmt_double(r.total_seconds) << '\n';
        return out.str();
    }
    out << "suite,layers,seed,status,gamma_x,gamma_x1,gamma_x2,gamma,mean_T,max_T,min_T,neg_inf_count,"
           "unsound_count,samples,solve_seconds,total_seconds\n";
    for (const SeedRow &r : rows)
        out << suite << ',' << r.layers << ',' << r.seed << ',' << to_string(r.status) << ',' << fmt_double(r.gammas.x)
            << ',' << fmt_double(r.gammas.x1) << ',' << fmt_double(r.gammas.x2) << ',' << fmt_double(r.gammas.affine)
            << ',' << fmt_double(r.mean_T) << ',' << fmt_double(r.max_T) << ',' << fmt_double(r.min_T) << ','
            << r.neg_inf_count << ',' << r.unsound_count << ',' << r.samples << ',' << fmt_double(r.solve_seconds)
            << ',' << fmt_double(r.total_seconds) << '\n';
    return out.str();
}

namespace {

struct SummaryCell {
    int layers = 0;
    int fraction_bits = 0;
    double delta = 0.0;
    int accepted = 0;
    int rejected = 0;
    double gamma_x = 0, gamma_x1 = 0, gamma_x2 = 0, gamma = 0;
    double mean_T = 0, max_T = 0, min_T = 0;
    int mean_T_count = 0;
    double max_bound = 0, error_at_max_bound = 0, max_error = 0, bound_at_max_error = 0;
    double solve_seconds = 0;
    int unsound = 0;
};

} // namespace

std::string ExperimentReport::to_json_text() const {
    // group rows by (layers, fraction_bits)
    std::map<std::pair<int, int>, SummaryCell> cells;
    for (const SeedRow &r : rows) {
        SummaryCell &cell = cells[{r.layers, r.fraction_bits}];
        cell.layers = r.layers;
        cell.fraction_bits = r.fraction_bits;
        cell.delta = r.delta;
        if (r.status != SolveStatus::Optimal && r.status != SolveStatus::NearOptimal) {
            ++cell.rejected;
            continue;
        }
        ++cell.accepted;
        cell.gamma_x += r.gammas.x;
        cell.gamma_x1 += r.gammas.x1;
        cell.gamma_x2 += r.gammas.x2;
        cell.gamma += r.gammas.affine;
        if (std::isfinite(r.mean_T)) {
            cell.mean_T += r.mean_T;
            cell.max_T += r.max_T;
            cell.min_T += r.min_T;
            ++cell.mean_T_count;
        }
        cell.max_bound += r.max_bound;
        cell.error_at_max_bound += r.error_at_max_bound;
        cell.max_error += r.max_error;
        cell.bound_at_max_error += r.bound_at_max_error;
        cell.solve_seconds += r.solve_seconds;
        cell.unsound += r.unsound_count;
    }

    nlohmann::json summaries = nlohmann::json::array();
    for (const auto &[key, cell] : cells) {
        nlohmann::json entry;
        entry["layers"] = cell.layers;
        if (config.suite == "worstcase" || config.suite == "quantisation") {
            entry["fraction_bits"] = cell.fraction_bits;
            entry["delta"] = cell.delta;
        }
        entry["accepted"] = cell.accepted;
        entry["rejected"] = cell.rejected;
        const double n = std::max(1, cell.accepted);
        entry["mean_gamma_x"] = json_number(cell.gamma_x / n);
        entry["mean_gamma_x1"] = json_number(cell.gamma_x1 / n);
        entry["mean_gamma_x2"] = json_number(cell.gamma_x2 / n);
        entry["mean_gamma"] = json_number(cell.gamma / n);
        const double tn = std::max(1, cell.mean_T_count);
        entry["mean_T"] = json_number(cell.mean_T_count ? cell.mean_T / tn : -std::numeric_limits<double>::infinity());
        entry["mean_max_T"] = json_number(cell.mean_T_count ? cell.max_T / tn : -std::numeric_limits<double>::infinity());
        entry["mean_min_T"] = json_number(cell.mean_T_count ? cell.min_T / tn : -std::numeric_limits<double>::infinity());
        if (config.suite == "worstcase") {
            entry["mean_max_bound"] = json_number(cell.max_bound / n);
            entry["mean_error_at_max_bound"] = json_number(cell.error_at_max_bound / n);
            entry["mean_max_error"] = json_number(cell.max_error / n);
            entry["mean_bound_at_max_error"] = json_number(cell.bound_at_max_error / n);
        }
        entry["unsound_samples"] = cell.unsound;
        entry["mean_solve_seconds"] = json_number(cell.solve_seconds / n);
        summaries.push_back(std::move(entry));
    }

    nlohmann::json doc;
    doc["suite"] = config.suite;
    doc["config"] = nlohmann::json::parse(config.to_json_text());
    doc["summaries"] = std::move(summaries);
    if (config.suite == "pruning")
        doc["surface_max_violation"] = json_number(surface_max_violation);
    doc["rows"] = nlohmann::json::parse("[]");
    for (const SeedRow &r : rows) {
        nlohmann::json row;
        row["seed"] = r.seed;
        row["layers"] = r.layers;
        row["status"] = to_string(r.status);
        row["gamma_x"] = json_number(r.gammas.x);
        row["gamma_x1"] = json_number(r.gammas.x1);
        row["gamma_x2"] = json_number(r.gammas.x2);
        row["gamma"] = json_number(r.gammas.affine);
        if (config.suite == "similarity" || config.suite == "quantisation") {
            row["mean_T"] = json_number(r.mean_T);
            row["max_T"] = json_number(r.max_T);
            row["min_T"] = json_number(r.min_T);
            row["neg_inf_count"] = r.neg_inf_count;
            row["unsound_count"] = r.unsound_count;
            row["samples"] = r.samples;
        }
        if (config.suite == "worstcase") {
            row["fraction_bits"] = r.fraction_bits;
            row["delta"] = r.delta;
            row["max_bound"] = json_number(r.max_bound);
            row["error_at_max_bound"] = json_number(r.error_at_max_bound);
            row["max_error"] = json_number(r.max_error);
            row["bound_at_max_error"] = json_number(r.bound_at_max_error);
        }
        if (config.suite == "pruning")
            row["max_violation"] = json_number(r.max_violation);
        row["solve_seconds"] = json_number(r.solve_seconds);
        row["total_seconds"] = json_number(r.total_seconds);
        doc["rows"].push_back(std::move(row));
    }
    return doc.dump(2);
}

void write_experiment_outputs(const ExperimentReport &report, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::filesystem::path &name, const std::string &content) {
        std::ofstream out(dir / name);
        if (!out)
            throw FormatError("cannot write " + (dir / name).string());
        out << content;
    };
    write("config.json", report.config.to_json_text() + "\n");
    write("report.json", report.to_json_text() + "\n");
    write("per_seed.csv", report.rows_csv());
    for (const auto &[layers, curve] : report.curves) {
        std::ostringstream out;
        out << "x,error_sq,bound\n";
        for (const CurvePoint &p : curve)
            out << fmt_double(p.x) << ',' << fmt_double(p.error_sq) << ',' << fmt_double(p.bound) << '\n';
        write("curve_l" + std::to_string(layers) + ".csv", out.str());
    }
    if (!report.surface.empty()) {
        std::ostringstream out;
        out << "x0,x1,error_sq,bound\n";
        for (const auto &p : report.surface)
            out << fmt_double(p[0]) << ',' << fmt_double(p[1]) << ',' << fmt_double(p[2]) << ',' << fmt_double(p[3])
                << '\n';
        write("surface.csv", out.str());
    }
    if (report.config.suite == "worstcase") {
        // level averages for the bound-vs-step trend
        std::map<int, std::array<double, 5>> acc; // fb -> [count, max_bound, err@mb, max_err, bound@me]
        for (const SeedRow &r : report.rows) {
            if (r.status != SolveStatus::Optimal && r.status != SolveStatus::NearOptimal)
                continue;
            auto &a = acc[r.fraction_bits];
            a[0] += 1.0;
            a[1] += r.max_bound;
            a[2] += r.error_at_max_bound;
            a[3] += r.max_error;
            a[4] += r.bound_at_max_error;
        }
        std::ostringstream out;
        out << "fraction_bits,delta,mean_max_bound,mean_error_at_max_bound,mean_max_error,mean_bound_at_max_error\n";
        for (const auto &[fb, a] : acc) {
            const double n = std::max(1.0, a[0]);
            out << fb << ',' << fmt_double(std::ldexp(1.0, -fb)) << ',' << fmt_double(a[1] / n) << ','
                << fmt_double(a[2] / n) << ',' << fmt_double(a[3] / n) << ',' << fmt_double(a[4] / n) << '\n';
        }
        write("summary_by_delta.csv", out.str());
    }
}

} // namespace simbound
