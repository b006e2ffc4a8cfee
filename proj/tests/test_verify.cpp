#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "simbound/error.hpp"
#include "simbound/experiments.hpp"
#include "simbound/solve.hpp"
#include "simbound/verify.hpp"

using namespace simbound;

namespace {

NeuralNetwork one_neuron_identity() {
    Layer hidden{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)};
    Layer out{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)};
    return NeuralNetwork({hidden, out}, Activation::ReLU);
}

BoundCertificate fake_cert(const GammaValues &g) {
    BoundCertificate cert;
    cert.status = SolveStatus::Optimal;
    cert.gammas = g;
    return cert;
}

std::string strip_runtimes(std::string text) {
    // timing columns/fields are the only run-to-run nondeterminism
    text = std::regex_replace(text, std::regex("[0-9eE+\\-\\.]+,[0-9eE+\\-\\.]+\n"), "T,T\n");
    text = std::regex_replace(text, std::regex("\"(solve|total|mean_solve)_seconds\": [^,\n}]+"), "\"$1_seconds\": T");
    return text;
}

} // namespace

TEST_CASE("tightness: frozen cases and the soundness flag") {
    const NeuralNetwork net = one_neuron_identity();
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.5);

    SUBCASE("bound equals error -> T = 0") {
        GammaValues g;
        g.affine = 0.25; // error^2 at x1=0.5, x2=1.0 is 0.25
        const TightnessSample s =
            tightness(fake_cert(g), net, net, x, Eigen::VectorXd::Constant(1, 1.0));
        CHECK(s.error_sq == doctest::Approx(0.25));
        CHECK(s.T == doctest::Approx(0.0));
        CHECK(s.sound);
    }
    SUBCASE("zero error -> -inf sentinel, still sound") {
        GammaValues g;
        g.affine = 1.0;
        const TightnessSample s = tightness(fake_cert(g), net, net, x, x);
        CHECK(s.error_sq == 0.0);
        CHECK(std::isinf(s.T));
        CHECK(s.T < 0.0);
        CHECK(s.sound);
    }
    SUBCASE("error above the bound is flagged, never silently reported") {
        GammaValues g;
        g.affine = 0.25 / std::exp(1.0); // makes T = 1 exactly
        const TightnessSample s =
            tightness(fake_cert(g), net, net, x, Eigen::VectorXd::Constant(1, 1.0));
        CHECK(s.T == doctest::Approx(1.0));
        CHECK(!s.sound);
    }
}

TEST_CASE("brute force: identical nets under identical coupling have zero error") {
    const NeuralNetwork net = one_neuron_identity();
    const InputSpec spec = InputSpec::symmetric_box(1.0, 1, Coupling::Identical);
    const WorstCase w = brute_force_worst_error(net, net, spec, 500);
    CHECK(w.max_error_sq == 0.0);
}

TEST_CASE("brute force: quantised identity net peaks just below the step") {
    const NeuralNetwork net = one_neuron_identity();
    const FixedPointFormat fmt(8, 2); // step 0.25
    const InputSpec spec = InputSpec::symmetric_box(1.0, 1, Coupling::Quantised, fmt);
    const int resolution = 400;
    const WorstCase w = brute_force_worst_error(net, net, spec, resolution);
    const double h = 2.0 / (resolution - 1);
    const double delta = fmt.step();
    CHECK(w.max_error_sq <= delta * delta);              // analytic ceiling 0.0625
    CHECK(w.max_error_sq >= (delta - h) * (delta - h));  // grid can get this close
    CHECK(w.x1[0] > 0.0);                                // ReLU kills the negative side
}

TEST_CASE("brute force guards") {
    const NeuralNetwork net = one_neuron_identity();
    const InputSpec spec = InputSpec::symmetric_box(1.0, 1, Coupling::Identical);
    CHECK_THROWS_AS(brute_force_worst_error(net, net, spec, 50), FormatError);

    std::mt19937_64 rng(2);
    const NeuralNetwork wide = random_network(rng, 4, {3}, 1);
    const InputSpec spec4 = InputSpec::symmetric_box(1.0, 4, Coupling::Identical);
    CHECK_THROWS_AS(brute_force_worst_error(wide, wide, spec4, 100), DimensionError);
}

TEST_CASE("hill climbing agrees with the grid within a percent") {
    std::mt19937_64 rng(91);
    const FixedPointFormat fmt(8, 2);
    for (int trial = 0; trial < 3; ++trial) {
        const NeuralNetwork net1 = random_network(rng, 1, {8}, 1);
        const NeuralNetwork net2 = quantize_network(net1, fmt);
        const InputSpec spec = InputSpec::symmetric_box(1.0, 1, Coupling::Quantised, fmt);
        const WorstCase grid = brute_force_worst_error(net1, net2, spec, 20000);
        const WorstCase climb = hill_climb_worst_error(net1, net2, spec, 100, 300, 1234 + trial);
        CHECK(climb.max_error_sq <= grid.max_error_sq * 1.01 + 1e-12);
        CHECK(climb.max_error_sq >= grid.max_error_sq * 0.99 - 1e-12);
    }
}

TEST_CASE("random_network is reproducible and scaled") {
    std::mt19937_64 a(7), b(7);
    const NeuralNetwork na = random_network(a, 2, {5, 5}, 1);
    const NeuralNetwork nb = random_network(b, 2, {5, 5}, 1);
    for (size_t k = 0; k < na.layers().size(); ++k) {
        CHECK(na.layers()[k].W == nb.layers()[k].W);
        CHECK(na.layers()[k].b == nb.layers()[k].b);
    }
}

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg = ExperimentConfig::defaults_for("similarity");
    cfg.num_seeds = 0;
    CHECK_THROWS_AS(cfg.validate(), FormatError);
    CHECK_THROWS_AS(ExperimentConfig::defaults_for("nosuch"), FormatError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"suite\": \"similarity\", \"num_seeds\": 0}"),
                    FormatError);
}

TEST_CASE("similarity experiment smoke run: schema, soundness, determinism") {
    ExperimentConfig cfg = ExperimentConfig::defaults_for("similarity");
    cfg.num_seeds = 2;
    cfg.layer_counts = {1};
    cfg.width = 4;
    cfg.tightness_grid = 40;
    const ExperimentReport report = run_similarity_experiment(cfg);
    REQUIRE(report.rows.size() == 2);
    for (const SeedRow &row : report.rows) {
        CHECK(row.status == SolveStatus::Optimal);
        CHECK(row.unsound_count == 0);
        CHECK(row.samples == 40 * 40);
        CHECK(row.mean_T <= 0.0); // bound dominates the error on average
    }
    const std::string csv = report.rows_csv();
    CHECK(csv.rfind("suite,layers,seed,status,gamma_x,gamma_x1,gamma_x2,gamma,mean_T,max_T,min_T,"
                    "neg_inf_count,unsound_count,samples,solve_seconds,total_seconds\n",
                    0) == 0);

    // second run: bit-identical modulo the timing fields
    const ExperimentReport again = run_similarity_experiment(cfg);
    CHECK(strip_runtimes(report.rows_csv()) == strip_runtimes(again.rows_csv()));
    CHECK(strip_runtimes(report.to_json_text()) == strip_runtimes(again.to_json_text()));
}

TEST_CASE("experiment outputs land beside the config snapshot") {
    ExperimentConfig cfg = ExperimentConfig::defaults_for("quantisation");
    cfg.num_seeds = 1;
    cfg.layer_counts = {1};
    cfg.width = 3;
    cfg.tightness_grid = 25;
    const ExperimentReport report = run_quantisation_experiment(cfg);
    const auto dir = std::filesystem::temp_directory_path() / "simbound_experiment_smoke";
    std::filesystem::remove_all(dir);
    write_experiment_outputs(report, dir);
    CHECK(std::filesystem::exists(dir / "config.json"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "per_seed.csv"));
    CHECK(std::filesystem::exists(dir / "curve_l1.csv"));
    // curve rows: header + one line per grid point
    std::ifstream curve(dir / "curve_l1.csv");
    std::string line;
    int lines = 0;
    while (std::getline(curve, line))
        ++lines;
    CHECK(lines == 1 + 25);
    std::filesystem::remove_all(dir);
}
