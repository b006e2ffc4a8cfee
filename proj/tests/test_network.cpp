#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "simbound/error.hpp"
#include "simbound/network.hpp"
#include "simbound/verify.hpp"
#include "support/oracles.hpp"

using namespace simbound;

namespace {

NeuralNetwork one_neuron_identity() {
    Layer hidden{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)};
    Layer out{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)};
    return NeuralNetwork({hidden, out}, Activation::ReLU);
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

} // namespace

TEST_CASE("evaluate: one-neuron identity ReLU net") {
    const NeuralNetwork net = one_neuron_identity();
    CHECK(evaluate(net, scalar(0.5)).output[0] == doctest::Approx(0.5));
    CHECK(evaluate(net, scalar(-1.0)).output[0] == doctest::Approx(0.0));
    const EvalTrace trace = evaluate(net, scalar(0.5));
    REQUIRE(trace.pre_activations.size() == 1);
    REQUIRE(trace.post_activations.size() == 1);
    CHECK(trace.pre_activations[0][0] == 0.5);
}

TEST_CASE("evaluate matches a plain-loop reference on a seeded 10-neuron net") {
    std::mt19937_64 rng(42);
    const NeuralNetwork net = random_network(rng, 1, {10}, 1);

    // mirror the parameters into plain vectors for the oracle
    std::vector<oracles::Mat> weights;
    std::vector<oracles::Vec> biases;
    for (const Layer &layer : net.layers()) {
        oracles::Mat W(layer.W.rows(), oracles::Vec(layer.W.cols()));
        oracles::Vec b(layer.b.size());
        for (Eigen::Index r = 0; r < layer.W.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.W.cols(); ++c)
                W[r][c] = layer.W(r, c);
            b[r] = layer.b[r];
        }
        weights.push_back(W);
        biases.push_back(b);
    }
    const oracles::Vec expected = oracles::naive_forward(weights, biases, {0.3});
    const Eigen::VectorXd got = evaluate(net, scalar(0.3)).output;
    REQUIRE(got.size() == 1);
    CHECK(got[0] == doctest::Approx(expected[0]).epsilon(1e-14));
}

TEST_CASE("evaluate: dimension mismatch names the problem") {
    const NeuralNetwork net = one_neuron_identity();
    CHECK_THROWS_AS(evaluate(net, Eigen::VectorXd::Zero(2)), DimensionError);
}

TEST_CASE("construction rejects broken dimension chains") {
    Layer a{Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(3)};
    Layer out{Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1)};
    CHECK_THROWS_WITH_AS(NeuralNetwork({a, out}, Activation::ReLU),
                         doctest::Contains("layer 0"), DimensionError);

    Layer b{Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(2)};
    Layer out_bad{Eigen::MatrixXd::Zero(1, 3), Eigen::VectorXd::Zero(1)};
    CHECK_THROWS_WITH_AS(NeuralNetwork({b, out_bad}, Activation::ReLU),
                         doctest::Contains("layer 1"), DimensionError);
}

TEST_CASE("ReLU positive homogeneity on zero-bias nets") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        NeuralNetwork net = random_network(rng, 2, {5, 4}, 2);
        std::vector<Layer> layers = net.layers();
        for (Layer &layer : layers)
            layer.b.setZero();
        const NeuralNetwork homogeneous(std::move(layers), Activation::ReLU);

        Eigen::VectorXd x(2);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        x << uni(rng), uni(rng);
        const double alpha = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
        const Eigen::VectorXd lhs = evaluate(homogeneous, (alpha * x).eval()).output;
        const Eigen::VectorXd rhs = alpha * evaluate(homogeneous, x).output;
        CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("model JSON round-trip is exact") {
    std::mt19937_64 rng(11);
    const NeuralNetwork net = random_network(rng, 3, {4, 2}, 2);
    const auto path = std::filesystem::temp_directory_path() / "simbound_model_roundtrip.json";
    save_model(net, path);
    const NeuralNetwork loaded = load_model(path);
    REQUIRE(same_architecture(net, loaded));
    for (size_t k = 0; k < net.layers().size(); ++k) {
        CHECK(net.layers()[k].W == loaded.layers()[k].W);
        CHECK(net.layers()[k].b == loaded.layers()[k].b);
    }
    std::filesystem::remove(path);
}

TEST_CASE("model JSON validation") {
    SUBCASE("rows/bias mismatch") {
        const std::string doc = R"({"input_dim":1,"activation":"relu",
            "layers":[{"W":[[1.0],[2.0]],"b":[0.0,0.0,0.0]},{"W":[[1.0,1.0]],"b":[0.0]}]})";
        CHECK_THROWS_AS(model_from_json_text(doc), Error);
    }
    SUBCASE("unknown activation tag") {
        const std::string doc = R"({"input_dim":1,"activation":"softplus",
            "layers":[{"W":[[1.0]],"b":[0.0]},{"W":[[1.0]],"b":[0.0]}]})";
        CHECK_THROWS_AS(model_from_json_text(doc), FormatError);
    }
    SUBCASE("case-insensitive activation tag") {
        const std::string doc = R"({"input_dim":1,"activation":"ReLU",
            "layers":[{"W":[[1.0]],"b":[0.0]},{"W":[[1.0]],"b":[0.0]}]})";
        CHECK(model_from_json_text(doc).activation() == Activation::ReLU);
    }
    SUBCASE("malformed JSON") {
        CHECK_THROWS_AS(model_from_json_text("{not json"), FormatError);
    }
    SUBCASE("column chain violation") {
        const std::string doc = R"({"input_dim":2,"activation":"relu",
            "layers":[{"W":[[1.0]],"b":[0.0]},{"W":[[1.0]],"b":[0.0]}]})";
        CHECK_THROWS_AS(model_from_json_text(doc), Error);
    }
}

TEST_CASE("non-ReLU activations evaluate and carry their property flags") {
    CHECK(activate(Activation::Tanh, 0.0) == 0.0);
    CHECK(activate(Activation::Sigmoid, 0.0) == doctest::Approx(0.0));
    CHECK(activate(Activation::Elu, -40.0) == doctest::Approx(-1.0));
    CHECK(activate(Activation::Saturation, 3.0) == 1.0);

    const ActivationSpec &relu = activation_spec(Activation::ReLU);
    CHECK(relu.complementarity);
    CHECK(relu.positive);
    CHECK(relu.positive_complement);
    CHECK(!relu.bounded);
    CHECK(relu.sector_hi == 1.0);
    CHECK(relu.slope_lo == 0.0);
    CHECK(relu.slope_hi == 1.0);

    const ActivationSpec &tanh_spec = activation_spec(Activation::Tanh);
    CHECK(tanh_spec.bounded);
    CHECK(!tanh_spec.positive);
    CHECK(!tanh_spec.complementarity);
    CHECK(activation_spec(Activation::Sigmoid).sector_hi == doctest::Approx(0.25));
    CHECK(activation_spec(Activation::Saturation).bounded);
    CHECK(!activation_spec(Activation::Elu).bounded);
}
