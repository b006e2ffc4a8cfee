#include <doctest.h>

#include <random>

#include "simbound/compact_form.hpp"
#include "simbound/error.hpp"
#include "simbound/verify.hpp"

using namespace simbound;

namespace {

NeuralNetwork one_neuron_identity() {
    Layer hidden{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)};
    Layer out{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)};
    return NeuralNetwork({hidden, out}, Activation::ReLU);
}

} // namespace

TEST_CASE("compact form of two one-neuron nets, by hand") {
    const NeuralNetwork net = one_neuron_identity();
    const CompactForm cf = CompactForm::build(net, net);
    REQUIRE(cf.E().rows() == 5);
    REQUIRE(cf.E().cols() == 5);
    // first xi row selects x1 with zero bias
    Eigen::VectorXd expected(5);
    expected << 1, 0, 0, 0, 0;
    CHECK(cf.E().row(0).transpose() == expected);
    // phi rows are selectors, last row selects the constant
    CHECK(cf.E()(2, 2) == 1.0);
    CHECK(cf.E()(3, 3) == 1.0);
    CHECK(cf.E()(4, 4) == 1.0);
}

TEST_CASE("compact form shapes: l=1, n1=2, nx=1") {
    std::mt19937_64 rng(2);
    const NeuralNetwork net = random_network(rng, 1, {2}, 1);
    const CompactForm cf = CompactForm::build(net, net);
    CHECK(cf.E().rows() == 9); // 4M+1
    CHECK(cf.E().cols() == 7); // 2(nx+M)+1
    CHECK(cf.mu().dim() == 9);
    CHECK(cf.eta().dim() == 7);
}

TEST_CASE("mu = E * eta holds exactly along forward passes") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    const NeuralNetwork net1 = random_network(rng, 2, {4, 3}, 2);
    const NeuralNetwork net2 = random_network(rng, 2, {4, 3}, 2);
    const CompactForm cf = CompactForm::build(net1, net2);
    for (int draw = 0; draw < 1000; ++draw) {
        Eigen::VectorXd x1(2), x2(2);
        x1 << uni(rng), uni(rng);
        x2 << uni(rng), uni(rng);
        const EvalTrace t1 = evaluate(net1, x1);
        const EvalTrace t2 = evaluate(net2, x2);
        const Eigen::VectorXd eta = cf.stack_eta(x1, t1, x2, t2);
        const Eigen::VectorXd mu = cf.stack_mu(t1, t2);
        CHECK((mu - cf.E() * eta).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("layer offset table is a bijection onto 0..M-1") {
    std::mt19937_64 rng(4);
    const NeuralNetwork net = random_network(rng, 1, {3, 5, 2}, 1);
    const CompactForm cf = CompactForm::build(net, net);
    std::vector<bool> seen(static_cast<size_t>(cf.eta().M), false);
    for (int layer = 1; layer <= cf.num_layers(); ++layer)
        for (int j = 0; j < cf.layer_width(layer); ++j) {
            const int idx = cf.layer_offset(layer) + j;
            REQUIRE(idx >= 0);
            REQUIRE(idx < cf.eta().M);
            CHECK(!seen[static_cast<size_t>(idx)]);
            seen[static_cast<size_t>(idx)] = true;
        }
    for (bool b : seen)
        CHECK(b);
    CHECK_THROWS_AS(cf.layer_offset(0), DimensionError);
    CHECK_THROWS_AS(cf.layer_offset(4), DimensionError);
}

TEST_CASE("architecture mismatches are rejected") {
    std::mt19937_64 rng(6);
    const NeuralNetwork a = random_network(rng, 1, {3}, 1);
    const NeuralNetwork b = random_network(rng, 1, {4}, 1);
    CHECK_THROWS_AS(CompactForm::build(a, b), DimensionError);
    const NeuralNetwork c = random_network(rng, 2, {3}, 1);
    CHECK_THROWS_AS(CompactForm::build(a, c), DimensionError);
}
