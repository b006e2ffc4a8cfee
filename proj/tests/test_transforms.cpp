#include <doctest.h>

#include <random>

#include "simbound/error.hpp"
#include "simbound/transforms.hpp"
#include "simbound/verify.hpp"

using namespace simbound;

namespace {

NeuralNetwork tiny_net(double w0, double b0, double w1, double b1) {
    Layer hidden{Eigen::MatrixXd::Constant(1, 1, w0), Eigen::VectorXd::Constant(1, b0)};
    Layer out{Eigen::MatrixXd::Constant(1, 1, w1), Eigen::VectorXd::Constant(1, b1)};
    return NeuralNetwork({hidden, out}, Activation::ReLU);
}

} // namespace

TEST_CASE("quantize_network: elementwise, idempotent on grid nets") {
    const FixedPointFormat fmt(8, 2);
    const NeuralNetwork net = tiny_net(0.6, 0.0, 1.0, 0.25);
    const NeuralNetwork q = quantize_network(net, fmt);
    CHECK(q.layers()[0].W(0, 0) == 0.5);
    CHECK(q.layers()[0].b[0] == 0.0);
    CHECK(q.layers()[1].W(0, 0) == 1.0);
    CHECK(q.layers()[1].b[0] == 0.25);

    const NeuralNetwork qq = quantize_network(q, fmt);
    for (size_t k = 0; k < q.layers().size(); ++k) {
        CHECK(q.layers()[k].W == qq.layers()[k].W);
        CHECK(q.layers()[k].b == qq.layers()[k].b);
    }
}

TEST_CASE("quantize_network: max parameter shift stays below the step") {
    std::mt19937_64 rng(3);
    const FixedPointFormat fmt(8, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const NeuralNetwork net = random_network(rng, 2, {6}, 2);
        const NeuralNetwork q = quantize_network(net, fmt);
        double worst = 0.0;
        for (size_t k = 0; k < net.layers().size(); ++k) {
            worst = std::max(worst, (net.layers()[k].W - q.layers()[k].W).cwiseAbs().maxCoeff());
            worst = std::max(worst, (net.layers()[k].b - q.layers()[k].b).cwiseAbs().maxCoeff());
        }
        CHECK(worst < fmt.step());
    }
}

TEST_CASE("quantize_network: neuron permutation commutes with quantisation") {
    std::mt19937_64 rng(17);
    const FixedPointFormat fmt(8, 2);
    const NeuralNetwork net = random_network(rng, 1, {5}, 1);

    auto permute = [](const NeuralNetwork &n, const std::vector<int> &perm) {
        std::vector<Layer> layers = n.layers();
        Layer hidden = layers[0];
        Layer out = layers[1];
        for (int r = 0; r < 5; ++r) {
            hidden.W.row(r) = n.layers()[0].W.row(perm[static_cast<size_t>(r)]);
            hidden.b[r] = n.layers()[0].b[perm[static_cast<size_t>(r)]];
            out.W.col(r) = n.layers()[1].W.col(perm[static_cast<size_t>(r)]);
        }
        return NeuralNetwork({hidden, out}, n.activation());
    };
    const std::vector<int> perm{3, 1, 4, 0, 2};
    const NeuralNetwork a = quantize_network(permute(net, perm), fmt);
    const NeuralNetwork b = permute(quantize_network(net, fmt), perm);
    for (size_t k = 0; k < a.layers().size(); ++k) {
        CHECK(a.layers()[k].W == b.layers()[k].W);
        CHECK(a.layers()[k].b == b.layers()[k].b);
    }
}

TEST_CASE("quantize_network: saturation error carries the location") {
    const FixedPointFormat fmt(2, 2); // magnitudes below 2
    const NeuralNetwork net = tiny_net(5.0, 0.0, 1.0, 0.0);
    CHECK_THROWS_WITH_AS(quantize_network(net, fmt), doctest::Contains("layer 0 weight (0,0)"), SaturationError);
}

TEST_CASE("prune_network: count zero is the identity") {
    std::mt19937_64 rng(5);
    const NeuralNetwork net = random_network(rng, 1, {4}, 1);
    const NeuralNetwork pruned = prune_network(net, PruneSpec::by_count(0));
    for (size_t k = 0; k < net.layers().size(); ++k) {
        CHECK(net.layers()[k].W == pruned.layers()[k].W);
        CHECK(net.layers()[k].b == pruned.layers()[k].b);
    }
}

TEST_CASE("prune_network: unambiguous ranking zeroes the right neuron") {
    Layer hidden{(Eigen::MatrixXd(2, 1) << 0.1, 2.0).finished(), Eigen::VectorXd::Zero(2)};
    Layer out{(Eigen::MatrixXd(1, 2) << 3.0, 4.0).finished(), Eigen::VectorXd::Zero(1)};
    const NeuralNetwork net({hidden, out}, Activation::ReLU);
    const NeuralNetwork pruned = prune_network(net, PruneSpec::by_count(1));
    CHECK(pruned.layers()[0].W(0, 0) == 0.0);
    CHECK(pruned.layers()[0].W(1, 0) == 2.0);
    CHECK(pruned.layers()[0].b[0] == 0.0);
    CHECK(pruned.layers()[1].W(0, 0) == 0.0); // outgoing column gone too
    CHECK(pruned.layers()[1].W(0, 1) == 4.0);
}

TEST_CASE("prune_network equals physically removing the neurons") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const NeuralNetwork net = random_network(rng, 2, {6, 5}, 2);
        const PruneSpec spec = PruneSpec::by_count(4);
        const NeuralNetwork pruned = prune_network(net, spec);

        // oracle: delete the selected rows/columns outright
        const std::vector<double> scores = prune_scores(net, spec);
        std::vector<int> order(scores.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });
        std::vector<bool> drop(scores.size(), false);
        for (int i = 0; i < 4; ++i)
            drop[static_cast<size_t>(order[static_cast<size_t>(i)])] = true;

        std::vector<Layer> layers = net.layers();
        int base = 0;
        for (size_t k = 0; k + 1 < layers.size(); ++k) {
            std::vector<int> keep;
            for (int r = 0; r < layers[k].W.rows(); ++r)
                if (!drop[static_cast<size_t>(base + r)])
                    keep.push_back(r);
            base += static_cast<int>(layers[k].W.rows());
            Eigen::MatrixXd W(keep.size(), layers[k].W.cols());
            Eigen::VectorXd b(keep.size());
            for (size_t i = 0; i < keep.size(); ++i) {
                W.row(static_cast<Eigen::Index>(i)) = layers[k].W.row(keep[i]);
                b[static_cast<Eigen::Index>(i)] = layers[k].b[keep[i]];
            }
            Eigen::MatrixXd Wnext(layers[k + 1].W.rows(), keep.size());
            for (size_t i = 0; i < keep.size(); ++i)
                Wnext.col(static_cast<Eigen::Index>(i)) = layers[k + 1].W.col(keep[i]);
            layers[k].W = W;
            layers[k].b = b;
            layers[k + 1].W = Wnext;
        }
        const NeuralNetwork removed(std::move(layers), net.activation());

        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        for (int i = 0; i < 100; ++i) {
            Eigen::VectorXd x(2);
            x << uni(rng), uni(rng);
            const Eigen::VectorXd a = evaluate(pruned, x).output;
            const Eigen::VectorXd b = evaluate(removed, x).output;
            CHECK(a == b); // exact: zeroed terms change nothing in the sums
        }
    }
}

TEST_CASE("prune_network: invariants and edge cases") {
    std::mt19937_64 rng(31);
    const NeuralNetwork net = random_network(rng, 1, {8}, 1);

    SUBCASE("at least count rows end up exactly zero") {
        const NeuralNetwork pruned = prune_network(net, PruneSpec::by_count(3));
        int zero_rows = 0;
        for (int r = 0; r < pruned.layers()[0].W.rows(); ++r)
            if (pruned.layers()[0].W.row(r).isZero(0.0) && pruned.layers()[0].b[r] == 0.0)
                ++zero_rows;
        CHECK(zero_rows >= 3);
    }
    SUBCASE("count >= M rejected") {
        CHECK_THROWS_AS(prune_network(net, PruneSpec::by_count(8)), FormatError);
    }
    SUBCASE("threshold mode prunes everything below the cutoff") {
        const std::vector<double> scores = prune_scores(net, PruneSpec::by_count(0));
        std::vector<double> sorted = scores;
        std::sort(sorted.begin(), sorted.end());
        const double cutoff = 0.5 * (sorted[1] + sorted[2]); // exactly two below
        const NeuralNetwork pruned = prune_network(net, PruneSpec::by_threshold(cutoff));
        int zero_rows = 0;
        for (int r = 0; r < pruned.layers()[0].W.rows(); ++r)
            if (pruned.layers()[0].W.row(r).isZero(0.0))
                ++zero_rows;
        CHECK(zero_rows == 2);
    }
    SUBCASE("ties break toward the lowest index") {
        Layer hidden{(Eigen::MatrixXd(3, 1) << 1.0, 1.0, 2.0).finished(), Eigen::VectorXd::Zero(3)};
        Layer out{(Eigen::MatrixXd(1, 3) << 1.0, 1.0, 1.0).finished(), Eigen::VectorXd::Zero(1)};
        const NeuralNetwork tied({hidden, out}, Activation::ReLU);
        const NeuralNetwork pruned = prune_network(tied, PruneSpec::by_count(1));
        CHECK(pruned.layers()[0].W(0, 0) == 0.0);
        CHECK(pruned.layers()[0].W(1, 0) == 1.0);
    }
    SUBCASE("bias participates in the score by default") {
        Layer hidden{(Eigen::MatrixXd(2, 1) << 0.5, 0.6).finished(),
                     (Eigen::VectorXd(2) << 10.0, 0.0).finished()};
        Layer out{(Eigen::MatrixXd(1, 2) << 1.0, 1.0).finished(), Eigen::VectorXd::Zero(1)};
        const NeuralNetwork biased({hidden, out}, Activation::ReLU);
        // with the bias, neuron 0 scores ~10 and neuron 1 gets pruned
        const NeuralNetwork with_bias = prune_network(biased, PruneSpec::by_count(1));
        CHECK(with_bias.layers()[0].W(1, 0) == 0.0);
        // weights-only ranking flips the choice
        PruneSpec weights_only = PruneSpec::by_count(1);
        weights_only.include_bias = false;
        const NeuralNetwork without_bias = prune_network(biased, weights_only);
        CHECK(without_bias.layers()[0].W(0, 0) == 0.0);
    }
    SUBCASE("exactly one of count/threshold") {
        PruneSpec both = PruneSpec::by_count(1);
        both.threshold = 0.5;
        CHECK_THROWS_AS(prune_network(net, both), FormatError);
    }
}
