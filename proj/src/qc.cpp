#include "simbound/qc.hpp"

#include <string>

#include "simbound/error.hpp"

namespace simbound {

namespace {

constexpr double kSignTol = 1e-9;

/// Adds the symmetric contribution v * z_a * z_b to Q.
inline void sym_add(Eigen::MatrixXd &Q, int a, int b, double v) {
    if (a == b) {
        Q(a, a) += v;
    } else {
        Q(a, b) += 0.5 * v;
        Q(b, a) += 0.5 * v;
    }
}

void require_nonneg(const char *builder, const Eigen::VectorXd &v, const char *group) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] < -kSignTol)
            throw Error(std::string(builder) + ": multiplier " + group + "[" + std::to_string(i) +
                        "] is negative (" + std::to_string(v[i]) + ")");
}

void require_nonneg(const char *builder, const Eigen::MatrixXd &m, const char *group) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (m(r, c) < -kSignTol)
                throw Error(std::string(builder) + ": multiplier " + group + "(" + std::to_string(r) + "," +
                            std::to_string(c) + ") is negative (" + std::to_string(m(r, c)) + ")");
}

} // namespace

QuadraticForm input_qc(const InputSpec &spec, const MultiplierSet &mult, const EtaLayout &eta) {
    require_nonneg("input_qc", mult.box1, "box1");
    require_nonneg("input_qc", mult.box2, "box2");
    require_nonneg("input_qc", mult.joint_sum, "joint_sum");
    require_nonneg("input_qc", mult.joint_diff, "joint_diff");
    if ((mult.joint_sum.size() > 0 || mult.joint_diff.size() > 0) && !spec.bounds_equal())
        throw Error("input_qc: joint multipliers require equal boxes for the two inputs");

    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(eta.dim(), eta.dim());
    const int c = eta.const_index();

    // Per-network boxes: sum_j lambda_j (hi_j - x_j)(x_j - lo_j) >= 0.
    for (int net = 0; net < 2; ++net) {
        const Eigen::VectorXd &lambda = net == 0 ? mult.box1 : mult.box2;
        const Eigen::VectorXd &lo = net == 0 ? spec.lower1 : spec.lower2;
        const Eigen::VectorXd &hi = net == 0 ? spec.upper1 : spec.upper2;
        const int x = eta.x_offset(net);
        for (int j = 0; j < eta.n_x; ++j) {
            sym_add(Q, x + j, x + j, -lambda[j]);
            sym_add(Q, x + j, c, lambda[j] * (lo[j] + hi[j]));
            sym_add(Q, c, c, -lambda[j] * lo[j] * hi[j]);
        }
    }

    // Joint constraints (equal boxes): the sum x1 + x2 lives in [2 lo, 2 hi]
    // and the difference x2 - x1 in [-(hi - lo), hi - lo].
    const int x1 = eta.x_offset(0);
    const int x2 = eta.x_offset(1);
    for (Eigen::Index j = 0; j < mult.joint_sum.size(); ++j) {
        const double l = mult.joint_sum[j];
        const double lo = spec.lower1[j], hi = spec.upper1[j];
        sym_add(Q, x1 + j, x1 + j, -l);
        sym_add(Q, x2 + j, x2 + j, -l);
        sym_add(Q, x1 + j, x2 + j, -2.0 * l);
        sym_add(Q, x1 + j, c, 2.0 * l * (lo + hi));
        sym_add(Q, x2 + j, c, 2.0 * l * (lo + hi));
        sym_add(Q, c, c, -4.0 * l * lo * hi);
    }
    for (Eigen::Index j = 0; j < mult.joint_diff.size(); ++j) {
        const double l = mult.joint_diff[j];
        const double w = spec.upper1[j] - spec.lower1[j];
        sym_add(Q, x1 + j, x1 + j, -l);
        sym_add(Q, x2 + j, x2 + j, -l);
        sym_add(Q, x1 + j, x2 + j, 2.0 * l);
        sym_add(Q, c, c, l * w * w);
    }
    return {QcKind::Input, std::move(Q)};
}

namespace detail {

void activation_lambda_entries(ActGroup group, int t, const MuLayout &mu,
                               const std::function<void(int, int, double)> &sink) {
    const int M = mu.M;
    const int c = mu.const_index();
    switch (group) {
    case ActGroup::Comp1:
    case ActGroup::Comp2: {
        // (xi - phi)^T lambda phi, exactly zero along ReLU traces.
        const int net = group == ActGroup::Comp1 ? 0 : 1;
        sink(mu.xi_offset(net) + t, mu.phi_offset(net) + t, 1.0);
        sink(mu.phi_offset(net) + t, mu.phi_offset(net) + t, -1.0);
        return;
    }
    case ActGroup::Pos1:
    case ActGroup::Pos2: {
        // lambda phi >= 0 against the constant coordinate.
        const int net = group == ActGroup::Pos1 ? 0 : 1;
        sink(mu.phi_offset(net) + t, c, 1.0);
        return;
    }
    case ActGroup::Cpos1:
    case ActGroup::Cpos2: {
        // lambda (phi - xi) >= 0 against the constant coordinate.
        const int net = group == ActGroup::Cpos1 ? 0 : 1;
        sink(mu.phi_offset(net) + t, c, 1.0);
        sink(mu.xi_offset(net) + t, c, -1.0);
        return;
    }
    case ActGroup::Crx1: {
        // phi1_a * (phi2_b - xi2_b) >= 0 per elementwise non-negative entry.
        const int a = t % M, b = t / M;
        sink(mu.phi_offset(0) + a, mu.phi_offset(1) + b, 1.0);
        sink(mu.phi_offset(0) + a, mu.xi_offset(1) + b, -1.0);
        return;
    }
    case ActGroup::Crx2: {
        // (phi1_a - xi1_a) * phi2_b >= 0.
        const int a = t % M, b = t / M;
        sink(mu.phi_offset(0) + a, mu.phi_offset(1) + b, 1.0);
        sink(mu.xi_offset(0) + a, mu.phi_offset(1) + b, -1.0);
        return;
    }
    case ActGroup::CrxPhi: {
        // phi1_a * phi2_b >= 0.
        const int a = t % M, b = t / M;
        sink(mu.phi_offset(0) + a, mu.phi_offset(1) + b, 1.0);
        return;
    }
    case ActGroup::Slope: {
        // ((xi1 - xi2) - (phi1 - phi2)) * (phi1 - phi2) >= 0 at neuron t,
        // the unit-slope restriction across the two networks.
        const int xi1 = mu.xi_offset(0) + t, xi2 = mu.xi_offset(1) + t;
        const int p1 = mu.phi_offset(0) + t, p2 = mu.phi_offset(1) + t;
        sink(xi1, p1, 1.0);
        sink(xi1, p2, -1.0);
        sink(xi2, p1, -1.0);
        sink(xi2, p2, 1.0);
        sink(p1, p1, -1.0);
        sink(p1, p2, 2.0);
        sink(p2, p2, -1.0);
        return;
    }
    }
    throw Error("unknown activation multiplier group");
}

} // namespace detail

QuadraticForm activation_qc(const CompactForm &cf, const NeuralNetwork &net1, const NeuralNetwork &net2,
                            const MultiplierSet &mult) {
    if (net1.activation() != Activation::ReLU || net2.activation() != Activation::ReLU)
        throw Error("activation_qc: the constraint catalogue is only available for ReLU networks (got " +
                    to_string(net1.activation()) + "/" + to_string(net2.activation()) + ")");
    require_nonneg("activation_qc", mult.pos1, "pos1");
    require_nonneg("activation_qc", mult.pos2, "pos2");
    require_nonneg("activation_qc", mult.cpos1, "cpos1");
    require_nonneg("activation_qc", mult.cpos2, "cpos2");
    require_nonneg("activation_qc", mult.crx1, "crx1");
    require_nonneg("activation_qc", mult.crx2, "crx2");
    require_nonneg("activation_qc", mult.crx_phi, "crx_phi");
    require_nonneg("activation_qc", mult.slope, "slope");

    const MuLayout &mu = cf.mu();
    const int M = mu.M;
    if (mult.comp1.size() != M || mult.comp2.size() != M)
        throw DimensionError("activation_qc: complementarity multipliers must have size M = " + std::to_string(M));

    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(mu.dim(), mu.dim());
    auto add_group = [&](detail::ActGroup group, const double *values, int count) {
        for (int t = 0; t < count; ++t) {
            const double v = values[t];
            if (v == 0.0)
                continue;
            detail::activation_lambda_entries(group, t, mu,
                                              [&](int a, int b, double w) { sym_add(lambda, a, b, w * v); });
        }
    };
    using detail::ActGroup;
    add_group(ActGroup::Comp1, mult.comp1.data(), static_cast<int>(mult.comp1.size()));
    add_group(ActGroup::Comp2, mult.comp2.data(), static_cast<int>(mult.comp2.size()));
    add_group(ActGroup::Pos1, mult.pos1.data(), static_cast<int>(mult.pos1.size()));
    add_group(ActGroup::Pos2, mult.pos2.data(), static_cast<int>(mult.pos2.size()));
    add_group(ActGroup::Cpos1, mult.cpos1.data(), static_cast<int>(mult.cpos1.size()));
    add_group(ActGroup::Cpos2, mult.cpos2.data(), static_cast<int>(mult.cpos2.size()));
    add_group(ActGroup::Crx1, mult.crx1.data(), static_cast<int>(mult.crx1.size()));
    add_group(ActGroup::Crx2, mult.crx2.data(), static_cast<int>(mult.crx2.size()));
    add_group(ActGroup::CrxPhi, mult.crx_phi.data(), static_cast<int>(mult.crx_phi.size()));
    add_group(ActGroup::Slope, mult.slope.data(), static_cast<int>(mult.slope.size()));

    Eigen::MatrixXd Q = cf.E().transpose() * lambda * cf.E();
    Q = ((Q + Q.transpose()) * 0.5).eval();
    return {QcKind::Activation, std::move(Q)};
}

QuadraticForm quantisation_qc(const InputSpec &spec, const std::optional<FixedPointFormat> &fmt,
                              const MultiplierSet &mult, const EtaLayout &eta) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(eta.dim(), eta.dim());
    if (spec.coupling != Coupling::Quantised)
        return {QcKind::Quantisation, std::move(Q)};
    if (!fmt)
        throw FormatError("quantisation_qc: quantised coupling needs a fixed-point format");
    require_nonneg("quantisation_qc", mult.q_sec, "q_sec");
    require_nonneg("quantisation_qc", mult.q_low, "q_low");
    require_nonneg("quantisation_qc", mult.q_up, "q_up");
    require_nonneg("quantisation_qc", mult.q_quad11, "q_quad11");
    require_nonneg("quantisation_qc", mult.q_quad12, "q_quad12");
    require_nonneg("quantisation_qc", mult.q_quad21, "q_quad21");
    require_nonneg("quantisation_qc", mult.q_quad22, "q_quad22");

    const double d = fmt->step();
    const int x1 = eta.x_offset(0);
    const int x2 = eta.x_offset(1);
    const int c = eta.const_index();

    // Sector product (x1 - x2)^T lambda x2 with x2 standing in for q(x1).
    for (Eigen::Index j = 0; j < mult.q_sec.size(); ++j) {
        sym_add(Q, x1 + j, x2 + j, mult.q_sec[j]);
        sym_add(Q, x2 + j, x2 + j, -mult.q_sec[j]);
    }
    // Affine bracketing rows: x2 - x1 + d >= 0 and x1 + d - x2 >= 0.
    for (Eigen::Index j = 0; j < mult.q_low.size(); ++j) {
        sym_add(Q, x2 + j, c, mult.q_low[j]);
        sym_add(Q, x1 + j, c, -mult.q_low[j]);
        sym_add(Q, c, c, d * mult.q_low[j]);
    }
    for (Eigen::Index j = 0; j < mult.q_up.size(); ++j) {
        sym_add(Q, x1 + j, c, mult.q_up[j]);
        sym_add(Q, x2 + j, c, -mult.q_up[j]);
        sym_add(Q, c, c, d * mult.q_up[j]);
    }
    // Bracket cross-products. The (1,1) pairing gives the quadratic
    // sum_j lambda_j (d^2 - (x1_j - x2_j)^2); the others degrade to affine or
    // constant but remain valid non-negative forms.
    for (Eigen::Index j = 0; j < mult.q_quad11.size(); ++j) {
        const double l = mult.q_quad11[j];
        sym_add(Q, x1 + j, x1 + j, -l);
        sym_add(Q, x2 + j, x2 + j, -l);
        sym_add(Q, x1 + j, x2 + j, 2.0 * l);
        sym_add(Q, c, c, d * d * l);
    }
    for (Eigen::Index j = 0; j < mult.q_quad12.size(); ++j) {
        const double l = mult.q_quad12[j];
        sym_add(Q, x2 + j, c, d * l);
        sym_add(Q, x1 + j, c, -d * l);
        sym_add(Q, c, c, d * d * l);
    }
    for (Eigen::Index j = 0; j < mult.q_quad21.size(); ++j) {
        const double l = mult.q_quad21[j];
        sym_add(Q, x1 + j, c, d * l);
        sym_add(Q, x2 + j, c, -d * l);
        sym_add(Q, c, c, d * d * l);
    }
    for (Eigen::Index j = 0; j < mult.q_quad22.size(); ++j)
        sym_add(Q, c, c, d * d * mult.q_quad22[j]);
    return {QcKind::Quantisation, std::move(Q)};
}

QuadraticForm error_qc(const NeuralNetwork &net1, const NeuralNetwork &net2, const CompactForm &cf,
                       const GammaValues &gammas) {
    for (double g : {gammas.x1, gammas.x2, gammas.x, gammas.affine})
        if (g < -kSignTol)
            throw Error("error_qc: bound coefficients must be non-negative, got " + std::to_string(g));

    const EtaLayout &eta = cf.eta();
    const int n_x = eta.n_x;
    const int n_f = net1.output_dim();
    const int M = eta.M;
    const int zdim = 2 * n_x + 2 * n_f + 1;

    // V stacks [x1; x2; f1(x1); f2(x2); 1] out of eta: the f rows apply the
    // output layers to the last hidden block.
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(zdim, eta.dim());
    V.block(0, eta.x_offset(0), n_x, n_x).setIdentity();
    V.block(n_x, eta.x_offset(1), n_x, n_x).setIdentity();
    const int last_width = cf.layer_width(cf.num_layers());
    const int last_offset = M - last_width;
    const Layer &out1 = net1.layers().back();
    const Layer &out2 = net2.layers().back();
    V.block(2 * n_x, eta.phi_offset(0) + last_offset, n_f, last_width) = out1.W;
    V.block(2 * n_x, eta.const_index(), n_f, 1) = out1.b;
    V.block(2 * n_x + n_f, eta.phi_offset(1) + last_offset, n_f, last_width) = out2.W;
    V.block(2 * n_x + n_f, eta.const_index(), n_f, 1) = out2.b;
    V(zdim - 1, eta.const_index()) = 1.0;

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(zdim, zdim);
    for (int j = 0; j < n_x; ++j) {
        G(j, j) = -(gammas.x1 + gammas.x);
        G(n_x + j, n_x + j) = -(gammas.x2 + gammas.x);
        G(j, n_x + j) = gammas.x;
        G(n_x + j, j) = gammas.x;
    }
    for (int j = 0; j < n_f; ++j) {
        G(2 * n_x + j, 2 * n_x + j) = 1.0;
        G(2 * n_x + n_f + j, 2 * n_x + n_f + j) = 1.0;
        G(2 * n_x + j, 2 * n_x + n_f + j) = -1.0;
        G(2 * n_x + n_f + j, 2 * n_x + j) = -1.0;
    }
    G(zdim - 1, zdim - 1) = -gammas.affine;

    Eigen::MatrixXd Q = V.transpose() * G * V;
    Q = ((Q + Q.transpose()) * 0.5).eval();
    return {QcKind::Error, std::move(Q)};
}

} // namespace simbound
