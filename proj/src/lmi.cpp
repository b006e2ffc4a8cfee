#include "simbound/lmi.hpp"

#include <utility>

#include "simbound/error.hpp"

namespace simbound {

namespace {

std::vector<LmiEntry> lower_triangle_entries(const Eigen::MatrixXd &Q) {
    std::vector<LmiEntry> out;
    for (int c = 0; c < Q.cols(); ++c)
        for (int r = c; r < Q.rows(); ++r)
            if (Q(r, c) != 0.0)
                out.push_back({r, c, Q(r, c)});
    return out;
}

/// Accumulates Q (full eta basis) into `target` on the mapped basis:
/// target[map[i], map[j]] += Q[i, j].
void reduce_into(const Eigen::MatrixXd &Q, const std::vector<int> &map, Eigen::MatrixXd &target) {
    for (int i = 0; i < Q.rows(); ++i)
        for (int j = 0; j < Q.cols(); ++j)
            if (Q(i, j) != 0.0)
                target(map[static_cast<size_t>(i)], map[static_cast<size_t>(j)]) += Q(i, j);
}

struct SparseRow {
    std::vector<std::pair<int, double>> entries; // (mapped column, value)
};

} // namespace

LmiSystem LmiSystem::assemble(const NeuralNetwork &net1, const NeuralNetwork &net2, const CompactForm &cf,
                              const InputSpec &spec, const VariableLayout &layout) {
    const EtaLayout &eta = cf.eta();
    const ProblemStructure &st = layout.structure();
    if (st.n_x != eta.n_x || st.M != eta.M)
        throw DimensionError("variable layout does not match the compact form dimensions");

    LmiSystem lmi;
    lmi.reduced_ = spec.coupling == Coupling::Identical;
    lmi.eta_map_.resize(static_cast<size_t>(eta.dim()));
    if (lmi.reduced_) {
        // Reduced basis [x1; phi1; phi2; 1]; the x2 block aliases x1.
        lmi.dim_ = eta.n_x + 2 * eta.M + 1;
        for (int j = 0; j < eta.n_x; ++j) {
            lmi.eta_map_[static_cast<size_t>(eta.x_offset(0) + j)] = j;
            lmi.eta_map_[static_cast<size_t>(eta.x_offset(1) + j)] = j;
        }
        for (int t = 0; t < 2 * eta.M; ++t)
            lmi.eta_map_[static_cast<size_t>(eta.phi_offset(0) + t)] = eta.n_x + t;
        lmi.eta_map_[static_cast<size_t>(eta.const_index())] = lmi.dim_ - 1;
    } else {
        lmi.dim_ = eta.dim();
        for (int i = 0; i < eta.dim(); ++i)
            lmi.eta_map_[static_cast<size_t>(i)] = i;
    }

    // Sparse rows of E with already-mapped column indices, for the fast
    // activation probes below.
    std::vector<SparseRow> e_rows(static_cast<size_t>(cf.mu().dim()));
    for (int r = 0; r < cf.E().rows(); ++r)
        for (int c = 0; c < cf.E().cols(); ++c)
            if (cf.E()(r, c) != 0.0)
                e_rows[static_cast<size_t>(r)].entries.emplace_back(lmi.eta_map_[static_cast<size_t>(c)],
                                                                    cf.E()(r, c));

    Eigen::MatrixXd scratch = Eigen::MatrixXd::Zero(lmi.dim_, lmi.dim_);
    auto scratch_sym_add = [&](int a, int b, double v) {
        if (a == b)
            scratch(a, a) += v;
        else {
            scratch(a, b) += 0.5 * v;
            scratch(b, a) += 0.5 * v;
        }
    };

    // Constant block: the bound-gap form at gamma = 0.
    const GammaValues zero_gammas;
    Eigen::MatrixXd error_zero = error_qc(net1, net2, cf, zero_gammas).matrix;
    reduce_into(error_zero, lmi.eta_map_, scratch);
    lmi.constant_ = lower_triangle_entries(scratch);

    lmi.coefficients_.resize(static_cast<size_t>(layout.size()));
    const MultiplierSet zero_mult = MultiplierSet::zeros(st);

    auto probe_dense = [&](const Eigen::MatrixXd &Q, int var) {
        scratch.setZero();
        reduce_into(Q, lmi.eta_map_, scratch);
        lmi.coefficients_[static_cast<size_t>(var)] = lower_triangle_entries(scratch);
    };

    using detail::ActGroup;
    for (const VariableLayout::Group &g : layout.groups()) {
        if (g.name == "gamma_x1" || g.name == "gamma_x2" || g.name == "gamma_x" || g.name == "gamma") {
            GammaValues gammas;
            if (g.name == "gamma_x1")
                gammas.x1 = 1.0;
            else if (g.name == "gamma_x2")
                gammas.x2 = 1.0;
            else if (g.name == "gamma_x")
                gammas.x = 1.0;
            else
                gammas.affine = 1.0;
            Eigen::MatrixXd Q = error_qc(net1, net2, cf, gammas).matrix - error_zero;
            probe_dense(Q, g.offset);
        } else if (g.name == "box1" || g.name == "box2" || g.name == "joint_sum" || g.name == "joint_diff") {
            for (int t = 0; t < g.count; ++t) {
                MultiplierSet m = zero_mult;
                if (g.name == "box1")
                    m.box1[t] = 1.0;
                else if (g.name == "box2")
                    m.box2[t] = 1.0;
                else if (g.name == "joint_sum")
                    m.joint_sum[t] = 1.0;
                else
                    m.joint_diff[t] = 1.0;
                probe_dense(input_qc(spec, m, eta).matrix, g.offset + t);
            }
        } else if (g.name == "q_sec" || g.name == "q_low" || g.name == "q_up" || g.name == "q_quad11" ||
                   g.name == "q_quad12" || g.name == "q_quad21" || g.name == "q_quad22") {
            for (int t = 0; t < g.count; ++t) {
                MultiplierSet m = zero_mult;
                if (g.name == "q_sec")
                    m.q_sec[t] = 1.0;
                else if (g.name == "q_low")
                    m.q_low[t] = 1.0;
                else if (g.name == "q_up")
                    m.q_up[t] = 1.0;
                else if (g.name == "q_quad11")
                    m.q_quad11[t] = 1.0;
                else if (g.name == "q_quad12")
                    m.q_quad12[t] = 1.0;
                else if (g.name == "q_quad21")
                    m.q_quad21[t] = 1.0;
                else
                    m.q_quad22[t] = 1.0;
                probe_dense(quantisation_qc(spec, spec.format, m, eta).matrix, g.offset + t);
            }
        } else {
            // Activation groups: enumerate the Lambda entries of one unit
            // multiplier and lift them through the sparse rows of E.
            ActGroup group;
            if (g.name == "comp1")
                group = ActGroup::Comp1;
            else if (g.name == "comp2")
                group = ActGroup::Comp2;
            else if (g.name == "pos1")
                group = ActGroup::Pos1;
            else if (g.name == "pos2")
                group = ActGroup::Pos2;
            else if (g.name == "cpos1")
                group = ActGroup::Cpos1;
            else if (g.name == "cpos2")
                group = ActGroup::Cpos2;
            else if (g.name == "crx1")
                group = ActGroup::Crx1;
            else if (g.name == "crx2")
                group = ActGroup::Crx2;
            else if (g.name == "crx_phi")
                group = ActGroup::CrxPhi;
            else if (g.name == "slope")
                group = ActGroup::Slope;
            else
                throw Error("assemble: unknown variable group " + g.name);
            for (int t = 0; t < g.count; ++t) {
                scratch.setZero();
                detail::activation_lambda_entries(group, t, cf.mu(), [&](int a, int b, double w) {
                    const SparseRow &ra = e_rows[static_cast<size_t>(a)];
                    const SparseRow &rb = e_rows[static_cast<size_t>(b)];
                    for (const auto &[ca, va] : ra.entries)
                        for (const auto &[cb, vb] : rb.entries)
                            scratch_sym_add(ca, cb, w * va * vb);
                });
                lmi.coefficients_[static_cast<size_t>(g.offset + t)] = lower_triangle_entries(scratch);
            }
        }
    }
    return lmi;
}

Eigen::MatrixXd LmiSystem::evaluate(const Eigen::VectorXd &vars) const {
    if (vars.size() != num_vars())
        throw DimensionError("variable vector has size " + std::to_string(vars.size()) + " but the LMI has " +
                             std::to_string(num_vars()) + " variables");
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(dim_, dim_);
    auto accumulate = [&](const std::vector<LmiEntry> &entries, double scale) {
        for (const LmiEntry &e : entries) {
            L(e.row, e.col) += scale * e.value;
            if (e.row != e.col)
                L(e.col, e.row) += scale * e.value;
        }
    };
    accumulate(constant_, 1.0);
    for (int i = 0; i < num_vars(); ++i)
        if (vars[i] != 0.0)
            accumulate(coefficients_[static_cast<size_t>(i)], vars[i]);
    return L;
}

} // namespace simbound
