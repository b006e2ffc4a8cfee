#include "simbound/multipliers.hpp"

#include <cmath>

#include "simbound/error.hpp"

namespace simbound {

ProblemStructure ProblemStructure::from(const InputSpec &spec, int n_x, int M,
                                        const ActivationQcOptions &options) {
    ProblemStructure st;
    st.n_x = n_x;
    st.M = M;
    st.joint_box = spec.bounds_equal();
    st.quantised = spec.coupling == Coupling::Quantised;
    st.cross_slope = options.cross_slope;
    return st;
}

MultiplierSet MultiplierSet::zeros(const ProblemStructure &st) {
    MultiplierSet m;
    m.box1 = Eigen::VectorXd::Zero(st.n_x);
    m.box2 = Eigen::VectorXd::Zero(st.n_x);
    if (st.joint_box) {
        m.joint_sum = Eigen::VectorXd::Zero(st.n_x);
        m.joint_diff = Eigen::VectorXd::Zero(st.n_x);
    }
    m.comp1 = Eigen::VectorXd::Zero(st.M);
    m.comp2 = Eigen::VectorXd::Zero(st.M);
    m.pos1 = Eigen::VectorXd::Zero(st.M);
    m.pos2 = Eigen::VectorXd::Zero(st.M);
    m.cpos1 = Eigen::VectorXd::Zero(st.M);
    m.cpos2 = Eigen::VectorXd::Zero(st.M);
    m.crx1 = Eigen::MatrixXd::Zero(st.M, st.M);
    m.crx2 = Eigen::MatrixXd::Zero(st.M, st.M);
    m.crx_phi = Eigen::MatrixXd::Zero(st.M, st.M);
    if (st.cross_slope)
        m.slope = Eigen::VectorXd::Zero(st.M);
    if (st.quantised) {
        m.q_sec = Eigen::VectorXd::Zero(st.n_x);
        m.q_low = Eigen::VectorXd::Zero(st.n_x);
        m.q_up = Eigen::VectorXd::Zero(st.n_x);
        m.q_quad11 = Eigen::VectorXd::Zero(st.n_x);
        m.q_quad12 = Eigen::VectorXd::Zero(st.n_x);
        m.q_quad21 = Eigen::VectorXd::Zero(st.n_x);
        m.q_quad22 = Eigen::VectorXd::Zero(st.n_x);
    }
    return m;
}

namespace {

void scan_vector(const char *name, const Eigen::VectorXd &v, double tol,
                 std::vector<MultiplierSet::SignViolation> &out) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] < -tol)
            out.push_back({name, static_cast<int>(i), v[i]});
}

void scan_matrix(const char *name, const Eigen::MatrixXd &m, double tol,
                 std::vector<MultiplierSet::SignViolation> &out) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (m(r, c) < -tol)
                out.push_back({name, static_cast<int>(c * m.rows() + r), m(r, c)});
}

void clamp_vector(Eigen::VectorXd &v, double tol) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] < 0.0 && v[i] >= -tol)
            v[i] = 0.0;
}

void clamp_matrix(Eigen::MatrixXd &m, double tol) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (m(r, c) < 0.0 && m(r, c) >= -tol)
                m(r, c) = 0.0;
}

} // namespace

std::vector<MultiplierSet::SignViolation> MultiplierSet::sign_violations(double tol) const {
    std::vector<SignViolation> out;
    scan_vector("box1", box1, tol, out);
    scan_vector("box2", box2, tol, out);
    scan_vector("joint_sum", joint_sum, tol, out);
    scan_vector("joint_diff", joint_diff, tol, out);
    scan_vector("pos1", pos1, tol, out);
    scan_vector("pos2", pos2, tol, out);
    scan_vector("cpos1", cpos1, tol, out);
    scan_vector("cpos2", cpos2, tol, out);
    scan_matrix("crx1", crx1, tol, out);
    scan_matrix("crx2", crx2, tol, out);
    scan_matrix("crx_phi", crx_phi, tol, out);
    scan_vector("slope", slope, tol, out);
    scan_vector("q_sec", q_sec, tol, out);
    scan_vector("q_low", q_low, tol, out);
    scan_vector("q_up", q_up, tol, out);
    scan_vector("q_quad11", q_quad11, tol, out);
    scan_vector("q_quad12", q_quad12, tol, out);
    scan_vector("q_quad21", q_quad21, tol, out);
    scan_vector("q_quad22", q_quad22, tol, out);
    return out;
}

void MultiplierSet::clamp_small_negatives(double tol) {
    clamp_vector(box1, tol);
    clamp_vector(box2, tol);
    clamp_vector(joint_sum, tol);
    clamp_vector(joint_diff, tol);
    clamp_vector(pos1, tol);
    clamp_vector(pos2, tol);
    clamp_vector(cpos1, tol);
    clamp_vector(cpos2, tol);
    clamp_matrix(crx1, tol);
    clamp_matrix(crx2, tol);
    clamp_matrix(crx_phi, tol);
    clamp_vector(slope, tol);
    clamp_vector(q_sec, tol);
    clamp_vector(q_low, tol);
    clamp_vector(q_up, tol);
    clamp_vector(q_quad11, tol);
    clamp_vector(q_quad12, tol);
    clamp_vector(q_quad21, tol);
    clamp_vector(q_quad22, tol);
}

VariableLayout::VariableLayout(const ProblemStructure &st) : structure_(st) {
    const int n_x = st.n_x;
    const int M = st.M;
    auto add = [this](const std::string &name, int count, bool nonneg) {
        groups_.push_back({name, size_, count, nonneg});
        size_ += count;
    };
    add("gamma_x1", 1, true);
    add("gamma_x2", 1, true);
    add("gamma_x", 1, true);
    add("gamma", 1, true);
    add("box1", n_x, true);
    add("box2", n_x, true);
    if (st.joint_box) {
        add("joint_sum", n_x, true);
        add("joint_diff", n_x, true);
    }
    add("comp1", M, false);
    add("comp2", M, false);
    add("pos1", M, true);
    add("pos2", M, true);
    add("cpos1", M, true);
    add("cpos2", M, true);
    add("crx1", M * M, true);
    add("crx2", M * M, true);
    add("crx_phi", M * M, true);
    if (st.cross_slope)
        add("slope", M, true);
    if (st.quantised) {
        add("q_sec", n_x, true);
        add("q_low", n_x, true);
        add("q_up", n_x, true);
        add("q_quad11", n_x, true);
        add("q_quad12", n_x, true);
        add("q_quad21", n_x, true);
        add("q_quad22", n_x, true);
    }
}

std::vector<int> VariableLayout::nonneg_indices() const {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(size_));
    for (const Group &g : groups_)
        if (g.nonneg)
            for (int i = 0; i < g.count; ++i)
                out.push_back(g.offset + i);
    return out;
}

namespace {

Eigen::Map<const Eigen::VectorXd> as_flat(const Eigen::MatrixXd &m) {
    return {m.data(), m.size()};
}

} // namespace

Eigen::VectorXd VariableLayout::flatten(const GammaValues &gammas, const MultiplierSet &mult) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size_);
    for (const Group &g : groups_) {
        auto seg = v.segment(g.offset, g.count);
        if (g.name == "gamma_x1")
            seg[0] = gammas.x1;
        else if (g.name == "gamma_x2")
            seg[0] = gammas.x2;
        else if (g.name == "gamma_x")
            seg[0] = gammas.x;
        else if (g.name == "gamma")
            seg[0] = gammas.affine;
        else if (g.name == "box1")
            seg = mult.box1;
        else if (g.name == "box2")
            seg = mult.box2;
        else if (g.name == "joint_sum")
            seg = mult.joint_sum;
        else if (g.name == "joint_diff")
            seg = mult.joint_diff;
        else if (g.name == "comp1")
            seg = mult.comp1;
        else if (g.name == "comp2")
            seg = mult.comp2;
        else if (g.name == "pos1")
            seg = mult.pos1;
        else if (g.name == "pos2")
            seg = mult.pos2;
        else if (g.name == "cpos1")
            seg = mult.cpos1;
        else if (g.name == "cpos2")
            seg = mult.cpos2;
        else if (g.name == "crx1")
            seg = as_flat(mult.crx1);
        else if (g.name == "crx2")
            seg = as_flat(mult.crx2);
        else if (g.name == "crx_phi")
            seg = as_flat(mult.crx_phi);
        else if (g.name == "slope")
            seg = mult.slope;
        else if (g.name == "q_sec")
            seg = mult.q_sec;
        else if (g.name == "q_low")
            seg = mult.q_low;
        else if (g.name == "q_up")
            seg = mult.q_up;
        else if (g.name == "q_quad11")
            seg = mult.q_quad11;
        else if (g.name == "q_quad12")
            seg = mult.q_quad12;
        else if (g.name == "q_quad21")
            seg = mult.q_quad21;
        else if (g.name == "q_quad22")
            seg = mult.q_quad22;
        else
            throw Error("flatten: unknown group " + g.name);
    }
    return v;
}

void VariableLayout::unflatten(const Eigen::VectorXd &v, GammaValues &gammas, MultiplierSet &mult) const {
    if (v.size() != size_)
        throw DimensionError("variable vector has size " + std::to_string(v.size()) + " but the layout needs " +
                             std::to_string(size_));
    const int M = structure_.M;
    mult = MultiplierSet::zeros(structure_);
    for (const Group &g : groups_) {
        const auto seg = v.segment(g.offset, g.count);
        if (g.name == "gamma_x1")
            gammas.x1 = seg[0];
        else if (g.name == "gamma_x2")
            gammas.x2 = seg[0];
        else if (g.name == "gamma_x")
            gammas.x = seg[0];
        else if (g.name == "gamma")
            gammas.affine = seg[0];
        else if (g.name == "box1")
            mult.box1 = seg;
        else if (g.name == "box2")
            mult.box2 = seg;
        else if (g.name == "joint_sum")
            mult.joint_sum = seg;
        else if (g.name == "joint_diff")
            mult.joint_diff = seg;
        else if (g.name == "comp1")
            mult.comp1 = seg;
        else if (g.name == "comp2")
            mult.comp2 = seg;
        else if (g.name == "pos1")
            mult.pos1 = seg;
        else if (g.name == "pos2")
            mult.pos2 = seg;
        else if (g.name == "cpos1")
            mult.cpos1 = seg;
        else if (g.name == "cpos2")
            mult.cpos2 = seg;
        else if (g.name == "crx1")
            mult.crx1 = Eigen::Map<const Eigen::MatrixXd>(seg.data(), M, M);
        else if (g.name == "crx2")
            mult.crx2 = Eigen::Map<const Eigen::MatrixXd>(seg.data(), M, M);
        else if (g.name == "crx_phi")
            mult.crx_phi = Eigen::Map<const Eigen::MatrixXd>(seg.data(), M, M);
        else if (g.name == "slope")
            mult.slope = seg;
        else if (g.name == "q_sec")
            mult.q_sec = seg;
        else if (g.name == "q_low")
            mult.q_low = seg;
        else if (g.name == "q_up")
            mult.q_up = seg;
        else if (g.name == "q_quad11")
            mult.q_quad11 = seg;
        else if (g.name == "q_quad12")
            mult.q_quad12 = seg;
        else if (g.name == "q_quad21")
            mult.q_quad21 = seg;
        else if (g.name == "q_quad22")
            mult.q_quad22 = seg;
        else
            throw Error("unflatten: unknown group " + g.name);
    }
}

} // namespace simbound
