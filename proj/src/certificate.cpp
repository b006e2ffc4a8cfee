#include "simbound/certificate.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "simbound/error.hpp"

namespace simbound {

std::string to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::NearOptimal:
        return "near_optimal";
    case SolveStatus::Infeasible:
        return "infeasible";
    case SolveStatus::NumericalFailure:
        return "numerical_failure";
    }
    return "numerical_failure";
}

SolveStatus solve_status_from_string(const std::string &tag) {
    if (tag == "optimal")
        return SolveStatus::Optimal;
    if (tag == "near_optimal")
        return SolveStatus::NearOptimal;
    if (tag == "infeasible")
        return SolveStatus::Infeasible;
    if (tag == "numerical_failure")
        return SolveStatus::NumericalFailure;
    throw FormatError("unknown solve status tag: \"" + tag + "\"");
}

namespace {

class Fnv1a {
public:
    void feed(const std::string &s) {
        for (unsigned char c : s) {
            hash_ ^= c;
            hash_ *= 1099511628211ULL;
        }
    }
    void feed(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g;", v);
        feed(std::string(buf));
    }
    void feed(const Eigen::MatrixXd &m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                feed(m(r, c));
    }
    std::string hex() const {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash_);
        return buf;
    }

private:
    std::uint64_t hash_ = 1469598103934665603ULL;
};

void feed_network(Fnv1a &h, const NeuralNetwork &net) {
    h.feed("net:" + to_string(net.activation()) + ";");
    for (const Layer &layer : net.layers()) {
        h.feed("layer:" + std::to_string(layer.W.rows()) + "x" + std::to_string(layer.W.cols()) + ";");
        h.feed(layer.W);
        h.feed(Eigen::MatrixXd(layer.b));
    }
}

} // namespace

std::string problem_fingerprint(const NeuralNetwork &net1, const NeuralNetwork &net2, const InputSpec &spec) {
    Fnv1a h;
    h.feed("simbound-problem-v1;");
    feed_network(h, net1);
    feed_network(h, net2);
    h.feed("coupling:" + to_string(spec.coupling) + ";");
    h.feed(Eigen::MatrixXd(spec.lower1));
    h.feed(Eigen::MatrixXd(spec.upper1));
    h.feed(Eigen::MatrixXd(spec.lower2));
    h.feed(Eigen::MatrixXd(spec.upper2));
    if (spec.format) {
        h.feed("fmt:" + std::to_string(spec.format->integer_bits) + "," +
               std::to_string(spec.format->fraction_bits) + ";");
    }
    return h.hex();
}

namespace {

// JSON has no representation for non-finite doubles; failed solves carry
// NaN eigenvalues/objectives, so those round-trip as tagged strings.
nlohmann::json finite_or_tag(double v) {
    if (std::isfinite(v))
        return v;
    if (std::isnan(v))
        return "nan";
    return v > 0 ? "inf" : "-inf";
}

double double_or_tag(const nlohmann::json &v) {
    if (v.is_number())
        return v.get<double>();
    const std::string tag = v.get<std::string>();
    if (tag == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (tag == "inf")
        return std::numeric_limits<double>::infinity();
    if (tag == "-inf")
        return -std::numeric_limits<double>::infinity();
    throw FormatError("expected a number or nan/inf tag, got \"" + tag + "\"");
}

nlohmann::json vec_to_json(const Eigen::VectorXd &v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vec_from_json(const nlohmann::json &doc, int expected, const std::string &what) {
    if (static_cast<int>(doc.size()) != expected)
        throw FormatError("certificate field " + what + " has " + std::to_string(doc.size()) +
                          " entries, expected " + std::to_string(expected));
    Eigen::VectorXd v(expected);
    for (int i = 0; i < expected; ++i)
        v[i] = doc.at(static_cast<size_t>(i)).get<double>();
    return v;
}

nlohmann::json mat_to_json(const Eigen::MatrixXd &m) {
    // column-major flat
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            out.push_back(m(r, c));
    return out;
}

Eigen::MatrixXd mat_from_json(const nlohmann::json &doc, int rows, int cols, const std::string &what) {
    if (static_cast<int>(doc.size()) != rows * cols)
        throw FormatError("certificate field " + what + " has " + std::to_string(doc.size()) +
                          " entries, expected " + std::to_string(rows * cols));
    Eigen::MatrixXd m(rows, cols);
    size_t k = 0;
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            m(r, c) = doc.at(k++).get<double>();
    return m;
}

} // namespace

std::string certificate_to_json_text(const BoundCertificate &cert) {
    nlohmann::json doc;
    doc["format"] = "simbound-certificate-v1";
    doc["status"] = to_string(cert.status);
    doc["gamma"] = {{"x1", cert.gammas.x1}, {"x2", cert.gammas.x2}, {"x", cert.gammas.x}, {"affine", cert.gammas.affine}};
    doc["weights"] = {{"w_x1", cert.weights.w_x1},
                      {"w_x2", cert.weights.w_x2},
                      {"w_x", cert.weights.w_x},
                      {"w_affine", cert.weights.w_affine}};
    doc["lmi_max_eigenvalue"] = finite_or_tag(cert.lmi_max_eigenvalue);
    doc["objective_value"] = finite_or_tag(cert.objective_value);
    doc["fingerprint"] = cert.fingerprint;
    doc["solver"] = {{"backend", cert.backend},
                     {"backend_status", cert.backend_status},
                     {"solve_seconds", cert.solve_seconds},
                     {"total_seconds", cert.total_seconds},
                     {"iterations", cert.iterations},
                     {"epsilon_shift", cert.epsilon_shift}};
    doc["structure"] = {{"n_x", cert.structure.n_x},
                        {"M", cert.structure.M},
                        {"joint_box", cert.structure.joint_box},
                        {"quantised", cert.structure.quantised},
                        {"cross_slope", cert.structure.cross_slope}};
    const MultiplierSet &m = cert.multipliers;
    doc["multipliers"] = {{"box1", vec_to_json(m.box1)},
                          {"box2", vec_to_json(m.box2)},
                          {"joint_sum", vec_to_json(m.joint_sum)},
                          {"joint_diff", vec_to_json(m.joint_diff)},
                          {"comp1", vec_to_json(m.comp1)},
                          {"comp2", vec_to_json(m.comp2)},
                          {"pos1", vec_to_json(m.pos1)},
                          {"pos2", vec_to_json(m.pos2)},
                          {"cpos1", vec_to_json(m.cpos1)},
                          {"cpos2", vec_to_json(m.cpos2)},
                          {"crx1", mat_to_json(m.crx1)},
                          {"crx2", mat_to_json(m.crx2)},
                          {"crx_phi", mat_to_json(m.crx_phi)},
                          {"slope", vec_to_json(m.slope)},
                          {"q_sec", vec_to_json(m.q_sec)},
                          {"q_low", vec_to_json(m.q_low)},
                          {"q_up", vec_to_json(m.q_up)},
                          {"q_quad11", vec_to_json(m.q_quad11)},
                          {"q_quad12", vec_to_json(m.q_quad12)},
                          {"q_quad21", vec_to_json(m.q_quad21)},
                          {"q_quad22", vec_to_json(m.q_quad22)}};
    return doc.dump(2);
}

BoundCertificate certificate_from_json_text(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(std::string("certificate JSON parse error: ") + e.what());
    }
    try {
        if (doc.value("format", "") != "simbound-certificate-v1")
            throw FormatError("not a simbound certificate (missing/unknown format tag)");
        BoundCertificate cert;
        cert.status = solve_status_from_string(doc.at("status").get<std::string>());
        const auto &g = doc.at("gamma");
        cert.gammas = {g.at("x1").get<double>(), g.at("x2").get<double>(), g.at("x").get<double>(),
                       g.at("affine").get<double>()};
        const auto &w = doc.at("weights");
        cert.weights = {w.at("w_x1").get<double>(), w.at("w_x2").get<double>(), w.at("w_x").get<double>(),
                        w.at("w_affine").get<double>()};
        cert.lmi_max_eigenvalue = double_or_tag(doc.at("lmi_max_eigenvalue"));
        cert.objective_value = double_or_tag(doc.at("objective_value"));
        cert.fingerprint = doc.at("fingerprint").get<std::string>();
        const auto &s = doc.at("solver");
        cert.backend = s.at("backend").get<std::string>();
        cert.backend_status = s.value("backend_status", "");
        cert.solve_seconds = s.value("solve_seconds", 0.0);
        cert.total_seconds = s.value("total_seconds", 0.0);
        cert.iterations = s.value("iterations", 0);
        cert.epsilon_shift = s.value("epsilon_shift", 0.0);
        const auto &st = doc.at("structure");
        cert.structure.n_x = st.at("n_x").get<int>();
        cert.structure.M = st.at("M").get<int>();
        cert.structure.joint_box = st.at("joint_box").get<bool>();
        cert.structure.quantised = st.at("quantised").get<bool>();
        cert.structure.cross_slope = st.at("cross_slope").get<bool>();

        const int n_x = cert.structure.n_x;
        const int M = cert.structure.M;
        const int joint = cert.structure.joint_box ? n_x : 0;
        const int quant = cert.structure.quantised ? n_x : 0;
        const int slope = cert.structure.cross_slope ? M : 0;
        const auto &mm = doc.at("multipliers");
        MultiplierSet &m = cert.multipliers;
        m.box1 = vec_from_json(mm.at("box1"), n_x, "box1");
        m.box2 = vec_from_json(mm.at("box2"), n_x, "box2");
        m.joint_sum = vec_from_json(mm.at("joint_sum"), joint, "joint_sum");
        m.joint_diff = vec_from_json(mm.at("joint_diff"), joint, "joint_diff");
        m.comp1 = vec_from_json(mm.at("comp1"), M, "comp1");
        m.comp2 = vec_from_json(mm.at("comp2"), M, "comp2");
        m.pos1 = vec_from_json(mm.at("pos1"), M, "pos1");
        m.pos2 = vec_from_json(mm.at("pos2"), M, "pos2");
        m.cpos1 = vec_from_json(mm.at("cpos1"), M, "cpos1");
        m.cpos2 = vec_from_json(mm.at("cpos2"), M, "cpos2");
        m.crx1 = mat_from_json(mm.at("crx1"), M, M, "crx1");
        m.crx2 = mat_from_json(mm.at("crx2"), M, M, "crx2");
        m.crx_phi = mat_from_json(mm.at("crx_phi"), M, M, "crx_phi");
        m.slope = vec_from_json(mm.at("slope"), slope, "slope");
        m.q_sec = vec_from_json(mm.at("q_sec"), quant, "q_sec");
        m.q_low = vec_from_json(mm.at("q_low"), quant, "q_low");
        m.q_up = vec_from_json(mm.at("q_up"), quant, "q_up");
        m.q_quad11 = vec_from_json(mm.at("q_quad11"), quant, "q_quad11");
        m.q_quad12 = vec_from_json(mm.at("q_quad12"), quant, "q_quad12");
        m.q_quad21 = vec_from_json(mm.at("q_quad21"), quant, "q_quad21");
        m.q_quad22 = vec_from_json(mm.at("q_quad22"), quant, "q_quad22");
        return cert;
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("certificate JSON structure error: ") + e.what());
    }
}

void save_certificate(const BoundCertificate &cert, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write certificate file: " + path.string());
    out << certificate_to_json_text(cert) << "\n";
}

BoundCertificate load_certificate(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open certificate file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return certificate_from_json_text(buf.str());
}

} // namespace simbound
