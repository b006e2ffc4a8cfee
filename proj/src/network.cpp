#include "simbound/network.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "simbound/error.hpp"

namespace simbound {

namespace {

void require_finite(const Eigen::MatrixXd &m, const std::string &what) {
    if (!m.allFinite())
        throw FormatError(what + " contains a non-finite value");
}

} // namespace

NeuralNetwork::NeuralNetwork(std::vector<Layer> layers, Activation activation)
    : layers_(std::move(layers)), activation_(activation) {
    if (layers_.size() < 2)
        throw DimensionError("a network needs at least one hidden layer and an output layer");
    for (size_t k = 0; k < layers_.size(); ++k) {
        const Layer &layer = layers_[k];
        if (layer.W.rows() == 0 || layer.W.cols() == 0)
            throw DimensionError("layer " + std::to_string(k) + ": empty weight matrix");
        if (layer.b.size() != layer.W.rows())
            throw DimensionError("layer " + std::to_string(k) + ": W has " +
                                 std::to_string(layer.W.rows()) + " rows but b has " +
                                 std::to_string(layer.b.size()) + " entries");
        if (k > 0 && layers_[k - 1].W.rows() != layer.W.cols())
            throw DimensionError("layer " + std::to_string(k) + ": W has " +
                                 std::to_string(layer.W.cols()) + " columns but layer " +
                                 std::to_string(k - 1) + " produces " +
                                 std::to_string(layers_[k - 1].W.rows()) + " outputs");
        require_finite(layer.W, "layer " + std::to_string(k) + " weights");
        require_finite(layer.b, "layer " + std::to_string(k) + " bias");
    }
    for (size_t k = 0; k + 1 < layers_.size(); ++k) {
        hidden_widths_.push_back(static_cast<int>(layers_[k].W.rows()));
        total_hidden_ += static_cast<int>(layers_[k].W.rows());
    }
}

bool same_architecture(const NeuralNetwork &a, const NeuralNetwork &b) {
    return a.input_dim() == b.input_dim() && a.output_dim() == b.output_dim() &&
           a.hidden_widths() == b.hidden_widths() && a.activation() == b.activation();
}

EvalTrace evaluate(const NeuralNetwork &net, const Eigen::VectorXd &x) {
    if (x.size() != net.input_dim())
        throw DimensionError("input has dimension " + std::to_string(x.size()) + " but the network expects " +
                             std::to_string(net.input_dim()));
    EvalTrace trace;
    const int depth = net.depth();
    trace.pre_activations.reserve(depth);
    trace.post_activations.reserve(depth);
    Eigen::VectorXd current = x;
    for (int k = 0; k < depth; ++k) {
        const Layer &layer = net.layers()[k];
        Eigen::VectorXd pre = layer.W * current + layer.b;
        Eigen::VectorXd post(pre.size());
        for (Eigen::Index i = 0; i < pre.size(); ++i)
            post[i] = activate(net.activation(), pre[i]);
        trace.pre_activations.push_back(std::move(pre));
        trace.post_activations.push_back(post);
        current = std::move(post);
    }
    const Layer &out = net.layers().back();
    trace.output = out.W * current + out.b;
    return trace;
}

NeuralNetwork model_from_json_text(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(std::string("model JSON parse error: ") + e.what());
    }
    try {
        const int input_dim = doc.at("input_dim").get<int>();
        const Activation activation = activation_from_string(doc.at("activation").get<std::string>());
        std::vector<Layer> layers;
        int expected_cols = input_dim;
        for (const auto &layer_doc : doc.at("layers")) {
            const auto &wdoc = layer_doc.at("W");
            const auto &bdoc = layer_doc.at("b");
            const size_t rows = wdoc.size();
            if (rows == 0)
                throw FormatError("layer " + std::to_string(layers.size()) + ": empty W");
            const size_t cols = wdoc.at(0).size();
            Eigen::MatrixXd W(rows, cols);
            for (size_t r = 0; r < rows; ++r) {
                if (wdoc.at(r).size() != cols)
                    throw FormatError("layer " + std::to_string(layers.size()) + ": ragged W rows");
                for (size_t c = 0; c < cols; ++c)
                    W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = wdoc.at(r).at(c).get<double>();
            }
            Eigen::VectorXd b(bdoc.size());
            for (size_t r = 0; r < bdoc.size(); ++r)
                b[static_cast<Eigen::Index>(r)] = bdoc.at(r).get<double>();
            if (static_cast<int>(cols) != expected_cols)
                throw DimensionError("layer " + std::to_string(layers.size()) + ": W has " + std::to_string(cols) +
                                     " columns but the previous stage produces " + std::to_string(expected_cols));
            layers.push_back(Layer{std::move(W), std::move(b)});
            expected_cols = static_cast<int>(rows);
        }
        return NeuralNetwork(std::move(layers), activation);
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("model JSON structure error: ") + e.what());
    }
}

std::string model_to_json_text(const NeuralNetwork &net) {
    nlohmann::json doc;
    doc["input_dim"] = net.input_dim();
    doc["activation"] = to_string(net.activation());
    nlohmann::json layers = nlohmann::json::array();
    for (const Layer &layer : net.layers()) {
        nlohmann::json w = nlohmann::json::array();
        for (Eigen::Index r = 0; r < layer.W.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < layer.W.cols(); ++c)
                row.push_back(layer.W(r, c));
            w.push_back(std::move(row));
        }
        nlohmann::json b = nlohmann::json::array();
        for (Eigen::Index r = 0; r < layer.b.size(); ++r)
            b.push_back(layer.b[r]);
        layers.push_back(nlohmann::json{{"W", std::move(w)}, {"b", std::move(b)}});
    }
    doc["layers"] = std::move(layers);
    return doc.dump(2);
}

NeuralNetwork load_model(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open model file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json_text(buffer.str());
}

void save_model(const NeuralNetwork &net, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write model file: " + path.string());
    out << model_to_json_text(net) << "\n";
}

} // namespace simbound
