#include "simbound/activation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "simbound/error.hpp"

namespace simbound {

const ActivationSpec &activation_spec(Activation a) {
    static const ActivationSpec relu{true, true, false, true, true, true, 1.0, 0.0, 1.0};
    static const ActivationSpec sigmoid{true, true, true, false, false, false, 0.25, 0.0, 0.25};
    static const ActivationSpec tanh_spec{true, true, true, false, false, false, 1.0, 0.0, 1.0};
    static const ActivationSpec elu{true, true, false, false, false, false, 1.0, 0.0, 1.0};
    static const ActivationSpec saturation{true, true, true, false, false, false, 1.0, 0.0, 1.0};
    switch (a) {
    case Activation::ReLU:
        return relu;
    case Activation::Sigmoid:
        return sigmoid;
    case Activation::Tanh:
        return tanh_spec;
    case Activation::Elu:
        return elu;
    case Activation::Saturation:
        return saturation;
    }
    throw Error("unknown activation enum value");
}

double activate(Activation a, double s) {
    switch (a) {
    case Activation::ReLU:
        return s > 0.0 ? s : 0.0;
    case Activation::Sigmoid:
        return 1.0 / (1.0 + std::exp(-s)) - 0.5;
    case Activation::Tanh:
        return std::tanh(s);
    case Activation::Elu:
        return s > 0.0 ? s : std::expm1(s);
    case Activation::Saturation:
        return std::clamp(s, -1.0, 1.0);
    }
    throw Error("unknown activation enum value");
}

std::string to_string(Activation a) {
    switch (a) {
    case Activation::ReLU:
        return "relu";
    case Activation::Sigmoid:
        return "sigmoid";
    case Activation::Tanh:
        return "tanh";
    case Activation::Elu:
        return "elu";
    case Activation::Saturation:
        return "saturation";
    }
    throw Error("unknown activation enum value");
}

Activation activation_from_string(const std::string &tag) {
    std::string lower(tag);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "relu")
        return Activation::ReLU;
    if (lower == "sigmoid")
        return Activation::Sigmoid;
    if (lower == "tanh")
        return Activation::Tanh;
    if (lower == "elu")
        return Activation::Elu;
    if (lower == "saturation")
        return Activation::Saturation;
    throw FormatError("unknown activation tag: \"" + tag + "\"");
}

} // namespace simbound
