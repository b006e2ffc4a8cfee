#pragma once

#include <string>

namespace simbound {

/// Supported activation nonlinearities. ReLU is the one the constraint
/// catalogue fully covers; the others evaluate numerically and carry their
/// shape properties so callers can reject them where constraints are needed.
/// `Sigmoid` is the logistic function shifted down by 1/2 so that phi(0) = 0,
/// which every property below presumes.
enum class Activation { ReLU, Sigmoid, Tanh, Elu, Saturation };

/// Shape properties of a scalar nonlinearity phi with phi(0) = 0.
/// sector: phi(s)/s in [0, sector_hi]; slope: dphi/ds in [slope_lo, slope_hi].
struct ActivationSpec {
    bool sector_bounded = false;
    bool slope_restricted = false;
    bool bounded = false;
    bool positive = false;            // phi(s) >= 0
    bool positive_complement = false; // phi(s) - s >= 0
    bool complementarity = false;     // (phi(s) - s) * phi(s) == 0
    double sector_hi = 0.0;
    double slope_lo = 0.0;
    double slope_hi = 0.0;
};

const ActivationSpec &activation_spec(Activation a);

double activate(Activation a, double s);

std::string to_string(Activation a);

/// Parses a case-insensitive tag ("relu", "tanh", ...). Throws FormatError on
/// unknown tags.
Activation activation_from_string(const std::string &tag);

} // namespace simbound
