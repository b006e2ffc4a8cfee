#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "simbound/fixed_point.hpp"

namespace simbound {

/// How the two inputs relate inside the admissible set.
///  - Independent: x1 and x2 range freely over their boxes.
///  - Quantised:   x2 = q(x1), q rounding toward zero on the format's grid.
///  - Identical:   x2 = x1 (the x2 coordinates alias x1 in the final LMI).
enum class Coupling { Independent, Quantised, Identical };

std::string to_string(Coupling c);
Coupling coupling_from_string(const std::string &tag);

/// Per-network hyper-rectangles plus the coupling between the inputs.
struct InputSpec {
    Eigen::VectorXd lower1, upper1;
    Eigen::VectorXd lower2, upper2;
    Coupling coupling = Coupling::Independent;
    std::optional<FixedPointFormat> format; // required when coupling == Quantised

    static InputSpec independent(Eigen::VectorXd lo1, Eigen::VectorXd hi1, Eigen::VectorXd lo2,
                                 Eigen::VectorXd hi2);
    /// Both inputs in [-radius, radius]^n_x with the given coupling.
    static InputSpec symmetric_box(double radius, int n_x, Coupling coupling,
                                   std::optional<FixedPointFormat> format = std::nullopt);

    bool bounds_equal() const;

    /// Throws on inconsistent dimensions or bounds, a missing fixed-point
    /// format under quantised coupling, unequal boxes under quantised or
    /// identical coupling, and quantised boxes that q does not map into
    /// themselves (which would make the x2 box constraint unsound).
    void validate(int n_x) const;
};

/// Draws one admissible pair: x1 uniform in its box and x2 per the coupling
/// (uniform in its own box, q(x1), or x1 itself).
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_admissible(const InputSpec &spec, std::mt19937_64 &rng);

} // namespace simbound
