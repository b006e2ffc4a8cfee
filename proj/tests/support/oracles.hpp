#pragma once

// Independent reference implementations used as test oracles. Everything in
// here is deliberately written with plain loops over std::vector so it shares
// no code path with the library under test.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline double relu(double s) { return s > 0.0 ? s : 0.0; }

/// Plain-loop forward pass through hidden layers (W, b) and the affine
/// output stage.
inline Vec naive_forward(const std::vector<Mat> &weights, const std::vector<Vec> &biases, const Vec &x) {
    Vec current = x;
    for (size_t layer = 0; layer < weights.size(); ++layer) {
        const Mat &W = weights[layer];
        const Vec &b = biases[layer];
        Vec next(W.size(), 0.0);
        for (size_t r = 0; r < W.size(); ++r) {
            double acc = b[r];
            for (size_t c = 0; c < W[r].size(); ++c)
                acc += W[r][c] * current[c];
            next[r] = layer + 1 < weights.size() ? relu(acc) : acc;
        }
        current = next;
    }
    return current;
}

/// Bit-level round-toward-zero quantisation: scale to grid units, truncate
/// to an integer, expand that integer's bits with positional weights
/// 2^(i - FB), and reapply the sign. Mirrors a sign-magnitude fixed-point
/// store/load cycle without touching the library's arithmetic.
inline double bitlevel_quantize(double s, int integer_bits, int fraction_bits) {
    const double magnitude = std::fabs(s);
    const double scaled = std::ldexp(magnitude, fraction_bits);
    const auto units = static_cast<std::uint64_t>(scaled); // truncation toward zero
    double value = 0.0;
    for (int i = 0; i < integer_bits + fraction_bits; ++i)
        if ((units >> i) & 1u)
            value += std::ldexp(1.0, i - fraction_bits);
    return s < 0.0 ? -value : value;
}

} // namespace oracles
