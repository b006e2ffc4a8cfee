#include "simbound/fixed_point.hpp"

#include <cmath>
#include <string>

#include "simbound/error.hpp"

namespace simbound {

FixedPointFormat::FixedPointFormat(int ib, int fb) : integer_bits(ib), fraction_bits(fb) {
    if (ib < 1)
        throw FormatError("fixed-point format needs at least one integer bit, got " + std::to_string(ib));
    if (fb < 1 || fb > 52)
        throw FormatError("fixed-point fraction bits must be in [1, 52], got " + std::to_string(fb));
}

double FixedPointFormat::step() const {
    return std::ldexp(1.0, -fraction_bits);
}

double FixedPointFormat::max_magnitude() const {
    return std::ldexp(1.0, integer_bits - 1);
}

double quantize_scalar(double s, const FixedPointFormat &fmt) {
    if (!(std::abs(s) < fmt.max_magnitude()))
        throw SaturationError("value " + std::to_string(s) + " does not fit a <" +
                              std::to_string(fmt.integer_bits) + "," + std::to_string(fmt.fraction_bits) +
                              "> word (|s| must stay below " + std::to_string(fmt.max_magnitude()) + ")");
    const double delta = fmt.step();
    const double magnitude = std::floor(std::abs(s) / delta) * delta;
    return s < 0.0 ? -magnitude : magnitude;
}

std::vector<std::uint8_t> encode_fixed_point(double s, const FixedPointFormat &fmt) {
    if (!(s >= 0.0) || !(s < fmt.max_magnitude()))
        throw SaturationError("encode_fixed_point expects a non-negative in-range value, got " + std::to_string(s));
    const double scaled = s / fmt.step();
    const auto units = static_cast<std::uint64_t>(scaled);
    if (static_cast<double>(units) != scaled)
        throw FormatError("value " + std::to_string(s) + " is not on the <" + std::to_string(fmt.integer_bits) +
                          "," + std::to_string(fmt.fraction_bits) + "> grid");
    const int width = fmt.integer_bits + fmt.fraction_bits;
    std::vector<std::uint8_t> bits(width);
    for (int i = 0; i < width; ++i)
        bits[width - 1 - i] = static_cast<std::uint8_t>((units >> i) & 1u);
    return bits;
}

double decode_fixed_point(const std::vector<std::uint8_t> &bits, const FixedPointFormat &fmt) {
    const size_t width = static_cast<size_t>(fmt.integer_bits) + static_cast<size_t>(fmt.fraction_bits);
    if (bits.size() != width)
        throw DimensionError("bit vector has length " + std::to_string(bits.size()) + " but the format needs " +
                             std::to_string(width));
    double value = 0.0;
    // Integer positions 2^(IB-1)..2^0, then fraction positions 2^-1..2^-FB.
    for (int i = 0; i < fmt.integer_bits; ++i)
        if (bits[static_cast<size_t>(i)])
            value += std::ldexp(1.0, fmt.integer_bits - 1 - i);
    for (int j = 1; j <= fmt.fraction_bits; ++j)
        if (bits[static_cast<size_t>(fmt.integer_bits + j - 1)])
            value += std::ldexp(1.0, -j);
    return value;
}

} // namespace simbound
