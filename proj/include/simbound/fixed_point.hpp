#pragma once

#include <cstdint>
#include <vector>

namespace simbound {

/// Signed fixed-point word layout <IB, FB>: IB bits ahead of the binary
/// point (the top one acting as the sign slot, so magnitudes stay below
/// 2^(IB-1)) and FB fractional bits. The grid step is 2^-FB.
struct FixedPointFormat {
    int integer_bits;
    int fraction_bits;

    FixedPointFormat(int ib, int fb);

    double step() const;          // 2^-FB, exact in binary64 for FB <= 52
    double max_magnitude() const; // 2^(IB-1)
};

/// Rounds toward zero onto the step grid: sgn(s) * floor(|s| / step) * step.
/// |q(s) - s| < step, q(s) * s >= 0, and q is idempotent. Inputs with
/// |s| >= 2^(IB-1) do not fit the word and raise SaturationError.
double quantize_scalar(double s, const FixedPointFormat &fmt);

/// Writes a non-negative grid value as IB+FB bits, most significant first
/// (positions 2^(IB-1) .. 2^0 then 2^-1 .. 2^-FB). The value must be
/// exactly representable; the sign is handled outside this word.
std::vector<std::uint8_t> encode_fixed_point(double s, const FixedPointFormat &fmt);

/// Positional reconstruction of an IB+FB bit word, inverse of
/// encode_fixed_point on representable values.
double decode_fixed_point(const std::vector<std::uint8_t> &bits, const FixedPointFormat &fmt);

} // namespace simbound
