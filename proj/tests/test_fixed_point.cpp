#include <doctest.h>

#include "simbound/error.hpp"
#include "simbound/fixed_point.hpp"
#include "support/oracles.hpp"

using namespace simbound;

TEST_CASE("quantize_scalar: frozen values on the quarter grid") {
    const FixedPointFormat fmt(8, 2); // step 0.25
    CHECK(quantize_scalar(0.0, fmt) == 0.0);
    CHECK(quantize_scalar(0.6, fmt) == 0.5);
    CHECK(quantize_scalar(-0.6, fmt) == -0.5); // rounds toward zero
    CHECK(quantize_scalar(0.25, fmt) == 0.25); // grid points are fixed points
    CHECK(quantize_scalar(quantize_scalar(0.6, fmt), fmt) == 0.5); // idempotent
}

TEST_CASE("quantize_scalar agrees with the bit-level reference everywhere in range") {
    const FixedPointFormat fmt(6, 4);
    for (int i = -40000; i <= 40000; ++i) {
        const double s = i * 7.61e-4; // covers (-30.44, 30.44), off-grid points
        CHECK(quantize_scalar(s, fmt) == oracles::bitlevel_quantize(s, 6, 4));
    }
}

TEST_CASE("quantize_scalar saturates loudly out of range") {
    const FixedPointFormat fmt(4, 2); // magnitudes below 8
    CHECK(quantize_scalar(7.99, fmt) == 7.75);
    CHECK_THROWS_AS(quantize_scalar(8.0, fmt), SaturationError);
    CHECK_THROWS_AS(quantize_scalar(-8.0, fmt), SaturationError);
    CHECK_THROWS_AS(quantize_scalar(std::numeric_limits<double>::quiet_NaN(), fmt), SaturationError);
}

TEST_CASE("sector and bracketing properties of q on a fine grid") {
    const FixedPointFormat fmt(8, 3);
    const double delta = fmt.step();
    for (int i = -20000; i <= 20000; ++i) {
        const double s = i * 1.37e-4;
        const double q = quantize_scalar(s, fmt);
        CHECK((s - q) * q >= 0.0);  // sector product
        CHECK(q * s >= 0.0);        // never crosses zero
        CHECK(std::abs(q - s) < delta);
        if (s >= 0.0) {
            CHECK(q <= s);
            CHECK(q > s - delta);
        } else {
            CHECK(q >= s);
            CHECK(q < s + delta);
        }
    }
}

TEST_CASE("decode_fixed_point: frozen values") {
    const FixedPointFormat fmt(6, 4);
    CHECK(decode_fixed_point(std::vector<std::uint8_t>(10, 0), fmt) == 0.0);
    // 011111.0111 = 31.4375, the largest <6,4> value below 31.4592
    const std::vector<std::uint8_t> bits{0, 1, 1, 1, 1, 1, 0, 1, 1, 1};
    CHECK(decode_fixed_point(bits, fmt) == 31.4375);
    CHECK(decode_fixed_point(bits, fmt) == quantize_scalar(31.4592, fmt));
    CHECK_THROWS_AS(decode_fixed_point(std::vector<std::uint8_t>(9, 0), fmt), DimensionError);
}

TEST_CASE("encode/decode round-trips every representable value") {
    const FixedPointFormat fmt(2, 2); // grid step 0.25, values in [0, 2)
    for (int units = 0; units < 8; ++units) {
        const double value = units * 0.25;
        const auto bits = encode_fixed_point(value, fmt);
        REQUIRE(bits.size() == 4);
        CHECK(decode_fixed_point(bits, fmt) == value);
    }
    CHECK_THROWS_AS(encode_fixed_point(0.3, fmt), FormatError);      // off grid
    CHECK_THROWS_AS(encode_fixed_point(-0.25, fmt), SaturationError); // sign lives outside the word
    CHECK_THROWS_AS(encode_fixed_point(2.0, fmt), SaturationError);
}

TEST_CASE("format validation") {
    CHECK_THROWS_AS(FixedPointFormat(0, 2), FormatError);
    CHECK_THROWS_AS(FixedPointFormat(4, 0), FormatError);
    CHECK_THROWS_AS(FixedPointFormat(4, 53), FormatError);
    CHECK(FixedPointFormat(4, 2).step() == 0.25);
    CHECK(FixedPointFormat(4, 2).max_magnitude() == 8.0);
}
