#pragma once

#include <array>
#include <cstdint>

namespace mmw::gf {

/// Field polynomial x^8 + x^4 + x^3 + x^2 + 1.
inline constexpr unsigned kFieldPoly = 0x11D;

/// Element of GF(2^8), stored as a polynomial over GF(2) in one byte.
struct GfElement {
    std::uint8_t value = 0;

    constexpr GfElement() = default;
    constexpr explicit GfElement(std::uint8_t v) : value(v) {}

    friend constexpr bool operator==(GfElement, GfElement) = default;
};

struct Tables {
    std::array<std::uint8_t, 512> exp{};  // doubled so exp[log a + log b] needs no reduction
    std::array<std::uint8_t, 256> log{};  // log[0] is unused
};

const Tables& tables();

inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

inline std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    const auto& t = tables();
    return t.exp[t.log[a] + t.log[b]];
}

/// Multiplicative inverse; throws std::domain_error for 0.
std::uint8_t inv(std::uint8_t a);

std::uint8_t div(std::uint8_t a, std::uint8_t b);

/// alpha^n for any integer n (negative allowed).
std::uint8_t alpha_pow(int n);

inline GfElement operator+(GfElement a, GfElement b) { return GfElement(add(a.value, b.value)); }
inline GfElement operator*(GfElement a, GfElement b) { return GfElement(mul(a.value, b.value)); }

inline GfElement gf_mul(GfElement a, GfElement b) { return a * b; }

}  // namespace mmw::gf
