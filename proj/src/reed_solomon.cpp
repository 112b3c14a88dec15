#include "mmw/reed_solomon.hpp"

#include <algorithm>
#include <stdexcept>

#include "mmw/gf256.hpp"

namespace mmw::rs {

namespace {

using Poly = std::vector<std::uint8_t>;  // lowest degree first inside the decoder

std::array<std::uint8_t, kParityLength + 1> build_generator() {
    // g(x) coefficients, lowest degree first while building.
    std::array<std::uint8_t, kParityLength + 1> g{};
    g[0] = 1;
    for (std::size_t i = 0; i < kParityLength; ++i) {
        const std::uint8_t root = gf::alpha_pow(static_cast<int>(i));
        for (std::size_t j = i + 1; j > 0; --j) g[j] = gf::add(g[j - 1], gf::mul(g[j], root));
        g[0] = gf::mul(g[0], root);
    }
    std::reverse(g.begin(), g.end());
    return g;
}

std::uint8_t eval(const Poly& p, std::uint8_t x) {
    std::uint8_t acc = 0;
    for (std::size_t i = p.size(); i-- > 0;) acc = gf::add(gf::mul(acc, x), p[i]);
    return acc;
}

void check_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) +
                                    " bytes, got " + std::to_string(got));
}

}  // namespace

Codeword CodeBlock::codeword() const {
    Codeword c{};
    std::copy(message.begin(), message.end(), c.begin());
    std::copy(parity.begin(), parity.end(), c.begin() + kMessageLength);
    return c;
}

const std::array<std::uint8_t, kParityLength + 1>& generator() {
    static const auto g = build_generator();
    return g;
}

Parity rs_encode(std::span<const std::uint8_t> message) {
    check_length(message.size(), kMessageLength, "rs_encode");
    const auto& g = generator();
    Parity reg{};
    // LFSR division of m(x) x^16 by g(x); reg[0] is the highest-degree remainder term.
    for (std::uint8_t m : message) {
        const std::uint8_t feedback = gf::add(m, reg[0]);
        for (std::size_t j = 0; j + 1 < kParityLength; ++j)
            reg[j] = gf::add(reg[j + 1], gf::mul(feedback, g[j + 1]));
        reg[kParityLength - 1] = gf::mul(feedback, g[kParityLength]);
    }
    return reg;
}

CodeBlock encode_block(std::span<const std::uint8_t> message) {
    CodeBlock b;
    b.parity = rs_encode(message);
    std::copy(message.begin(), message.end(), b.message.begin());
    return b;
}

Syndromes syndromes(std::span<const std::uint8_t> codeword) {
    check_length(codeword.size(), kCodeLength, "syndromes");
    Syndromes s{};
    for (std::size_t i = 0; i < kParityLength; ++i) {
        const std::uint8_t x = gf::alpha_pow(static_cast<int>(i));
        std::uint8_t acc = 0;
        for (std::uint8_t c : codeword) acc = gf::add(gf::mul(acc, x), c);
        s[i] = acc;
    }
    return s;
}

DecodeResult rs_decode(std::span<const std::uint8_t> received) {
    check_length(received.size(), kCodeLength, "rs_decode");

    DecodeResult out;
    const Syndromes s = syndromes(received);
    out.nonzero_syndromes =
        static_cast<int>(std::count_if(s.begin(), s.end(), [](std::uint8_t v) { return v != 0; }));

    if (out.nonzero_syndromes == 0) {
        std::copy_n(received.begin(), kMessageLength, out.message.begin());
        out.status = DecodeStatus::ok;
        return out;
    }

    // Berlekamp-Massey: error locator lambda(x), lowest degree first.
    Poly lambda{1}, prev{1};
    int len = 0;
    int shift = 1;
    std::uint8_t prev_disc = 1;
    for (std::size_t n = 0; n < kParityLength; ++n) {
        std::uint8_t disc = s[n];
        for (int i = 1; i <= len; ++i)
            if (static_cast<std::size_t>(i) < lambda.size()) disc = gf::add(disc, gf::mul(lambda[i], s[n - i]));
        if (disc == 0) {
            ++shift;
            continue;
        }
        const std::uint8_t coef = gf::div(disc, prev_disc);
        Poly next = lambda;
        if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
        for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] = gf::add(next[i + shift], gf::mul(coef, prev[i]));
        if (2 * len <= static_cast<int>(n)) {
            prev = lambda;
            len = static_cast<int>(n) + 1 - len;
            prev_disc = disc;
            shift = 1;
        } else {
            ++shift;
        }
        lambda = std::move(next);
    }
    while (lambda.size() > 1 && lambda.back() == 0) lambda.pop_back();

    const int degree = static_cast<int>(lambda.size()) - 1;
    if (degree != len || degree > static_cast<int>(kMaxCorrectable)) {
        out.reason = "error locator degree exceeds correction capability";
        return out;
    }

    // Chien search. Codeword index j holds the coefficient of x^(254 - j); its locator is alpha^(254 - j).
    std::vector<std::size_t> positions;
    for (std::size_t j = 0; j < kCodeLength; ++j) {
        const int power = static_cast<int>(kCodeLength - 1 - j);
        if (eval(lambda, gf::alpha_pow(-power)) == 0) positions.push_back(j);
    }
    if (static_cast<int>(positions.size()) != degree) {
        out.reason = "locator roots do not match its degree";
        return out;
    }

    // Forney with first consecutive root alpha^0: e = X * omega(X^-1) / lambda'(X^-1).
    Poly omega(kParityLength, 0);
    for (std::size_t i = 0; i < kParityLength; ++i)
        for (std::size_t k = 0; k < lambda.size() && i + k < kParityLength; ++k)
            omega[i + k] = gf::add(omega[i + k], gf::mul(s[i], lambda[k]));
    Poly dlambda(lambda.size() > 1 ? lambda.size() - 1 : 1, 0);
    for (std::size_t i = 1; i < lambda.size(); i += 2) dlambda[i - 1] = lambda[i];

    Codeword corrected{};
    std::copy(received.begin(), received.end(), corrected.begin());
    for (std::size_t j : positions) {
        const int power = static_cast<int>(kCodeLength - 1 - j);
        const std::uint8_t x = gf::alpha_pow(power);
        const std::uint8_t x_inv = gf::alpha_pow(-power);
        const std::uint8_t denom = eval(dlambda, x_inv);
        if (denom == 0) {
            out.reason = "zero derivative in Forney step";
            return out;
        }
        const std::uint8_t magnitude = gf::mul(x, gf::div(eval(omega, x_inv), denom));
        if (magnitude == 0) {
            out.reason = "zero error magnitude";
            return out;
        }
        corrected[j] = gf::add(corrected[j], magnitude);
    }

    const Syndromes check = syndromes(corrected);
    if (std::any_of(check.begin(), check.end(), [](std::uint8_t v) { return v != 0; })) {
        out.reason = "corrected word is not a codeword";
        return out;
    }

    std::copy_n(corrected.begin(), kMessageLength, out.message.begin());
    out.corrected = degree;
    out.status = DecodeStatus::ok;
    return out;
}

}  // namespace mmw::rs
