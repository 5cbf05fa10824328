// state_text.hpp
// Text grammar for pure states: signed terms `c|bits>` summed left to right,
// e.g. "0.5|0011> + 0.5|0110> + 0.5|1001> + 0.5|1100>".
//
// Coefficients: decimal reals, rationals `p/q`, `sqrt(x)`, `1/sqrt(x)`,
// `sqrt(x)/q`, or a parenthesized complex `(re+imi)` (the complex form is
// what format_state emits for states with non-real amplitudes, so any state
// the toolkit produces round-trips). A missing coefficient means 1. The
// parser is whitespace-insensitive, rejects duplicate basis terms and
// inconsistent bitstring lengths, and normalizes the result.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "qglue/state.hpp"

namespace qglue {

namespace detail {

struct text_cursor {
    std::string s;  // whitespace already removed
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return done() ? '\0' : s[pos]; }
    char take() { return s[pos++]; }

    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("parse_state: " + why + " at offset " + std::to_string(pos));
    }
};

inline double parse_number(text_cursor& c) {
    const char* begin = c.s.c_str() + c.pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) c.fail("expected a number");
    c.pos += static_cast<std::size_t>(end - begin);
    return v;
}

// number | sqrt(number), used as numerator or denominator of a coefficient.
inline double parse_number_or_sqrt(text_cursor& c) {
    if (c.s.compare(c.pos, 5, "sqrt(") == 0) {
        c.pos += 5;
        const double x = parse_number(c);
        if (c.peek() != ')') c.fail("expected ')' after sqrt argument");
        c.take();
        if (x < 0.0) c.fail("sqrt of a negative number");
        return std::sqrt(x);
    }
    return parse_number(c);
}

// Parenthesized complex literal: (re), (re+imi), (re-imi).
inline cplx parse_complex_paren(text_cursor& c) {
    c.take();  // '('
    const double re = parse_number(c);
    double im = 0.0;
    if (c.peek() == '+' || c.peek() == '-') {
        const double sign = c.take() == '-' ? -1.0 : 1.0;
        im = sign * parse_number(c);
        if (c.peek() != 'i') c.fail("expected 'i' in complex coefficient");
        c.take();
    }
    if (c.peek() != ')') c.fail("expected ')' closing complex coefficient");
    c.take();
    return cplx{re, im};
}

inline cplx parse_coefficient(text_cursor& c) {
    if (c.peek() == '|') return cplx{1.0, 0.0};  // bare ket
    cplx value;
    if (c.peek() == '(') {
        value = parse_complex_paren(c);
    } else {
        double v = parse_number_or_sqrt(c);
        if (c.peek() == '/') {
            c.take();
            const double d = parse_number_or_sqrt(c);
            if (d == 0.0) c.fail("division by zero in coefficient");
            v /= d;
        }
        value = cplx{v, 0.0};
    }
    if (c.peek() == '*') c.take();  // optional explicit multiplication sign
    return value;
}

inline void format_real(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace detail

inline pure_state parse_state(const std::string& text) {
    detail::text_cursor c;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) c.s.push_back(ch);
    }
    if (c.s.empty()) c.fail("empty input");

    std::vector<cplx> coeffs;
    std::vector<std::string> kets;

    bool first = true;
    while (!c.done()) {
        double sign = 1.0;
        if (c.peek() == '+' || c.peek() == '-') {
            sign = c.take() == '-' ? -1.0 : 1.0;
        } else if (!first) {
            c.fail("expected '+' or '-' between terms");
        }
        const cplx coef = sign * detail::parse_coefficient(c);
        if (c.peek() != '|') c.fail("expected '|' opening a ket");
        c.take();
        std::string bits;
        while (c.peek() == '0' || c.peek() == '1') bits.push_back(c.take());
        if (c.peek() != '>') c.fail("expected '>' closing a ket");
        c.take();
        if (bits.empty()) c.fail("empty bitstring");
        if (!kets.empty() && bits.size() != kets.front().size()) {
            c.fail("inconsistent bitstring lengths");
        }
        for (const auto& seen : kets) {
            if (seen == bits) c.fail("duplicate basis term |" + bits + ">");
        }
        coeffs.push_back(coef);
        kets.push_back(bits);
        first = false;
    }

    const std::size_t n = kets.front().size();
    if (n < 2 || n > 4) {
        throw std::invalid_argument("parse_state: bitstring length must be 2, 3 or 4");
    }
    std::vector<cplx> amps(std::size_t{1} << n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < kets.size(); ++i) {
        std::size_t idx = 0;
        for (char b : kets[i]) idx = (idx << 1) | static_cast<std::size_t>(b - '0');
        amps[idx] = coeffs[i];
    }
    return pure_state::from_amplitudes(n, std::move(amps));  // rejects the zero vector
}

inline std::string format_state(const pure_state& psi) {
    const std::size_t n = psi.num_qubits();
    std::string out;
    for (std::size_t idx = 0; idx < psi.dim(); ++idx) {
        const cplx a = psi.amplitude(idx);
        if (std::abs(a) <= 1e-14) continue;

        std::string bits(n, '0');
        for (std::size_t q = 0; q < n; ++q) {
            if (idx & (std::size_t{1} << qubit_bit_pos(q, n))) bits[q] = '1';
        }

        const bool is_real = std::abs(a.imag()) <= 1e-14 * std::max(1.0, std::abs(a.real()));
        if (is_real) {
            const double v = a.real();
            if (out.empty()) {
                if (v < 0.0) out += "-";
            } else {
                out += v < 0.0 ? " - " : " + ";
            }
            detail::format_real(out, std::abs(v));
        } else {
            if (!out.empty()) out += " + ";
            out += "(";
            detail::format_real(out, a.real());
            out += a.imag() < 0.0 ? "-" : "+";
            detail::format_real(out, std::abs(a.imag()));
            out += "i)";
        }
        out += "|" + bits + ">";
    }
    return out;
}

} // namespace qglue
