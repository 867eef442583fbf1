// Exact and high-precision scalar types shared by every module.
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scplab {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using HighFloat = boost::multiprecision::cpp_bin_float_100;
using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Raised when a certified numeric procedure cannot reach a decision.
struct Indeterminate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rational make_rational(const Int& num, const Int& den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
}

inline Int numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Int denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integral(const Rational& q) { return denominator_of(q) == 1; }

/// Parses "p", "p/q", or a plain decimal like "0.25" exactly.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        return make_rational(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(Int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    if (digits == "-" || digits.empty()) digits += "0";
    Int den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return make_rational(Int(digits), den);
}

inline std::string to_string(const Rational& q) {
    if (is_integral(q)) return numerator_of(q).str();
    return numerator_of(q).str() + "/" + denominator_of(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline bool is_prime(const Int& p) {
    if (p < 2) return false;
    for (Int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

/// p-adic valuation of a nonzero integer.
inline int valuation(Int n, const Int& p) {
    if (n == 0) throw std::invalid_argument("valuation of zero");
    int v = 0;
    if (n < 0) n = -n;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline int valuation(const Rational& q, const Int& p) {
    return valuation(numerator_of(q), p) - valuation(denominator_of(q), p);
}

/// e^{2 pi i phase}, with the phase reduced mod 1 first to keep the argument small.
/// Quarter turns are returned exactly.
inline Complex unit_phase(double phase) {
    double r = phase - std::floor(phase);
    if (r == 0.0) return {1.0, 0.0};
    if (r == 0.25) return {0.0, 1.0};
    if (r == 0.5) return {-1.0, 0.0};
    if (r == 0.75) return {0.0, -1.0};
    return std::polar(1.0, kTwoPi * r);
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("character overflow");
    return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("character overflow");
    return out;
}

}  // namespace scplab
