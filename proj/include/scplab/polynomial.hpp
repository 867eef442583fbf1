// Univariate polynomials over Z and Q, coefficients stored constant term first.
#pragma once

#include "scplab/numeric.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scplab::linalg {

template <class T>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
    Polynomial(std::initializer_list<long> coeffs) {
        for (long v : coeffs) c_.emplace_back(v);
        trim();
    }

    static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
    static Polynomial x() { return Polynomial(std::vector<T>{T(0), T(1)}); }
    static Polynomial monomial(std::size_t deg, const T& coeff = T(1)) {
        std::vector<T> c(deg + 1);
        c[deg] = coeff;
        return Polynomial(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    /// Degree; the zero polynomial reports -1.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const T& leading() const { return c_.back(); }
    bool monic() const { return !c_.empty() && c_.back() == 1; }
    const std::vector<T>& coefficients() const { return c_; }
    T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<T> out(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(i) + b.coeff(i);
        return Polynomial(std::move(out));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<T> out(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(i) - b.coeff(i);
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        }
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const T& s, const Polynomial& p) { return constant(s) * p; }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    /// Long division; for integer coefficients the divisor must be monic (up to sign).
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
        if (d.is_zero()) throw std::invalid_argument("polynomial division by zero");
        if constexpr (std::is_same_v<T, Int>) {
            if (d.leading() != 1 && d.leading() != -1)
                throw std::invalid_argument("integer division requires a monic divisor");
        }
        std::vector<T> rem = c_;
        const int dd = d.degree();
        if (degree() < dd) return {Polynomial(), *this};
        std::vector<T> quot(static_cast<std::size_t>(degree() - dd + 1));
        for (int k = degree() - dd; k >= 0; --k) {
            T q = rem[static_cast<std::size_t>(k + dd)] / d.leading();
            quot[static_cast<std::size_t>(k)] = q;
            if (q == 0) continue;
            for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= q * d.c_[static_cast<std::size_t>(j)];
        }
        return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<T> out(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) out[i - 1] = c_[i] * T(static_cast<long>(i));
        return Polynomial(std::move(out));
    }

    std::string str() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (i) os << ',';
            if constexpr (std::is_same_v<T, Rational>)
                os << to_string(c_[i]);
            else
                os << c_[i];
        }
        os << ']';
        return os.str();
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<T> c_;
};

using IntPolynomial = Polynomial<Int>;
using RatPolynomial = Polynomial<Rational>;

inline RatPolynomial to_rational(const IntPolynomial& p) {
    std::vector<Rational> c;
    for (const auto& v : p.coefficients()) c.emplace_back(v);
    return RatPolynomial(std::move(c));
}

/// Converts when every coefficient is an integer; throws otherwise.
inline IntPolynomial to_integer(const RatPolynomial& p) {
    std::vector<Int> c;
    for (const auto& v : p.coefficients()) {
        if (!is_integral(v)) throw std::invalid_argument("non-integer coefficient");
        c.push_back(numerator_of(v));
    }
    return IntPolynomial(std::move(c));
}

inline RatPolynomial make_monic(const RatPolynomial& p) {
    if (p.is_zero()) return p;
    Rational lead = p.leading();
    std::vector<Rational> c = p.coefficients();
    for (auto& v : c) v /= lead;
    return RatPolynomial(std::move(c));
}

/// Monic gcd over Q.
inline RatPolynomial gcd(RatPolynomial a, RatPolynomial b) {
    while (!b.is_zero()) {
        auto r = a.divmod(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(a);
}

/// Yun's square-free factorization over Q: returns a_1, a_2, ... with f ~ prod a_i^i.
inline std::vector<RatPolynomial> square_free_factorization(const RatPolynomial& f) {
    std::vector<RatPolynomial> out;
    if (f.degree() <= 0) return out;
    RatPolynomial fm = make_monic(f);
    RatPolynomial d = fm.derivative();
    RatPolynomial a = gcd(fm, d);
    RatPolynomial b = fm.divmod(a).first;
    RatPolynomial c = d.divmod(a).first;
    RatPolynomial e = c - b.derivative();
    while (b.degree() > 0) {
        RatPolynomial g = gcd(b, e);
        out.push_back(g);
        b = b.divmod(g).first;
        c = e.divmod(g).first;
        e = c - b.derivative();
    }
    return out;
}

inline long euler_phi(long m) {
    long result = m;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p) continue;
        while (m % p == 0) m /= p;
        result -= result / p;
    }
    if (m > 1) result -= result / m;
    return result;
}

/// All m with phi(m) <= d, i.e. every order of a root of unity of degree <= d over Q.
inline std::vector<long> root_of_unity_orders(int d) {
    std::vector<long> out;
    // phi(m) >= sqrt(m/2), so m <= 2 d^2 bounds the search.
    const long bound = 2L * d * d + 2;
    for (long m = 1; m <= bound; ++m)
        if (euler_phi(m) <= d) out.push_back(m);
    return out;
}

inline long root_of_unity_exponent(int d) {
    long n = 1;
    for (long m : root_of_unity_orders(d)) n = std::lcm(n, m);
    return n;
}

inline IntPolynomial cyclotomic(long m) {
    IntPolynomial p = IntPolynomial::monomial(static_cast<std::size_t>(m)) - IntPolynomial::constant(Int(1));
    for (long k = 1; k < m; ++k)
        if (m % k == 0) p = p.divmod(cyclotomic(k)).first;
    return p;
}

/// x^e mod f; over Z the modulus must be monic.
template <class T>
Polynomial<T> power_of_x_mod(unsigned long e, const Polynomial<T>& f) {
    using P = Polynomial<T>;
    P result = P::constant(T(1)).divmod(f).second;
    P base = P::x().divmod(f).second;
    while (e) {
        if (e & 1UL) result = (result * base).divmod(f).second;
        base = (base * base).divmod(f).second;
        e >>= 1UL;
    }
    return result;
}

}  // namespace scplab::linalg
