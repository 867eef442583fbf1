// Exact eigenvalue criteria: characteristic polynomials, the Kronecker unit-circle
// test, certified root enclosures, Newton polygons and contraction splits.
#pragma once

#include "scplab/int_matrix.hpp"
#include "scplab/numeric.hpp"
#include "scplab/polynomial.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace scplab::linalg {

using RatMatrix = std::vector<std::vector<Rational>>;
using HighComplex = boost::multiprecision::cpp_complex_100;

inline RatMatrix to_rat_matrix(const IntMatrix& m) {
    RatMatrix out(m.rows(), std::vector<Rational>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = Rational(m(r, c));
    return out;
}

/// Inverse over Q by Gauss-Jordan; throws on singular input.
inline RatMatrix rat_inverse(RatMatrix a) {
    const std::size_t n = a.size();
    RatMatrix inv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw std::invalid_argument("singular matrix");
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Rational piv = a[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            Rational f = a[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

namespace detail {

/// det(xI - M) by Bareiss elimination over T[x]. The k-th pivot is the k-th leading
/// principal minor of xI - M, which is monic, so every division is exact.
template <class T, class Entry>
Polynomial<T> bareiss_char_poly(const std::vector<std::vector<Entry>>& m) {
    using P = Polynomial<T>;
    const std::size_t n = m.size();
    if (n == 0) return P::constant(T(1));
    std::vector<std::vector<P>> a(n, std::vector<P>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n) throw std::invalid_argument("char_poly needs a square matrix");
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = P::constant(T(-m[i][j]));
            if (i == j) a[i][j] = a[i][j] + P::x();
        }
    }
    P prev = P::constant(T(1));
    for (std::size_t k = 0; k + 1 < n; ++k) {
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                P num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                auto [q, r] = num.divmod(prev);
                if (!r.is_zero()) throw std::logic_error("inexact Bareiss step");
                a[i][j] = q;
            }
        prev = a[k][k];
    }
    return a[n - 1][n - 1];
}

}  // namespace detail

inline IntPolynomial char_poly(const IntMatrix& m) {
    if (!m.square()) throw std::invalid_argument("char_poly needs a square matrix");
    std::vector<std::vector<Int>> rows(m.rows(), std::vector<Int>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
    return detail::bareiss_char_poly<Int>(rows);
}

inline RatPolynomial char_poly(const RatMatrix& m) { return detail::bareiss_char_poly<Rational>(m); }

// ---------------------------------------------------------------------------
// Roots of unity

/// True iff every root of the monic integer polynomial f has modulus one.
/// Decided exactly: f | (x^N - 1)^deg f with N the lcm of all orders m, phi(m) <= deg f.
inline bool kronecker_all_roots_unit_modulus(const IntPolynomial& f) {
    if (!f.monic()) throw std::invalid_argument("Kronecker test needs a monic polynomial");
    if (f.coeff(0) == 0) throw std::invalid_argument("zero constant term: 0 is a root");
    const int d = f.degree();
    if (d == 0) return true;
    const long n = root_of_unity_exponent(d);
    IntPolynomial t = power_of_x_mod(static_cast<unsigned long>(n), f) - IntPolynomial::constant(Int(1));
    IntPolynomial acc = IntPolynomial::constant(Int(1));
    for (int i = 0; i < d; ++i) acc = (acc * t).divmod(f).second;
    return acc.is_zero();
}

/// True iff f shares a root with x^N - 1, i.e. has a root of unity among its roots.
inline bool has_root_of_unity_factor(const IntPolynomial& f) {
    if (f.is_zero()) throw std::invalid_argument("zero polynomial");
    RatPolynomial fr = make_monic(to_rational(f));
    if (fr.degree() <= 0) return false;
    const long n = root_of_unity_exponent(fr.degree());
    RatPolynomial r = power_of_x_mod(static_cast<unsigned long>(n), fr) - RatPolynomial::constant(Rational(1));
    return gcd(fr, r).degree() > 0;
}

/// Splits f = cyclotomic_part * rest with every cyclotomic factor (with multiplicity)
/// moved into the first component. Works over Q.
inline std::pair<RatPolynomial, RatPolynomial> split_cyclotomic(const RatPolynomial& f) {
    RatPolynomial rest = make_monic(f);
    RatPolynomial cyc = RatPolynomial::constant(Rational(1));
    if (rest.degree() <= 0) return {cyc, rest};
    for (long m : root_of_unity_orders(rest.degree())) {
        RatPolynomial phi = to_rational(cyclotomic(m));
        while (rest.degree() >= phi.degree()) {
            auto [q, r] = rest.divmod(phi);
            if (!r.is_zero()) break;
            rest = q;
            cyc = cyc * phi;
        }
    }
    return {cyc, rest};
}

// ---------------------------------------------------------------------------
// Certified root enclosures

struct RootEnclosure {
    std::complex<double> center;
    double radius = 0.0;
    double modulus_lo = 0.0;
    double modulus_hi = 0.0;
    int multiplicity = 1;

    bool excludes_unit_modulus() const { return modulus_hi < 1.0 || modulus_lo > 1.0; }
    bool within_unit_band(double tol) const { return modulus_lo >= 1.0 - tol && modulus_hi <= 1.0 + tol; }
};

namespace detail {

inline HighFloat to_high(const Rational& q) {
    return HighFloat(numerator_of(q).str()) / HighFloat(denominator_of(q).str());
}

inline HighComplex horner(const std::vector<HighFloat>& c, const HighComplex& z) {
    HighComplex acc(0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + HighComplex(c[i]);
    return acc;
}

inline std::vector<std::complex<double>> aberth_double(const std::vector<double>& c) {
    const std::size_t n = c.size() - 1;
    double bound = 0;
    for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, std::abs(c[i] / c[n]));
    bound += 1.0;
    std::vector<std::complex<double>> z(n);
    for (std::size_t k = 0; k < n; ++k)
        z[k] = std::polar(bound * 0.5 + 0.1, kTwoPi * (static_cast<double>(k) + 0.25) / static_cast<double>(n) + 0.4);
    auto eval = [&](std::complex<double> x, std::complex<double>& dp) {
        std::complex<double> p = 0;
        dp = 0;
        for (std::size_t i = c.size(); i-- > 0;) {
            dp = dp * x + p;
            p = p * x + c[i];
        }
        return p;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double max_step = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> dp;
            std::complex<double> p = eval(z[i], dp);
            if (p == 0.0) continue;
            std::complex<double> ratio = p / dp;
            std::complex<double> sum = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) sum += 1.0 / (z[i] - z[j]);
            std::complex<double> step = ratio / (1.0 - ratio * sum);
            z[i] -= step;
            max_step = std::max(max_step, std::abs(step));
        }
        if (max_step < 1e-15) break;
    }
    return z;
}

/// Encloses the roots of a square-free rational polynomial. Each returned disk
/// contains exactly one root (disjoint inclusion disks around Aberth iterates).
inline std::vector<RootEnclosure> enclose_simple_roots(const RatPolynomial& f, double target_width) {
    RatPolynomial fm = make_monic(f);
    const int n = fm.degree();
    std::vector<RootEnclosure> out;
    if (n <= 0) return out;
    std::vector<HighFloat> ch;
    std::vector<double> cd;
    for (const auto& q : fm.coefficients()) {
        ch.push_back(to_high(q));
        cd.push_back(to_double(q));
    }
    std::vector<std::complex<double>> seed = aberth_double(cd);
    std::vector<HighComplex> z;
    for (auto s : seed) z.emplace_back(HighFloat(s.real()), HighFloat(s.imag()));
    const HighFloat slack("1e-80");
    for (int round = 0; round < 60; ++round) {
        // Aberth polishing in extended precision.
        for (int i = 0; i < n; ++i) {
            HighComplex p = horner(ch, z[i]);
            if (p == HighComplex(0)) continue;
            HighComplex dp(0), acc(0);
            for (std::size_t k = ch.size(); k-- > 0;) {
                dp = dp * z[i] + acc;
                acc = acc * z[i] + HighComplex(ch[k]);
            }
            HighComplex ratio = p / dp;
            HighComplex sum(0);
            for (int j = 0; j < n; ++j)
                if (j != i) sum += HighComplex(1) / (z[i] - z[j]);
            z[i] -= ratio / (HighComplex(1) - ratio * sum);
        }
        if (round < 3) continue;
        // Inclusion radii r_i = n |f(z_i) / prod_{j != i} (z_i - z_j)|.
        std::vector<HighFloat> radius(n);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            HighComplex denom(1);
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= z[i] - z[j];
            if (denom == HighComplex(0)) {
                ok = false;
                break;
            }
            radius[i] = HighFloat(n) * abs(horner(ch, z[i]) / denom) + slack;
            if (radius[i] * 2 > HighFloat(target_width)) ok = false;
        }
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n; ++j)
                if (abs(z[i] - z[j]) <= radius[i] + radius[j]) ok = false;
        if (!ok) continue;
        for (int i = 0; i < n; ++i) {
            RootEnclosure e;
            e.center = {z[i].real().convert_to<double>(), z[i].imag().convert_to<double>()};
            HighFloat mod = abs(z[i]);
            e.radius = radius[i].convert_to<double>();
            HighFloat lo = mod - radius[i];
            e.modulus_lo = std::nextafter(lo < 0 ? 0.0 : lo.convert_to<double>(), 0.0);
            e.modulus_hi = std::nextafter((mod + radius[i]).convert_to<double>(), 1e300);
            out.push_back(e);
        }
        return out;
    }
    throw Indeterminate("root enclosure did not certify for " + f.str());
}

}  // namespace detail

/// Certified enclosures for all roots of f (distinct roots, multiplicity recorded).
inline std::vector<RootEnclosure> isolate_roots(const RatPolynomial& f, double target_width = 1e-9) {
    std::vector<RootEnclosure> out;
    auto factors = square_free_factorization(f);
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i].degree() <= 0) continue;
        for (auto e : detail::enclose_simple_roots(factors[i], target_width)) {
            e.multiplicity = static_cast<int>(i + 1);
            out.push_back(e);
        }
    }
    return out;
}

inline std::vector<RootEnclosure> isolate_roots(const IntPolynomial& f, double target_width = 1e-9) {
    return isolate_roots(to_rational(f), target_width);
}

// ---------------------------------------------------------------------------
// Newton polygons

struct NewtonPolygon {
    Int prime;
    std::vector<std::pair<int, int>> vertices;
    /// (slope, horizontal length) per hull edge, left to right.
    std::vector<std::pair<Rational, int>> slopes;

    /// Root valuations (= -slope), one entry per root counted with multiplicity.
    std::vector<Rational> root_valuations() const {
        std::vector<Rational> out;
        for (const auto& [s, len] : slopes)
            for (int i = 0; i < len; ++i) out.push_back(-s);
        return out;
    }
};

inline NewtonPolygon newton_polygon(const RatPolynomial& f, const Int& p) {
    if (!is_prime(p)) throw std::invalid_argument("newton_polygon: p is not prime");
    if (f.is_zero() || f.coeff(0) == 0) throw std::invalid_argument("newton_polygon: f(0) must be nonzero");
    std::vector<std::pair<int, int>> pts;
    for (int i = 0; i <= f.degree(); ++i) {
        const Rational& c = f.coefficients()[static_cast<std::size_t>(i)];
        if (c != 0) pts.emplace_back(i, valuation(c, p));
    }
    std::vector<std::pair<int, int>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            long cross = static_cast<long>(b.first - a.first) * (pt.second - a.second) -
                         static_cast<long>(b.second - a.second) * (pt.first - a.first);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    NewtonPolygon np{p, hull, {}};
    for (std::size_t i = 1; i < hull.size(); ++i) {
        int dx = hull[i].first - hull[i - 1].first;
        int dy = hull[i].second - hull[i - 1].second;
        np.slopes.emplace_back(Rational(dy, dx), dx);
    }
    return np;
}

// ---------------------------------------------------------------------------
// Integrality trichotomy

struct NonIntegerCoefficient {
    Int prime;
    Rational root_valuation;
};
struct IntegerRootsOfUnity {};
struct IntegerOffUnitCircle {
    double modulus_lo;
    double modulus_hi;
};
using IntegralityCase = std::variant<NonIntegerCoefficient, IntegerRootsOfUnity, IntegerOffUnitCircle>;

/// Among enclosures whose modulus interval excludes 1, the one farthest from the circle.
inline std::optional<RootEnclosure> off_circle_witness(const std::vector<RootEnclosure>& roots) {
    std::optional<RootEnclosure> best;
    double best_gap = -1;
    for (const auto& r : roots) {
        if (!r.excludes_unit_modulus()) continue;
        double gap = r.modulus_lo > 1.0 ? std::log(r.modulus_lo) : -std::log(std::max(r.modulus_hi, 1e-300));
        if (gap > best_gap) {
            best_gap = gap;
            best = r;
        }
    }
    return best;
}

inline IntegralityCase integrality_trichotomy(const RatPolynomial& f) {
    if (!f.monic()) throw std::invalid_argument("integrality_trichotomy needs a monic polynomial");
    std::optional<Int> prime;
    for (const auto& c : f.coefficients()) {
        if (is_integral(c)) continue;
        Int den = denominator_of(c);
        for (Int q = 2; q <= den; ++q)
            if (den % q == 0) {
                if (!prime || q < *prime) prime = q;
                break;
            }
    }
    if (prime) {
        // Some coefficient has negative p-adic valuation, so some root does too.
        Int p = *prime;
        if (f.coeff(0) == 0) throw std::invalid_argument("integrality_trichotomy: f(0) must be nonzero");
        for (const auto& v : newton_polygon(f, p).root_valuations())
            if (v != 0) return NonIntegerCoefficient{p, v};
        throw std::logic_error("non-integral monic polynomial with all root valuations zero");
    }
    IntPolynomial fi = to_integer(f);
    if (fi.coeff(0) == 0) return IntegerOffUnitCircle{0.0, 0.0};
    if (kronecker_all_roots_unit_modulus(fi)) return IntegerRootsOfUnity{};
    auto w = off_circle_witness(isolate_roots(fi));
    if (!w) throw Indeterminate("no certified off-circle root");
    return IntegerOffUnitCircle{w->modulus_lo, w->modulus_hi};
}

// ---------------------------------------------------------------------------
// Contraction split

struct ContractionSplit {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd contracting;  ///< orthonormal columns, |eigenvalue| < 1
    Eigen::MatrixXd neutral;      ///< |eigenvalue| = 1 (certified exactly)
    Eigen::MatrixXd expanding;    ///< |eigenvalue| > 1
    std::vector<RootEnclosure> contracting_roots, neutral_roots, expanding_roots;
    double residual = 0.0;

    int contracting_dim() const { return static_cast<int>(contracting.cols()); }
    int neutral_dim() const { return static_cast<int>(neutral.cols()); }
    int expanding_dim() const { return static_cast<int>(expanding.cols()); }
};

namespace detail {

inline Eigen::MatrixXd invariant_subspace(const Eigen::MatrixXd& m, const std::vector<RootEnclosure>& roots) {
    const Eigen::Index d = m.rows();
    int dim = 0;
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
    for (const auto& r : roots)
        for (int k = 0; k < r.multiplicity; ++k) {
            p = p * (mc - r.center * Eigen::MatrixXcd::Identity(d, d));
            ++dim;
        }
    if (dim == 0) return Eigen::MatrixXd(d, 0);
    if (dim == d) return Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd pr = p.real();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pr, Eigen::ComputeFullV);
    // Singular values are sorted descending; the kernel is spanned by the last columns.
    return svd.matrixV().rightCols(dim);
}

inline double invariance_residual(const Eigen::MatrixXd& m, const Eigen::MatrixXd& basis) {
    if (basis.cols() == 0) return 0.0;
    Eigen::MatrixXd mb = m * basis;
    Eigen::MatrixXd proj = basis * (basis.transpose() * mb);
    return (mb - proj).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Splits R^d into generalized eigenspaces with eigenvalue modulus <1, =1, >1.
/// Modulus-one eigenvalues are accepted only when they are roots of unity (exact);
/// any other enclosure straddling the circle raises Indeterminate.
inline ContractionSplit contraction_split(const RatMatrix& m) {
    const std::size_t d = m.size();
    RatPolynomial f = char_poly(m);
    if (f.coeff(0) == 0) throw std::invalid_argument("contraction_split needs an invertible matrix");
    auto [cyc, rest] = split_cyclotomic(f);
    ContractionSplit out;
    out.matrix = Eigen::MatrixXd(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            out.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = to_double(m[r][c]);
    if (cyc.degree() > 0) out.neutral_roots = isolate_roots(cyc);
    for (const auto& r : isolate_roots(rest)) {
        if (r.modulus_hi < 1.0)
            out.contracting_roots.push_back(r);
        else if (r.modulus_lo > 1.0)
            out.expanding_roots.push_back(r);
        else
            throw Indeterminate("eigenvalue modulus interval straddles 1 and is not a root of unity");
    }
    out.contracting = detail::invariant_subspace(out.matrix, out.contracting_roots);
    out.neutral = detail::invariant_subspace(out.matrix, out.neutral_roots);
    out.expanding = detail::invariant_subspace(out.matrix, out.expanding_roots);
    out.residual = std::max({detail::invariance_residual(out.matrix, out.contracting),
                             detail::invariance_residual(out.matrix, out.neutral),
                             detail::invariance_residual(out.matrix, out.expanding)});
    return out;
}

inline ContractionSplit contraction_split(const IntMatrix& m) { return contraction_split(to_rat_matrix(m)); }

}  // namespace scplab::linalg
