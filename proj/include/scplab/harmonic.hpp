// Bounded mu-harmonic functions on a finite group: f(g) = sum_h f(gh) mu(h).
#pragma once

#include "scplab/measures.hpp"

namespace scplab::harmonic {

using groups::Element;
using groups::FiniteGroup;
using groups::FiniteSubgroup;
using measures::FiniteMeasure;

using RatVector = std::vector<Rational>;

/// Basis of the null space of a rational matrix, by reduced row echelon form.
inline std::vector<RatVector> rational_kernel(linalg::RatMatrix a, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
        std::size_t p = row;
        while (p < a.size() && a[p][c] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[row]);
        const Rational inv = Rational(1) / a[row][c];
        for (auto& v : a[row]) v *= inv;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][c] == 0) continue;
            const Rational f = a[r][c];
            for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[row][k];
        }
        pivots.push_back(c);
        ++row;
    }
    std::vector<RatVector> basis;
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivots) is_pivot[c] = true;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        RatVector v(cols);
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

struct HarmonicSpace {
    std::shared_ptr<const FiniteGroup> group;
    FiniteMeasure mu;
    std::vector<RatVector> basis;
    FiniteSubgroup generated;  // G_mu
    std::vector<std::vector<Element>> cosets;

    std::size_t dimension() const { return basis.size(); }
};

/// (P f)(g) = sum_h f(gh) mu(h).
inline RatVector apply_markov(const FiniteMeasure& mu, const RatVector& f) {
    const auto& g = *mu.group();
    if (f.size() != g.order()) throw std::invalid_argument("function size mismatch");
    RatVector out(g.order());
    const Rational den(mu.denominator());
    for (Element x = 0; x < g.order(); ++x)
        for (Element h : mu.support()) out[x] += f[g.multiply(x, h)] * Rational(mu.numerators()[h]) / den;
    return out;
}

inline HarmonicSpace harmonic_space(const FiniteMeasure& mu) {
    const auto& g = *mu.group();
    const std::size_t n = g.order();
    linalg::RatMatrix a(n, RatVector(n));
    const Rational den(mu.denominator());
    for (Element x = 0; x < n; ++x) {
        a[x][x] += 1;
        for (Element h : mu.support()) a[x][g.multiply(x, h)] -= Rational(mu.numerators()[h]) / den;
    }
    HarmonicSpace s{mu.group(), mu, rational_kernel(std::move(a), n), g.generated_by(mu.support()), {}};
    s.cosets = g.left_cosets(s.generated);
    return s;
}

inline bool is_harmonic(const FiniteMeasure& mu, const RatVector& f) { return apply_markov(mu, f) == f; }

/// Indicator of each left coset g G_mu.
inline std::vector<RatVector> coset_indicators(const HarmonicSpace& s) {
    std::vector<RatVector> out;
    for (const auto& c : s.cosets) {
        RatVector v(s.group->order());
        for (Element x : c) v[x] = 1;
        out.push_back(std::move(v));
    }
    return out;
}

/// Harmonic functions are exactly the coset constants: the coset indicators are harmonic
/// and the kernel has no further dimension.
inline bool is_choquet_deny(const HarmonicSpace& s) {
    if (s.dimension() != s.cosets.size()) return false;
    for (const auto& v : coset_indicators(s))
        if (!is_harmonic(s.mu, v)) return false;
    return true;
}

inline bool is_choquet_deny(const FiniteMeasure& mu) { return is_choquet_deny(harmonic_space(mu)); }

}  // namespace scplab::harmonic
