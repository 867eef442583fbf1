// Concrete groups: finite tables, Z^d, T^d with integer automorphisms and
// annihilator-described subgroups, semidirect products Z x_alpha B, and the
// profile representation of L^Z used for shift dynamics.
#pragma once

#include "scplab/int_matrix.hpp"
#include "scplab/numeric.hpp"
#include "scplab/polynomial.hpp"
#include "scplab/spectral_linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace scplab::groups {

// ---------------------------------------------------------------------------
// Finite groups

using Element = std::size_t;

/// Sorted element set of a finite group.
struct FiniteSubgroup {
    std::vector<Element> elements;

    bool contains(Element g) const { return std::binary_search(elements.begin(), elements.end(), g); }
    std::size_t order() const { return elements.size(); }
    bool subset_of(const FiniteSubgroup& other) const {
        return std::includes(other.elements.begin(), other.elements.end(), elements.begin(), elements.end());
    }
    friend bool operator==(const FiniteSubgroup&, const FiniteSubgroup&) = default;
};

class FiniteGroup {
public:
    using Table = std::vector<std::vector<Element>>;

    /// Builds from a multiplication table; identity and inverses are derived.
    explicit FiniteGroup(Table mult, std::string name = "table") : mult_(std::move(mult)), name_(std::move(name)) {
        const std::size_t n = mult_.size();
        if (n == 0) throw std::invalid_argument("finite group must be nonempty");
        for (const auto& row : mult_) {
            if (row.size() != n) throw std::invalid_argument("multiplication table must be square");
            for (Element e : row)
                if (e >= n) throw std::invalid_argument("multiplication table entry out of range");
        }
        bool found = false;
        for (Element e = 0; e < n && !found; ++e) {
            bool ok = true;
            for (Element g = 0; g < n && ok; ++g) ok = mult_[e][g] == g && mult_[g][e] == g;
            if (ok) {
                identity_ = e;
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("multiplication table has no identity");
        inverse_.assign(n, n);
        for (Element g = 0; g < n; ++g)
            for (Element h = 0; h < n; ++h)
                if (mult_[g][h] == identity_ && mult_[h][g] == identity_) inverse_[g] = h;
        for (Element g = 0; g < n; ++g)
            if (inverse_[g] == n) throw std::invalid_argument("element without inverse");
        if (n <= 64) {
            for (Element a = 0; a < n; ++a)
                for (Element b = 0; b < n; ++b)
                    for (Element c = 0; c < n; ++c)
                        if (mult_[mult_[a][b]][c] != mult_[a][mult_[b][c]])
                            throw std::invalid_argument("multiplication table is not associative");
        }
    }

    /// Builds from all three fields and checks them against each other.
    FiniteGroup(Table mult, std::vector<Element> inverse, Element identity, std::string name = "table")
        : FiniteGroup(std::move(mult), std::move(name)) {
        if (identity != identity_) throw std::invalid_argument("identity inconsistent with table");
        if (inverse != inverse_) throw std::invalid_argument("inverse table inconsistent with multiplication");
    }

    static FiniteGroup cyclic(std::size_t n) {
        Table t(n, std::vector<Element>(n));
        for (Element a = 0; a < n; ++a)
            for (Element b = 0; b < n; ++b) t[a][b] = (a + b) % n;
        return FiniteGroup(std::move(t), "Z" + std::to_string(n));
    }

    /// Dihedral group of order 2n; element k + n*e stands for r^k s^e.
    static FiniteGroup dihedral(std::size_t n) {
        const std::size_t order = 2 * n;
        Table t(order, std::vector<Element>(order));
        for (Element a = 0; a < order; ++a)
            for (Element b = 0; b < order; ++b) {
                std::size_t ka = a % n, ea = a / n, kb = b % n, eb = b / n;
                // r^ka s^ea r^kb s^eb = r^(ka +- kb) s^(ea+eb)
                std::size_t k = ea ? (ka + n - kb) % n : (ka + kb) % n;
                t[a][b] = k + n * ((ea + eb) % 2);
            }
        return FiniteGroup(std::move(t), "D" + std::to_string(n));
    }

    /// Symmetric group on n points, permutations in lexicographic order.
    static FiniteGroup symmetric(std::size_t n) {
        std::vector<std::vector<std::size_t>> perms;
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), 0);
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        return from_permutations(perms, "S" + std::to_string(n));
    }

    static FiniteGroup alternating4() {
        std::vector<std::vector<std::size_t>> perms;
        std::vector<std::size_t> p{0, 1, 2, 3};
        do {
            int inversions = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j) inversions += p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)];
            if (inversions % 2 == 0) perms.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        return from_permutations(perms, "A4");
    }

    static FiniteGroup quaternion() {
        // Elements +-1, +-i, +-j, +-k as (sign, unit) with unit in {1,i,j,k}.
        static const int unit_mul[4][4][2] = {
            {{1, 0}, {1, 1}, {1, 2}, {1, 3}},
            {{1, 1}, {-1, 0}, {1, 3}, {-1, 2}},
            {{1, 2}, {-1, 3}, {-1, 0}, {1, 1}},
            {{1, 3}, {1, 2}, {-1, 1}, {-1, 0}},
        };
        Table t(8, std::vector<Element>(8));
        for (Element a = 0; a < 8; ++a)
            for (Element b = 0; b < 8; ++b) {
                int sa = a < 4 ? 1 : -1, sb = b < 4 ? 1 : -1;
                const int* r = unit_mul[a % 4][b % 4];
                int s = sa * sb * r[0];
                t[a][b] = static_cast<Element>(r[1] + (s < 0 ? 4 : 0));
            }
        return FiniteGroup(std::move(t), "Q8");
    }

    static FiniteGroup product(const FiniteGroup& a, const FiniteGroup& b) {
        const std::size_t n = a.order() * b.order();
        Table t(n, std::vector<Element>(n));
        for (Element x = 0; x < n; ++x)
            for (Element y = 0; y < n; ++y)
                t[x][y] = a.multiply(x / b.order(), y / b.order()) * b.order() + b.multiply(x % b.order(), y % b.order());
        return FiniteGroup(std::move(t), a.name() + "x" + b.name());
    }

    std::size_t order() const { return mult_.size(); }
    const std::string& name() const { return name_; }
    Element identity() const { return identity_; }
    Element multiply(Element a, Element b) const { return mult_[a][b]; }
    Element inverse(Element a) const { return inverse_[a]; }
    const Table& table() const { return mult_; }
    const std::vector<Element>& inverse_table() const { return inverse_; }

    Element conjugate(Element x, Element g) const { return multiply(multiply(x, g), inverse(x)); }

    FiniteSubgroup generated_by(const std::vector<Element>& gens) const {
        std::set<Element> seen{identity_};
        std::vector<Element> frontier{identity_};
        while (!frontier.empty()) {
            std::vector<Element> next;
            for (Element g : frontier)
                for (Element s : gens) {
                    Element h = multiply(g, s);
                    if (seen.insert(h).second) next.push_back(h);
                }
            frontier = std::move(next);
        }
        return FiniteSubgroup{std::vector<Element>(seen.begin(), seen.end())};
    }

    FiniteSubgroup whole() const {
        std::vector<Element> all(order());
        std::iota(all.begin(), all.end(), Element{0});
        return FiniteSubgroup{all};
    }

    FiniteSubgroup trivial() const { return FiniteSubgroup{{identity_}}; }

    bool is_subgroup(const FiniteSubgroup& h) const {
        if (!h.contains(identity_)) return false;
        for (Element a : h.elements) {
            if (!h.contains(inverse(a))) return false;
            for (Element b : h.elements)
                if (!h.contains(multiply(a, b))) return false;
        }
        return true;
    }

    FiniteSubgroup conjugate(Element x, const FiniteSubgroup& h) const {
        FiniteSubgroup out;
        for (Element g : h.elements) out.elements.push_back(conjugate(x, g));
        std::sort(out.elements.begin(), out.elements.end());
        return out;
    }

    bool normalizes(Element x, const FiniteSubgroup& h) const { return conjugate(x, h) == h; }

    /// Left cosets gH, each sorted, ordered by smallest member.
    std::vector<std::vector<Element>> left_cosets(const FiniteSubgroup& h) const {
        std::vector<bool> used(order(), false);
        std::vector<std::vector<Element>> out;
        for (Element g = 0; g < order(); ++g) {
            if (used[g]) continue;
            std::vector<Element> coset;
            for (Element k : h.elements) coset.push_back(multiply(g, k));
            std::sort(coset.begin(), coset.end());
            for (Element c : coset) used[c] = true;
            out.push_back(std::move(coset));
        }
        return out;
    }

    /// True iff `perm` (a map G -> G) is a bijective homomorphism.
    bool is_automorphism(const std::vector<Element>& perm) const {
        if (perm.size() != order()) return false;
        std::vector<bool> hit(order(), false);
        for (Element e : perm) {
            if (e >= order() || hit[e]) return false;
            hit[e] = true;
        }
        for (Element a = 0; a < order(); ++a)
            for (Element b = 0; b < order(); ++b)
                if (perm[multiply(a, b)] != multiply(perm[a], perm[b])) return false;
        return true;
    }

    /// True iff `phi` (a map H -> this) is an injective homomorphism from `source`.
    bool is_embedding(const FiniteGroup& source, const std::vector<Element>& phi) const {
        if (phi.size() != source.order()) return false;
        std::set<Element> image(phi.begin(), phi.end());
        if (image.size() != phi.size()) return false;
        for (Element a = 0; a < source.order(); ++a)
            for (Element b = 0; b < source.order(); ++b)
                if (phi[source.multiply(a, b)] != multiply(phi[a], phi[b])) return false;
        return true;
    }

private:
    static FiniteGroup from_permutations(const std::vector<std::vector<std::size_t>>& perms, std::string name) {
        std::map<std::vector<std::size_t>, Element> index;
        for (Element i = 0; i < perms.size(); ++i) index[perms[i]] = i;
        Table t(perms.size(), std::vector<Element>(perms.size()));
        for (Element a = 0; a < perms.size(); ++a)
            for (Element b = 0; b < perms.size(); ++b) {
                std::vector<std::size_t> c(perms[a].size());
                for (std::size_t i = 0; i < c.size(); ++i) c[i] = perms[a][perms[b][i]];
                t[a][b] = index.at(c);
            }
        return FiniteGroup(std::move(t), std::move(name));
    }

    Table mult_;
    std::vector<Element> inverse_;
    Element identity_ = 0;
    std::string name_;
};

/// Applies the automorphism `perm` n times (n may be negative).
inline Element apply_power(const std::vector<Element>& perm, Element g, long long n) {
    if (n >= 0) {
        for (long long i = 0; i < n; ++i) g = perm[g];
        return g;
    }
    std::vector<Element> inv(perm.size());
    for (Element i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
    for (long long i = 0; i < -n; ++i) g = inv[g];
    return g;
}

// ---------------------------------------------------------------------------
// Integer automorphisms of T^d and Z^d

class IntAutomorphism {
public:
    explicit IntAutomorphism(IntMatrix m) : matrix_(std::move(m)) {
        if (!matrix_.square() || matrix_.rows() == 0) throw std::invalid_argument("automorphism matrix must be square");
        Int det = matrix_.determinant();
        if (det != 1 && det != -1)
            throw std::invalid_argument("matrix is not unimodular: det = " + det.str());
        char_poly_ = linalg::char_poly(matrix_);
    }

    std::size_t dim() const { return matrix_.rows(); }
    const IntMatrix& matrix() const { return matrix_; }
    const linalg::IntPolynomial& char_poly() const { return char_poly_; }

    IntAutomorphism inverse() const { return IntAutomorphism(matrix_.unimodular_inverse()); }
    IntAutomorphism power(long long n) const { return IntAutomorphism(matrix_.power(n)); }

    /// Action on a lifted torus point (or a lattice point) in R^d.
    std::vector<double> apply(const std::vector<double>& x) const { return matrix_.apply(x); }
    Character apply(const Character& x) const { return matrix_.apply(x); }

    friend bool operator==(const IntAutomorphism& a, const IntAutomorphism& b) { return a.matrix_ == b.matrix_; }
    friend IntAutomorphism operator*(const IntAutomorphism& a, const IntAutomorphism& b) {
        return IntAutomorphism(a.matrix_ * b.matrix_);
    }

private:
    IntMatrix matrix_;
    linalg::IntPolynomial char_poly_;
};

/// The induced map on characters: (dual a)(chi) = chi o a, i.e. the transpose.
inline IntAutomorphism dual_automorphism(const IntAutomorphism& a) { return IntAutomorphism(a.matrix().transpose()); }

// ---------------------------------------------------------------------------
// Closed subgroups of T^d, described by their annihilator lattices

class TorusSubgroup {
public:
    TorusSubgroup() = default;
    TorusSubgroup(std::size_t dim, std::vector<IntVector> generators)
        : dim_(dim), basis_(hermite_basis(std::move(generators), dim)) {
        invariants_ = smith_invariants(basis_, dim_);
    }

    static TorusSubgroup whole(std::size_t dim) { return TorusSubgroup(dim, {}); }
    static TorusSubgroup trivial(std::size_t dim) {
        std::vector<IntVector> e;
        for (std::size_t i = 0; i < dim; ++i) {
            IntVector v(dim);
            v[i] = 1;
            e.push_back(v);
        }
        return TorusSubgroup(dim, e);
    }

    std::size_t dim() const { return dim_; }
    /// Canonical (Hermite) basis of the annihilator lattice, one row per vector.
    const std::vector<IntVector>& annihilator() const { return basis_; }
    /// Smith invariants of the annihilator; the subgroup is prod Z/s_i x T^(d - rank).
    const std::vector<Int>& invariants() const { return invariants_; }
    bool is_finite() const { return basis_.size() == dim_; }
    std::size_t torus_rank() const { return dim_ - basis_.size(); }

    Int order() const {
        if (!is_finite()) throw std::logic_error("order of an infinite subgroup");
        Int n = 1;
        for (const auto& s : invariants_) n *= s;
        return n;
    }

    bool contains_character(const Character& chi) const {
        if (chi.size() != dim_) throw std::invalid_argument("character dimension mismatch");
        IntVector r(chi.begin(), chi.end());
        for (const auto& b : basis_) {
            std::size_t pc = 0;
            while (b[pc] == 0) ++pc;
            if (r[pc] % b[pc] != 0) return false;
            Int q = r[pc] / b[pc];
            for (std::size_t c = 0; c < dim_; ++c) r[c] -= q * b[c];
        }
        return std::all_of(r.begin(), r.end(), [](const Int& v) { return v == 0; });
    }

    bool contains_point(const std::vector<Rational>& x) const {
        for (const auto& b : basis_) {
            Rational s = 0;
            for (std::size_t c = 0; c < dim_; ++c) s += Rational(b[c]) * x[c];
            if (!is_integral(s)) return false;
        }
        return true;
    }

    /// Elements of a finite subgroup as rational points in [0,1)^d.
    std::vector<std::vector<Rational>> elements() const {
        if (!is_finite()) throw std::logic_error("cannot enumerate an infinite subgroup");
        const Int e = invariants_.empty() ? Int(1) : invariants_.back();
        const long ex = e.convert_to<long>();
        std::vector<std::vector<Rational>> out;
        std::vector<long> k(dim_, 0);
        while (true) {
            std::vector<Rational> x(dim_);
            for (std::size_t i = 0; i < dim_; ++i) x[i] = Rational(k[i], ex);
            if (contains_point(x)) out.push_back(x);
            std::size_t i = 0;
            while (i < dim_ && ++k[i] == ex) k[i++] = 0;
            if (i == dim_) break;
        }
        return out;
    }

    /// Image under x -> Qx for an integer matrix Q : T^d -> T^d'.
    /// Its annihilator is {psi : Q^T psi in Lambda}.
    TorusSubgroup image_under(const IntMatrix& q) const {
        if (q.cols() != dim_) throw std::invalid_argument("map dimension mismatch");
        const std::size_t out_dim = q.rows();
        std::vector<IntVector> rows;
        for (std::size_t i = 0; i < out_dim; ++i) rows.push_back(q.row(i));
        for (const auto& b : basis_) rows.push_back(b);
        std::vector<IntVector> gens;
        for (const auto& k : integer_left_kernel(rows, dim_)) gens.emplace_back(k.begin(), k.begin() + static_cast<long>(out_dim));
        return TorusSubgroup(out_dim, gens);
    }

    TorusSubgroup image_under(const IntAutomorphism& a) const { return image_under(a.matrix()); }

    bool invariant_under(const IntAutomorphism& a) const { return image_under(a) == *this; }

    friend bool operator==(const TorusSubgroup& a, const TorusSubgroup& b) {
        return a.dim_ == b.dim_ && a.basis_ == b.basis_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<IntVector> basis_;
    std::vector<Int> invariants_;
};

/// The closed subgroup of T^d annihilated by the lattice spanned by the columns of `basis`.
inline TorusSubgroup smith_annihilator(const IntMatrix& basis) {
    std::vector<IntVector> gens;
    for (std::size_t c = 0; c < basis.cols(); ++c) {
        IntVector v(basis.rows());
        for (std::size_t r = 0; r < basis.rows(); ++r) v[r] = basis(r, c);
        gens.push_back(v);
    }
    return TorusSubgroup(basis.rows(), gens);
}

inline TorusSubgroup smith_annihilator(const linalg::RatMatrix& basis) {
    IntMatrix m(basis.size(), basis.empty() ? 0 : basis.front().size());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (!is_integral(basis[r][c])) throw std::invalid_argument("lattice basis must be integral");
            m(r, c) = numerator_of(basis[r][c]);
        }
    return smith_annihilator(m);
}

// ---------------------------------------------------------------------------
// Profiles over Z: finitely many explicit coordinates plus tail defaults

template <class T>
class Profile {
public:
    Profile() = default;
    /// Coordinates i < offset take `left`, offset <= i < offset + explicit.size() the
    /// explicit values, and the rest `right`.
    Profile(T left, T right, std::int64_t offset = 0, std::vector<T> explicit_values = {})
        : left_(std::move(left)), right_(std::move(right)), offset_(offset), explicit_(std::move(explicit_values)) {
        canonicalize();
    }

    static Profile constant(const T& v) { return Profile(v, v); }

    const T& at(std::int64_t i) const {
        if (i < offset_) return left_;
        if (i >= offset_ + static_cast<std::int64_t>(explicit_.size())) return right_;
        return explicit_[static_cast<std::size_t>(i - offset_)];
    }

    const T& left() const { return left_; }
    const T& right() const { return right_; }
    std::int64_t offset() const { return offset_; }
    const std::vector<T>& explicit_values() const { return explicit_; }
    std::int64_t explicit_end() const { return offset_ + static_cast<std::int64_t>(explicit_.size()); }

    /// tau^k with tau((g_i)) = (g_{i+1}): the result at i is the old value at i + k.
    Profile shifted(std::int64_t k) const {
        Profile out = *this;
        out.offset_ -= k;
        out.canonicalize();
        return out;
    }

    /// Coordinatewise combination; the result's explicit range covers both inputs.
    template <class U, class F>
    friend Profile<std::invoke_result_t<F, const T&, const U&>> zip(const Profile& a, const Profile<U>& b, F f) {
        using R = std::invoke_result_t<F, const T&, const U&>;
        std::int64_t lo = std::min(a.boundary_lo(), b.boundary_lo());
        std::int64_t hi = std::max(a.boundary_hi(), b.boundary_hi());
        std::vector<R> mid;
        for (std::int64_t i = lo; i < hi; ++i) mid.push_back(f(a.at(i), b.at(i)));
        return Profile<R>(f(a.left(), b.left()), f(a.right(), b.right()), lo, std::move(mid));
    }

    template <class F>
    Profile<std::invoke_result_t<F, const T&>> map(F f) const {
        using R = std::invoke_result_t<F, const T&>;
        std::vector<R> mid;
        for (const auto& v : explicit_) mid.push_back(f(v));
        return Profile<R>(f(left_), f(right_), offset_, std::move(mid));
    }

    /// Visits the left tail, every explicit coordinate and the right tail.
    template <class F>
    bool all_of(F pred) const {
        if (!pred(left_) || !pred(right_)) return false;
        return std::all_of(explicit_.begin(), explicit_.end(), pred);
    }

    /// Range [lo, hi) outside which the profile equals its tails; lo = hi = offset when
    /// there are no explicit coordinates.
    std::int64_t boundary_lo() const { return offset_; }
    std::int64_t boundary_hi() const { return explicit_end(); }

    friend bool operator==(const Profile& a, const Profile& b) {
        return a.left_ == b.left_ && a.right_ == b.right_ && a.offset_ == b.offset_ && a.explicit_ == b.explicit_;
    }

private:
    void canonicalize() {
        std::size_t front = 0;
        while (front < explicit_.size() && explicit_[front] == left_) ++front;
        std::size_t back = explicit_.size();
        while (back > front && explicit_[back - 1] == right_) --back;
        explicit_ = std::vector<T>(explicit_.begin() + static_cast<long>(front), explicit_.begin() + static_cast<long>(back));
        offset_ += static_cast<std::int64_t>(front);
        if (explicit_.empty() && left_ == right_) offset_ = 0;
    }

    T left_{};
    T right_{};
    std::int64_t offset_ = 0;
    std::vector<T> explicit_;
};

template <class T>
Profile<T> shift_apply(const Profile<T>& p, std::int64_t k) {
    return p.shifted(k);
}

/// Shift space L^Z over a finite symbol group L.
struct ShiftSpace {
    std::shared_ptr<const FiniteGroup> symbols;

    using Point = Profile<Element>;
    using Subgroup = Profile<FiniteSubgroup>;

    Point identity() const { return Point::constant(symbols->identity()); }
    Point multiply(const Point& a, const Point& b) const {
        return zip(a, b, [&](Element x, Element y) { return symbols->multiply(x, y); });
    }
    Point inverse(const Point& a) const {
        return a.map([&](Element x) { return symbols->inverse(x); });
    }
    bool contains(const Subgroup& h, const Point& p) const {
        auto flags = zip(h, p, [](const FiniteSubgroup& s, Element x) { return s.contains(x); });
        return flags.all_of([](bool b) { return b; });
    }
    bool subset(const Subgroup& a, const Subgroup& b) const {
        auto flags = zip(a, b, [](const FiniteSubgroup& x, const FiniteSubgroup& y) { return x.subset_of(y); });
        return flags.all_of([](bool v) { return v; });
    }
    bool is_subgroup(const Subgroup& h) const {
        return h.all_of([&](const FiniteSubgroup& s) { return symbols->is_subgroup(s); });
    }
};

/// M = {(x_i) : x_i = e for i > 0}: Haar-supporting subgroup on the left half-line.
inline ShiftSpace::Subgroup left_half_subgroup(const FiniteGroup& l) {
    return ShiftSpace::Subgroup(l.whole(), l.trivial(), 1);
}

// ---------------------------------------------------------------------------
// Semidirect products Z x_alpha B with (b, n)(c, m) = (b alpha^n(c), n + m)

/// Base group policy for the finite case: alpha is a permutation automorphism.
struct FiniteBase {
    std::shared_ptr<const FiniteGroup> group;
    std::vector<Element> alpha;

    using Point = Element;
    Point identity() const { return group->identity(); }
    Point multiply(Point a, Point b) const { return group->multiply(a, b); }
    Point inverse(Point a) const { return group->inverse(a); }
    Point alpha_power(Point b, long long n) const { return apply_power(alpha, b, n); }
    bool equal(Point a, Point b) const { return a == b; }
};

/// Torus base with lifted real coordinates; equality is modulo Z^d within `tol`.
struct TorusBase {
    IntAutomorphism alpha;
    double tol = 1e-9;

    using Point = std::vector<double>;
    Point identity() const { return Point(alpha.dim(), 0.0); }
    Point multiply(const Point& a, const Point& b) const {
        Point out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
        return out;
    }
    Point inverse(const Point& a) const {
        Point out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
        return out;
    }
    Point alpha_power(const Point& b, long long n) const { return alpha.matrix().power(n).apply(b); }
    bool equal(const Point& a, const Point& b) const {
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = a[i] - b[i];
            d -= std::round(d);
            if (std::abs(d) > tol) return false;
        }
        return true;
    }
};

/// Shift-space base: alpha is the shift tau.
struct ShiftBase {
    ShiftSpace space;

    using Point = ShiftSpace::Point;
    Point identity() const { return space.identity(); }
    Point multiply(const Point& a, const Point& b) const { return space.multiply(a, b); }
    Point inverse(const Point& a) const { return space.inverse(a); }
    Point alpha_power(const Point& b, long long n) const { return b.shifted(n); }
    bool equal(const Point& a, const Point& b) const { return a == b; }
};

template <class Base>
struct SemidirectElement {
    typename Base::Point base;
    long long shift = 0;
};

template <class Base>
class Semidirect {
public:
    using Elem = SemidirectElement<Base>;

    explicit Semidirect(Base base) : base_(std::move(base)) {}

    const Base& base() const { return base_; }
    Elem identity() const { return {base_.identity(), 0}; }
    Elem generator() const { return {base_.identity(), 1}; }
    Elem embed(typename Base::Point b) const { return {std::move(b), 0}; }

    Elem multiply(const Elem& x, const Elem& y) const {
        return {base_.multiply(x.base, base_.alpha_power(y.base, x.shift)), x.shift + y.shift};
    }

    Elem inverse(const Elem& x) const { return {base_.alpha_power(base_.inverse(x.base), -x.shift), -x.shift}; }

    Elem power(const Elem& x, long long n) const {
        Elem out = identity();
        Elem step = n >= 0 ? x : inverse(x);
        for (long long i = 0; i < (n >= 0 ? n : -n); ++i) out = multiply(out, step);
        return out;
    }

    Elem conjugate(const Elem& x, const Elem& y) const { return multiply(multiply(x, y), inverse(x)); }

    bool equal(const Elem& x, const Elem& y) const { return x.shift == y.shift && base_.equal(x.base, y.base); }

private:
    Base base_;
};

}  // namespace scplab::groups
