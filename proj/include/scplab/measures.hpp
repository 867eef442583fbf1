// Probability measures: exact measures on finite groups and Z^d, spectral
// (Fourier-coefficient) measures on T^d, and product profiles on L^Z.
#pragma once

#include "scplab/groups.hpp"

#include <algorithm>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <variant>
#include <vector>

namespace scplab::measures {

using groups::Element;
using groups::FiniteGroup;
using groups::FiniteSubgroup;
using groups::IntAutomorphism;
using groups::TorusSubgroup;

// ---------------------------------------------------------------------------
// Exact measures on a finite group: integer numerators over one denominator.

class FiniteMeasure {
public:
    FiniteMeasure() = default;

    FiniteMeasure(std::shared_ptr<const FiniteGroup> group, std::vector<Int> numerators, Int denominator)
        : group_(std::move(group)), num_(std::move(numerators)), den_(std::move(denominator)) {
        if (!group_) throw std::invalid_argument("measure needs a group");
        if (num_.size() != group_->order()) throw std::invalid_argument("weight vector does not match group order");
        if (den_ <= 0) throw std::invalid_argument("denominator must be positive");
        Int total = 0;
        for (const auto& v : num_) {
            if (v < 0) throw std::invalid_argument("negative weight");
            total += v;
        }
        if (total != den_) throw std::invalid_argument("weights must sum to 1");
        reduce();
    }

    static FiniteMeasure from_weights(std::shared_ptr<const FiniteGroup> group, const std::map<Element, Rational>& w) {
        Int den = 1;
        for (const auto& [g, q] : w) den = boost::multiprecision::lcm(den, denominator_of(q));
        std::vector<Int> num(group->order(), Int(0));
        for (const auto& [g, q] : w) {
            if (g >= group->order()) throw std::invalid_argument("support element out of range");
            num[g] += numerator_of(q) * (den / denominator_of(q));
        }
        return FiniteMeasure(std::move(group), std::move(num), den);
    }

    static FiniteMeasure dirac(std::shared_ptr<const FiniteGroup> group, Element g) {
        std::vector<Int> num(group->order(), Int(0));
        num.at(g) = 1;
        return FiniteMeasure(std::move(group), std::move(num), 1);
    }

    /// Normalized Haar measure of a subgroup (uniform on any given set, in fact).
    static FiniteMeasure uniform(std::shared_ptr<const FiniteGroup> group, const FiniteSubgroup& set) {
        std::vector<Int> num(group->order(), Int(0));
        for (Element g : set.elements) num.at(g) = 1;
        return FiniteMeasure(std::move(group), std::move(num), Int(set.order()));
    }

    const std::shared_ptr<const FiniteGroup>& group() const { return group_; }
    Rational weight(Element g) const { return Rational(num_[g], den_); }
    double weight_double(Element g) const { return to_double(weight(g)); }
    const std::vector<Int>& numerators() const { return num_; }
    const Int& denominator() const { return den_; }

    std::vector<Element> support() const {
        std::vector<Element> s;
        for (Element g = 0; g < num_.size(); ++g)
            if (num_[g] != 0) s.push_back(g);
        return s;
    }

    friend bool operator==(const FiniteMeasure& a, const FiniteMeasure& b) {
        if (!a.group_ || !b.group_) return !a.group_ && !b.group_;
        return a.group_->table() == b.group_->table() && a.num_ == b.num_ && a.den_ == b.den_;
    }

private:
    void reduce() {
        Int g = den_;
        for (const auto& v : num_) {
            if (g == 1) break;
            if (v != 0) g = boost::multiprecision::gcd(g, v);
        }
        if (g > 1) {
            for (auto& v : num_) v /= g;
            den_ /= g;
        }
    }

    std::shared_ptr<const FiniteGroup> group_;
    std::vector<Int> num_;
    Int den_ = 1;
};

inline void require_same_group(const FiniteMeasure& a, const FiniteMeasure& b) {
    if (!a.group() || !b.group() || (a.group() != b.group() && a.group()->table() != b.group()->table()))
        throw std::invalid_argument("group mismatch");
}

inline FiniteMeasure convolve(const FiniteMeasure& a, const FiniteMeasure& b) {
    require_same_group(a, b);
    const auto& g = *a.group();
    std::vector<Int> out(g.order(), Int(0));
    const auto sa = a.support(), sb = b.support();
    for (Element x : sa)
        for (Element y : sb) out[g.multiply(x, y)] += a.numerators()[x] * b.numerators()[y];
    return FiniteMeasure(a.group(), std::move(out), a.denominator() * b.denominator());
}

inline FiniteMeasure reflect(const FiniteMeasure& m) {
    std::vector<Int> out(m.numerators().size());
    for (Element x = 0; x < out.size(); ++x) out[m.group()->inverse(x)] = m.numerators()[x];
    return FiniteMeasure(m.group(), std::move(out), m.denominator());
}

/// Image under a map of the group into `target` (an automorphism when target is the same group).
inline FiniteMeasure pushforward(const FiniteMeasure& m, const std::vector<Element>& f,
                                 std::shared_ptr<const FiniteGroup> target = nullptr) {
    if (!target) target = m.group();
    if (f.size() != m.group()->order()) throw std::invalid_argument("map not defined on the measure's group");
    std::vector<Int> out(target->order(), Int(0));
    for (Element x = 0; x < f.size(); ++x)
        if (m.numerators()[x] != 0) out.at(f[x]) += m.numerators()[x];
    return FiniteMeasure(std::move(target), std::move(out), m.denominator());
}

/// Right translate m * delta_g.
inline FiniteMeasure translate_right(const FiniteMeasure& m, Element g) {
    return convolve(m, FiniteMeasure::dirac(m.group(), g));
}

/// x m x^{-1}.
inline FiniteMeasure conjugate(const FiniteMeasure& m, Element x) {
    std::vector<Element> f(m.group()->order());
    for (Element g = 0; g < f.size(); ++g) f[g] = m.group()->conjugate(x, g);
    return pushforward(m, f);
}

inline FiniteMeasure haar_of(std::shared_ptr<const FiniteGroup> group, const FiniteSubgroup& h) {
    if (!group->is_subgroup(h)) throw std::invalid_argument("not a subgroup");
    return FiniteMeasure::uniform(std::move(group), h);
}

/// Total variation sup_E |a(E) - b(E)| = half the l1 distance; exact.
inline Rational total_variation(const FiniteMeasure& a, const FiniteMeasure& b) {
    require_same_group(a, b);
    Int s = 0;
    for (std::size_t i = 0; i < a.numerators().size(); ++i)
        s += boost::multiprecision::abs(a.numerators()[i] * b.denominator() - b.numerators()[i] * a.denominator());
    return Rational(s, 2 * a.denominator() * b.denominator());
}

inline double distance(const FiniteMeasure& a, const FiniteMeasure& b) { return to_double(total_variation(a, b)); }

/// Exact test: m * m = m and m is uniform on a subgroup.
inline std::optional<FiniteSubgroup> is_idempotent(const FiniteMeasure& m) {
    FiniteSubgroup s{m.support()};
    if (!m.group()->is_subgroup(s)) return std::nullopt;
    for (Element g : s.elements)
        if (m.numerators()[g] * Int(s.order()) != m.denominator()) return std::nullopt;
    if (!(convolve(m, m) == m)) return std::nullopt;
    return s;
}

// ---------------------------------------------------------------------------
// Finitely supported measures on Z^d with exact rational weights.

class LatticeMeasure {
public:
    using Point = Character;

    LatticeMeasure() = default;
    LatticeMeasure(std::size_t dim, std::map<Point, Rational> weights) : dim_(dim), w_(std::move(weights)) {
        Rational total = 0;
        for (auto it = w_.begin(); it != w_.end();) {
            if (it->first.size() != dim_) throw std::invalid_argument("point dimension mismatch");
            if (it->second < 0) throw std::invalid_argument("negative weight");
            total += it->second;
            it = it->second == 0 ? w_.erase(it) : std::next(it);
        }
        if (total != 1) throw std::invalid_argument("weights must sum to 1");
    }

    static LatticeMeasure dirac(const Point& p) { return LatticeMeasure(p.size(), {{p, Rational(1)}}); }

    std::size_t dim() const { return dim_; }
    const std::map<Point, Rational>& weights() const { return w_; }
    Rational weight(const Point& p) const {
        auto it = w_.find(p);
        return it == w_.end() ? Rational(0) : it->second;
    }
    std::size_t support_size() const { return w_.size(); }

    friend bool operator==(const LatticeMeasure&, const LatticeMeasure&) = default;

private:
    std::size_t dim_ = 0;
    std::map<Point, Rational> w_;
};

inline LatticeMeasure convolve(const LatticeMeasure& a, const LatticeMeasure& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("group mismatch");
    std::map<Character, Rational> out;
    for (const auto& [p, u] : a.weights())
        for (const auto& [q, v] : b.weights()) {
            Character s(p.size());
            for (std::size_t i = 0; i < s.size(); ++i) s[i] = checked_add(p[i], q[i]);
            out[s] += u * v;
        }
    return LatticeMeasure(a.dim(), std::move(out));
}

inline LatticeMeasure reflect(const LatticeMeasure& m) {
    std::map<Character, Rational> out;
    for (const auto& [p, u] : m.weights()) {
        Character q(p.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = -p[i];
        out[q] = u;
    }
    return LatticeMeasure(m.dim(), std::move(out));
}

inline LatticeMeasure pushforward(const LatticeMeasure& m, const IntMatrix& f) {
    if (f.cols() != m.dim()) throw std::invalid_argument("map not defined on the measure's group");
    std::map<Character, Rational> out;
    for (const auto& [p, u] : m.weights()) out[f.apply(p)] += u;
    return LatticeMeasure(f.rows(), std::move(out));
}

inline LatticeMeasure translate(const LatticeMeasure& m, const Character& g) {
    return convolve(m, LatticeMeasure::dirac(g));
}

inline Rational total_variation(const LatticeMeasure& a, const LatticeMeasure& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("group mismatch");
    Rational s = 0;
    for (const auto& [p, u] : a.weights()) s += abs(u - b.weight(p));
    for (const auto& [q, v] : b.weights())
        if (a.weight(q) == 0) s += v;
    return s / 2;
}

inline double distance(const LatticeMeasure& a, const LatticeMeasure& b) { return to_double(total_variation(a, b)); }

/// The only compact subgroup of Z^d is trivial, so idempotents are exactly delta_0.
inline bool is_idempotent(const LatticeMeasure& m) {
    return m.support_size() == 1 && std::all_of(m.weights().begin()->first.begin(), m.weights().begin()->first.end(),
                                                [](std::int64_t v) { return v == 0; });
}

// ---------------------------------------------------------------------------
// Spectral measures on T^d: lazy Fourier coefficient oracles

struct TorusAtom {
    std::vector<double> point;  // lifted to R^d
    double weight = 0;
};

struct Window {
    std::size_t dim = 0;
    int radius = 0;
    std::vector<Character> chars;

    /// All characters with sup-norm <= radius, in lexicographic order.
    static Window box(std::size_t dim, int radius) {
        Window w{dim, radius, {}};
        Character c(dim, -radius);
        while (true) {
            w.chars.push_back(c);
            std::size_t i = dim;
            while (i > 0) {
                --i;
                if (c[i] < radius) {
                    ++c[i];
                    break;
                }
                c[i] = -radius;
                if (i == 0) return w;
            }
            if (dim == 0) return w;
        }
    }

    std::size_t index_of(const Character& chi) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            if (chi[i] < -radius || chi[i] > radius) throw std::out_of_range("character outside window");
            idx = idx * static_cast<std::size_t>(2 * radius + 1) + static_cast<std::size_t>(chi[i] + radius);
        }
        return idx;
    }
};

/// Coefficients of a spectral measure on every character of a window.
struct WindowSnapshot {
    std::vector<Complex> values;
};

inline double window_distance(const WindowSnapshot& a, const WindowSnapshot& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("window mismatch");
    double d = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

class SpectralMeasure {
public:
    enum class Provenance { ExactFromAtoms, ClosedForm, LimitOfProducts };
    using Oracle = std::function<Complex(const Character&)>;

    struct Atoms {
        std::vector<TorusAtom> atoms;
        /// Optional orthonormal basis of a linear subspace of R^d holding every lifted atom.
        std::shared_ptr<const Eigen::MatrixXd> subspace;
    };
    struct Haar {
        TorusSubgroup subgroup;
    };
    struct Product {
        std::vector<SpectralMeasure> factors;
    };
    struct Closed {
        Oracle coeff;
    };
    using Node = std::variant<Atoms, Haar, Product, Closed>;

    SpectralMeasure() = default;

    static SpectralMeasure from_atoms(std::size_t dim, std::vector<TorusAtom> atoms) {
        double total = 0;
        for (const auto& a : atoms) {
            if (a.point.size() != dim) throw std::invalid_argument("atom dimension mismatch");
            if (a.weight < 0) throw std::invalid_argument("negative weight");
            total += a.weight;
        }
        if (std::abs(total - 1) > 1e-12) throw std::invalid_argument("weights must sum to 1");
        return SpectralMeasure(dim, Atoms{std::move(atoms), nullptr}, Provenance::ExactFromAtoms);
    }

    /// Atoms known to lie in span(basis); pushforwards by maps preserving that span
    /// re-project onto it, so round-off cannot leak into expanding directions.
    static SpectralMeasure from_atoms_in_subspace(std::size_t dim, std::vector<TorusAtom> atoms, Eigen::MatrixXd basis) {
        if (static_cast<std::size_t>(basis.rows()) != dim) throw std::invalid_argument("subspace dimension mismatch");
        from_atoms(dim, atoms);
        for (const auto& a : atoms) {
            Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(a.point.data(), static_cast<Eigen::Index>(dim));
            if ((y - basis * (basis.transpose() * y)).cwiseAbs().maxCoeff() > 1e-9)
                throw std::invalid_argument("atom does not lie in the given subspace");
        }
        return SpectralMeasure(dim, Atoms{std::move(atoms), std::make_shared<const Eigen::MatrixXd>(std::move(basis))},
                               Provenance::ExactFromAtoms);
    }

    static SpectralMeasure dirac(std::vector<double> point) {
        const std::size_t d = point.size();
        return from_atoms(d, {{std::move(point), 1.0}});
    }

    static SpectralMeasure haar(const TorusSubgroup& k) { return SpectralMeasure(k.dim(), Haar{k}, Provenance::ClosedForm); }

    static SpectralMeasure closed_form(std::size_t dim, Oracle f, Provenance p = Provenance::ClosedForm) {
        return SpectralMeasure(dim, Closed{std::move(f)}, p);
    }

    std::size_t dim() const { return dim_; }
    Provenance provenance() const { return provenance_; }
    const Node& node() const { return *node_; }

    Complex coeff(const Character& chi) const {
        if (chi.size() != dim_) throw std::invalid_argument("character dimension mismatch");
        return std::visit([&](const auto& n) { return eval(n, chi); }, *node_);
    }

    WindowSnapshot evaluate(const Window& w) const {
        if (w.dim != dim_) throw std::invalid_argument("window dimension mismatch");
        WindowSnapshot s;
        s.values.reserve(w.chars.size());
        for (const auto& c : w.chars) s.values.push_back(coeff(c));
        return s;
    }

    /// Atoms of an atomic measure; nullptr otherwise.
    const std::vector<TorusAtom>* atoms() const {
        const auto* a = std::get_if<Atoms>(node_.get());
        return a ? &a->atoms : nullptr;
    }
    const TorusSubgroup* haar_subgroup() const {
        const auto* h = std::get_if<Haar>(node_.get());
        return h ? &h->subgroup : nullptr;
    }

private:
    SpectralMeasure(std::size_t dim, Node n, Provenance p)
        : dim_(dim), node_(std::make_shared<const Node>(std::move(n))), provenance_(p) {}

    static Complex eval(const Atoms& n, const Character& chi) {
        Complex s = 0;
        for (const auto& a : n.atoms) {
            double phase = 0;
            for (std::size_t i = 0; i < chi.size(); ++i) phase += static_cast<double>(chi[i]) * a.point[i];
            s += a.weight * unit_phase(phase);
        }
        return s;
    }
    static Complex eval(const Haar& n, const Character& chi) { return n.subgroup.contains_character(chi) ? 1.0 : 0.0; }
    static Complex eval(const Product& n, const Character& chi) {
        Complex s = 1;
        for (const auto& f : n.factors) {
            s *= f.coeff(chi);
            if (s == Complex(0)) break;
        }
        return s;
    }
    static Complex eval(const Closed& n, const Character& chi) { return n.coeff(chi); }

    friend SpectralMeasure convolve(const SpectralMeasure&, const SpectralMeasure&);
    friend SpectralMeasure reflect(const SpectralMeasure&);
    friend SpectralMeasure pushforward(const SpectralMeasure&, const IntMatrix&);

    std::size_t dim_ = 0;
    std::shared_ptr<const Node> node_;
    Provenance provenance_ = Provenance::ClosedForm;
};

inline SpectralMeasure convolve(const SpectralMeasure& a, const SpectralMeasure& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("group mismatch");
    SpectralMeasure::Product p;
    for (const auto* m : {&a, &b}) {
        if (const auto* q = std::get_if<SpectralMeasure::Product>(&m->node()))
            p.factors.insert(p.factors.end(), q->factors.begin(), q->factors.end());
        else
            p.factors.push_back(*m);
    }
    auto prov = a.provenance() == SpectralMeasure::Provenance::LimitOfProducts ||
                        b.provenance() == SpectralMeasure::Provenance::LimitOfProducts
                    ? SpectralMeasure::Provenance::LimitOfProducts
                    : (a.provenance() == SpectralMeasure::Provenance::ExactFromAtoms &&
                               b.provenance() == SpectralMeasure::Provenance::ExactFromAtoms
                           ? SpectralMeasure::Provenance::ExactFromAtoms
                           : SpectralMeasure::Provenance::ClosedForm);
    return SpectralMeasure(a.dim(), std::move(p), prov);
}

inline SpectralMeasure reflect(const SpectralMeasure& m) {
    return std::visit(
        [&](const auto& n) -> SpectralMeasure {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, SpectralMeasure::Atoms>) {
                auto atoms = n.atoms;
                for (auto& a : atoms)
                    for (auto& x : a.point) x = -x;
                return SpectralMeasure(m.dim(), SpectralMeasure::Atoms{std::move(atoms), n.subspace}, m.provenance());
            } else if constexpr (std::is_same_v<N, SpectralMeasure::Haar>) {
                return m;
            } else if constexpr (std::is_same_v<N, SpectralMeasure::Product>) {
                SpectralMeasure::Product p;
                for (const auto& f : n.factors) p.factors.push_back(reflect(f));
                return SpectralMeasure(m.dim(), std::move(p), m.provenance());
            } else {
                auto f = n.coeff;
                return SpectralMeasure(m.dim(), SpectralMeasure::Closed{[f](const Character& chi) { return std::conj(f(chi)); }},
                                       m.provenance());
            }
        },
        m.node());
}

/// Image under x -> Qx for an integer matrix Q : T^d -> T^d' (automorphism or quotient map).
/// New coefficient at chi is the old one at Q^T chi.
inline SpectralMeasure pushforward(const SpectralMeasure& m, const IntMatrix& q) {
    if (q.cols() != m.dim()) throw std::invalid_argument("map not defined on the measure's group");
    const std::size_t out_dim = q.rows();
    return std::visit(
        [&](const auto& n) -> SpectralMeasure {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, SpectralMeasure::Atoms>) {
                auto atoms = n.atoms;
                std::shared_ptr<const Eigen::MatrixXd> sub;
                if (n.subspace && q.square()) {
                    Eigen::MatrixXd qd(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(out_dim));
                    for (std::size_t r = 0; r < out_dim; ++r)
                        for (std::size_t c = 0; c < out_dim; ++c)
                            qd(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = q(r, c).convert_to<double>();
                    const auto& v = *n.subspace;
                    if (linalg::detail::invariance_residual(qd, v) <= 1e-9) sub = n.subspace;
                }
                for (auto& a : atoms) {
                    a.point = q.apply(a.point);
                    if (sub) {
                        Eigen::Map<Eigen::VectorXd> y(a.point.data(), static_cast<Eigen::Index>(a.point.size()));
                        Eigen::VectorXd proj = (*sub) * (sub->transpose() * y);
                        y = proj;
                        continue;
                    }
                    // Keep small lifted coordinates untouched so contracting orbits stay precise.
                    for (auto& x : a.point)
                        if (std::abs(x) > 1e3) x -= std::floor(x);
                }
                return SpectralMeasure(out_dim, SpectralMeasure::Atoms{std::move(atoms), sub}, m.provenance());
            } else if constexpr (std::is_same_v<N, SpectralMeasure::Haar>) {
                return SpectralMeasure(out_dim, SpectralMeasure::Haar{n.subgroup.image_under(q)}, m.provenance());
            } else if constexpr (std::is_same_v<N, SpectralMeasure::Product>) {
                SpectralMeasure::Product p;
                for (const auto& f : n.factors) p.factors.push_back(pushforward(f, q));
                return SpectralMeasure(out_dim, std::move(p), m.provenance());
            } else {
                auto f = n.coeff;
                IntMatrix qt = q.transpose();
                return SpectralMeasure(out_dim, SpectralMeasure::Closed{[f, qt](const Character& chi) { return f(qt.apply(chi)); }},
                                       m.provenance());
            }
        },
        m.node());
}

inline SpectralMeasure pushforward(const SpectralMeasure& m, const IntAutomorphism& a) { return pushforward(m, a.matrix()); }

inline SpectralMeasure translate(const SpectralMeasure& m, const std::vector<double>& b) {
    if (b.size() != m.dim()) throw std::invalid_argument("group mismatch");
    if (const auto* n = std::get_if<SpectralMeasure::Atoms>(&m.node())) {
        auto moved = n->atoms;
        for (auto& a : moved)
            for (std::size_t i = 0; i < b.size(); ++i) a.point[i] += b[i];
        if (n->subspace) {
            const auto& v = *n->subspace;
            Eigen::Map<const Eigen::VectorXd> y(b.data(), static_cast<Eigen::Index>(b.size()));
            if ((y - v * (v.transpose() * y)).cwiseAbs().maxCoeff() <= 1e-9)
                return SpectralMeasure::from_atoms_in_subspace(m.dim(), std::move(moved), v);
        }
        return SpectralMeasure::from_atoms(m.dim(), std::move(moved));
    }
    return convolve(m, SpectralMeasure::dirac(b));
}

inline SpectralMeasure haar_of(const TorusSubgroup& k) { return SpectralMeasure::haar(k); }

/// Quotient map T^d -> T^d / K for finite K, realized as x -> Bx where the rows of B
/// span the annihilator of K. Characters psi of the quotient pull back to B^T psi.
inline IntMatrix quotient_matrix(const TorusSubgroup& k) {
    if (!k.is_finite()) throw std::invalid_argument("quotient requires a finite subgroup");
    return IntMatrix::from_rows(k.annihilator());
}

/// Induced automorphism on T^d / K: B A B^{-1}, integral exactly when A(K) = K.
inline IntAutomorphism quotient_automorphism(const IntAutomorphism& a, const TorusSubgroup& k) {
    if (!k.invariant_under(a)) throw std::invalid_argument("subgroup is not invariant");
    IntMatrix b = quotient_matrix(k);
    linalg::RatMatrix br = linalg::to_rat_matrix(b), ar = linalg::to_rat_matrix(a.matrix());
    const std::size_t d = a.dim();
    // Solve X B = B A for X.
    linalg::RatMatrix ba(d, std::vector<Rational>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t t = 0; t < d; ++t) ba[i][j] += br[i][t] * ar[t][j];
    linalg::RatMatrix binv = linalg::rat_inverse(br);
    IntMatrix x(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Rational s = 0;
            for (std::size_t t = 0; t < d; ++t) s += ba[i][t] * binv[t][j];
            if (!is_integral(s)) throw std::logic_error("induced quotient map is not integral");
            x(i, j) = numerator_of(s);
        }
    return IntAutomorphism(x);
}

inline double distance(const SpectralMeasure& a, const SpectralMeasure& b, const Window& w) {
    if (a.dim() != b.dim()) throw std::invalid_argument("group mismatch");
    return window_distance(a.evaluate(w), b.evaluate(w));
}

/// Windowed Haar detection: coefficients near {0,1} and the near-1 set closed under
/// addition and negation inside the window. Returns the subgroup annihilated by it.
inline std::optional<TorusSubgroup> is_idempotent(const WindowSnapshot& s, const Window& w, double tol = 1e-6) {
    std::vector<bool> one(w.chars.size(), false);
    std::vector<IntVector> gens;
    for (std::size_t i = 0; i < w.chars.size(); ++i) {
        const Complex c = s.values[i];
        if (std::abs(c - 1.0) <= tol) {
            one[i] = true;
            gens.emplace_back(w.chars[i].begin(), w.chars[i].end());
        } else if (std::abs(c) > tol) {
            return std::nullopt;
        }
    }
    for (std::size_t i = 0; i < w.chars.size(); ++i) {
        if (!one[i]) continue;
        Character neg(w.dim);
        for (std::size_t k = 0; k < w.dim; ++k) neg[k] = -w.chars[i][k];
        if (!one[w.index_of(neg)]) return std::nullopt;
        for (std::size_t j = i; j < w.chars.size(); ++j) {
            if (!one[j]) continue;
            Character sum(w.dim);
            bool inside = true;
            for (std::size_t k = 0; k < w.dim; ++k) {
                sum[k] = w.chars[i][k] + w.chars[j][k];
                inside = inside && std::abs(sum[k]) <= w.radius;
            }
            if (inside && !one[w.index_of(sum)]) return std::nullopt;
        }
    }
    return TorusSubgroup(w.dim, gens);
}

inline std::optional<TorusSubgroup> is_idempotent(const SpectralMeasure& m, const Window& w, double tol = 1e-6) {
    return is_idempotent(m.evaluate(w), w, tol);
}

// ---------------------------------------------------------------------------
// Product measures on L^Z, one finite measure per coordinate

class ProfileMeasure {
public:
    using Coordinates = groups::Profile<FiniteMeasure>;

    ProfileMeasure() = default;
    explicit ProfileMeasure(Coordinates c) : coords_(std::move(c)) {
        group_ = coords_.left().group();
        if (!group_) throw std::invalid_argument("profile measure needs a symbol group");
        coords_.all_of([&](const FiniteMeasure& m) {
            require_same_group(m, coords_.left());
            return true;
        });
    }

    static ProfileMeasure haar(std::shared_ptr<const FiniteGroup> l, const groups::ShiftSpace::Subgroup& m) {
        return ProfileMeasure(m.map([&](const FiniteSubgroup& h) { return haar_of(l, h); }));
    }

    static ProfileMeasure dirac(std::shared_ptr<const FiniteGroup> l, const groups::ShiftSpace::Point& p) {
        return ProfileMeasure(p.map([&](Element g) { return FiniteMeasure::dirac(l, g); }));
    }

    const std::shared_ptr<const FiniteGroup>& group() const { return group_; }
    const Coordinates& coordinates() const { return coords_; }

    friend bool operator==(const ProfileMeasure& a, const ProfileMeasure& b) { return a.coords_ == b.coords_; }

private:
    std::shared_ptr<const FiniteGroup> group_;
    Coordinates coords_;
};

inline ProfileMeasure convolve(const ProfileMeasure& a, const ProfileMeasure& b) {
    return ProfileMeasure(zip(a.coordinates(), b.coordinates(),
                              [](const FiniteMeasure& x, const FiniteMeasure& y) { return convolve(x, y); }));
}

inline ProfileMeasure reflect(const ProfileMeasure& m) {
    return ProfileMeasure(m.coordinates().map([](const FiniteMeasure& x) { return reflect(x); }));
}

/// Pushforward by the shift power tau^k.
inline ProfileMeasure pushforward_shift(const ProfileMeasure& m, std::int64_t k) {
    return ProfileMeasure(m.coordinates().shifted(k));
}

/// Coordinatewise conjugation by a point of L^Z.
inline ProfileMeasure conjugate(const ProfileMeasure& m, const groups::ShiftSpace::Point& x) {
    return ProfileMeasure(zip(m.coordinates(), x, [](const FiniteMeasure& c, Element g) { return conjugate(c, g); }));
}

inline ProfileMeasure translate_right(const ProfileMeasure& m, const groups::ShiftSpace::Point& x) {
    return convolve(m, ProfileMeasure::dirac(m.group(), x));
}

/// Sup over coordinates of the total variation (a metric for the product topology on
/// profiles, which differ in finitely many coordinates).
inline Rational total_variation(const ProfileMeasure& a, const ProfileMeasure& b) {
    auto tv = zip(a.coordinates(), b.coordinates(), [](const FiniteMeasure& x, const FiniteMeasure& y) {
        return total_variation(x, y);
    });
    Rational best = std::max(tv.left(), tv.right());
    for (const auto& v : tv.explicit_values()) best = std::max(best, v);
    return best;
}

inline double distance(const ProfileMeasure& a, const ProfileMeasure& b) { return to_double(total_variation(a, b)); }

inline std::optional<groups::ShiftSpace::Subgroup> is_idempotent(const ProfileMeasure& m) {
    bool ok = true;
    auto subs = m.coordinates().map([&](const FiniteMeasure& c) {
        auto s = is_idempotent(c);
        if (!s) {
            ok = false;
            return FiniteSubgroup{};
        }
        return *s;
    });
    if (!ok) return std::nullopt;
    return subs;
}

}  // namespace scplab::measures
