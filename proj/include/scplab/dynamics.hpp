// Iterated convolutions: powers, shifted and symmetrized sequences, products over
// automorphism orbits, concentration functions, and convergence calls.
#pragma once

#include "scplab/measures.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace scplab::dynamics {

using namespace scplab::measures;

struct Params {
    int window = 8;
    double eps = 1e-8;
    int horizon = 20;
    int n_max = 512;
    bool stop_on_convergence = true;
};

/// Snapshot i is the measure at step steps[i]; distances[i] compares it with snapshot
/// i - 1 (distances[0] is 0 by convention).
template <class Snapshot>
struct Trajectory {
    std::vector<int> steps;
    std::vector<Snapshot> snapshots;
    std::vector<double> distances;
    Params params;
    std::vector<std::string> warnings;

    std::size_t size() const { return snapshots.size(); }
    const Snapshot& last() const { return snapshots.back(); }
};

inline double snapshot_distance(const FiniteMeasure& a, const FiniteMeasure& b) { return distance(a, b); }
inline double snapshot_distance(const LatticeMeasure& a, const LatticeMeasure& b) { return distance(a, b); }
inline double snapshot_distance(const ProfileMeasure& a, const ProfileMeasure& b) { return distance(a, b); }
inline double snapshot_distance(const WindowSnapshot& a, const WindowSnapshot& b) { return window_distance(a, b); }

/// True when the final `horizon` consecutive distances are all <= eps.
template <class S>
bool tail_settled(const Trajectory<S>& t) {
    const std::size_t h = static_cast<std::size_t>(t.params.horizon);
    if (t.distances.size() < h + 1) return false;
    for (std::size_t i = t.distances.size() - h; i < t.distances.size(); ++i)
        if (!(t.distances[i] <= t.params.eps)) return false;
    return true;
}

template <class S>
void push_step(Trajectory<S>& t, int step, S snap) {
    double d = t.snapshots.empty() ? 0.0 : snapshot_distance(t.snapshots.back(), snap);
    t.steps.push_back(step);
    t.distances.push_back(d);
    t.snapshots.push_back(std::move(snap));
}

template <class S>
bool should_stop(const Trajectory<S>& t) {
    return t.params.stop_on_convergence && tail_settled(t);
}

/// Partial products f_0 f_1 ... f_{n-1} with f_{k+1} = next(f_k), snapshotted through
/// to_snap and multiplied in snapshot space.
template <class Snap, class Factor, class Next, class ToSnap, class Mul>
Trajectory<Snap> product_trajectory(Factor f, Next next, ToSnap to_snap, Mul mul, const Params& p) {
    if (p.n_max < 1) throw std::invalid_argument("n_max must be at least 1");
    Trajectory<Snap> t;
    t.params = p;
    std::optional<Snap> acc;
    for (int n = 1; n <= p.n_max; ++n) {
        Snap s = to_snap(f);
        acc = acc ? mul(*acc, s) : std::move(s);
        push_step(t, n, *acc);
        if (should_stop(t)) break;
        if (n < p.n_max) f = next(f);
    }
    return t;
}

inline WindowSnapshot pointwise_product(const WindowSnapshot& a, const WindowSnapshot& b) {
    WindowSnapshot out;
    out.values.resize(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
    return out;
}

// ---------------------------------------------------------------------------
// Convolution powers

template <class M>
Trajectory<M> convolution_powers(const M& mu, const Params& p) {
    return product_trajectory<M>(
        mu, [](const M& m) { return m; }, [](const M& m) { return m; },
        [](const M& a, const M& b) { return convolve(a, b); }, p);
}

inline Trajectory<WindowSnapshot> convolution_powers(const SpectralMeasure& mu, const Params& p) {
    const Window w = Window::box(mu.dim(), p.window);
    return product_trajectory<WindowSnapshot>(
        mu, [](const SpectralMeasure& m) { return m; }, [&](const SpectralMeasure& m) { return m.evaluate(w); },
        pointwise_product, p);
}

// ---------------------------------------------------------------------------
// Orbit products  lambda alpha(lambda) ... alpha^{n-1}(lambda)

inline Trajectory<WindowSnapshot> orbit_product(const SpectralMeasure& lambda, const IntAutomorphism& alpha,
                                                const Params& p) {
    const Window w = Window::box(lambda.dim(), p.window);
    return product_trajectory<WindowSnapshot>(
        lambda, [&](const SpectralMeasure& m) { return pushforward(m, alpha); },
        [&](const SpectralMeasure& m) { return m.evaluate(w); }, pointwise_product, p);
}

/// Finite base; `step` is the map nu -> x nu x^{-1} restricted to the base.
inline Trajectory<FiniteMeasure> orbit_product(const FiniteMeasure& lambda,
                                               const std::function<FiniteMeasure(const FiniteMeasure&)>& step,
                                               const Params& p) {
    return product_trajectory<FiniteMeasure>(
        lambda, step, [](const FiniteMeasure& m) { return m; },
        [](const FiniteMeasure& a, const FiniteMeasure& b) { return convolve(a, b); }, p);
}

inline Trajectory<FiniteMeasure> orbit_product(const FiniteMeasure& lambda, const std::vector<Element>& alpha,
                                               const Params& p) {
    return orbit_product(lambda, [&](const FiniteMeasure& m) { return pushforward(m, alpha); }, p);
}

inline Trajectory<ProfileMeasure> orbit_product(const ProfileMeasure& lambda,
                                                const std::function<ProfileMeasure(const ProfileMeasure&)>& step,
                                                const Params& p) {
    return product_trajectory<ProfileMeasure>(
        lambda, step, [](const ProfileMeasure& m) { return m; },
        [](const ProfileMeasure& a, const ProfileMeasure& b) { return convolve(a, b); }, p);
}

// ---------------------------------------------------------------------------
// Measures on Z x_alpha B of the form sum_j w_j lambda_j delta_{(e, n_j)}

template <class BaseMeasure>
struct SemidirectMeasure {
    struct Component {
        std::int64_t shift = 0;
        Rational weight = 1;
        BaseMeasure base;
    };
    std::vector<Component> components;

    SemidirectMeasure() = default;
    explicit SemidirectMeasure(std::vector<Component> c) : components(std::move(c)) {
        if (components.empty()) throw std::invalid_argument("empty semidirect measure");
        Rational total = 0;
        std::set<std::int64_t> shifts;
        for (const auto& k : components) {
            if (k.weight <= 0) throw std::invalid_argument("component weights must be positive");
            if (!shifts.insert(k.shift).second) throw std::invalid_argument("duplicate component shift");
            total += k.weight;
        }
        if (total != 1) throw std::invalid_argument("component weights must sum to 1");
    }

    static SemidirectMeasure single(BaseMeasure base, std::int64_t shift) {
        return SemidirectMeasure({Component{shift, Rational(1), std::move(base)}});
    }

    /// Image on Z under (b, n) -> n.
    LatticeMeasure marginal() const {
        std::map<Character, Rational> w;
        for (const auto& k : components) w[{k.shift}] += k.weight;
        return LatticeMeasure(1, std::move(w));
    }
};

/// mu^n x^{-n} for mu = lambda delta_{(e, n0)} on Z x_A T^d and x = (b, n0), through
/// mu^n x^{-n} = prod_{k<n} x^k lambda' x^{-k} with lambda' = lambda delta_{-b}.
inline Trajectory<WindowSnapshot> shifted_sequence(const SpectralMeasure& lambda, std::int64_t n0,
                                                   const IntAutomorphism& alpha, const std::vector<double>& b,
                                                   const Params& p) {
    std::vector<double> minus_b(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) minus_b[i] = -b[i];
    SpectralMeasure lp = lambda;
    if (std::any_of(b.begin(), b.end(), [](double v) { return v != 0.0; })) lp = translate(lambda, minus_b);
    return orbit_product(lp, alpha.power(n0), p);
}

/// Finite base B with automorphism alpha (a permutation) and x = (b, n0).
inline Trajectory<FiniteMeasure> shifted_sequence(const FiniteMeasure& lambda, std::int64_t n0,
                                                  const std::vector<Element>& alpha, Element b, const Params& p) {
    std::vector<Element> an(alpha.size());
    for (Element g = 0; g < an.size(); ++g) an[g] = groups::apply_power(alpha, g, n0);
    const auto& grp = *lambda.group();
    FiniteMeasure lp = translate_right(lambda, grp.inverse(b));
    return orbit_product(lp, [&, an, b](const FiniteMeasure& m) { return conjugate(pushforward(m, an), b); }, p);
}

/// Shift-space base L^Z with alpha = tau and x = (b, n0).
inline Trajectory<ProfileMeasure> shifted_sequence(const ProfileMeasure& lambda, std::int64_t n0,
                                                   const groups::ShiftSpace::Point& b, const Params& p) {
    groups::ShiftSpace space{lambda.group()};
    ProfileMeasure lp = translate_right(lambda, space.inverse(b));
    return orbit_product(lp, [&, n0, b](const ProfileMeasure& m) { return conjugate(pushforward_shift(m, n0), b); }, p);
}

/// Plain group case (trivial Z-part): mu^n x^{-n} on a finite group.
inline Trajectory<FiniteMeasure> shifted_sequence(const FiniteMeasure& mu, Element x, const Params& p) {
    const auto& grp = *mu.group();
    FiniteMeasure lp = translate_right(mu, grp.inverse(x));
    return orbit_product(lp, [&, x](const FiniteMeasure& m) { return conjugate(m, x); }, p);
}

// ---------------------------------------------------------------------------
// Symmetrized sequences mu^n (mu^n)^

template <class M>
Trajectory<M> symmetrized_sequence(const M& mu, const Params& p) {
    Trajectory<M> t;
    t.params = p;
    M power = mu;
    for (int n = 1; n <= p.n_max; ++n) {
        if (n > 1) power = convolve(power, mu);
        push_step(t, n, convolve(power, reflect(power)));
        if (should_stop(t)) break;
    }
    return t;
}

/// On T^d the coefficient of nu nu^ is |nu^(chi)|^2.
inline WindowSnapshot symmetrize(const WindowSnapshot& s) {
    WindowSnapshot out;
    out.values.reserve(s.values.size());
    for (const auto& v : s.values) out.values.emplace_back(std::norm(v), 0.0);
    return out;
}

inline Trajectory<WindowSnapshot> symmetrized_sequence(const SpectralMeasure& mu, const Params& p) {
    auto t = convolution_powers(mu, p);
    Trajectory<WindowSnapshot> out;
    out.params = p;
    for (const auto& s : t.snapshots) {
        push_step(out, static_cast<int>(out.size()) + 1, symmetrize(s));
        if (should_stop(out)) break;
    }
    return out;
}

/// For mu = lambda delta_x, mu^n (mu^n)^ = P_n P_n^ where P_n = mu^n x^{-n}; this maps a
/// shifted sequence to the symmetrized one.
inline Trajectory<WindowSnapshot> symmetrized_from_shifted(const Trajectory<WindowSnapshot>& shifted) {
    Trajectory<WindowSnapshot> out;
    out.params = shifted.params;
    for (const auto& s : shifted.snapshots) push_step(out, static_cast<int>(out.size()) + 1, symmetrize(s));
    return out;
}

template <class M>
Trajectory<M> symmetrized_from_shifted(const Trajectory<M>& shifted) {
    Trajectory<M> out;
    out.params = shifted.params;
    for (const auto& s : shifted.snapshots) push_step(out, static_cast<int>(out.size()) + 1, convolve(s, reflect(s)));
    return out;
}

// ---------------------------------------------------------------------------
// Concentration functions

/// c_n(K) = max_g mu^n(K + g) for n = 1..n_max; exact.
inline std::vector<Rational> concentration_function(const LatticeMeasure& mu, const std::vector<Character>& k, int n_max) {
    std::vector<Rational> out;
    LatticeMeasure power = mu;
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) power = convolve(power, mu);
        std::set<Character> candidates;
        for (const auto& [s, w] : power.weights())
            for (const auto& q : k) {
                Character g(s.size());
                for (std::size_t i = 0; i < g.size(); ++i) g[i] = s[i] - q[i];
                candidates.insert(g);
            }
        Rational best = 0;
        for (const auto& g : candidates) {
            Rational m = 0;
            for (const auto& q : k) {
                Character pt(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) pt[i] = q[i] + g[i];
                m += power.weight(pt);
            }
            best = std::max(best, m);
        }
        out.push_back(best);
    }
    return out;
}

/// c_n(K) = max_g mu^n(K g) on a finite group.
inline std::vector<Rational> concentration_function(const FiniteMeasure& mu, const std::vector<Element>& k, int n_max) {
    std::vector<Rational> out;
    FiniteMeasure power = mu;
    const auto& grp = *mu.group();
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) power = convolve(power, mu);
        Int best = 0;
        for (Element g = 0; g < grp.order(); ++g) {
            Int m = 0;
            for (Element q : k) m += power.numerators()[grp.multiply(q, g)];
            best = std::max(best, m);
        }
        out.emplace_back(best, power.denominator());
    }
    return out;
}

/// Box {x : |x|_inf <= r} in Z^d.
inline std::vector<Character> lattice_box(std::size_t dim, int r) { return Window::box(dim, r).chars; }

// ---------------------------------------------------------------------------
// Convergence calls

enum class ConvergenceStatus { Converged, Diverged, Undecided };

inline const char* to_string(ConvergenceStatus s) {
    switch (s) {
        case ConvergenceStatus::Converged: return "Converged";
        case ConvergenceStatus::Diverged: return "Diverged";
        default: return "Undecided";
    }
}

template <class Snapshot>
struct ConvergenceCall {
    ConvergenceStatus status = ConvergenceStatus::Undecided;
    std::optional<Snapshot> limit;
    std::string evidence;
    double eps = 0;
    int horizon = 0;
    int steps = 0;
};

namespace detail {

template <class S>
ConvergenceCall<S> base_call(const Trajectory<S>& t, double eps, int horizon) {
    if (eps <= 0 || horizon < 2) throw std::invalid_argument("need eps > 0 and horizon >= 2");
    ConvergenceCall<S> c;
    c.eps = eps;
    c.horizon = horizon;
    c.steps = static_cast<int>(t.size());
    const std::size_t h = static_cast<std::size_t>(horizon);
    if (t.distances.size() >= h + 1) {
        bool ok = true;
        for (std::size_t i = t.distances.size() - h; i < t.distances.size() && ok; ++i) ok = t.distances[i] <= eps;
        if (ok) {
            c.status = ConvergenceStatus::Converged;
            c.limit = t.last();
            c.evidence = "last " + std::to_string(horizon) + " consecutive distances <= eps";
        }
    }
    return c;
}

/// An exact repeat of an earlier snapshot with a nonzero step in between certifies a
/// periodic, hence non-convergent, sequence (the map driving it is deterministic).
template <class S>
bool periodic_repeat(const Trajectory<S>& t, std::string& evidence) {
    const std::size_t n = t.size();
    if (n < 3) return false;
    const S& last = t.snapshots.back();
    for (std::size_t i = n - 1; i-- > 0;) {
        if (!(t.snapshots[i] == last)) continue;
        for (std::size_t j = i + 1; j < n; ++j)
            if (t.distances[j] > 0) {
                evidence = "exact repeat of step " + std::to_string(t.steps[i]) + " at step " +
                           std::to_string(t.steps[n - 1]) + " with movement in between";
                return true;
            }
        return false;
    }
    return false;
}

}  // namespace detail

inline ConvergenceCall<FiniteMeasure> detect_convergence(const Trajectory<FiniteMeasure>& t, double eps, int horizon) {
    auto c = detail::base_call(t, eps, horizon);
    if (c.status == ConvergenceStatus::Undecided && detail::periodic_repeat(t, c.evidence))
        c.status = ConvergenceStatus::Diverged;
    return c;
}

inline ConvergenceCall<ProfileMeasure> detect_convergence(const Trajectory<ProfileMeasure>& t, double eps, int horizon) {
    auto c = detail::base_call(t, eps, horizon);
    if (c.status == ConvergenceStatus::Undecided && detail::periodic_repeat(t, c.evidence))
        c.status = ConvergenceStatus::Diverged;
    return c;
}

/// On Z^d a sequence of probability measures escaping every box cannot converge to a
/// probability measure; the certificate is that mass in the window box of radius W
/// falls below 1/2 while the distances stay bounded away from zero.
inline ConvergenceCall<LatticeMeasure> detect_convergence(const Trajectory<LatticeMeasure>& t, double eps, int horizon) {
    auto c = detail::base_call(t, eps, horizon);
    if (c.status != ConvergenceStatus::Undecided || t.size() == 0) return c;
    const int w = t.params.window;
    Rational inside = 0;
    for (const auto& [pt, wt] : t.last().weights())
        if (std::all_of(pt.begin(), pt.end(), [&](std::int64_t v) { return std::abs(v) <= w; })) inside += wt;
    if (inside < Rational(1, 2) && t.distances.back() > eps) {
        c.status = ConvergenceStatus::Diverged;
        c.evidence = "mass in box of radius " + std::to_string(w) + " is " + scplab::to_string(inside) + " (escape)";
    }
    return c;
}

inline ConvergenceCall<WindowSnapshot> detect_convergence(const Trajectory<WindowSnapshot>& t, double eps, int horizon) {
    return detail::base_call(t, eps, horizon);
}

template <class S>
ConvergenceCall<S> detect_convergence(const Trajectory<S>& t) {
    return detect_convergence(t, t.params.eps, t.params.horizon);
}

}  // namespace scplab::dynamics
