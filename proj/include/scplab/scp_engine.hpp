// SCP verdicts: dissipation screen, shifted sequences per support candidate,
// idempotent identification and the normalization check; plus the spectral
// prediction of point-wise distality and the consistency reports built on both.
#pragma once

#include "scplab/distality.hpp"
#include "scplab/dynamics.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace scplab::engine {

using json = nlohmann::ordered_json;
using namespace scplab::dynamics;
using groups::ShiftSpace;

// ---------------------------------------------------------------------------
// Group and measure families

struct FiniteSpec {
    std::shared_ptr<const FiniteGroup> group;
};
struct LatticeSpec {
    std::size_t dim = 1;
};
struct TorusSpec {
    std::size_t dim = 1;
};
struct SemidirectTorusSpec {
    IntAutomorphism alpha;
};
struct SemidirectFiniteSpec {
    std::shared_ptr<const FiniteGroup> base;
    std::vector<Element> alpha;
};
struct ShiftSpec {
    std::shared_ptr<const FiniteGroup> symbols;
};

using GroupSpec = std::variant<FiniteSpec, LatticeSpec, TorusSpec, SemidirectTorusSpec, SemidirectFiniteSpec, ShiftSpec>;

using Measure = std::variant<FiniteMeasure, LatticeMeasure, SpectralMeasure, SemidirectMeasure<SpectralMeasure>,
                             SemidirectMeasure<FiniteMeasure>, SemidirectMeasure<ProfileMeasure>>;

inline std::string family_name(const GroupSpec& g) {
    static const char* names[] = {"finite", "lattice", "torus", "semidirect-torus", "semidirect-finite", "shift"};
    return names[g.index()];
}

// ---------------------------------------------------------------------------
// Verdicts

struct TrivialSubgroup {
    std::size_t dim = 1;
};

using SubgroupDescriptor = std::variant<FiniteSubgroup, TorusSubgroup, ShiftSpace::Subgroup, TrivialSubgroup>;

enum class ViolationReason { NonIdempotentLimit, LimitNotNormalizedByShift };

struct Dissipating {
    std::string rule;
    json evidence;
};
struct ShiftedHaar {
    json shift;
    SubgroupDescriptor subgroup;
    double residual = 0;
    bool normalization_ok = true;
};
struct Violation {
    ViolationReason reason;
    json limit;
    json witness;
};
struct Inconclusive {
    std::string budget;
};

using SCPVerdict = std::variant<Dissipating, ShiftedHaar, Violation, Inconclusive>;

inline std::string verdict_kind(const SCPVerdict& v) {
    if (std::holds_alternative<Dissipating>(v)) return "Dissipating";
    if (std::holds_alternative<ShiftedHaar>(v)) return "ShiftedHaar";
    if (const auto* x = std::get_if<Violation>(&v))
        return x->reason == ViolationReason::NonIdempotentLimit ? "Violation:NonIdempotentLimit"
                                                                 : "Violation:LimitNotNormalizedByShift";
    return "Inconclusive";
}

inline json to_json(const Character& c) {
    json j = json::array();
    for (auto v : c) j.push_back(v);
    return j;
}

inline json to_json(const FiniteSubgroup& s) {
    json j = json::array();
    for (auto e : s.elements) j.push_back(e);
    return j;
}

inline json to_json(const TorusSubgroup& k) {
    json ann = json::array();
    for (const auto& row : k.annihilator()) {
        json r = json::array();
        for (const auto& v : row) r.push_back(v.convert_to<long long>());
        ann.push_back(r);
    }
    json inv = json::array();
    for (const auto& s : k.invariants()) inv.push_back(s.convert_to<long long>());
    return json{{"kind", "torus"}, {"dim", k.dim()}, {"annihilator", ann}, {"invariants", inv}, {"torus_rank", k.torus_rank()}};
}

template <class T, class F>
json profile_json(const groups::Profile<T>& p, F f) {
    json ex = json::array();
    for (const auto& v : p.explicit_values()) ex.push_back(f(v));
    return json{{"left", f(p.left())}, {"offset", p.offset()}, {"explicit", ex}, {"right", f(p.right())}};
}

inline json to_json(const SubgroupDescriptor& s) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FiniteSubgroup>)
                return json{{"kind", "finite"}, {"elements", to_json(x)}};
            else if constexpr (std::is_same_v<T, TorusSubgroup>)
                return to_json(x);
            else if constexpr (std::is_same_v<T, ShiftSpace::Subgroup>)
                return json{{"kind", "profile"}, {"profile", profile_json(x, [](const FiniteSubgroup& h) { return to_json(h); })}};
            else
                return json{{"kind", "trivial"}, {"dim", x.dim}};
        },
        s);
}

inline json to_json(const SCPVerdict& v) {
    json j{{"kind", verdict_kind(v)}};
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Dissipating>) {
                j["rule"] = x.rule;
                j["evidence"] = x.evidence;
            } else if constexpr (std::is_same_v<T, ShiftedHaar>) {
                j["shift"] = x.shift;
                j["subgroup"] = to_json(x.subgroup);
                j["residual"] = x.residual;
                j["normalization_ok"] = x.normalization_ok;
            } else if constexpr (std::is_same_v<T, Violation>) {
                j["limit"] = x.limit;
                j["witness"] = x.witness;
            } else {
                j["budget"] = x.budget;
            }
        },
        v);
    return j;
}

/// Step, distance and a few tracked coefficients of one trajectory, for CSV export.
struct TrajectoryExport {
    std::string name;
    std::vector<std::string> labels;
    std::vector<int> steps;
    std::vector<double> distances;
    std::vector<std::vector<Complex>> coeffs;
};

struct CandidateResult {
    json shift;
    ConvergenceStatus status = ConvergenceStatus::Undecided;
    SCPVerdict verdict = Inconclusive{};
    int steps = 0;
    std::vector<std::string> warnings;
};

struct Classification {
    SCPVerdict verdict = Inconclusive{};
    std::vector<CandidateResult> candidates;
    json symmetrized;
    json parameters;
    std::vector<TrajectoryExport> trajectories;
};

inline json params_json(const Params& p) {
    return json{{"window", p.window}, {"eps", p.eps}, {"horizon", p.horizon}, {"n_max", p.n_max},
                {"stop_on_convergence", p.stop_on_convergence}, {"idempotent_tol", 1e-6}};
}

// ---------------------------------------------------------------------------
// Limit identification

struct FiniteLimit {
    FiniteSubgroup subgroup;
    Rational residual;
};

/// Candidate subgroup: generated by the atoms carrying at least 1/(2|G|) of mass (an
/// idempotent limit puts at least 1/|G| on each of its points), then exact TV residual.
inline FiniteLimit identify_limit(const FiniteMeasure& m) {
    const auto& g = *m.group();
    std::vector<Element> heavy;
    for (Element x = 0; x < g.order(); ++x)
        if (m.numerators()[x] * Int(2 * g.order()) >= m.denominator()) heavy.push_back(x);
    FiniteSubgroup k = g.generated_by(heavy);
    return {k, total_variation(m, FiniteMeasure::uniform(m.group(), k))};
}

struct ProfileLimit {
    ShiftSpace::Subgroup subgroup;
    Rational residual;
};

inline ProfileLimit identify_limit(const ProfileMeasure& m) {
    auto subs = m.coordinates().map([](const FiniteMeasure& c) { return identify_limit(c).subgroup; });
    return {subs, total_variation(m, ProfileMeasure::haar(m.group(), subs))};
}

inline double haar_residual(const WindowSnapshot& s, const Window& w, const TorusSubgroup& k) {
    double r = 0;
    for (std::size_t i = 0; i < w.chars.size(); ++i)
        r = std::max(r, std::abs(s.values[i] - (k.contains_character(w.chars[i]) ? 1.0 : 0.0)));
    return r;
}

inline json coefficient_json(const Character& c, Complex v) {
    return json{{"character", to_json(c)}, {"re", v.real()}, {"im", v.imag()}, {"modulus", std::abs(v)}};
}

/// Tracked characters for reports: the unit vectors and, in dimension >= 2, e_1 + e_2.
inline std::vector<Character> tracked_characters(std::size_t d) {
    std::vector<Character> out;
    for (std::size_t i = 0; i < d; ++i) {
        Character c(d, 0);
        c[i] = 1;
        out.push_back(c);
    }
    if (d >= 2) {
        Character c(d, 0);
        c[0] = c[1] = 1;
        out.push_back(c);
    }
    return out;
}

inline TrajectoryExport export_trajectory(const std::string& name, const Trajectory<WindowSnapshot>& t, const Window& w) {
    TrajectoryExport e{name, {}, t.steps, t.distances, {}};
    auto tracked = tracked_characters(w.dim);
    for (const auto& c : tracked) {
        std::string l;
        for (auto v : c) l += (l.empty() ? "" : "_") + std::to_string(v);
        e.labels.push_back(l);
    }
    for (const auto& s : t.snapshots) {
        std::vector<Complex> row;
        for (const auto& c : tracked) row.push_back(s.values[w.index_of(c)]);
        e.coeffs.push_back(row);
    }
    return e;
}

inline TrajectoryExport export_trajectory(const std::string& name, const Trajectory<FiniteMeasure>& t) {
    TrajectoryExport e{name, {}, t.steps, t.distances, {}};
    const auto& g = *t.snapshots.front().group();
    std::vector<Element> tracked{g.identity()};
    if (g.order() > 1) tracked.push_back(g.identity() == 0 ? 1 : 0);
    for (auto x : tracked) e.labels.push_back("w" + std::to_string(x));
    for (const auto& s : t.snapshots) {
        std::vector<Complex> row;
        for (auto x : tracked) row.emplace_back(s.weight_double(x), 0.0);
        e.coeffs.push_back(row);
    }
    return e;
}

inline TrajectoryExport export_trajectory(const std::string& name, const Trajectory<ProfileMeasure>& t) {
    TrajectoryExport e{name, {"c0_we", "c1_we"}, t.steps, t.distances, {}};
    for (const auto& s : t.snapshots) {
        const Element id = s.group()->identity();
        e.coeffs.push_back({Complex(s.coordinates().at(0).weight_double(id), 0.0),
                            Complex(s.coordinates().at(1).weight_double(id), 0.0)});
    }
    return e;
}

// ---------------------------------------------------------------------------
// Normalization witnesses

/// Element of K whose conjugate leaves K (either direction), if any.
inline std::optional<json> finite_normalization_witness(const FiniteGroup& g, const FiniteSubgroup& k,
                                                        const std::function<Element(Element)>& conj,
                                                        const std::function<Element(Element)>& conj_inv) {
    for (Element h : k.elements) {
        if (!k.contains(conj(h))) return json{{"element", h}, {"image", conj(h)}, {"direction", "x k x^-1"}};
        if (!k.contains(conj_inv(h))) return json{{"element", h}, {"image", conj_inv(h)}, {"direction", "x^-1 k x"}};
    }
    (void)g;
    return std::nullopt;
}

/// Single-coordinate points of M moved out of M by conjugation, searched over the
/// coordinates where either profile is nonconstant plus a margin of |n0| + 1.
inline std::optional<json> profile_normalization_witness(const ShiftSpace& space, const ShiftSpace::Subgroup& m,
                                                         std::int64_t n0, const ShiftSpace::Point& b) {
    groups::Semidirect<groups::ShiftBase> grp(groups::ShiftBase{space});
    groups::SemidirectElement<groups::ShiftBase> x{b, n0};
    const std::int64_t margin = std::abs(n0) + 1;
    const std::int64_t lo = std::min(m.boundary_lo(), b.boundary_lo()) - margin;
    const std::int64_t hi = std::max(m.boundary_hi(), b.boundary_hi()) + margin;
    const Element e = space.symbols->identity();
    for (std::int64_t i = lo; i < hi; ++i)
        for (Element h : m.at(i).elements) {
            if (h == e) continue;
            ShiftSpace::Point p(e, e, i, {h});
            auto fwd = grp.conjugate(x, grp.embed(p));
            auto bwd = grp.conjugate(grp.inverse(x), grp.embed(p));
            for (const auto* img : {&fwd, &bwd})
                if (!space.contains(m, img->base)) {
                    json j{{"coordinate", i}, {"element", h}, {"direction", img == &fwd ? "x k x^-1" : "x^-1 k x"}};
                    j["image_nontrivial_coordinates"] = json::array();
                    for (std::int64_t c = img->base.boundary_lo(); c < img->base.boundary_hi(); ++c)
                        if (img->base.at(c) != e) j["image_nontrivial_coordinates"].push_back(c);
                    return j;
                }
        }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Candidate evaluation per base family

inline std::string budget_text(const Params& p, int steps) {
    return "n_max=" + std::to_string(p.n_max) + " used " + std::to_string(steps) + " steps without " +
           std::to_string(p.horizon) + " consecutive distances <= " + json(p.eps).dump();
}

inline CandidateResult judge_finite(const Trajectory<FiniteMeasure>& t, json shift,
                                    const std::function<Element(Element)>& conj,
                                    const std::function<Element(Element)>& conj_inv) {
    CandidateResult r;
    r.shift = std::move(shift);
    r.steps = static_cast<int>(t.size());
    auto call = detect_convergence(t);
    r.status = call.status;
    if (call.status != ConvergenceStatus::Converged) {
        r.verdict = Inconclusive{call.status == ConvergenceStatus::Diverged ? call.evidence : budget_text(t.params, r.steps)};
        return r;
    }
    const auto& g = *call.limit->group();
    auto lim = identify_limit(*call.limit);
    json limit{{"subgroup", to_json(lim.subgroup)}, {"residual", to_double(lim.residual)}};
    if (lim.residual > Rational(1, 1000000) || !is_idempotent(FiniteMeasure::uniform(call.limit->group(), lim.subgroup))) {
        r.verdict = Violation{ViolationReason::NonIdempotentLimit, limit, json{{"tv_to_nearest_haar", to_double(lim.residual)}}};
        return r;
    }
    if (auto w = finite_normalization_witness(g, lim.subgroup, conj, conj_inv)) {
        r.verdict = Violation{ViolationReason::LimitNotNormalizedByShift, limit, *w};
        return r;
    }
    r.verdict = ShiftedHaar{r.shift, lim.subgroup, to_double(lim.residual), true};
    return r;
}

inline CandidateResult judge_profile(const Trajectory<ProfileMeasure>& t, json shift, const ShiftSpace& space,
                                     std::int64_t n0, const ShiftSpace::Point& b) {
    CandidateResult r;
    r.shift = std::move(shift);
    r.steps = static_cast<int>(t.size());
    auto call = detect_convergence(t);
    r.status = call.status;
    if (call.status != ConvergenceStatus::Converged) {
        r.verdict = Inconclusive{call.status == ConvergenceStatus::Diverged ? call.evidence : budget_text(t.params, r.steps)};
        return r;
    }
    auto lim = identify_limit(*call.limit);
    json limit{{"subgroup", to_json(SubgroupDescriptor{lim.subgroup})}, {"residual", to_double(lim.residual)}};
    bool idem = lim.residual <= Rational(1, 1000000) && is_idempotent(ProfileMeasure::haar(space.symbols, lim.subgroup));
    if (!idem) {
        r.verdict = Violation{ViolationReason::NonIdempotentLimit, limit, json{{"tv_to_nearest_haar", to_double(lim.residual)}}};
        return r;
    }
    if (auto w = profile_normalization_witness(space, lim.subgroup, n0, b)) {
        r.verdict = Violation{ViolationReason::LimitNotNormalizedByShift, limit, *w};
        return r;
    }
    r.verdict = ShiftedHaar{r.shift, lim.subgroup, to_double(lim.residual), true};
    return r;
}

inline CandidateResult judge_torus(const Trajectory<WindowSnapshot>& t, const Window& w, json shift,
                                   const IntAutomorphism& conj) {
    CandidateResult r;
    r.shift = std::move(shift);
    r.steps = static_cast<int>(t.size());
    auto call = detect_convergence(t);
    r.status = call.status;
    if (call.status != ConvergenceStatus::Converged) {
        r.verdict = Inconclusive{budget_text(t.params, r.steps)};
        return r;
    }
    const auto& s = *call.limit;
    json limit = json::array();
    for (const auto& c : tracked_characters(w.dim)) limit.push_back(coefficient_json(c, s.values[w.index_of(c)]));
    auto k = is_idempotent(s, w, 1e-6);
    if (!k) {
        // Witness: the window coefficient farthest from {0, 1}.
        std::size_t best = 0;
        double gap = -1;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            double g = std::min(std::abs(s.values[i]), std::abs(s.values[i] - 1.0));
            if (g > gap) {
                gap = g;
                best = i;
            }
        }
        r.verdict = Violation{ViolationReason::NonIdempotentLimit, limit, coefficient_json(w.chars[best], s.values[best])};
        return r;
    }
    TorusSubgroup image = k->image_under(conj);
    if (!(image == *k)) {
        json wit{{"subgroup", to_json(*k)}, {"image", to_json(image)}};
        for (const auto& row : image.annihilator()) {
            Character c(row.size());
            for (std::size_t i = 0; i < row.size(); ++i) c[i] = row[i].convert_to<std::int64_t>();
            if (!k->contains_character(c)) {
                wit["character"] = to_json(c);
                break;
            }
        }
        r.verdict = Violation{ViolationReason::LimitNotNormalizedByShift, limit, wit};
        return r;
    }
    r.verdict = ShiftedHaar{r.shift, *k, haar_residual(s, w, *k), true};
    return r;
}

inline SCPVerdict combine(const std::vector<CandidateResult>& cands) {
    for (const auto& c : cands)
        if (std::holds_alternative<ShiftedHaar>(c.verdict)) return c.verdict;
    for (const auto& c : cands)
        if (std::holds_alternative<Violation>(c.verdict)) return c.verdict;
    for (const auto& c : cands)
        if (std::holds_alternative<Inconclusive>(c.verdict)) return c.verdict;
    return Inconclusive{"no candidate shifts"};
}

// ---------------------------------------------------------------------------
// Dissipation evidence

inline json lattice_concentration_evidence(const LatticeMeasure& mu, int n_max) {
    json ev = json::array();
    for (int r : {1, 2, 4, 8}) {
        auto c = concentration_function(mu, lattice_box(mu.dim(), r), n_max);
        bool monotone = true;
        for (std::size_t i = 1; i < c.size(); ++i) monotone = monotone && c[i] <= c[i - 1];
        ev.push_back(json{{"box_radius", r}, {"n", n_max}, {"c_n", to_double(c.back())}, {"monotone", monotone}});
    }
    return ev;
}

inline int concentration_steps(const LatticeMeasure& mu) {
    // Keep the exact supports modest: 64 steps in dimension 1, fewer above.
    return mu.dim() == 1 ? 64 : 24;
}

// ---------------------------------------------------------------------------
// classify_measure

namespace detail {

inline Classification classify(const FiniteSpec& g, const FiniteMeasure& mu, const Params& p) {
    Classification out;
    out.parameters = params_json(p);
    if (mu.group()->table() != g.group->table()) throw std::invalid_argument("measure not supported on the group");
    auto sym = symmetrized_sequence(mu, p);
    auto scall = detect_convergence(sym);
    out.symmetrized = json{{"status", to_string(scall.status)}, {"steps", sym.size()}};
    if (scall.limit) {
        auto lim = identify_limit(*scall.limit);
        FiniteMeasure rho = FiniteMeasure::uniform(mu.group(), lim.subgroup);
        out.symmetrized["subgroup"] = to_json(lim.subgroup);
        out.symmetrized["residual"] = to_double(lim.residual);
        out.symmetrized["mu_rho_mucheck_residual"] = distance(convolve(convolve(mu, rho), reflect(mu)), rho);
    }
    out.trajectories.push_back(export_trajectory("symmetrized", sym));
    const auto& grp = *g.group;
    for (Element x : mu.support()) {
        auto t = shifted_sequence(mu, x, p);
        auto r = judge_finite(
            t, json{{"element", x}}, [&](Element h) { return grp.conjugate(x, h); },
            [&](Element h) { return grp.conjugate(grp.inverse(x), h); });
        out.trajectories.push_back(export_trajectory("shifted_x" + std::to_string(x), t));
        out.candidates.push_back(std::move(r));
    }
    out.verdict = combine(out.candidates);
    return out;
}

inline Classification classify(const LatticeSpec& g, const LatticeMeasure& mu, const Params& p) {
    Classification out;
    out.parameters = params_json(p);
    if (mu.dim() != g.dim) throw std::invalid_argument("measure not supported on the group");
    if (mu.support_size() >= 2) {
        out.verdict = Dissipating{"lattice: Z^d has no nontrivial compact subgroup and the walk is not a point mass",
                                  lattice_concentration_evidence(mu, concentration_steps(mu))};
        return out;
    }
    const Character x = mu.weights().begin()->first;
    Params q = p;
    auto t = convolution_powers(translate(mu, [&] {
                                    Character m(x.size());
                                    for (std::size_t i = 0; i < x.size(); ++i) m[i] = -x[i];
                                    return m;
                                }()),
                                q);
    CandidateResult r;
    r.shift = json{{"element", to_json(x)}};
    r.steps = static_cast<int>(t.size());
    auto call = detect_convergence(t);
    r.status = call.status;
    if (call.status == ConvergenceStatus::Converged && is_idempotent(*call.limit))
        r.verdict = ShiftedHaar{r.shift, TrivialSubgroup{g.dim}, 0.0, true};
    else
        r.verdict = Inconclusive{budget_text(p, r.steps)};
    out.candidates.push_back(r);
    out.verdict = combine(out.candidates);
    return out;
}

inline std::vector<std::vector<double>> torus_candidates(const SpectralMeasure& lambda, std::vector<std::string>& warnings) {
    std::vector<std::vector<double>> out;
    if (const auto* atoms = lambda.atoms()) {
        for (const auto& a : *atoms)
            if (a.weight > 0) out.push_back(a.point);
    } else {
        out.push_back(std::vector<double>(lambda.dim(), 0.0));
        if (!lambda.haar_subgroup()) warnings.push_back("shift candidate e not verified to lie in the support");
    }
    return out;
}

inline json point_json(const std::vector<double>& b) {
    json j = json::array();
    for (double v : b) j.push_back(v);
    return j;
}

inline Classification classify_torus(const IntAutomorphism& alpha, const SemidirectMeasure<SpectralMeasure>& mu,
                                      const Params& p) {
    Classification out;
    out.parameters = params_json(p);
    auto marginal = mu.marginal();
    if (marginal.support_size() >= 2) {
        out.verdict = Dissipating{"Z-marginal has at least two atoms", lattice_concentration_evidence(marginal, 64)};
        return out;
    }
    const auto& comp = mu.components.front();
    if (comp.base.dim() != alpha.dim()) throw std::invalid_argument("measure not supported on the group");
    const Window w = Window::box(alpha.dim(), p.window);
    const IntAutomorphism conj = alpha.power(comp.shift);
    std::vector<std::string> warnings;
    bool first = true;
    for (const auto& b : torus_candidates(comp.base, warnings)) {
        auto t = shifted_sequence(comp.base, comp.shift, alpha, b, p);
        auto r = judge_torus(t, w, json{{"base", point_json(b)}, {"shift", comp.shift}}, conj);
        r.warnings = warnings;
        if (first) {
            auto sym = symmetrized_from_shifted(t);
            auto call = detect_convergence(sym);
            out.symmetrized = json{{"status", to_string(call.status)}, {"steps", sym.size()}};
            if (call.limit) {
                auto k = is_idempotent(*call.limit, w, 1e-6);
                out.symmetrized["idempotent"] = k.has_value();
                if (k) out.symmetrized["subgroup"] = to_json(*k);
            }
            first = false;
        }
        out.trajectories.push_back(export_trajectory("shifted_" + std::to_string(out.candidates.size()), t, w));
        out.candidates.push_back(std::move(r));
    }
    out.verdict = combine(out.candidates);
    return out;
}

inline Classification classify_semidirect_finite(const SemidirectFiniteSpec& g, const SemidirectMeasure<FiniteMeasure>& mu,
                                                 const Params& p) {
    Classification out;
    out.parameters = params_json(p);
    auto marginal = mu.marginal();
    if (marginal.support_size() >= 2) {
        out.verdict = Dissipating{"Z-marginal has at least two atoms", lattice_concentration_evidence(marginal, 64)};
        return out;
    }
    const auto& comp = mu.components.front();
    if (comp.base.group()->table() != g.base->table()) throw std::invalid_argument("measure not supported on the group");
    const auto& grp = *g.base;
    const std::int64_t n0 = comp.shift;
    bool first = true;
    for (Element b : comp.base.support()) {
        auto t = shifted_sequence(comp.base, n0, g.alpha, b, p);
        // Conjugation by x = (b, n0) on the base: h -> b alpha^n0(h) b^-1.
        auto conj = [&](Element h) { return grp.conjugate(b, groups::apply_power(g.alpha, h, n0)); };
        auto conj_inv = [&](Element h) { return groups::apply_power(g.alpha, grp.conjugate(grp.inverse(b), h), -n0); };
        auto r = judge_finite(t, json{{"base", b}, {"shift", n0}}, conj, conj_inv);
        if (first) {
            auto sym = symmetrized_from_shifted(t);
            auto call = detect_convergence(sym);
            out.symmetrized = json{{"status", to_string(call.status)}, {"steps", sym.size()}};
            if (call.limit) out.symmetrized["subgroup"] = to_json(identify_limit(*call.limit).subgroup);
            first = false;
        }
        out.trajectories.push_back(export_trajectory("shifted_b" + std::to_string(b), t));
        out.candidates.push_back(std::move(r));
    }
    out.verdict = combine(out.candidates);
    return out;
}

/// One canonical support point of a product measure: coordinatewise e when e carries
/// mass, otherwise the smallest supported symbol.
inline ShiftSpace::Point profile_support_point(const ProfileMeasure& m) {
    const Element e = m.group()->identity();
    return m.coordinates().map([e](const FiniteMeasure& c) {
        auto s = c.support();
        return std::find(s.begin(), s.end(), e) != s.end() ? e : s.front();
    });
}

inline Classification classify_shift(const ShiftSpec& g, const SemidirectMeasure<ProfileMeasure>& mu, const Params& p) {
    Classification out;
    out.parameters = params_json(p);
    auto marginal = mu.marginal();
    if (marginal.support_size() >= 2) {
        out.verdict = Dissipating{"Z-marginal has at least two atoms", lattice_concentration_evidence(marginal, 64)};
        return out;
    }
    const auto& comp = mu.components.front();
    if (comp.base.group()->table() != g.symbols->table()) throw std::invalid_argument("measure not supported on the group");
    ShiftSpace space{g.symbols};
    ShiftSpace::Point b = profile_support_point(comp.base);
    auto t = shifted_sequence(comp.base, comp.shift, b, p);
    json shift{{"base", profile_json(b, [](Element x) { return json(x); })}, {"shift", comp.shift}};
    auto r = judge_profile(t, shift, space, comp.shift, b);
    auto sym = symmetrized_from_shifted(t);
    auto call = detect_convergence(sym);
    out.symmetrized = json{{"status", to_string(call.status)}, {"steps", sym.size()}};
    if (call.limit) out.symmetrized["subgroup"] = to_json(SubgroupDescriptor{identify_limit(*call.limit).subgroup});
    out.trajectories.push_back(export_trajectory("shifted", t));
    out.candidates.push_back(std::move(r));
    out.verdict = combine(out.candidates);
    return out;
}

}  // namespace detail

/// Full pipeline: dissipation screen, symmetrized sequence, shifted sequences for each
/// support candidate, idempotent identification, exact normalization check.
inline Classification classify_measure(const GroupSpec& g, const Measure& mu, const Params& p = {}) {
    auto reject = []() -> Classification { throw std::invalid_argument("measure representation not supported on this group"); };
    return std::visit(
        [&](const auto& grp) -> Classification {
            using G = std::decay_t<decltype(grp)>;
            if constexpr (std::is_same_v<G, FiniteSpec>) {
                if (const auto* m = std::get_if<FiniteMeasure>(&mu)) return detail::classify(grp, *m, p);
            } else if constexpr (std::is_same_v<G, LatticeSpec>) {
                if (const auto* m = std::get_if<LatticeMeasure>(&mu)) return detail::classify(grp, *m, p);
            } else if constexpr (std::is_same_v<G, TorusSpec>) {
                if (const auto* m = std::get_if<SpectralMeasure>(&mu)) {
                    if (m->dim() != grp.dim) throw std::invalid_argument("measure not supported on the group");
                    return detail::classify_torus(IntAutomorphism(IntMatrix::identity(grp.dim)),
                                                  SemidirectMeasure<SpectralMeasure>::single(*m, 0), p);
                }
            } else if constexpr (std::is_same_v<G, SemidirectTorusSpec>) {
                if (const auto* m = std::get_if<SemidirectMeasure<SpectralMeasure>>(&mu))
                    return detail::classify_torus(grp.alpha, *m, p);
            } else if constexpr (std::is_same_v<G, SemidirectFiniteSpec>) {
                if (const auto* m = std::get_if<SemidirectMeasure<FiniteMeasure>>(&mu))
                    return detail::classify_semidirect_finite(grp, *m, p);
            } else if constexpr (std::is_same_v<G, ShiftSpec>) {
                if (const auto* m = std::get_if<SemidirectMeasure<ProfileMeasure>>(&mu)) return detail::classify_shift(grp, *m, p);
            }
            return reject();
        },
        g);
}

// ---------------------------------------------------------------------------
// Counterexample construction

struct Counterexample {
    IntAutomorphism alpha;
    bool switched_to_inverse = false;
    SpectralMeasure lambda;
    std::vector<double> direction;  // unit contracting vector
    double t = 0.1;
    double residual = 0;  // distance of the atom from the contracting subspace
    std::vector<std::string> notes;
};

/// Distance from x to the nearest point of (1/q)Z^d over q <= max_den (sup norm).
inline double rational_proximity(const std::vector<double>& x, int max_den) {
    double best = 1;
    for (int q = 1; q <= max_den; ++q) {
        double worst = 0;
        for (double v : x) worst = std::max(worst, std::abs(v * q - std::round(v * q)) / q);
        best = std::min(best, worst);
    }
    return best;
}

inline Counterexample construct_counterexample(const IntAutomorphism& alpha, double t = 0.1) {
    if (linalg::distality_verdict(alpha).distal) throw std::invalid_argument("no contracting direction");
    Counterexample out{alpha, false, {}, {}, t, 0, {}};
    auto split = linalg::contraction_split(alpha.matrix());
    if (split.contracting_dim() == 0) {
        out.alpha = alpha.inverse();
        out.switched_to_inverse = true;
        out.notes.push_back("no contracting direction for alpha; using alpha^-1");
        split = linalg::contraction_split(out.alpha.matrix());
        if (split.contracting_dim() == 0) throw std::invalid_argument("no contracting direction");
    }
    const std::size_t d = alpha.dim();
    Eigen::VectorXd v = split.contracting.col(0);
    v.normalize();
    // Sign convention: first nonzero entry positive.
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > 1e-12) {
            if (v(i) < 0) v = -v;
            break;
        }
    out.direction.assign(v.data(), v.data() + v.size());
    std::vector<double> atom(d);
    for (int attempt = 0; attempt < 16; ++attempt) {
        for (std::size_t i = 0; i < d; ++i) atom[i] = out.t * out.direction[i];
        if (rational_proximity(atom, 16) > 1e-6) break;
        out.notes.push_back("atom near a rational point of denominator <= 16; rescaling t");
        out.t *= 0.7548776662466927;  // inverse plastic number, irrational
    }
    Eigen::Map<const Eigen::VectorXd> y(atom.data(), static_cast<Eigen::Index>(d));
    out.residual = (y - split.contracting * (split.contracting.transpose() * y)).cwiseAbs().maxCoeff();
    out.lambda = SpectralMeasure::from_atoms_in_subspace(d, {{std::vector<double>(d, 0.0), 0.5}, {atom, 0.5}},
                                                         split.contracting);
    return out;
}

// ---------------------------------------------------------------------------
// Distality prediction

struct GeneratorVerdict {
    std::string name;
    bool distal = true;
    json detail;
};

struct DistalityPrediction {
    std::string family;
    std::vector<GeneratorVerdict> generators;
    bool point_wise_distal = true;
};

inline json to_json(const DistalityPrediction& d) {
    json gens = json::array();
    for (const auto& g : d.generators) gens.push_back(json{{"name", g.name}, {"distal", g.distal}, {"detail", g.detail}});
    return json{{"family", d.family}, {"point_wise_distal", d.point_wise_distal}, {"generators", gens}};
}

/// Coefficients, leading first.
inline json poly_json(const linalg::IntPolynomial& f) {
    json j = json::array();
    const auto& c = f.coefficients();
    for (auto it = c.rbegin(); it != c.rend(); ++it) j.push_back(it->convert_to<long long>());
    return j;
}

inline DistalityPrediction predict_point_wise_distal(const GroupSpec& g) {
    DistalityPrediction out;
    out.family = family_name(g);
    std::visit(
        [&](const auto& grp) {
            using G = std::decay_t<decltype(grp)>;
            if constexpr (std::is_same_v<G, FiniteSpec>) {
                out.generators.push_back({"compact", true, json{{"reason", "finite groups are compact"}}});
            } else if constexpr (std::is_same_v<G, LatticeSpec> || std::is_same_v<G, TorusSpec>) {
                out.generators.push_back({"abelian", true, json{{"reason", "inner automorphisms of an abelian group are trivial"}}});
            } else if constexpr (std::is_same_v<G, SemidirectFiniteSpec>) {
                out.generators.push_back({"discrete", true, json{{"reason", "discrete groups are distal"}}});
            } else if constexpr (std::is_same_v<G, SemidirectTorusSpec>) {
                auto v = linalg::distality_verdict(grp.alpha);
                json detail{{"matrix", grp.alpha.matrix().str()}, {"charpoly", poly_json(grp.alpha.char_poly())}};
                if (v.witness) detail["witness_modulus"] = json::array({v.witness->modulus_lo, v.witness->modulus_hi});
                out.generators.push_back({"alpha", v.distal, detail});
                out.generators.push_back({"base", true, json{{"reason", "torus translations act trivially on the abelian base"}}});
            } else {
                bool trivial = grp.symbols->order() == 1;
                out.generators.push_back(
                    {"tau", trivial, json{{"reason", trivial ? "trivial symbol group" : "shift on L^Z with nontrivial L"}}});
            }
        },
        g);
    out.point_wise_distal = std::all_of(out.generators.begin(), out.generators.end(), [](const auto& v) { return v.distal; });
    return out;
}

// ---------------------------------------------------------------------------
// Dichotomy cross-check

enum class Agreement { Agree, Failure, Inconclusive };

inline const char* to_string(Agreement a) {
    switch (a) {
        case Agreement::Agree: return "agree";
        case Agreement::Failure: return "FAILURE";
        default: return "inconclusive";
    }
}

struct ExperimentReport {
    std::string scenario_id;
    DistalityPrediction prediction;
    Classification classification;
    Agreement agreement = Agreement::Inconclusive;
};

/// Distal prediction must not meet a Violation; a non-distal prediction is confirmed by a
/// Violation. Inconclusive verdicts are never counted as agreement.
inline Agreement judge_agreement(const DistalityPrediction& p, const SCPVerdict& v) {
    if (std::holds_alternative<Inconclusive>(v)) return Agreement::Inconclusive;
    const bool violation = std::holds_alternative<Violation>(v);
    if (p.point_wise_distal) return violation ? Agreement::Failure : Agreement::Agree;
    return violation ? Agreement::Agree : Agreement::Failure;
}

inline ExperimentReport cross_check_dichotomy(const std::string& id, const GroupSpec& g, const Measure& mu,
                                              const Params& p = {}) {
    ExperimentReport r{id, predict_point_wise_distal(g), classify_measure(g, mu, p), Agreement::Inconclusive};
    r.agreement = judge_agreement(r.prediction, r.classification.verdict);
    return r;
}

// ---------------------------------------------------------------------------
// Quotient and injection stability

struct StabilityReport {
    std::string upstairs, downstairs;
    bool consistent = false;
    json details;
};

inline SemidirectMeasure<SpectralMeasure> quotient_measure(const SemidirectMeasure<SpectralMeasure>& mu, const TorusSubgroup& k) {
    IntMatrix b = quotient_matrix(k);
    std::vector<SemidirectMeasure<SpectralMeasure>::Component> comps;
    for (const auto& c : mu.components) comps.push_back({c.shift, c.weight, pushforward(c.base, b)});
    return SemidirectMeasure<SpectralMeasure>(std::move(comps));
}

/// Orbit of a rational point under A is periodic; returns the period (exact).
inline long rational_orbit_period(const IntAutomorphism& a, const std::vector<Rational>& x, long limit = 100000) {
    auto reduce = [](std::vector<Rational> v) {
        for (auto& q : v) {
            Int fl = numerator_of(q) / denominator_of(q);
            if (q < 0 && !is_integral(q)) fl -= 1;
            q -= Rational(fl);
        }
        return v;
    };
    const auto start = reduce(x);
    auto cur = start;
    const auto& m = a.matrix();
    for (long n = 1; n <= limit; ++n) {
        std::vector<Rational> next(cur.size());
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (std::size_t j = 0; j < cur.size(); ++j) next[i] += Rational(m(i, j)) * cur[j];
        cur = reduce(next);
        if (cur == start) return n;
    }
    return -1;
}

inline std::optional<SubgroupDescriptor> verdict_subgroup(const SCPVerdict& v) {
    if (const auto* s = std::get_if<ShiftedHaar>(&v)) return s->subgroup;
    return std::nullopt;
}

/// Torus case: compares (Z x_A T^d, mu) with (Z x_A' T^d/K, pi(mu)).
inline StabilityReport quotient_injection_stability(const IntAutomorphism& alpha, const SemidirectMeasure<SpectralMeasure>& mu,
                                                    const TorusSubgroup& k, const Params& p = {}) {
    if (!k.is_finite()) throw std::invalid_argument("quotient subgroup must be finite");
    if (!k.invariant_under(alpha)) throw std::invalid_argument("K not invariant");
    IntAutomorphism down_alpha = quotient_automorphism(alpha, k);
    auto up = classify_measure(SemidirectTorusSpec{alpha}, mu, p);
    auto down = classify_measure(SemidirectTorusSpec{down_alpha}, quotient_measure(mu, k), p);
    StabilityReport r{verdict_kind(up.verdict), verdict_kind(down.verdict), true, json::object()};
    r.details["quotient_matrix"] = quotient_matrix(k).str();
    r.details["induced_automorphism"] = down_alpha.matrix().str();
    if (auto s = verdict_subgroup(up.verdict)) {
        const auto& l = std::get<TorusSubgroup>(*s);
        TorusSubgroup image = l.image_under(quotient_matrix(k));
        auto ds = verdict_subgroup(down.verdict);
        bool ok = ds && std::get<TorusSubgroup>(*ds) == image;
        r.details["image_subgroup"] = to_json(image);
        r.details["shifted_haar_maps_to_image"] = ok;
        r.consistent = r.consistent && ok;
    }
    if (std::holds_alternative<Violation>(down.verdict)) {
        bool ok = std::holds_alternative<Violation>(up.verdict);
        r.details["downstairs_violation_lifts"] = ok;
        r.consistent = r.consistent && ok;
    }
    if (std::holds_alternative<Dissipating>(up.verdict) != std::holds_alternative<Dissipating>(down.verdict)) {
        r.details["dissipation_mismatch"] = true;
        r.consistent = false;
    }
    bool distal_up = linalg::distality_verdict(alpha).distal, distal_down = linalg::distality_verdict(down_alpha).distal;
    r.details["distal_upstairs"] = distal_up;
    r.details["distal_downstairs"] = distal_down;
    r.consistent = r.consistent && distal_up == distal_down;
    long max_period = 0;
    bool periodic = true;
    for (const auto& x : k.elements()) {
        long per = rational_orbit_period(alpha, x);
        periodic = periodic && per > 0;
        max_period = std::max(max_period, per);
    }
    r.details["rational_orbits_periodic"] = periodic;
    r.details["max_period"] = max_period;
    r.consistent = r.consistent && periodic;
    return r;
}

/// Finite case: phi embeds H into G; verdicts for (H, mu) and (G, phi(mu)) must match,
/// with phi carrying the limit subgroup onto the upstairs one.
inline StabilityReport quotient_injection_stability(std::shared_ptr<const FiniteGroup> h, std::shared_ptr<const FiniteGroup> g,
                                                    const std::vector<Element>& phi, const FiniteMeasure& mu,
                                                    const Params& p = {}) {
    if (!g->is_embedding(*h, phi)) throw std::invalid_argument("map is not an embedding");
    auto below = classify_measure(FiniteSpec{h}, mu, p);
    auto above = classify_measure(FiniteSpec{g}, pushforward(mu, phi, g), p);
    StabilityReport r{verdict_kind(below.verdict), verdict_kind(above.verdict), false, json::object()};
    r.consistent = r.upstairs == r.downstairs;
    auto sb = verdict_subgroup(below.verdict), sa = verdict_subgroup(above.verdict);
    if (sb && sa) {
        FiniteSubgroup image;
        for (Element x : std::get<FiniteSubgroup>(*sb).elements) image.elements.push_back(phi[x]);
        std::sort(image.elements.begin(), image.elements.end());
        bool ok = image == std::get<FiniteSubgroup>(*sa);
        r.details["subgroup_maps_onto"] = ok;
        r.consistent = r.consistent && ok;
    }
    return r;
}

// ---------------------------------------------------------------------------
// alpha(w, z) = (w + z, z) on T^2: distal, yet orbits of L-invariant measures collapse to Haar

struct UnipotentCollapseReport {
    bool distal = false;
    bool l_invariant = false;
    int window = 8;
    std::vector<double> distances;  // index k
    int first_zero_k = -1;          // first k from which every later distance is exactly 0
    int max_bound = -1;             // largest k with km + n = 0 over nonzero window characters
    bool not_tortrat = false;
};

inline IntAutomorphism unipotent_alpha() { return IntAutomorphism(IntMatrix{{1, 1}, {0, 1}}); }

/// Largest k >= 0 with k m + n = 0, or -1 if there is none.
inline int unipotent_bound(std::int64_t m, std::int64_t n) {
    if (m == 0) return -1;
    if (n % m != 0) return -1;
    std::int64_t k = -n / m;
    return k >= 0 ? static_cast<int>(k) : -1;
}

inline UnipotentCollapseReport unipotent_collapse_demo(const SpectralMeasure& mu, int k_max, int window = 8) {
    if (mu.dim() != 2) throw std::invalid_argument("example needs a measure on T^2");
    UnipotentCollapseReport r;
    r.window = window;
    const Window w = Window::box(2, window);
    r.l_invariant = true;
    for (const auto& c : w.chars)
        if (c[1] != 0 && mu.coeff(c) != Complex(0)) r.l_invariant = false;
    if (!r.l_invariant) throw std::invalid_argument("measure is not invariant under {0} x T");
    const IntAutomorphism a = unipotent_alpha();
    r.distal = linalg::distality_verdict(a).distal;
    for (const auto& c : w.chars)
        if (c[0] != 0 || c[1] != 0) r.max_bound = std::max(r.max_bound, unipotent_bound(c[0], c[1]));
    SpectralMeasure cur = mu;
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) cur = pushforward(cur, a);
        double d = 0;
        for (const auto& c : w.chars) {
            Complex target = (c[0] == 0 && c[1] == 0) ? 1.0 : 0.0;
            d = std::max(d, std::abs(cur.coeff(c) - target));
        }
        r.distances.push_back(d);
    }
    for (int k = k_max; k >= 0 && r.distances[static_cast<std::size_t>(k)] == 0.0; --k) r.first_zero_k = k;
    r.not_tortrat = r.distal && r.first_zero_k >= 0;
    return r;
}

}  // namespace scplab::engine
