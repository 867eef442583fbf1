// Scenario files (JSON), the seeded random finite family, and report/CSV emission.
#pragma once

#include "scplab/harmonic.hpp"
#include "scplab/scp_engine.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace scplab::scenario {

using engine::json;
using namespace scplab::engine;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rational parse_rational(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) {
        try {
            return scplab::parse_rational(j.get<std::string>());
        } catch (const std::exception&) {
            throw ParseError("bad rational: " + j.get<std::string>());
        }
    }
    throw ParseError("expected an integer or a rational string, got " + j.dump());
}

inline double parse_real(const json& j) {
    if (j.is_number()) return j.get<double>();
    return to_double(parse_rational(j));
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline IntMatrix parse_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows");
    std::vector<std::vector<Int>> rows;
    for (const auto& r : j) {
        std::vector<Int> row;
        for (const auto& v : r) row.push_back(Int(v.get<long long>()));
        rows.push_back(std::move(row));
    }
    return IntMatrix::from_rows(rows);
}

/// Row-major "a,b;c,d".
inline IntMatrix parse_matrix_string(const std::string& s) {
    std::vector<std::vector<Int>> rows;
    std::stringstream rs(s);
    std::string row;
    while (std::getline(rs, row, ';')) {
        std::vector<Int> r;
        std::stringstream cs(row);
        std::string cell;
        while (std::getline(cs, cell, ',')) {
            try {
                std::size_t used = 0;
                long long v = std::stoll(cell, &used);
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
                r.push_back(Int(v));
            } catch (const std::exception&) {
                throw ParseError("bad matrix entry '" + cell + "'");
            }
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ParseError("empty matrix");
    for (const auto& r : rows)
        if (r.size() != rows.size()) throw ParseError("matrix must be square");
    return IntMatrix::from_rows(rows);
}

inline std::shared_ptr<const FiniteGroup> parse_group(const json& j) {
    const std::string kind = field(j, "kind").get<std::string>();
    auto n = [&] { return field(j, "n").get<std::size_t>(); };
    FiniteGroup g = [&]() -> FiniteGroup {
        if (kind == "cyclic") return FiniteGroup::cyclic(n());
        if (kind == "dihedral") return FiniteGroup::dihedral(n());
        if (kind == "symmetric") return FiniteGroup::symmetric(n());
        if (kind == "alternating4") return FiniteGroup::alternating4();
        if (kind == "quaternion") return FiniteGroup::quaternion();
        if (kind == "product") {
            const auto& f = field(j, "factors");
            if (f.size() != 2) throw ParseError("product needs two factors");
            return FiniteGroup::product(*parse_group(f[0]), *parse_group(f[1]));
        }
        throw ParseError("unknown group kind '" + kind + "'");
    }();
    return std::make_shared<const FiniteGroup>(std::move(g));
}

inline FiniteSubgroup parse_subgroup(const FiniteGroup& g, const json& j) {
    std::vector<Element> gens;
    for (const auto& v : j) gens.push_back(v.get<Element>());
    for (auto x : gens)
        if (x >= g.order()) throw ParseError("element out of range");
    return g.generated_by(gens);
}

// ---------------------------------------------------------------------------
// Seeded random finite measures

/// Support of 3 to 5 distinct elements (capped by |G|), integer weights 1..9.
inline FiniteMeasure random_finite_measure(std::shared_ptr<const FiniteGroup> g, std::mt19937_64& rng,
                                           std::size_t min_support = 3, std::size_t max_support = 5) {
    const std::size_t hi = std::min(max_support, g->order());
    const std::size_t lo = std::min(min_support, hi);
    const std::size_t size = lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
    std::vector<Element> all(g->order());
    std::iota(all.begin(), all.end(), Element{0});
    std::map<Element, Rational> w;
    for (std::size_t i = 0; i < size; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (all.size() - i));
        std::swap(all[i], all[j]);
        w[all[i]] = Rational(static_cast<long long>(1 + rng() % 9));
    }
    Rational total = 0;
    for (const auto& [x, v] : w) total += v;
    for (auto& [x, v] : w) v /= total;
    return FiniteMeasure::from_weights(std::move(g), w);
}

/// Groups of order <= 24 used for random sweeps.
inline std::vector<std::shared_ptr<const FiniteGroup>> sweep_groups() {
    std::vector<FiniteGroup> gs;
    for (std::size_t n : {2, 3, 5, 6, 7, 8, 12, 16, 24}) gs.push_back(FiniteGroup::cyclic(n));
    for (std::size_t n : {3, 4, 5, 6, 12}) gs.push_back(FiniteGroup::dihedral(n));
    gs.push_back(FiniteGroup::symmetric(3));
    gs.push_back(FiniteGroup::symmetric(4));
    gs.push_back(FiniteGroup::alternating4());
    gs.push_back(FiniteGroup::quaternion());
    gs.push_back(FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)));
    gs.push_back(FiniteGroup::product(FiniteGroup::symmetric(3), FiniteGroup::cyclic(2)));
    gs.push_back(FiniteGroup::product(FiniteGroup::quaternion(), FiniteGroup::cyclic(3)));
    gs.push_back(FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::alternating4()));
    std::vector<std::shared_ptr<const FiniteGroup>> out;
    for (auto& g : gs) out.push_back(std::make_shared<const FiniteGroup>(std::move(g)));
    return out;
}

// ---------------------------------------------------------------------------
// Measures

inline FiniteMeasure parse_finite_measure(std::shared_ptr<const FiniteGroup> g, const json& j, std::uint64_t seed) {
    const std::string kind = j.value("kind", "atoms");
    if (kind == "random") {
        std::mt19937_64 rng(j.value("seed", seed));
        return random_finite_measure(g, rng, j.value("support_min", std::size_t{3}), j.value("support_max", std::size_t{5}));
    }
    if (kind == "uniform") return FiniteMeasure::uniform(g, parse_subgroup(*g, field(j, "generators")));
    if (kind != "atoms") throw ParseError("unknown finite measure kind '" + kind + "'");
    std::map<Element, Rational> w;
    for (const auto& a : field(j, "atoms")) {
        auto x = field(a, "element").get<Element>();
        if (x >= g->order()) throw ParseError("element out of range");
        w[x] += parse_rational(field(a, "weight"));
    }
    return FiniteMeasure::from_weights(std::move(g), w);
}

inline LatticeMeasure parse_lattice_measure(std::size_t dim, const json& j) {
    std::map<Character, Rational> w;
    for (const auto& a : field(j, "atoms")) {
        Character p;
        for (const auto& v : field(a, "point")) p.push_back(v.get<std::int64_t>());
        if (p.size() != dim) throw ParseError("lattice point dimension mismatch");
        w[p] += parse_rational(field(a, "weight"));
    }
    return LatticeMeasure(dim, std::move(w));
}

inline TorusSubgroup parse_torus_subgroup(std::size_t dim, const json& j) {
    std::vector<IntVector> ann;
    for (const auto& r : field(j, "annihilator")) {
        IntVector v;
        for (const auto& x : r) v.push_back(Int(x.get<long long>()));
        if (v.size() != dim) throw ParseError("annihilator dimension mismatch");
        ann.push_back(std::move(v));
    }
    return TorusSubgroup(dim, std::move(ann));
}

inline SpectralMeasure parse_spectral_measure(std::size_t dim, const json& j, const IntAutomorphism* alpha, json& notes) {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "atoms") {
        std::vector<TorusAtom> atoms;
        for (const auto& a : field(j, "atoms")) {
            TorusAtom t;
            for (const auto& v : field(a, "point")) t.point.push_back(parse_real(v));
            if (t.point.size() != dim) throw ParseError("torus point dimension mismatch");
            t.weight = parse_real(field(a, "weight"));
            atoms.push_back(std::move(t));
        }
        return SpectralMeasure::from_atoms(dim, std::move(atoms));
    }
    if (kind == "haar") return SpectralMeasure::haar(parse_torus_subgroup(dim, j));
    if (kind == "product") {
        const auto& fs = field(j, "factors");
        if (fs.empty()) throw ParseError("empty product");
        SpectralMeasure m = parse_spectral_measure(dim, fs[0], alpha, notes);
        for (std::size_t i = 1; i < fs.size(); ++i) m = convolve(m, parse_spectral_measure(dim, fs[i], alpha, notes));
        return m;
    }
    if (kind == "counterexample") {
        if (!alpha) throw ParseError("counterexample measure needs a semidirect torus group");
        auto ce = construct_counterexample(*alpha, j.contains("t") ? parse_real(j.at("t")) : 0.1);
        json dir = json::array();
        for (double v : ce.direction) dir.push_back(v);
        notes["counterexample"] = json{{"direction", dir}, {"t", ce.t}, {"residual", ce.residual},
                                       {"switched_to_inverse", ce.switched_to_inverse}, {"notes", ce.notes}};
        return ce.lambda;
    }
    throw ParseError("unknown torus measure kind '" + kind + "'");
}

inline groups::ShiftSpace::Subgroup parse_profile_subgroup(const FiniteGroup& l, const json& j) {
    if (j.is_string() && j.get<std::string>() == "left-half") return groups::left_half_subgroup(l);
    std::vector<FiniteSubgroup> ex;
    for (const auto& e : j.value("explicit", json::array())) ex.push_back(parse_subgroup(l, e));
    return {parse_subgroup(l, field(j, "left")), parse_subgroup(l, field(j, "right")), j.value("offset", std::int64_t{0}),
            std::move(ex)};
}

inline ProfileMeasure parse_profile_measure(std::shared_ptr<const FiniteGroup> l, const json& j) {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "haar") return ProfileMeasure::haar(l, parse_profile_subgroup(*l, field(j, "subgroup")));
    if (kind == "dirac") {
        const auto& p = field(j, "point");
        std::vector<Element> ex;
        for (const auto& e : p.value("explicit", json::array())) ex.push_back(e.get<Element>());
        return ProfileMeasure::dirac(l, groups::ShiftSpace::Point(field(p, "left").get<Element>(), field(p, "right").get<Element>(),
                                                                  p.value("offset", std::int64_t{0}), std::move(ex)));
    }
    throw ParseError("unknown profile measure kind '" + kind + "'");
}

template <class Base, class F>
SemidirectMeasure<Base> parse_components(const json& j, F parse_base) {
    std::vector<typename SemidirectMeasure<Base>::Component> comps;
    for (const auto& c : field(j, "components"))
        comps.push_back({field(c, "shift").get<std::int64_t>(), parse_rational(c.value("weight", json(1))), parse_base(field(c, "base"))});
    return SemidirectMeasure<Base>(std::move(comps));
}

// ---------------------------------------------------------------------------
// Scenarios

struct Scenario {
    std::string id;
    std::vector<std::string> tags;
    GroupSpec group;
    Measure measure;
    Params params;
    json expect = json::object();
    json stability;  // null when absent
    json notes = json::object();
    json group_json, measure_json;
};

inline Params parse_params(const json& j) {
    Params p;
    if (j.is_null()) return p;
    p.window = j.value("window", p.window);
    p.eps = j.value("eps", p.eps);
    p.horizon = j.value("horizon", p.horizon);
    p.n_max = j.value("n_max", p.n_max);
    p.stop_on_convergence = j.value("stop_on_convergence", p.stop_on_convergence);
    if (p.window < 2 || p.window > 64) throw ParseError("window must lie in [2, 64]");
    if (p.n_max < 1 || p.n_max > 1000000) throw ParseError("n_max must lie in [1, 10^6]");
    if (!(p.eps > 0) || p.horizon < 1) throw ParseError("eps and horizon must be positive");
    return p;
}

inline Scenario parse_scenario(const json& j, std::uint64_t seed = 0) {
    Scenario s;
    s.id = field(j, "id").get<std::string>();
    for (const auto& t : j.value("tags", json::array())) s.tags.push_back(t.get<std::string>());
    s.group_json = field(j, "group");
    s.measure_json = field(j, "measure");
    s.expect = j.value("expect", json::object());
    s.stability = j.value("stability", json());
    const auto& g = s.group_json;
    const auto& m = s.measure_json;
    const std::string family = field(g, "family").get<std::string>();
    if (family == "finite") {
        auto grp = parse_group(field(g, "group"));
        s.group = FiniteSpec{grp};
        s.measure = parse_finite_measure(grp, m, seed);
    } else if (family == "lattice") {
        auto d = field(g, "dim").get<std::size_t>();
        s.group = LatticeSpec{d};
        s.measure = parse_lattice_measure(d, m);
    } else if (family == "torus") {
        auto d = field(g, "dim").get<std::size_t>();
        s.group = TorusSpec{d};
        s.measure = parse_spectral_measure(d, m, nullptr, s.notes);
    } else if (family == "semidirect-torus") {
        IntAutomorphism a(parse_matrix(field(g, "alpha")));
        s.group = SemidirectTorusSpec{a};
        s.measure = parse_components<SpectralMeasure>(m, [&](const json& b) { return parse_spectral_measure(a.dim(), b, &a, s.notes); });
    } else if (family == "semidirect-finite") {
        auto base = parse_group(field(g, "base"));
        std::vector<Element> alpha;
        for (const auto& v : field(g, "alpha")) alpha.push_back(v.get<Element>());
        if (!base->is_automorphism(alpha)) throw ParseError("alpha is not an automorphism of the base");
        s.group = SemidirectFiniteSpec{base, alpha};
        s.measure = parse_components<FiniteMeasure>(m, [&](const json& b) { return parse_finite_measure(base, b, seed); });
    } else if (family == "shift") {
        auto l = parse_group(field(g, "symbols"));
        s.group = ShiftSpec{l};
        s.measure = parse_components<ProfileMeasure>(m, [&](const json& b) { return parse_profile_measure(l, b); });
    } else {
        throw ParseError("unknown group family '" + family + "'");
    }
    s.params = parse_params(j.value("params", json()));
    if (s.params.window == Params{}.window && !j.value("params", json::object()).contains("window")) {
        // Torus windows grow like (2W+1)^d; keep d >= 3 tractable.
        std::size_t d = 0;
        if (const auto* t = std::get_if<TorusSpec>(&s.group)) d = t->dim;
        if (const auto* t = std::get_if<SemidirectTorusSpec>(&s.group)) d = t->alpha.dim();
        if (d >= 3) s.params.window = 4;
    }
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed = 0) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_scenario(j, seed);
}

// ---------------------------------------------------------------------------
// Running and reporting

inline json measure_summary(const Measure& m) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FiniteMeasure>) {
                json a = json::array();
                for (auto e : x.support()) a.push_back(json{{"element", e}, {"weight", to_string(x.weight(e))}});
                return json{{"kind", "finite"}, {"atoms", a}};
            } else if constexpr (std::is_same_v<T, LatticeMeasure>) {
                json a = json::array();
                for (const auto& [p, w] : x.weights()) a.push_back(json{{"point", to_json(p)}, {"weight", to_string(w)}});
                return json{{"kind", "lattice"}, {"atoms", a}};
            } else if constexpr (std::is_same_v<T, SpectralMeasure>) {
                return json{{"kind", "torus"}, {"dim", x.dim()}};
            } else {
                json c = json::array();
                for (const auto& comp : x.components) c.push_back(json{{"shift", comp.shift}, {"weight", to_string(comp.weight)}});
                return json{{"kind", "semidirect"}, {"components", c}};
            }
        },
        m);
}

inline json stability_check(const Scenario& s) {
    if (s.stability.is_null()) return json();
    if (const auto* g = std::get_if<SemidirectTorusSpec>(&s.group)) {
        const auto& q = field(s.stability, "quotient");
        auto k = parse_torus_subgroup(g->alpha.dim(), q);
        auto r = quotient_injection_stability(g->alpha, std::get<SemidirectMeasure<SpectralMeasure>>(s.measure), k, s.params);
        return json{{"kind", "quotient"}, {"upstairs", r.upstairs}, {"downstairs", r.downstairs}, {"consistent", r.consistent},
                    {"details", r.details}};
    }
    if (const auto* g = std::get_if<FiniteSpec>(&s.group)) {
        const auto& e = field(s.stability, "embedding");
        auto big = parse_group(field(e, "into"));
        std::vector<Element> phi;
        for (const auto& v : field(e, "phi")) phi.push_back(v.get<Element>());
        if (phi.size() != g->group->order()) throw ParseError("embedding size mismatch");
        auto r = quotient_injection_stability(g->group, big, phi, std::get<FiniteMeasure>(s.measure), s.params);
        return json{{"kind", "embedding"}, {"upstairs", r.upstairs}, {"downstairs", r.downstairs}, {"consistent", r.consistent},
                    {"details", r.details}};
    }
    throw ParseError("stability check not applicable to family " + family_name(s.group));
}

struct RunResult {
    json report;
    std::vector<TrajectoryExport> trajectories;
    bool matched = false;
};

inline std::string csv_name(const std::string& id, const std::string& traj) { return id + "." + traj + ".csv"; }

inline RunResult run_scenario(const Scenario& s) {
    auto rep = cross_check_dichotomy(s.id, s.group, s.measure, s.params);
    json report{{"scenario_id", s.id}, {"tags", s.tags}, {"family", family_name(s.group)}, {"group", s.group_json},
                {"measure", measure_summary(s.measure)}};
    report["prediction"] = to_json(rep.prediction);
    report["verdict"] = to_json(rep.classification.verdict);
    report["agreement"] = to_string(rep.agreement);
    report["parameters"] = rep.classification.parameters;
    json cands = json::array();
    for (const auto& c : rep.classification.candidates)
        cands.push_back(json{{"shift", c.shift}, {"status", to_string(c.status)}, {"steps", c.steps},
                             {"verdict", verdict_kind(c.verdict)}, {"warnings", c.warnings}});
    report["candidates"] = cands;
    report["symmetrized"] = rep.classification.symmetrized;
    if (!s.notes.empty()) report["notes"] = s.notes;
    json stab = stability_check(s);
    if (!stab.is_null()) report["stability"] = stab;
    json paths = json::array();
    for (const auto& t : rep.classification.trajectories) paths.push_back(csv_name(s.id, t.name));
    report["evidence_paths"] = paths;

    bool ok = rep.agreement != Agreement::Failure;
    json checks = json::object();
    if (s.expect.contains("verdict")) {
        bool m = s.expect.at("verdict").get<std::string>() == verdict_kind(rep.classification.verdict);
        checks["verdict"] = m;
        ok = ok && m;
    }
    if (s.expect.contains("agreement")) {
        bool m = s.expect.at("agreement").get<std::string>() == to_string(rep.agreement);
        checks["agreement"] = m;
        ok = ok && m;
    }
    if (s.expect.contains("stable")) {
        bool m = !stab.is_null() && stab.at("consistent").get<bool>() == s.expect.at("stable").get<bool>();
        checks["stable"] = m;
        ok = ok && m;
    }
    report["expected"] = s.expect;
    report["checks"] = checks;
    report["matched"] = ok;
    return {report, rep.classification.trajectories, ok};
}

inline void write_csv(const std::filesystem::path& path, const TrajectoryExport& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "step,distance";
    for (const auto& l : t.labels) out << ",coeff_re_" << l << ",coeff_im_" << l;
    out << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        out << t.steps[i] << "," << t.distances[i];
        for (const auto& c : t.coeffs[i]) out << "," << c.real() << "," << c.imag();
        out << "\n";
    }
}

inline void write_outputs(const std::filesystem::path& dir, const RunResult& r) {
    std::filesystem::create_directories(dir);
    const std::string id = r.report.at("scenario_id").get<std::string>();
    std::ofstream(dir / (id + ".json")) << r.report.dump(2) << "\n";
    for (const auto& t : r.trajectories) write_csv(dir / csv_name(id, t.name), t);
}

inline bool matches_filter(const Scenario& s, const std::string& filter) {
    if (filter.empty()) return true;
    if (s.id.find(filter) != std::string::npos) return true;
    return std::find(s.tags.begin(), s.tags.end(), filter) != s.tags.end();
}

// ---------------------------------------------------------------------------
// Harmonic reports

inline json harmonic_report(const FiniteMeasure& mu) {
    auto s = harmonic::harmonic_space(mu);
    json basis = json::array();
    for (const auto& v : s.basis) {
        json row = json::array();
        for (const auto& q : v) row.push_back(to_string(q));
        basis.push_back(row);
    }
    json cosets = json::array();
    for (const auto& c : s.cosets) cosets.push_back(c);
    return json{{"group", s.group->name()}, {"order", s.group->order()}, {"dimension", s.dimension()},
                {"generated_subgroup", to_json(s.generated)}, {"cosets", cosets}, {"basis", basis},
                {"choquet_deny", harmonic::is_choquet_deny(s)}};
}

}  // namespace scplab::scenario
