#include "scplab/measures.hpp"

#include <catch_amalgamated.hpp>

using namespace scplab;
using namespace scplab::measures;
using Catch::Approx;

namespace {

std::shared_ptr<const FiniteGroup> cyclic(std::size_t n) { return std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(n)); }

// Atomic convolution on T^d then direct character sums.
Complex atomic_coeff(const std::vector<TorusAtom>& atoms, const Character& chi) {
    Complex s = 0;
    for (const auto& a : atoms) {
        double ph = 0;
        for (std::size_t i = 0; i < chi.size(); ++i) ph += static_cast<double>(chi[i]) * a.point[i];
        s += a.weight * std::polar(1.0, 2 * M_PI * ph);
    }
    return s;
}

std::vector<TorusAtom> atomic_convolution(const std::vector<TorusAtom>& a, const std::vector<TorusAtom>& b) {
    std::vector<TorusAtom> out;
    for (const auto& x : a)
        for (const auto& y : b) {
            TorusAtom z{x.point, x.weight * y.weight};
            for (std::size_t i = 0; i < z.point.size(); ++i) z.point[i] += y.point[i];
            out.push_back(z);
        }
    return out;
}

}  // namespace

TEST_CASE("finite measures: construction and validation") {
    auto z2 = cyclic(2);
    CHECK_THROWS(FiniteMeasure::from_weights(z2, {{0, Rational(1, 2)}}));
    CHECK_THROWS(FiniteMeasure::from_weights(z2, {{0, Rational(3, 2)}, {1, Rational(-1, 2)}}));
    CHECK_THROWS(FiniteMeasure::from_weights(z2, {{2, Rational(1)}}));
    auto u = FiniteMeasure::uniform(z2, z2->whole());
    CHECK(u.weight(0) == Rational(1, 2));
}

TEST_CASE("finite convolution, reflection, distance") {
    auto z2 = cyclic(2);
    auto u = FiniteMeasure::uniform(z2, z2->whole());
    CHECK(convolve(u, u) == u);
    CHECK(total_variation(u, FiniteMeasure::dirac(z2, 0)) == Rational(1, 2));
    CHECK(distance(u, u) == 0.0);
    auto s3 = std::make_shared<const FiniteGroup>(FiniteGroup::symmetric(3));
    for (Element x = 0; x < 6; ++x) CHECK(reflect(FiniteMeasure::dirac(s3, x)) == FiniteMeasure::dirac(s3, s3->inverse(x)));
    auto h = s3->generated_by({1});
    CHECK(reflect(haar_of(s3, h)) == haar_of(s3, h));
    // Convolution against the definition on a nonabelian group.
    auto a = FiniteMeasure::from_weights(s3, {{1, Rational(1, 3)}, {2, Rational(2, 3)}});
    auto b = FiniteMeasure::from_weights(s3, {{3, Rational(1, 4)}, {4, Rational(3, 4)}});
    auto c = convolve(a, b);
    for (Element z = 0; z < 6; ++z) {
        Rational w = 0;
        for (Element x = 0; x < 6; ++x)
            for (Element y = 0; y < 6; ++y)
                if (s3->multiply(x, y) == z) w += a.weight(x) * b.weight(y);
        CHECK(c.weight(z) == w);
    }
    CHECK_THROWS(convolve(a, FiniteMeasure::dirac(z2, 0)));
}

TEST_CASE("finite idempotents are Haar measures") {
    auto d4 = std::make_shared<const FiniteGroup>(FiniteGroup::dihedral(4));
    for (Element x = 0; x < d4->order(); ++x) {
        auto h = d4->generated_by({x});
        auto k = is_idempotent(haar_of(d4, h));
        REQUIRE(k);
        CHECK(*k == h);
    }
    CHECK_FALSE(is_idempotent(FiniteMeasure::from_weights(d4, {{0, Rational(1, 2)}, {1, Rational(1, 2)}})));
    CHECK(is_idempotent(FiniteMeasure::dirac(d4, 0))->order() == 1);
}

TEST_CASE("lattice measures") {
    LatticeMeasure w(1, {{{0}, Rational(1, 2)}, {{1}, Rational(1, 2)}});
    auto w2 = convolve(w, w);
    CHECK(w2.weight({0}) == Rational(1, 4));
    CHECK(w2.weight({1}) == Rational(1, 2));
    CHECK(w2.weight({2}) == Rational(1, 4));
    CHECK(reflect(w).weight({-1}) == Rational(1, 2));
    CHECK(is_idempotent(LatticeMeasure::dirac({0, 0})));
    CHECK_FALSE(is_idempotent(w));
    CHECK(total_variation(w, LatticeMeasure::dirac({0})) == Rational(1, 2));
    auto moved = pushforward(LatticeMeasure::dirac({1, 2}), IntMatrix{{1, 1}, {0, 1}});
    CHECK(moved.weight({3, 2}) == 1);
}

TEST_CASE("spectral convolution against atomic convolution") {
    std::vector<TorusAtom> a{{{0.1, 0.3}, 0.25}, {{0.7, 0.2}, 0.75}};
    std::vector<TorusAtom> b{{{0.05, 0.9}, 0.5}, {{0.33, 0.41}, 0.5}};
    auto prod = convolve(SpectralMeasure::from_atoms(2, a), SpectralMeasure::from_atoms(2, b));
    auto atomic = atomic_convolution(a, b);
    for (const auto& chi : Window::box(2, 4).chars) {
        CHECK(std::abs(prod.coeff(chi) - atomic_coeff(atomic, chi)) <= 1e-10);
        CHECK(std::abs(reflect(prod).coeff(chi) - std::conj(atomic_coeff(atomic, chi))) <= 1e-12);
    }
    CHECK(prod.coeff({0, 0}) == Complex(1.0));
}

TEST_CASE("spectral pushforward") {
    IntMatrix u{{1, 1}, {0, 1}};
    std::vector<TorusAtom> atoms{{{0.2, 0.0}, 0.5}, {{0.45, 0.0}, 0.5}};
    auto mu = SpectralMeasure::from_atoms(2, atoms);
    CHECK(distance(pushforward(mu, IntMatrix::identity(2)), mu, Window::box(2, 3)) == 0.0);
    // Direct atomic pushforward then character sums.
    auto pushed = pushforward(mu, u);
    std::vector<TorusAtom> direct;
    for (const auto& a : atoms) direct.push_back({u.apply(a.point), a.weight});
    for (const auto& chi : Window::box(2, 4).chars) CHECK(std::abs(pushed.coeff(chi) - atomic_coeff(direct, chi)) <= 1e-12);

    // L-invariant measure: coefficient of u^k_* mu at (m, n) is mu^(m, km + n).
    const TorusSubgroup l(2, {{Int(1), Int(0)}});
    auto inv = convolve(mu, SpectralMeasure::haar(l));
    auto cur = inv;
    for (int k = 1; k <= 5; ++k) {
        cur = pushforward(cur, u);
        for (const auto& chi : Window::box(2, 4).chars) {
            Character src{chi[0], k * chi[0] + chi[1]};
            CHECK(std::abs(cur.coeff(chi) - inv.coeff(src)) <= 1e-12);
            if (chi[1] != -k * chi[0]) CHECK(cur.coeff(chi) == Complex(0));
        }
    }

    // Quotient T -> T/{0,1/2}: odd frequencies of the source drop out.
    TorusSubgroup half(1, {{Int(2)}});
    auto q = quotient_matrix(half);
    auto circle = SpectralMeasure::from_atoms(1, {{{0.1}, 0.5}, {{0.35}, 0.5}});
    auto down = pushforward(circle, q);
    for (std::int64_t m = -4; m <= 4; ++m) CHECK(std::abs(down.coeff({m}) - circle.coeff({2 * m})) <= 1e-12);
}

TEST_CASE("Haar measures of torus subgroups") {
    auto h = SpectralMeasure::haar(TorusSubgroup(1, {{Int(2)}}));
    for (std::int64_t m = -5; m <= 5; ++m) CHECK(h.coeff({m}) == Complex(m % 2 == 0 ? 1.0 : 0.0));
    auto trivial = SpectralMeasure::haar(TorusSubgroup::trivial(2));
    auto whole = SpectralMeasure::haar(TorusSubgroup::whole(2));
    for (const auto& chi : Window::box(2, 3).chars) {
        CHECK(trivial.coeff(chi) == Complex(1.0));
        CHECK(whole.coeff(chi) == Complex(chi[0] == 0 && chi[1] == 0 ? 1.0 : 0.0));
    }
}

TEST_CASE("spectral idempotent detection and distance") {
    const Window w = Window::box(1, 8);
    TorusSubgroup half(1, {{Int(2)}});
    auto k = is_idempotent(SpectralMeasure::haar(half), w);
    REQUIRE(k);
    CHECK(*k == half);
    CHECK_FALSE(is_idempotent(SpectralMeasure::from_atoms(1, {{{0.0}, 0.5}, {{1.0 / 3}, 0.5}}), w));
    CHECK(*is_idempotent(SpectralMeasure::dirac({0.0}), w) == TorusSubgroup::trivial(1));
    CHECK(distance(SpectralMeasure::dirac({0.0}), SpectralMeasure::dirac({0.5}), Window::box(1, 1)) == Approx(2.0).margin(1e-12));
}

TEST_CASE("quotient automorphisms") {
    IntAutomorphism cat(IntMatrix{{2, 1}, {1, 1}});
    TorusSubgroup k(2, {{Int(2), Int(0)}, {Int(0), Int(2)}});
    CHECK(quotient_automorphism(cat, k) == cat);
    IntAutomorphism u(IntMatrix{{1, 1}, {0, 1}});
    TorusSubgroup first(2, {{Int(2), Int(0)}, {Int(0), Int(1)}});
    CHECK(quotient_automorphism(u, first) == IntAutomorphism(IntMatrix{{1, 2}, {0, 1}}));
    CHECK_THROWS(quotient_automorphism(cat, first));
}

TEST_CASE("subspace-tagged atoms survive translation and pushforward") {
    Eigen::MatrixXd line(2, 1);
    line << 0.6, 0.8;
    auto m = SpectralMeasure::from_atoms_in_subspace(2, {{{0.0, 0.0}, 0.5}, {{0.3, 0.4}, 0.5}}, line);
    auto t = translate(m, {-0.3, -0.4});
    const auto* atoms = t.atoms();
    REQUIRE(atoms);
    CHECK(std::get<SpectralMeasure::Atoms>(t.node()).subspace != nullptr);
    CHECK((*atoms)[1].point[0] == Approx(0.0).margin(1e-15));
    CHECK_THROWS(SpectralMeasure::from_atoms_in_subspace(2, {{{0.0, 1.0}, 1.0}}, line));
}

TEST_CASE("profile measures") {
    auto l = cyclic(2);
    auto m = groups::left_half_subgroup(*l);
    auto omega = ProfileMeasure::haar(l, m);
    CHECK(convolve(omega, omega) == omega);
    CHECK(reflect(omega) == omega);
    REQUIRE(is_idempotent(omega));
    CHECK(*is_idempotent(omega) == m);
    auto moved = pushforward_shift(omega, 1);
    CHECK_FALSE(moved == omega);
    CHECK(total_variation(moved, omega) == Rational(1, 2));
}
