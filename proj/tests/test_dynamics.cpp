#include "scplab/dynamics.hpp"

#include <catch_amalgamated.hpp>

using namespace scplab;
using namespace scplab::dynamics;

namespace {

Rational binomial_weight(int n, int k) {
    Int c = 1;
    for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return Rational(c) / Rational(Int(1) << n);
}

std::shared_ptr<const FiniteGroup> cyclic(std::size_t n) { return std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(n)); }

}  // namespace

TEST_CASE("convolution powers of a lattice walk are binomial") {
    LatticeMeasure w(1, {{{0}, Rational(1, 2)}, {{1}, Rational(1, 2)}});
    Params p;
    p.n_max = 8;
    p.stop_on_convergence = false;
    auto t = convolution_powers(w, p);
    REQUIRE(t.size() == 8);
    for (int n = 1; n <= 8; ++n)
        for (int k = 0; k <= n; ++k) CHECK(t.snapshots[n - 1].weight({k}) == binomial_weight(n, k));
}

TEST_CASE("concentration functions") {
    LatticeMeasure w(1, {{{0}, Rational(1, 2)}, {{1}, Rational(1, 2)}});
    auto c = concentration_function(w, {{0}}, 6);
    CHECK(c[3] == Rational(3, 8));
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] <= c[i - 1]);
    for (const auto& v : concentration_function(LatticeMeasure::dirac({1}), {{0}}, 5)) CHECK(v == 1);
    auto z6 = cyclic(6);
    auto m = FiniteMeasure::from_weights(z6, {{0, Rational(1, 2)}, {2, Rational(1, 2)}});
    auto cf = concentration_function(m, {0, 2, 4}, 4);
    for (const auto& v : cf) CHECK(v == 1);
}

TEST_CASE("convergence detection") {
    Params p;
    p.n_max = 256;
    auto z5 = cyclic(5);
    auto lazy = FiniteMeasure::from_weights(z5, {{0, Rational(1, 2)}, {1, Rational(1, 2)}});
    auto conv = detect_convergence(convolution_powers(lazy, p));
    REQUIRE(conv.status == ConvergenceStatus::Converged);
    CHECK(total_variation(*conv.limit, FiniteMeasure::uniform(z5, z5->whole())) < Rational(1, 1000000));

    p.stop_on_convergence = false;
    p.n_max = 12;
    auto rot = detect_convergence(convolution_powers(FiniteMeasure::dirac(cyclic(4), 1), p));
    CHECK(rot.status == ConvergenceStatus::Diverged);

    p.n_max = 40;
    auto escape = detect_convergence(convolution_powers(LatticeMeasure::dirac({1}), p));
    CHECK(escape.status == ConvergenceStatus::Diverged);

    p.n_max = 3;
    CHECK(detect_convergence(convolution_powers(lazy, p)).status == ConvergenceStatus::Undecided);
    CHECK_THROWS(detect_convergence(convolution_powers(lazy, p), 0.0, 5));
}

TEST_CASE("orbit product under the cat map tends to Haar") {
    IntAutomorphism cat(IntMatrix{{2, 1}, {1, 1}});
    auto lambda = SpectralMeasure::from_atoms(2, {{{0.0, 0.0}, 0.5}, {{0.3, 0.1}, 0.5}});
    Params p;
    p.window = 3;
    p.n_max = 200;
    auto t = orbit_product(lambda, cat, p);
    auto c = detect_convergence(t);
    CHECK(t.size() <= 100);
    REQUIRE(c.status == ConvergenceStatus::Converged);
    const auto w = Window::box(2, 3);
    for (std::size_t i = 0; i < w.chars.size(); ++i) {
        const bool zero = w.chars[i][0] == 0 && w.chars[i][1] == 0;
        CHECK(std::abs(c.limit->values[i] - Complex(zero ? 1.0 : 0.0)) <= 1e-6);
    }
}

TEST_CASE("shifted sequence of a translated Haar measure is constant") {
    IntAutomorphism u(IntMatrix{{1, 1}, {0, 1}});
    TorusSubgroup k(2, {{Int(2), Int(0)}, {Int(0), Int(2)}});
    const std::vector<double> z{0.3, 0.7};
    auto mu = convolve(SpectralMeasure::haar(k), SpectralMeasure::dirac(z));
    Params p;
    p.window = 4;
    p.n_max = 30;
    auto t = shifted_sequence(mu, 1, u, z, p);
    auto target = SpectralMeasure::haar(k).evaluate(Window::box(2, 4));
    for (const auto& s : t.snapshots) CHECK(window_distance(s, target) <= 1e-12);
    CHECK(detect_convergence(t).status == ConvergenceStatus::Converged);
}

TEST_CASE("finite shifted sequence against direct powers") {
    auto s3 = std::make_shared<const FiniteGroup>(FiniteGroup::symmetric(3));
    auto mu = FiniteMeasure::from_weights(s3, {{1, Rational(1, 3)}, {3, Rational(2, 3)}});
    Params p;
    p.n_max = 6;
    p.stop_on_convergence = false;
    const Element x = 3;
    auto t = shifted_sequence(mu, x, p);
    FiniteMeasure power = mu;
    Element xn = x;
    for (int n = 1; n <= 6; ++n) {
        if (n > 1) {
            power = convolve(power, mu);
            xn = s3->multiply(xn, x);
        }
        CHECK(t.snapshots[n - 1] == translate_right(power, s3->inverse(xn)));
    }
}

TEST_CASE("symmetrized sequences") {
    Params p;
    p.n_max = 5;
    p.stop_on_convergence = false;
    auto z7 = cyclic(7);
    for (const auto& s : symmetrized_sequence(FiniteMeasure::dirac(z7, 3), p).snapshots) CHECK(s == FiniteMeasure::dirac(z7, 0));
    auto sp = symmetrized_sequence(SpectralMeasure::dirac({0.37}), p);
    for (const auto& s : sp.snapshots)
        for (const auto& v : s.values) CHECK(std::abs(v - Complex(1.0)) <= 1e-12);
    auto mu = FiniteMeasure::from_weights(z7, {{1, Rational(1, 4)}, {2, Rational(3, 4)}});
    auto direct = symmetrized_sequence(mu, p);
    auto via = symmetrized_from_shifted(shifted_sequence(mu, Element(2), p));
    REQUIRE(direct.size() == via.size());
    for (std::size_t i = 0; i < direct.size(); ++i) CHECK(direct.snapshots[i] == via.snapshots[i]);
}
