#include "scplab/harmonic.hpp"

#include <catch_amalgamated.hpp>

using namespace scplab;
using namespace scplab::harmonic;

namespace {

std::shared_ptr<const FiniteGroup> make(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

}  // namespace

TEST_CASE("harmonic dimensions on small groups") {
    auto z3 = make(FiniteGroup::cyclic(3));
    CHECK(harmonic_space(FiniteMeasure::uniform(z3, z3->whole())).dimension() == 1);
    auto z4 = make(FiniteGroup::cyclic(4));
    CHECK(harmonic_space(FiniteMeasure::dirac(z4, 1)).dimension() == 1);
    auto klein = make(FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)));
    auto half = FiniteMeasure::from_weights(klein, {{0, Rational(1, 2)}, {2, Rational(1, 2)}});
    auto s = harmonic_space(half);
    CHECK(s.dimension() == 2);
    CHECK(s.cosets.size() == 2);
    CHECK(is_choquet_deny(s));
    auto s3 = make(FiniteGroup::symmetric(3));
    CHECK(harmonic_space(FiniteMeasure::dirac(s3, 0)).dimension() == 6);
    auto z5 = make(FiniteGroup::cyclic(5));
    CHECK(harmonic_space(FiniteMeasure::from_weights(z5, {{2, Rational(1, 3)}, {4, Rational(2, 3)}})).dimension() == 1);
}

TEST_CASE("basis vectors are harmonic and constants always are") {
    auto d4 = make(FiniteGroup::dihedral(4));
    auto mu = FiniteMeasure::from_weights(d4, {{1, Rational(1, 4)}, {4, Rational(3, 4)}});
    auto s = harmonic_space(mu);
    for (const auto& v : s.basis) CHECK(is_harmonic(mu, v));
    CHECK(is_harmonic(mu, RatVector(d4->order(), Rational(1))));
    CHECK(s.dimension() == d4->order() / s.generated.order());
    CHECK_THROWS(apply_markov(mu, RatVector(3)));
}

TEST_CASE("Choquet-Deny holds on every group and support") {
    for (auto g : {make(FiniteGroup::cyclic(6)), make(FiniteGroup::dihedral(3)), make(FiniteGroup::quaternion()),
                   make(FiniteGroup::alternating4())}) {
        for (Element x = 0; x < g->order(); ++x) {
            auto mu = x == 0 ? FiniteMeasure::dirac(g, 0)
                             : FiniteMeasure::from_weights(g, {{0, Rational(1, 3)}, {x, Rational(2, 3)}});
            CHECK(is_choquet_deny(mu));
        }
    }
}

TEST_CASE("rational kernel") {
    linalg::RatMatrix a{{Rational(1), Rational(-1), Rational(0)}, {Rational(0), Rational(1), Rational(-1)}};
    auto k = rational_kernel(a, 3);
    REQUIRE(k.size() == 1);
    CHECK(k[0][0] == k[0][1]);
    CHECK(k[0][1] == k[0][2]);
    CHECK(k[0][0] != 0);
}
