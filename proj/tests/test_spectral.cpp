#include "scplab/distality.hpp"

#include <catch_amalgamated.hpp>

#include <numeric>

using namespace scplab;
using namespace scplab::linalg;
using groups::IntAutomorphism;

namespace {

// det(x I - M) by the Leibniz formula, evaluated at an integer x.
Int leibniz_char_value(const IntMatrix& m, long x) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Int total = 0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        Int term = inversions % 2 ? -1 : 1;
        for (std::size_t i = 0; i < n; ++i) term *= (i == perm[i] ? Int(x) : Int(0)) - m(i, perm[i]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

Int eval(const IntPolynomial& f, long x) {
    Int v = 0;
    const auto& c = f.coefficients();
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

IntMatrix companion(const std::vector<int>& low) {
    const std::size_t d = low.size();
    std::vector<IntVector> rows(d, IntVector(d, Int(0)));
    for (std::size_t i = 1; i < d; ++i) rows[i][i - 1] = 1;
    for (std::size_t i = 0; i < d; ++i) rows[i][d - 1] = -low[i];
    return IntMatrix::from_rows(rows);
}

}  // namespace

TEST_CASE("characteristic polynomial against the cofactor oracle") {
    CHECK(char_poly(IntMatrix{{2, 1}, {1, 1}}) == IntPolynomial{1, -3, 1});
    CHECK(char_poly(IntMatrix::identity(2)) == IntPolynomial{1, -2, 1});
    CHECK(char_poly(IntMatrix{{0, -1}, {1, 0}}) == IntPolynomial{1, 0, 1});
    std::vector<IntMatrix> ms{IntMatrix{{2, 1, 0}, {1, 1, 3}, {-4, 0, 1}}, IntMatrix{{0, 0, 1}, {1, 0, -1}, {0, 1, 2}},
                              IntMatrix{{1, 2, 3, 4}, {0, 1, -1, 2}, {5, 0, 0, 1}, {1, 1, 1, 1}}};
    for (const auto& m : ms) {
        auto f = char_poly(m);
        CHECK(f.degree() == static_cast<int>(m.rows()));
        for (long x = -4; x <= 4; ++x) CHECK(eval(f, x) == leibniz_char_value(m, x));
    }
    CHECK(char_poly(RatMatrix{{Rational(1, 2), 0}, {0, 3}}) == RatPolynomial(std::vector<Rational>{Rational(3, 2), Rational(-7, 2), 1}));
}

TEST_CASE("Kronecker test and root-of-unity factors") {
    CHECK(kronecker_all_roots_unit_modulus(IntPolynomial{-1, 1}));
    CHECK_FALSE(kronecker_all_roots_unit_modulus(IntPolynomial{1, -3, 1}));
    CHECK(kronecker_all_roots_unit_modulus(IntPolynomial{1, -1, 1}));
    CHECK_THROWS(kronecker_all_roots_unit_modulus(IntPolynomial{0, 1, 1}));
    CHECK(has_root_of_unity_factor(IntPolynomial{-1, 4, -4, 1}));  // (x - 1)(x^2 - 3x + 1)
    CHECK_FALSE(has_root_of_unity_factor(IntPolynomial{1, -3, 1}));
    CHECK(has_root_of_unity_factor(IntPolynomial{1, 0, 1}));
    // Oracle: gcd with every cyclotomic polynomial of degree <= 2.
    for (long m : {1, 2, 3, 4, 6}) CHECK(gcd(to_rational(IntPolynomial{1, -3, 1}), to_rational(cyclotomic(m))).degree() == 0);
}

TEST_CASE("distality and ergodicity verdicts") {
    CHECK(distality_verdict(IntAutomorphism(IntMatrix{{1, 1}, {0, 1}})).distal);
    CHECK(distality_verdict(IntAutomorphism(IntMatrix{{0, -1}, {1, 0}})).distal);
    auto cat = distality_verdict(IntAutomorphism(IntMatrix{{2, 1}, {1, 1}}));
    REQUIRE_FALSE(cat.distal);
    REQUIRE(cat.witness);
    const double golden_sq = (3 + std::sqrt(5.0)) / 2;
    CHECK(cat.witness->modulus_lo <= golden_sq + 1e-12);
    CHECK(cat.witness->modulus_hi >= golden_sq - 1e-12);
    CHECK(cat.witness->modulus_hi - cat.witness->modulus_lo <= 1e-9);
    CHECK(ergodicity_verdict(IntAutomorphism(IntMatrix{{2, 1}, {1, 1}})));
    CHECK_FALSE(ergodicity_verdict(IntAutomorphism(IntMatrix{{1, 1}, {0, 1}})));
    CHECK_FALSE(ergodicity_verdict(IntAutomorphism(IntMatrix::identity(3))));
}

TEST_CASE("ergodic implies non-distal over unimodular companions of degree <= 4") {
    long tested = 0;
    for (int d = 1; d <= 4; ++d) {
        std::vector<int> c(static_cast<std::size_t>(d), -3);
        auto advance = [&c] {
            std::size_t i = 1;
            while (i < c.size() && c[i] == 3) c[i++] = -3;
            if (i == c.size()) return false;
            ++c[i];
            return true;
        };
        for (int c0 : {-1, 1}) {
            std::fill(c.begin(), c.end(), -3);
            c[0] = c0;
            do {
                IntAutomorphism a(companion(c));
                if (ergodicity_verdict(a)) CHECK_FALSE(distality_verdict(a).distal);
                ++tested;
            } while (advance());
        }
    }
    CHECK(tested > 500);
}

TEST_CASE("Newton polygons and the integrality trichotomy") {
    CHECK(newton_polygon(to_rational(IntPolynomial{-2, 1}), 2).root_valuations() == std::vector<Rational>{1});
    CHECK(newton_polygon(to_rational(IntPolynomial{1, -3, 1}), 5).root_valuations() == std::vector<Rational>{0, 0});
    RatPolynomial f(std::vector<Rational>{1, Rational(-5, 2), 1});
    auto v = newton_polygon(f, 2).root_valuations();
    std::sort(v.begin(), v.end());
    CHECK(v == std::vector<Rational>{-1, 1});
    // Exact factorization oracle: (x - 2)(x - 1/2).
    CHECK(RatPolynomial(std::vector<Rational>{-2, 1}) * RatPolynomial(std::vector<Rational>{Rational(-1, 2), 1}) == f);
    auto c1 = integrality_trichotomy(f);
    REQUIRE(std::holds_alternative<NonIntegerCoefficient>(c1));
    CHECK(std::get<NonIntegerCoefficient>(c1).prime == 2);
    CHECK(std::holds_alternative<IntegerRootsOfUnity>(integrality_trichotomy(to_rational(IntPolynomial{1, -1, 1}))));
    auto c3 = integrality_trichotomy(to_rational(IntPolynomial{-2, 1}));
    REQUIRE(std::holds_alternative<IntegerOffUnitCircle>(c3));
    CHECK(std::get<IntegerOffUnitCircle>(c3).modulus_lo <= 2.0);
    CHECK(std::get<IntegerOffUnitCircle>(c3).modulus_hi >= 2.0);
    CHECK_THROWS(newton_polygon(f, 4));
}

TEST_CASE("contraction split") {
    auto cat = contraction_split(IntMatrix{{2, 1}, {1, 1}});
    CHECK(cat.contracting_dim() == 1);
    CHECK(cat.expanding_dim() == 1);
    CHECK(cat.neutral_dim() == 0);
    // Eigenvector solve oracle: (A - mu I) v = 0 with mu = (3 - sqrt5)/2.
    const double mu = (3 - std::sqrt(5.0)) / 2;
    Eigen::Vector2d v = cat.contracting.col(0);
    CHECK(std::abs((2 - mu) * v(0) + v(1)) <= 1e-12);
    CHECK(std::abs(v(0) + (1 - mu) * v(1)) <= 1e-12);
    CHECK(contraction_split(IntMatrix{{1, 1}, {0, 1}}).neutral_dim() == 2);
    auto diag = contraction_split(RatMatrix{{Rational(1, 2), 0}, {0, 3}});
    CHECK(diag.contracting_dim() == 1);
    CHECK(diag.expanding_dim() == 1);
}

TEST_CASE("rational inverse") {
    RatMatrix a{{2, 1}, {1, 1}};
    auto inv = rat_inverse(a);
    CHECK(inv == RatMatrix{{1, -1}, {-1, 2}});
    CHECK_THROWS(rat_inverse(RatMatrix{{1, 2}, {2, 4}}));
}
