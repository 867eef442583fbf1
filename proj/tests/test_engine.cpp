#include "scplab/scp_engine.hpp"

#include <catch_amalgamated.hpp>

using namespace scplab;
using namespace scplab::engine;

namespace {

const IntAutomorphism kUnipotent(IntMatrix{{1, 1}, {0, 1}});
const IntAutomorphism kCat(IntMatrix{{2, 1}, {1, 1}});

SemidirectMeasure<SpectralMeasure> at_shift_one(SpectralMeasure m) { return SemidirectMeasure<SpectralMeasure>::single(std::move(m), 1); }

}  // namespace

TEST_CASE("translated Haar measure under the unipotent map") {
    TorusSubgroup k(2, {{Int(2), Int(0)}, {Int(0), Int(2)}});
    // omega_K delta_z as atoms, so that z is among the candidate shifts.
    std::vector<TorusAtom> atoms;
    for (double a : {0.0, 0.5})
        for (double b : {0.0, 0.5}) atoms.push_back({{0.25 + a, b}, 0.25});
    auto lambda = SpectralMeasure::from_atoms(2, atoms);
    Params p;
    p.window = 4;
    auto c = classify_measure(SemidirectTorusSpec{kUnipotent}, at_shift_one(lambda), p);
    REQUIRE(std::holds_alternative<ShiftedHaar>(c.verdict));
    const auto& s = std::get<ShiftedHaar>(c.verdict);
    CHECK(s.residual <= 1e-12);
    CHECK(s.normalization_ok);
    CHECK(std::get<TorusSubgroup>(s.subgroup) == k);
}

TEST_CASE("finite groups always give shifted Haar limits") {
    auto s3 = std::make_shared<const FiniteGroup>(FiniteGroup::symmetric(3));
    auto mu = FiniteMeasure::from_weights(s3, {{1, Rational(1, 2)}, {3, Rational(1, 2)}});
    auto c = classify_measure(FiniteSpec{s3}, mu);
    REQUIRE(std::holds_alternative<ShiftedHaar>(c.verdict));
    CHECK(std::get<FiniteSubgroup>(std::get<ShiftedHaar>(c.verdict).subgroup).order() == 6);
    // A coset-supported measure: the limit is the Haar measure of a proper subgroup.
    auto z6 = std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(6));
    auto coset = FiniteMeasure::from_weights(z6, {{1, Rational(1, 3)}, {3, Rational(2, 3)}});
    auto cc = classify_measure(FiniteSpec{z6}, coset);
    REQUIRE(std::holds_alternative<ShiftedHaar>(cc.verdict));
    CHECK(std::get<FiniteSubgroup>(std::get<ShiftedHaar>(cc.verdict).subgroup).elements == std::vector<Element>{0, 2, 4});
    CHECK_THROWS(classify_measure(FiniteSpec{s3}, LatticeMeasure::dirac({0})));
}

TEST_CASE("lattice walks dissipate") {
    LatticeMeasure w(1, {{{0}, Rational(1, 2)}, {{1}, Rational(1, 2)}});
    CHECK(std::holds_alternative<Dissipating>(classify_measure(LatticeSpec{1}, w).verdict));
    auto d = classify_measure(LatticeSpec{2}, LatticeMeasure::dirac({1, 2}));
    REQUIRE(std::holds_alternative<ShiftedHaar>(d.verdict));
    CHECK(std::holds_alternative<TrivialSubgroup>(std::get<ShiftedHaar>(d.verdict).subgroup));
}

TEST_CASE("shift over the left-half subgroup is not normalized") {
    auto l = std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(2));
    auto omega = ProfileMeasure::haar(l, groups::left_half_subgroup(*l));
    auto mu = SemidirectMeasure<ProfileMeasure>::single(omega, 1);
    auto r = cross_check_dichotomy("shift", ShiftSpec{l}, mu, Params{});
    CHECK(verdict_kind(r.classification.verdict) == "Violation:LimitNotNormalizedByShift");
    CHECK_FALSE(r.prediction.point_wise_distal);
    CHECK(r.agreement == Agreement::Agree);
    // The limit itself is idempotent: omega * omega = omega.
    CHECK(convolve(omega, omega) == omega);
}

TEST_CASE("cat map counterexample") {
    auto ce = construct_counterexample(kCat);
    CHECK_FALSE(ce.switched_to_inverse);
    CHECK(ce.residual <= 1e-12);
    const double mu = (3 - std::sqrt(5.0)) / 2;
    CHECK(std::abs((2 - mu) * ce.direction[0] + ce.direction[1]) <= 1e-12);
    CHECK(std::abs(std::hypot(ce.direction[0], ce.direction[1]) - 1) <= 1e-12);
    auto r = cross_check_dichotomy("cat", SemidirectTorusSpec{kCat}, at_shift_one(ce.lambda), Params{});
    CHECK(verdict_kind(r.classification.verdict) == "Violation:NonIdempotentLimit");
    CHECK(r.agreement == Agreement::Agree);
    CHECK_THROWS_WITH(construct_counterexample(kUnipotent), Catch::Matchers::ContainsSubstring("no contracting direction"));
    CHECK_THROWS(construct_counterexample(IntAutomorphism(IntMatrix::identity(2))));
}

TEST_CASE("distality predictions") {
    CHECK(predict_point_wise_distal(FiniteSpec{std::make_shared<const FiniteGroup>(FiniteGroup::quaternion())}).point_wise_distal);
    CHECK(predict_point_wise_distal(LatticeSpec{3}).point_wise_distal);
    CHECK(predict_point_wise_distal(SemidirectTorusSpec{kUnipotent}).point_wise_distal);
    auto cat = predict_point_wise_distal(SemidirectTorusSpec{kCat});
    CHECK_FALSE(cat.point_wise_distal);
    CHECK(to_json(cat)["generators"][0]["detail"]["charpoly"] == json::array({1, -3, 1}));
    CHECK(predict_point_wise_distal(ShiftSpec{std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(1))}).point_wise_distal);
}

TEST_CASE("agreement rules") {
    DistalityPrediction distal, wild;
    wild.point_wise_distal = false;
    const SCPVerdict haar = ShiftedHaar{}, bad = Violation{ViolationReason::NonIdempotentLimit, {}, {}}, gone = Dissipating{},
                     open = Inconclusive{};
    CHECK(judge_agreement(distal, haar) == Agreement::Agree);
    CHECK(judge_agreement(distal, gone) == Agreement::Agree);
    CHECK(judge_agreement(distal, bad) == Agreement::Failure);
    CHECK(judge_agreement(wild, bad) == Agreement::Agree);
    CHECK(judge_agreement(wild, haar) == Agreement::Failure);
    CHECK(judge_agreement(distal, open) == Agreement::Inconclusive);
    CHECK(judge_agreement(wild, open) == Agreement::Inconclusive);
    CHECK(std::string(to_string(Agreement::Failure)) == "FAILURE");
}

TEST_CASE("verdict priority") {
    CandidateResult a, b, c;
    a.verdict = Inconclusive{};
    b.verdict = Violation{ViolationReason::NonIdempotentLimit, {}, {}};
    c.verdict = ShiftedHaar{};
    CHECK(verdict_kind(combine({a, b})) == "Violation:NonIdempotentLimit");
    CHECK(verdict_kind(combine({a, b, c})) == "ShiftedHaar");
    CHECK(verdict_kind(combine({a})) == "Inconclusive");
}

TEST_CASE("stability under quotients and embeddings") {
    auto lambda = SpectralMeasure::haar(TorusSubgroup(2, {{Int(0), Int(1)}}));
    Params p;
    p.window = 4;
    auto trivial = quotient_injection_stability(kUnipotent, at_shift_one(lambda), TorusSubgroup::trivial(2), p);
    CHECK(trivial.consistent);
    CHECK(trivial.upstairs == trivial.downstairs);
    auto halves = quotient_injection_stability(kUnipotent, at_shift_one(lambda), TorusSubgroup(2, {{Int(2), Int(0)}, {Int(0), Int(2)}}), p);
    CHECK(halves.consistent);
    CHECK(halves.details["max_period"] == 2);
    CHECK_THROWS(quotient_injection_stability(kCat, at_shift_one(lambda), TorusSubgroup(2, {{Int(2), Int(0)}, {Int(0), Int(1)}}), p));
    CHECK(rational_orbit_period(kCat, {Rational(1, 2), 0}) == 3);

    auto z4 = std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(4));
    auto z8 = std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(8));
    auto mu = FiniteMeasure::from_weights(z4, {{1, Rational(1, 2)}, {3, Rational(1, 2)}});
    auto e = quotient_injection_stability(z4, z8, {0, 2, 4, 6}, mu);
    CHECK(e.consistent);
    CHECK_THROWS(quotient_injection_stability(z4, z8, {0, 1, 2, 3}, mu));
}

TEST_CASE("L-invariant measures under the unipotent map") {
    // Half atoms on the first circle, Haar on the second.
    auto mu = convolve(SpectralMeasure::from_atoms(2, {{{0.0, 0.0}, 0.5}, {{0.5, 0.0}, 0.5}}),
                       SpectralMeasure::haar(TorusSubgroup(2, {{Int(1), Int(0)}})));
    const int window = 8, k_max = 16;
    auto r = unipotent_collapse_demo(mu, k_max, window);
    CHECK(r.distal);
    CHECK(r.l_invariant);
    CHECK(r.not_tortrat);
    // Brute force: the coefficient at (m, n) after k steps is mu^(m, k m + n), which is
    // nonzero exactly when k m + n = 0 and m is even.
    int oracle_first_zero = -1;
    for (int k = k_max; k >= 0; --k) {
        bool zero = true;
        for (int m = -window; m <= window; ++m)
            for (int n = -window; n <= window; ++n)
                if ((m != 0 || n != 0) && k * m + n == 0 && m % 2 == 0) zero = false;
        if (!zero) break;
        oracle_first_zero = k;
    }
    CHECK(oracle_first_zero == 5);
    CHECK(r.first_zero_k == oracle_first_zero);
    CHECK(r.max_bound == window);
    for (int k = window + 1; k <= k_max; ++k) CHECK(r.distances[static_cast<std::size_t>(k)] == 0.0);
    CHECK(unipotent_bound(2, -6) == 3);
    CHECK(unipotent_bound(2, 3) == -1);
    CHECK_THROWS(unipotent_collapse_demo(SpectralMeasure::dirac({0.1, 0.2}), 4));
}
