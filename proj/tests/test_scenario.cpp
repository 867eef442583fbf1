#include "scplab/scenario.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>

using namespace scplab;
using namespace scplab::scenario;

namespace {

const std::filesystem::path kCatalog = SCPLAB_CATALOG_DIR;

json finite_scenario(json measure) {
    return json{{"id", "t"}, {"group", {{"family", "finite"}, {"group", {{"kind", "cyclic"}, {"n", 4}}}}}, {"measure", measure}};
}

}  // namespace

TEST_CASE("matrix strings") {
    CHECK(parse_matrix_string("2,1;1,1") == IntMatrix{{2, 1}, {1, 1}});
    CHECK(parse_matrix_string(" -1, 0 ; 0, 1") == IntMatrix{{-1, 0}, {0, 1}});
    CHECK_THROWS_AS(parse_matrix_string("1,2;3"), ParseError);
    CHECK_THROWS_AS(parse_matrix_string("1,x;0,1"), ParseError);
    CHECK_THROWS_AS(parse_matrix_string(""), ParseError);
}

TEST_CASE("scenario parse errors") {
    CHECK_THROWS_AS(parse_scenario(json{{"group", json::object()}}), ParseError);
    json bad_family{{"id", "t"}, {"group", {{"family", "nope"}}}, {"measure", json::object()}};
    CHECK_THROWS_AS(parse_scenario(bad_family), ParseError);
    CHECK_THROWS(parse_scenario(finite_scenario({{"atoms", {{{"element", 0}, {"weight", "1/2"}}}}})));
    auto ok = parse_scenario(finite_scenario({{"atoms", {{{"element", 1}, {"weight", "1/2"}}, {{"element", 3}, {"weight", "1/2"}}}}}));
    CHECK(std::get<FiniteMeasure>(ok.measure).weight(3) == Rational(1, 2));
    json bad_params = finite_scenario({{"atoms", {{{"element", 0}, {"weight", 1}}}}});
    bad_params["params"] = {{"window", 1}};
    CHECK_THROWS_AS(parse_scenario(bad_params), ParseError);
    bad_params["params"] = {{"n_max", 0}};
    CHECK_THROWS_AS(parse_scenario(bad_params), ParseError);
    json bad_alpha{{"id", "t"},
                   {"group", {{"family", "semidirect-finite"}, {"base", {{"kind", "cyclic"}, {"n", 4}}}, {"alpha", {0, 2, 1, 3}}}},
                   {"measure", {{"components", json::array()}}}};
    CHECK_THROWS_AS(parse_scenario(bad_alpha), ParseError);
    CHECK_THROWS_AS(load_scenario(kCatalog / "does-not-exist.json"), ParseError);
    CHECK(parse_rational(json("3/4")) == Rational(3, 4));
}

TEST_CASE("window defaults by torus dimension") {
    json j{{"id", "t"},
           {"group", {{"family", "torus"}, {"dim", 3}}},
           {"measure", {{"kind", "atoms"}, {"atoms", {{{"point", {0, 0, 0}}, {"weight", 1}}}}}}};
    CHECK(parse_scenario(j).params.window == 4);
    j["params"] = {{"window", 8}};
    CHECK(parse_scenario(j).params.window == 8);
}

TEST_CASE("random measures are deterministic") {
    auto g = std::make_shared<const FiniteGroup>(FiniteGroup::symmetric(4));
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 20; ++i) {
        auto x = random_finite_measure(g, a), y = random_finite_measure(g, b);
        CHECK(x == y);
        CHECK(x.support().size() >= 3);
        CHECK(x.support().size() <= 5);
    }
    CHECK(sweep_groups().size() >= 10);
}

TEST_CASE("catalog scenarios run, match and are reproducible") {
    std::size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kCatalog)) {
        if (entry.path().extension() != ".json") continue;
        ++count;
        auto s = load_scenario(entry.path());
        auto r = run_scenario(s);
        INFO(s.id);
        CHECK(r.matched);
        for (const char* key : {"scenario_id", "tags", "family", "group", "measure", "prediction", "verdict", "agreement",
                                "parameters", "candidates", "symmetrized", "evidence_paths", "expected", "checks", "matched"})
            CHECK(r.report.contains(key));
        CHECK(r.report["evidence_paths"].size() == r.trajectories.size());
        if (s.id == "finite-s3-random" || s.id == "shift-left-half")
            CHECK(run_scenario(load_scenario(entry.path())).report.dump() == r.report.dump());
    }
    CHECK(count >= 12);
}

TEST_CASE("filters and output files") {
    auto s = load_scenario(kCatalog / "shift-left-half.json");
    CHECK(matches_filter(s, ""));
    CHECK(matches_filter(s, "left-half"));
    CHECK(matches_filter(s, "shift-left"));
    CHECK_FALSE(matches_filter(s, "torus"));

    auto dir = std::filesystem::temp_directory_path() / "scplab_test_outputs";
    std::filesystem::remove_all(dir);
    auto r = run_scenario(s);
    write_outputs(dir, r);
    CHECK(std::filesystem::exists(dir / "shift-left-half.json"));
    REQUIRE_FALSE(r.trajectories.empty());
    std::ifstream csv(dir / csv_name(s.id, r.trajectories.front().name));
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("step,distance,coeff_re_", 0) == 0);
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == r.trajectories.front().steps.size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("harmonic report") {
    auto g = std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(4));
    auto rep = harmonic_report(FiniteMeasure::from_weights(g, {{0, Rational(1, 2)}, {2, Rational(1, 2)}}));
    CHECK(rep["dimension"] == 2);
}
