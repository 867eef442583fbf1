// Command-line runner: spectral classification, single scenarios, catalogs,
// finite harmonic spaces and the unipotent torus demo.
#include "scplab/scenario.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace scplab;
using scenario::json;

namespace {

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw scenario::ParseError("cannot read " + p.string());
    return json::parse(in);
}

int run_classify(const std::string& text) {
    groups::IntAutomorphism a(scenario::parse_matrix_string(text));
    auto v = linalg::distality_verdict(a);
    auto split = linalg::contraction_split(a.matrix());
    json out{{"matrix", text}, {"charpoly", engine::poly_json(a.char_poly())}, {"distal", v.distal},
             {"ergodic", linalg::ergodicity_verdict(a)}};
    if (v.witness) out["witness_modulus"] = json::array({v.witness->modulus_lo, v.witness->modulus_hi});
    out["contraction_split"] = json{{"contracting", split.contracting_dim()}, {"neutral", split.neutral_dim()},
                                    {"expanding", split.expanding_dim()}, {"residual", split.residual}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_one(const fs::path& file, const std::string& out_dir, std::uint64_t seed) {
    auto s = scenario::load_scenario(file, seed);
    auto r = scenario::run_scenario(s);
    if (!out_dir.empty()) scenario::write_outputs(out_dir, r);
    std::cout << r.report.dump(2) << "\n";
    return r.matched ? 0 : 1;
}

int run_catalog(const fs::path& dir, const std::string& filter, int jobs, const std::string& out_dir, std::uint64_t seed) {
    if (!fs::is_directory(dir)) throw scenario::ParseError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "warning: no scenarios in " << dir << "\n";
        return 0;
    }
    struct Row {
        std::string id, verdict, agreement;
        bool ran = false, matched = false;
        std::string error;
    };
    std::vector<Row> rows(files.size());
    std::atomic<std::size_t> next{0};
    std::mutex io;
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            Row& row = rows[i];
            row.id = files[i].stem().string();
            try {
                auto s = scenario::load_scenario(files[i], seed);
                row.id = s.id;
                if (!scenario::matches_filter(s, filter)) continue;
                row.ran = true;
                auto r = scenario::run_scenario(s);
                row.verdict = r.report.at("verdict").at("kind").get<std::string>();
                row.agreement = r.report.at("agreement").get<std::string>();
                row.matched = r.matched;
                if (!out_dir.empty()) {
                    std::lock_guard lock(io);
                    scenario::write_outputs(out_dir, r);
                }
            } catch (const std::exception& e) {
                row.ran = true;
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json summary = json::array();
    bool ok = true;
    std::set<std::string> ids;
    for (const auto& r : rows) {
        if (!r.ran) continue;
        if (!ids.insert(r.id).second) {
            ok = false;
            std::cerr << "duplicate scenario id " << r.id << "\n";
        }
        json j{{"scenario_id", r.id}};
        if (!r.error.empty()) {
            j["error"] = r.error;
            ok = false;
        } else {
            j["verdict"] = r.verdict;
            j["agreement"] = r.agreement;
            j["matched"] = r.matched;
            ok = ok && r.matched;
        }
        summary.push_back(j);
    }
    if (summary.empty()) std::cerr << "warning: filter matched no scenarios\n";
    std::cout << json{{"scenarios", summary}, {"all_matched", ok}}.dump(2) << "\n";
    return ok ? 0 : 1;
}

int run_harmonic(const fs::path& group_file, const fs::path& measure_file) {
    auto g = scenario::parse_group(read_json(group_file));
    auto mu = scenario::parse_finite_measure(g, read_json(measure_file), 0);
    std::cout << scenario::harmonic_report(mu).dump(2) << "\n";
    return 0;
}

int run_demo(int kmax, int window) {
    // L-invariant measures: atoms on the first circle times Haar of the second.
    const groups::TorusSubgroup l(2, {{Int(1), Int(0)}});
    auto haar_l = measures::SpectralMeasure::haar(l);
    std::vector<std::pair<std::string, measures::SpectralMeasure>> cases{
        {"half-atoms", convolve(measures::SpectralMeasure::from_atoms(2, {{{0.0, 0.0}, 0.5}, {{0.5, 0.0}, 0.5}}), haar_l)},
        {"irrational-atom", convolve(measures::SpectralMeasure::from_atoms(2, {{{0.0, 0.0}, 0.5}, {{std::sqrt(2.0) - 1, 0.0}, 0.5}}), haar_l)},
        {"haar-of-L", haar_l}};
    json out = json::array();
    bool ok = true;
    for (const auto& [name, mu] : cases) {
        auto r = engine::unipotent_collapse_demo(mu, kmax, window);
        bool zero_beyond = true;
        for (int k = window + 1; k <= kmax; ++k) zero_beyond = zero_beyond && r.distances[static_cast<std::size_t>(k)] == 0.0;
        ok = ok && r.distal && zero_beyond;
        out.push_back(json{{"measure", name}, {"distal", r.distal}, {"window", r.window}, {"distances", r.distances},
                           {"first_zero_k", r.first_zero_k}, {"max_bound", r.max_bound},
                           {"zero_for_k_above_window", zero_beyond}, {"distal_not_tortrat", r.not_tortrat}});
    }
    std::cout << json{{"alpha", "1,1;0,1"}, {"kmax", kmax}, {"cases", out}}.dump(2) << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scplab: shifted convolution property experiments"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for random scenario measures without their own seed");

    std::string matrix;
    auto* classify = app.add_subcommand("classify", "distality and ergodicity of an integer matrix");
    classify->add_option("matrix", matrix, "row-major \"a,b;c,d\"")->required();

    std::string scenario_file, out_dir;
    auto* scp = app.add_subcommand("scp", "run one scenario");
    scp->add_option("scenario", scenario_file)->required()->check(CLI::ExistingFile);
    scp->add_option("--out", out_dir, "directory for report and CSV trajectories");

    std::string catalog_dir, filter;
    int jobs = 1;
    auto* catalog = app.add_subcommand("catalog", "run every scenario in a directory");
    catalog->add_option("dir", catalog_dir)->required();
    catalog->add_option("--filter", filter, "scenario id substring or tag");
    catalog->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    catalog->add_option("--out", out_dir, "directory for reports and CSV trajectories");

    std::string group_file, measure_file;
    auto* harmonic = app.add_subcommand("harmonic", "exact harmonic functions of a finite group measure");
    harmonic->add_option("group", group_file)->required()->check(CLI::ExistingFile);
    harmonic->add_option("measure", measure_file)->required()->check(CLI::ExistingFile);

    int kmax = 16, window = 8;
    auto* demo = app.add_subcommand("demo-unipotent", "pushforwards of L-invariant measures under (w, z) -> (w + z, z)");
    demo->add_option("--kmax", kmax)->check(CLI::NonNegativeNumber);
    demo->add_option("--window", window)->check(CLI::Range(2, 64));

    CLI11_PARSE(app, argc, argv);
    try {
        if (*classify) return run_classify(matrix);
        if (*scp) return run_one(scenario_file, out_dir, seed);
        if (*catalog) return run_catalog(catalog_dir, filter, jobs, out_dir, seed);
        if (*harmonic) return run_harmonic(group_file, measure_file);
        if (*demo) return run_demo(kmax, window);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
