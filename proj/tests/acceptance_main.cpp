// Acceptance battery: one PASS/FAIL line per criterion; exit 0 only if all pass.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "supergrowth/acceptance.hpp"
#include "supergrowth/runner.hpp"

int main(int argc, char** argv) {
    namespace acc = supergrowth::acceptance;
    CLI::App app{"supergrowth acceptance battery"};
    std::string suite = "full";
    unsigned workers = 0;
    std::uint64_t seed = acc::Options{}.seed;
    std::vector<int> only;
    std::string out_dir;
    app.add_option("--suite", suite, "full or fast")->check(CLI::IsMember({"full", "fast"}));
    app.add_option("--workers", workers, "worker threads (0 = hardware)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--only", only, "run only these criterion ids")->check(CLI::Range(1, 15));
    app.add_option("--out", out_dir, "directory for per-criterion CSVs");
    CLI11_PARSE(app, argc, argv);

    acc::Options o;
    o.scale = suite == "fast" ? acc::Scale::Fast : acc::Scale::Full;
    o.workers = workers;
    o.seed = seed;
    o.progress = &std::cout;
    std::cout << "acceptance suite=" << suite << " seed=" << seed << std::endl;
    try {
        const auto results = acc::run_suite(o, only.empty() ? acc::suite_ids(o.scale) : only);
        std::size_t passed = 0;
        for (const auto& r : results) passed += r.passed ? 1 : 0;
        const std::filesystem::path dir =
            out_dir.empty() ? supergrowth::output_root() / ("acceptance-" + suite) : std::filesystem::path(out_dir);
        acc::write_results(results, o, dir);
        std::cout << passed << "/" << results.size() << " criteria passed; CSVs in " << dir.string() << std::endl;
        return passed == results.size() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance: internal error: " << e.what() << std::endl;
        return 1;
    }
}
