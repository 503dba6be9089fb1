// supergrowth: run a campaign config, run the acceptance battery, or print a kind's schema.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "supergrowth/acceptance.hpp"
#include "supergrowth/config.hpp"
#include "supergrowth/runner.hpp"

namespace sg = supergrowth;

namespace {

int cmd_run(const std::string& path, std::optional<unsigned> workers, bool dry_run) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "run: cannot read " << path << "\n";
        return sg::kExitValidation;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    sg::CampaignConfig cfg;
    try {
        cfg = sg::parse_config(buf.str());
    } catch (const sg::ConfigError& e) {
        std::cerr << "run: invalid config at " << e.what() << "\n";
        return sg::kExitValidation;
    }
    if (workers) cfg.workers = *workers;
    const auto out = sg::run_campaign(cfg, sg::output_root(), !dry_run);
    std::cout << out.summary.dump(2) << "\n";
    if (!out.message.empty()) std::cerr << "run: " << out.message << "\n";
    if (!dry_run) std::cerr << "run: outputs in " << out.directory.string() << "\n";
    return out.exit_code;
}

int cmd_verify(const std::string& suite, unsigned workers, std::uint64_t seed, const std::vector<int>& only) {
    namespace acc = sg::acceptance;
    acc::Options o;
    o.scale = suite == "fast" ? acc::Scale::Fast : acc::Scale::Full;
    o.workers = workers;
    o.seed = seed;
    o.progress = &std::cout;
    try {
        const auto results = acc::run_suite(o, only.empty() ? acc::suite_ids(o.scale) : only);
        std::size_t passed = 0;
        for (const auto& r : results) passed += r.passed ? 1 : 0;
        const auto dir = sg::output_root() / ("verify-" + suite);
        acc::write_results(results, o, dir);
        std::cout << passed << "/" << results.size() << " criteria passed; table in " << (dir / "summary.csv").string()
                  << "\n";
        return passed == results.size() ? sg::kExitOk : sg::kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return sg::kExitInternal;
    }
}

int cmd_describe(const std::string& kind) {
    if (kind == "all") {
        for (const auto& k : sg::kinds()) std::cout << k << "\n";
        return sg::kExitOk;
    }
    try {
        std::cout << sg::describe(kind).dump(2) << "\n";
        return sg::kExitOk;
    } catch (const sg::ConfigError& e) {
        std::cerr << "describe: " << e.what() << "\n";
        return sg::kExitValidation;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"supergrowth: branching particle systems, superprocesses and their growth"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one campaign config");
    std::string config_path;
    std::optional<unsigned> run_workers;
    bool dry_run = false;
    run->add_option("config", config_path, "campaign config (JSON)")->required();
    run->add_option("--workers", run_workers, "override the config worker count");
    run->add_flag("--dry-run", dry_run, "compute and print the summary without writing files");

    auto* verify = app.add_subcommand("verify", "run the acceptance battery");
    std::string suite;
    unsigned workers = 0;
    std::uint64_t seed = sg::acceptance::Options{}.seed;
    std::vector<int> only;
    verify->add_option("suite", suite, "fast or full")->required()->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--workers", workers, "worker threads (0 = hardware)");
    verify->add_option("--seed", seed, "master seed");
    verify->add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, 15));

    auto* describe = app.add_subcommand("describe", "print the schema of a config kind ('all' lists kinds)");
    std::string kind;
    describe->add_option("kind", kind, "config kind")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sg::kExitValidation;
    }
    try {
        if (*run) return cmd_run(config_path, run_workers, dry_run);
        if (*verify) return cmd_verify(suite, workers, seed, only);
        if (*describe) return cmd_describe(kind);
    } catch (const std::exception& e) {
        std::cerr << "supergrowth: internal error: " << e.what() << "\n";
        return sg::kExitInternal;
    }
    return sg::kExitInternal;
}
