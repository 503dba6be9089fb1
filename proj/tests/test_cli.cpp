#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "supergrowth/runner.hpp"

using namespace supergrowth;
namespace fs = std::filesystem;

namespace {

struct Shell {
    int code = -1;
    std::string out;
};

Shell sh(const std::string& cmd) {
    Shell r;
    FILE* p = popen((cmd + " 2>&1").c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        root = fs::temp_directory_path() /
               ("sg-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root);
        fs::create_directories(root);
    }
    void TearDown() override { fs::remove_all(root); }

    fs::path write_config(const std::string& name, const std::string& text) {
        const auto p = root / name;
        std::ofstream(p) << text;
        return p;
    }
    Shell run(const std::string& args) {
        return sh("SUPERGROWTH_OUTPUT_ROOT=" + root.string() + " " + SUPERGROWTH_CLI + " " + args);
    }

    fs::path root;
};

}  // namespace

TEST_F(Cli, FkWithZeroPotentialHasMeanOne) {
    const auto cfg = write_config("fk.json", R"({"kind": "fk", "seed": 3, "output_dir": "fk",
        "model": {"beta": {"type": "constant", "value": 0}}, "params": {"t": 1, "dt": 0.01, "reps": 2000}})");
    const auto r = run("run " + cfg.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto summary = json::parse(slurp(root / "fk" / "summary.json"));
    EXPECT_NEAR(summary["mean"].get<double>(), 1.0, 1e-12);
    const auto csv = slurp(root / "fk" / "fk.csv");
    EXPECT_EQ(csv.rfind("t,x,mean,stderr", 0), 0u);
    EXPECT_NE(csv.find("# manifest-digest: " + summary["manifest_digest"].get<std::string>()), std::string::npos);
    EXPECT_TRUE(fs::exists(root / "fk" / "manifest.json"));
}

TEST_F(Cli, NonPositiveAlphaExitsTwoWithPointer) {
    const auto cfg = write_config("bad.json", R"({"kind": "fk",
        "model": {"alpha": {"type": "constant", "value": -1}}, "params": {"t": 1, "reps": 10}})");
    const auto r = run("run " + cfg.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("/model/alpha/value"), std::string::npos) << r.out;
}

TEST_F(Cli, MissingFileAndUnknownCommand) {
    EXPECT_EQ(run("run " + (root / "absent.json").string()).code, 2);
    EXPECT_NE(run("frobnicate").code, 0);
}

TEST_F(Cli, DescribePrintsSchema) {
    const auto r = run("describe bbm");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["kind"], "bbm");
    EXPECT_EQ(run("describe nope").code, 2);
    EXPECT_NE(run("describe all").out.find("local-growth"), std::string::npos);
}

TEST_F(Cli, CensoredCouplingIsInconclusive) {
    const auto cfg = write_config("c.json", R"({"kind": "couple",
        "model": {"beta": {"type": "constant", "value": 1}, "alpha": {"type": "constant", "value": 1}},
        "params": {"rule": "threshold", "horizon": 0.01, "reps": 50, "n": 20, "permutations": 19}})");
    EXPECT_EQ(run("run " + cfg.string()).code, 3);
}

TEST_F(Cli, GrowthReproductionRecordsExponent) {
    const auto cfg = write_config("g.json", R"({"kind": "growth", "seed": 4, "output_dir": "g",
        "model": {"beta": {"type": "power", "c0": 1, "c1": 1, "p": 1}},
        "params": {"system": "bbm", "law": "power-exp", "known_rate": 1, "horizon": 6, "reps": 6,
                   "max_particles": 100000}})");
    const auto r = run("run " + cfg.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto summary = json::parse(slurp(root / "g" / "summary.json"));
    ASSERT_TRUE(summary.contains("fit"));
    EXPECT_GT(summary["fit"]["q"].get<double>(), 1.5);
    EXPECT_LT(summary["fit"]["q"].get<double>(), 5.0);
    EXPECT_TRUE(fs::exists(root / "g" / "fit.csv"));
    EXPECT_TRUE(fs::exists(root / "g" / "plot.gp"));
}

TEST_F(Cli, VerifyRejectsUnknownSuite) {
    EXPECT_NE(run("verify medium").code, 0);
}

TEST(Runner, WorkerCountDoesNotChangeOutputs) {
    for (const char* text : {R"({"kind": "bbm", "seed": 9, "workers": 1,
               "model": {"beta": {"type": "power", "c0": 0.5, "c1": 1, "p": 1}},
               "params": {"horizon": 2, "reps": 6, "max_particles": 20000}})",
                             R"({"kind": "sbm", "seed": 9, "workers": 1,
               "model": {"beta": {"type": "constant", "value": 1}, "alpha": {"type": "constant", "value": 1}},
               "params": {"horizon": 1, "reps": 5, "n": 20, "snapshots": true}})",
                             R"({"kind": "tail", "seed": 2, "workers": 1,
               "params": {"ell": 1, "K": [1, 1.5, 2], "reps": 2000, "dt": 0.01, "batches": 4}})"}) {
        auto c = parse_config(std::string(text));
        const auto a = run_campaign(c, "", false);
        c.workers = 3;
        const auto b = run_campaign(c, "", false);
        ASSERT_EQ(a.exit_code, 0) << a.message;
        for (const auto& [name, content] : a.files) {
            if (name == "manifest.json" || name == "summary.json") continue;
            EXPECT_EQ(content, b.files.at(name)) << name;
        }
        EXPECT_EQ(a.manifest.digest(), b.manifest.digest());
    }
}

TEST(Runner, EveryCsvHasHeaderAndDigestTrailer) {
    auto c = parse_config(std::string(R"({"kind": "pde", "model": {"beta": {"type": "constant", "value": 1}},
        "params": {"t": 0.5, "radii": [5, 10], "tol": 1e-4}})"));
    const auto o = run_campaign(c, "", false);
    ASSERT_EQ(o.exit_code, 0) << o.message;
    for (const auto& [name, content] : o.files) {
        if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
        EXPECT_NE(content.find(",", 0), std::string::npos);
        const auto last = content.rfind("# manifest-digest: ");
        ASSERT_NE(last, std::string::npos) << name;
        EXPECT_EQ(content.find('\n', last), content.size() - 1) << name;
    }
}
