#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FRACTHJ_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = path / name;
        std::ofstream(p) << text;
        return p;
    }
};

}  // namespace

TEST_CASE("successful run exits 0 and writes the output files") {
    TempDir d("ok");
    const auto cfg = d.write("c.json",
        R"({"kind":"ml-table","ml":{"alpha":0.5,"b":1.0,"z_values":[0.0,-1.0]}})");
    const fs::path out = d.path / "out";
    CHECK(run_cli("ml-table --config " + cfg.string() + " --out " + out.string() +
                  " --quiet") == 0);
    CHECK(fs::exists(out / "solution.csv"));
    CHECK(fs::exists(out / "diagnostics.csv"));
    CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("invalid config exits 2 without writing outputs") {
    TempDir d("bad");
    const auto cfg = d.write("c.json", R"({"kind":"heat","beta":1.2})");
    const fs::path out = d.path / "out";
    CHECK(run_cli("heat --config " + cfg.string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out / "solution.csv"));
    CHECK_FALSE(fs::exists(out / "manifest.json"));
}

TEST_CASE("unparsable config and missing file exit 2") {
    TempDir d("parse");
    const auto cfg = d.write("c.json", "{not json");
    CHECK(run_cli("heat --config " + cfg.string()) == 2);
    CHECK(run_cli("heat --config " + (d.path / "absent.json").string()) == 2);
}

TEST_CASE("kind mismatch between CLI and config exits 2") {
    TempDir d("mismatch");
    const auto cfg = d.write("c.json",
        R"({"kind":"ml-table","ml":{"alpha":0.5,"b":1.0,"z_values":[0.0]}})");
    CHECK(run_cli("heat --config " + cfg.string()) == 2);
}

TEST_CASE("advective step restriction exits 4 with an error record") {
    TempDir d("stab");
    const auto cfg = d.write("c.json", R"({
        "kind":"fp","beta":0.6,"n":32,"steps":8,"t_final":0.5,
        "rho_tau":[{"coef":1.0},{"trig":"cos","mode":1,"coef":0.5}],
        "drift":[[{"trig":"sin","mode":1,"coef":1.5}]],
        "solver":{"scheme":"upwind"}})");
    const fs::path out = d.path / "out";
    CHECK(run_cli("fp --config " + cfg.string() + " --out " + out.string() +
                  " --quiet") == 4);
    REQUIRE(fs::exists(out / "error.json"));
    nlohmann::json rec;
    std::ifstream(out / "error.json") >> rec;
    CHECK(rec["error"] == "step_restriction");
    CHECK(rec["exit_code"] == 4);
}

TEST_CASE("non-contracting solve exits 3 with an error record") {
    TempDir d("div");
    const auto cfg = d.write("c.json", R"({
        "kind":"hj","beta":0.5,"n":16,"steps":32,"t_final":1.5,
        "hamiltonian":{"kind":"power","gamma":3.0},
        "u0":[{"trig":"cos","mode":1,"coef":2.0}],
        "V":[{"trig":"cos","mode":1,"coef":40.0,"t_power":0.5}]})");
    const fs::path out = d.path / "out";
    CHECK(run_cli("hj --config " + cfg.string() + " --out " + out.string() +
                  " --quiet") == 3);
    REQUIRE(fs::exists(out / "error.json"));
    nlohmann::json rec;
    std::ifstream(out / "error.json") >> rec;
    CHECK(rec["error"] == "picard_divergence");
}

TEST_CASE("missing required arguments exit nonzero") {
    CHECK(run_cli("") != 0);
    CHECK(run_cli("heat") != 0);
}
