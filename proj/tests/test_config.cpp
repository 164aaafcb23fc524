#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uvclt/commands.hpp"
#include "uvclt/config.hpp"
#include "uvclt/errors.hpp"

using namespace uvclt;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("config");

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "uvclt_config_tests";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

const char* kMinimalConfig = R"({
  "model": {
    "noise": {"name": "rademacher"},
    "variances": {"rule": "constant", "sigma": 1.0},
    "band": {"rule": "constant", "lower": 0.8, "upper": 1.2},
    "horizon": 16
  },
  "terminal": {"name": "cos"}
})";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal config loads with defaults") {
    const auto path = write_temp("minimal.json", kMinimalConfig);
    const RunConfig cfg = load_config(path.string());
    CHECK(cfg.model.horizon == 16);
    CHECK(cfg.model.band.limit_upper() == 1.2);
    CHECK(cfg.terminal.name() == "cos");
    CHECK(cfg.pde_dx == 0.01);
    CHECK(cfg.pde_theta == 0.5);
    CHECK(cfg.dp_candidates == 21);
    CHECK(cfg.dp_n_list == std::vector<int>{16});
    CHECK(cfg.mc_horizon == 16);
    CHECK(cfg.format == OutputFormat::csv);
    CHECK_FALSE(cfg.config_hash.empty());
    // Auto half-width: 6 * 1.2 + 2.
    CHECK(cfg.make_pde_grid(1.2).half_width() == doctest::Approx(9.2).epsilon(1e-9));
}

TEST_CASE("unknown keys are hard errors") {
    const auto path = write_temp("unknown.json", R"({
      "model": {
        "noise": {"name": "rademacher"},
        "band": {"rule": "constant", "lower": 0.8, "upper": 1.2},
        "horizon": 4,
        "extra_key": 1
      }
    })");
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);
    const auto top = write_temp("unknown_top.json", R"({"model": {"noise": {"name": "rademacher"},
      "band": {"rule": "constant", "lower": 0.8, "upper": 1.2}, "horizon": 4}, "bogus": {}})");
    CHECK_THROWS_AS(load_config(top.string()), ConfigError);
}

TEST_CASE("missing band block is a config error") {
    const auto path = write_temp("noband.json", R"({
      "model": {"noise": {"name": "rademacher"}, "horizon": 4}
    })");
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);
}

TEST_CASE("malformed json and bad values are config errors") {
    const auto broken = write_temp("broken.json", "{ not json");
    CHECK_THROWS_AS(load_config(broken.string()), ConfigError);
    const auto bad_band = write_temp("badband.json", R"({
      "model": {"noise": {"name": "rademacher"},
                "band": {"rule": "constant", "lower": 1.5, "upper": 1.0}, "horizon": 4}
    })");
    CHECK_THROWS_AS(load_config(bad_band.string()), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("commands write byte-identical output on repeat runs") {
    const fs::path out_dir = fs::temp_directory_path() / "uvclt_config_tests" / "repeat";
    fs::remove_all(out_dir);
    const auto path = write_temp("repeat.json", std::string(R"({
      "model": {
        "noise": {"name": "rademacher"},
        "band": {"rule": "constant", "lower": 0.8, "upper": 1.2},
        "horizon": 8
      },
      "check": {"n_list": [4, 8]},
      "mc": {"paths": 2000, "seed": 5},
      "output": {"dir": ")") + (out_dir / "a").string() + R"("}
    })");

    RunConfig cfg = load_config(path.string());
    std::ostringstream sink;
    cmd_check(cfg, false, sink);
    cmd_simulate(cfg, sink);
    const std::string check_a = read_file(out_dir / "a" / "check.csv");
    const std::string sim_a = read_file(out_dir / "a" / "simulate.csv");

    cfg.out_dir = (out_dir / "b").string();
    cmd_check(cfg, false, sink);
    cmd_simulate(cfg, sink);
    CHECK(check_a == read_file(out_dir / "b" / "check.csv"));
    CHECK(sim_a == read_file(out_dir / "b" / "simulate.csv"));
    CHECK(check_a.rfind("# tool:", 0) == 0);
    CHECK(check_a.find("config_hash") != std::string::npos);
}

TEST_CASE("json format mirrors the csv rows") {
    const fs::path out_dir = fs::temp_directory_path() / "uvclt_config_tests" / "json";
    fs::remove_all(out_dir);
    const auto path = write_temp("json.json", std::string(R"({
      "model": {
        "noise": {"name": "three_point"},
        "band": {"rule": "constant", "lower": 0.5, "upper": 1.5},
        "horizon": 4
      },
      "output": {"dir": ")") + out_dir.string() + R"(", "format": "json"}
    })");
    RunConfig cfg = load_config(path.string());
    std::ostringstream sink;
    cmd_check(cfg, false, sink);
    const std::string text = read_file(out_dir / "check.json");
    CHECK(text.find("\"meta\"") != std::string::npos);
    CHECK(text.find("\"rows\"") != std::string::npos);
    CHECK(text.find("\"n\": 4") != std::string::npos);
}

TEST_CASE("shipped experiment configs load cleanly") {
    const fs::path configs = fs::path(UVCLT_SOURCE_DIR) / "configs";
    REQUIRE(fs::exists(configs));
    int count = 0;
    for (const auto& entry : fs::directory_iterator(configs)) {
        if (entry.path().extension() != ".json") continue;
        CHECK_NOTHROW(load_config(entry.path().string()));
        ++count;
    }
    CHECK(count >= 6);
}

TEST_CASE("strict converge flags an out-of-order sweep with a numerical error") {
    const fs::path out_dir = fs::temp_directory_path() / "uvclt_config_tests" / "strict";
    fs::remove_all(out_dir);
    const auto path = write_temp("strict.json", std::string(R"({
      "model": {
        "noise": {"name": "rademacher"},
        "band": {"rule": "constant", "lower": 0.8, "upper": 1.2},
        "horizon": 64
      },
      "terminal": {"name": "cos"},
      "pde": {"dx": 0.02},
      "dp": {"n_list": [64, 4], "dx": 0.02, "candidates": 5},
      "output": {"dir": ")") + out_dir.string() + R"("}
    })");
    RunConfig cfg = load_config(path.string());
    std::ostringstream sink;
    CHECK_THROWS_AS(cmd_converge(cfg, true, sink), NumericalError);
    // Without --strict the same sweep is reported, not rejected.
    CHECK_NOTHROW(cmd_converge(cfg, false, sink));
}

TEST_CASE("pde dump and mollify demo write their side files") {
    const fs::path out_dir = fs::temp_directory_path() / "uvclt_config_tests" / "dumps";
    fs::remove_all(out_dir);
    const auto path = write_temp("dumps.json", std::string(R"({
      "model": {
        "noise": {"name": "rademacher"},
        "band": {"rule": "constant", "lower": 0.5, "upper": 1.0},
        "horizon": 16
      },
      "terminal": {"name": "clipped_ramp"},
      "pde": {"dx": 0.05, "dump": "slice"},
      "mollify": {"epsilon": 0.2},
      "output": {"dir": ")") + out_dir.string() + R"("}
    })");
    RunConfig cfg = load_config(path.string());
    std::ostringstream sink;
    cmd_pde(cfg, sink);
    CHECK(fs::exists(out_dir / "pde.csv"));
    CHECK(fs::exists(out_dir / "pde_slice.csv"));
    const std::string slice = read_file(out_dir / "pde_slice.csv");
    CHECK(slice.find("t,x,v") != std::string::npos);

    cmd_mollify_demo(cfg, sink);
    CHECK(fs::exists(out_dir / "mollify-demo.csv"));
    const std::string demo = read_file(out_dir / "mollify-demo.csv");
    CHECK(demo.find("x,f,f_eps,g_eps") != std::string::npos);
    CHECK(demo.find("achieved_deviation") != std::string::npos);
}

TEST_CASE("policy override is applied") {
    const auto path = write_temp("policy.json", kMinimalConfig);
    RunConfig cfg = load_config(path.string());
    CliOverrides overrides;
    overrides.policy = std::string("constant:0.9");
    apply_overrides(cfg, overrides);
    CHECK(cfg.mc_policy == "constant:0.9");
}

TEST_CASE("cli binary: exit codes for config failures and success") {
    const fs::path out_dir = fs::temp_directory_path() / "uvclt_config_tests" / "cli";
    fs::remove_all(out_dir);
    const auto good = write_temp("cli_good.json", kMinimalConfig);
    const auto bad = write_temp("cli_bad.json", R"({
      "model": {"noise": {"name": "rademacher"}, "horizon": 4}
    })");

    const std::string binary = UVCLT_CLI_BINARY;
    const auto run = [&](const std::string& args) {
        const std::string cmd = binary + " " + args + " > /dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    CHECK(run("check --config " + good.string() + " --out " + (out_dir / "ok").string()) == 0);
    CHECK(run("check --config " + bad.string()) == 2);
    CHECK(run("check --config /does/not/exist.json") == 2);
    // viscosity without an epsilon list in the pde block
    CHECK(run("viscosity --config " + good.string() + " --out " + (out_dir / "v").string()) == 2);
    CHECK(fs::exists(out_dir / "ok" / "check.csv"));
}

TEST_SUITE_END();
