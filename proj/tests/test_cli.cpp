#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* p = std::getenv("HSCALE_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run_cli(const std::string& args) {
    std::string cmd = "\"" + cli_path() + "\" " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hscale_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("verify subcommand exits 0 and writes a report") {
    TempDir tmp;
    fs::path out = tmp.path / "v";
    CHECK(run_cli("verify --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "verify.txt"));
    std::string report = slurp(out / "verify.txt");
    CHECK(report.find("all checks passed") != std::string::npos);
    CHECK(fs::exists(out / "manifest.toml"));
}

TEST_CASE("smoothing study writes a CSV with the kappa_hat column") {
    TempDir tmp;
    fs::path out = tmp.path / "s";
    CHECK(run_cli("smoothing --rule apriori --s 0 --u 0.5 --deltas 3..8 --reps 2 "
                  "--resolution 256 --out " +
                  out.string()) == 0);
    std::string csv = slurp(out / "rates.csv");
    CHECK(csv.find("kappa_hat") != std::string::npos);
    CHECK(csv.find("apriori") != std::string::npos);
    CHECK(fs::exists(out / "rates.json"));
    CHECK(fs::exists(out / "rates.md"));
}

TEST_CASE("unknown flag exits 2") {
    CHECK(run_cli("--definitely-not-a-flag") == 2);
    CHECK(run_cli("smoothing --definitely-not-a-flag") == 2);
}

TEST_CASE("missing subcommand exits 2") { CHECK(run_cli("") == 2); }

TEST_CASE("configuration errors exit 2") {
    TempDir tmp;
    SECTION("bad rule name") { CHECK(run_cli("smoothing --rule upside-down") == 2); }
    SECTION("bad deltas range") { CHECK(run_cli("smoothing --deltas banana") == 2); }
    SECTION("nonexistent config file") {
        CHECK(run_cli("smoothing --config /no/such/file.toml") == 2);
    }
    SECTION("malformed config file") {
        fs::path cfg = tmp.path / "bad.toml";
        std::ofstream(cfg) << "[smoothing\nrule = apriori\n";
        CHECK(run_cli("smoothing --config " + cfg.string()) == 2);
    }
}

TEST_CASE("manifest round-trip reproduces byte-identical artifacts") {
    TempDir tmp;
    fs::path out1 = tmp.path / "r1", out2 = tmp.path / "r2";
    std::string base =
        "smoothing --rule simple --s 1 --reference hat --deltas 3..8 --reps 2 "
        "--resolution 256 --seed 99 ";
    REQUIRE(run_cli(base + "--out " + out1.string()) == 0);
    REQUIRE(run_cli("smoothing --config " + (out1 / "manifest.toml").string() + " --out " +
                    out2.string()) == 0);
    CHECK(slurp(out1 / "rates.csv") == slurp(out2 / "rates.csv"));
    CHECK(slurp(out1 / "rates.json") == slurp(out2 / "rates.json"));
    CHECK(slurp(out1 / "manifest.toml") == slurp(out2 / "manifest.toml"));
}

TEST_CASE("tables manifest round-trip reproduces byte-identical artifacts") {
    TempDir tmp;
    fs::path out1 = tmp.path / "t1", out2 = tmp.path / "t2";
    REQUIRE(run_cli("tables --which 6 --reps 2 --deltas 3..6 --resolution 60 --out " +
                    out1.string()) == 0);
    REQUIRE(run_cli("tables --config " + (out1 / "manifest.toml").string() + " --out " +
                    out2.string()) == 0);
    CHECK(slurp(out1 / "table6.csv") == slurp(out2 / "table6.csv"));
    CHECK(slurp(out1 / "table6.json") == slurp(out2 / "table6.json"));
    CHECK(slurp(out1 / "manifest.toml") == slurp(out2 / "manifest.toml"));
}

TEST_CASE("print-config echoes the effective configuration without running") {
    TempDir tmp;
    fs::path out = tmp.path / "pc";
    std::string cmd = "\"" + cli_path() + "\" smoothing --print-config --out " + out.string() +
                      " > " + (tmp.path / "cfg.txt").string() + " 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::string text = slurp(tmp.path / "cfg.txt");
    CHECK(text.find("[smoothing]") != std::string::npos);
    CHECK(text.find("rule = ") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "rates.csv"));
}
