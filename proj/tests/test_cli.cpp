#include "quadrank/cache.hpp"
#include "quadrank/config.hpp"
#include "quadrank/errors.hpp"
#include "quadrank/run.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace quadrank;
using config::parse_config;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        char tmpl[] = "/tmp/quadrank-test-XXXXXX";
        path = mkdtemp(tmpl);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Outcome {
    int code;
    std::string out;
};

Outcome run_args(std::vector<std::string> args, const fs::path& cache) {
    args.push_back("--cache-dir");
    args.push_back(cache.string());
    std::ostringstream out, log;
    auto cfg = parse_config(args);
    int code = run(cfg, out, log);
    return {code, out.str()};
}

int shell(const std::string& cmd) {
    int st = std::system(cmd.c_str());
    if (WIFEXITED(st)) return WEXITSTATUS(st);
    return 128 + (WIFSIGNALED(st) ? WTERMSIG(st) : 0);
}

const std::string kCli = QUADRANK_CLI_PATH;

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("parse_config: documented inputs") {
    auto c = parse_config({"kfree", "360", "--k", "3"});
    CHECK(c.subcommand == "kfree");
    CHECK(c.number == "360");
    CHECK(c.k == 3);

    auto g = parse_config({"classgroup", "--disc", "-23"});
    CHECK(g.disc == "-23");
    CHECK(parse_config({"factor", "-12"}).number == "-12");

    CHECK_THROWS_AS(parse_config({"census", "--form", "1,0,0,1,0", "--x", "16"}), usage_error);
    CHECK_THROWS_AS(parse_config({"census", "--form", "1,0,1", "--degree", "4", "--x", "16"}), usage_error);
    CHECK_THROWS_AS(parse_config({"verify", "--curve", "lsw-genus4", "--m", "1", "--rank", "3", "--disc-bound", "100"}),
                    usage_error);
    CHECK_THROWS_AS(parse_config({"frobnicate"}), usage_error);
    CHECK_THROWS_AS(parse_config({"kfree", "360", "--k", "3", "--bogus"}), usage_error);

    auto v = parse_config({"verify", "--curve", "lsw-genus4", "--m", "3", "--rank", "3", "--disc-bound", "1e13"});
    CHECK(v.disc_bound == 10000000000000ull);
    CHECK(config::parse_count("2.5e3") == 2500);
    CHECK_THROWS_AS(config::parse_count("2.55e1"), usage_error);

    std::string help;
    auto h = parse_config({"--help"}, &help);
    CHECK(h.subcommand == "help");
    CHECK(help.find("census") != std::string::npos);
}

TEST_CASE("config hash ignores run control") {
    auto a = parse_config({"census", "--form", "1,0,0,1,0", "--degree", "4", "--x", "1000"});
    auto b = parse_config({"census", "--form", "1,0,0,1,0", "--degree", "4", "--x", "1000", "--kill-after", "2",
                           "--cache-dir", "/tmp/x", "--workers", "3"});
    auto c = parse_config({"census", "--form", "1,0,0,1,0", "--degree", "4", "--x", "10000"});
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
}

TEST_CASE("config file supplies defaults; command line wins") {
    TempDir t;
    auto file = t.path / "run.conf";
    std::ofstream(file) << "# census settings\nform = 1,0,0,1,0\ndegree = 4\nx = 100000\nk = 2\n";
    auto c = parse_config({"census", "--config", file.string(), "--x", "1000"});
    CHECK(c.form == "1,0,0,1,0");
    CHECK(c.degree == 4);
    CHECK(c.x == 1000);

    std::ofstream(t.path / "bad.conf") << "colour = blue\n";
    CHECK_THROWS_AS(parse_config({"census", "--config", (t.path / "bad.conf").string(), "--x", "10"}), usage_error);
}

TEST_CASE("run: small commands") {
    TempDir t;
    CHECK(run_args({"kfree", "360", "--k", "3"}, t.path).out == "t=45 z=2\n");
    CHECK(run_args({"kfree", "24", "--k", "3"}, t.path).out == "t=3 z=2\n");
    CHECK(run_args({"factor", "360"}, t.path).out.rfind("360 = ", 0) == 0);

    auto cg = nlohmann::json::parse(run_args({"classgroup", "--disc", "-23"}, t.path).out);
    CHECK(cg["h"] == 3);
    CHECK(cg["rk3"] == 1);
    CHECK(cg["group"] == "form");
    auto narrow = nlohmann::json::parse(run_args({"classgroup", "--disc", "229"}, t.path).out);
    CHECK(narrow["group"] == "narrow");
    CHECK(narrow["divisors"] == nlohmann::json::array({3}));

    auto gd = nlohmann::json::parse(run_args({"gadget", "--places", "inf,2", "--epsilon", "1/10"}, t.path).out);
    CHECK(gd.is_object());

    auto fields = run_args({"fields", "--curve", "family:2:2", "--bad-primes", "2,3", "--limit", "3"}, t.path).out;
    auto first = nlohmann::json::parse(fields.substr(0, fields.find('\n')));
    CHECK(first["t"] == -140910);
}

TEST_CASE("class-group cache round trip and corruption") {
    TempDir t;
    run_args({"classgroup", "--disc", "-84"}, t.path);
    {
        cache::ClassGroupCache cc(t.path);
        CHECK(cc.loaded() == 1);
        CHECK(cc.memory().find(-84).has_value());
    }
    // a forged entry and a torn line are both dropped
    {
        std::ofstream f(t.path / "classgroup.jsonl", std::ios::app);
        f << R"({"v":1,"d":"-23","divisors":[4]})" << "\n{\"v\":1,\"d\":";
    }
    cache::ClassGroupCache cc(t.path);
    CHECK(cc.loaded() == 1);
    CHECK_FALSE(cc.memory().find(-23).has_value());
    auto out = run_args({"classgroup", "--disc", "-23"}, t.path).out;
    CHECK(nlohmann::json::parse(out)["h"] == 3);
}

TEST_CASE("factor cache round trip") {
    TempDir t;
    mpz_class n("600851475143");
    {
        cache::FactorCache fc(t.path);
        fc.factor(n);
    }
    cache::FactorCache fc(t.path);
    REQUIRE(fc.find(n).has_value());
    CHECK(arith::to_string(*fc.find(n)) == arith::to_string(arith::factor(n)));
}

TEST_CASE("exit codes from the binary") {
    TempDir t;
    const std::string env = "QUADRANK_CACHE_DIR=" + t.path.string() + " ";
    CHECK(shell(env + kCli + " kfree 360 --k 3 >/dev/null 2>&1") == 0);
    CHECK(shell(env + kCli + " nonsense >/dev/null 2>&1") == 2);
    CHECK(shell(env + kCli + " classgroup --disc -16 >/dev/null 2>&1") == 2);
    CHECK(shell(env + kCli + " classgroup --disc -200000000000000000003 >/dev/null 2>&1") == 3);
    CHECK(shell(env + kCli + " census --form 1,0,0,1,0 --degree 4 --x 100000 --halt-after 2 >/dev/null 2>&1") == 4);
    CHECK(fs::exists(t.path));
}

TEST_CASE("census resumes after a kill") {
    TempDir a, b;
    const std::string args = " census --form 1,0,0,1,0 --degree 4 --x 1000000";
    auto full = a.path / "full.csv";
    auto part = b.path / "part.csv";
    CHECK(shell(kCli + args + " --cache-dir " + a.path.string() + " --output " + full.string() + " 2>/dev/null") == 0);
    CHECK(shell(kCli + args + " --cache-dir " + b.path.string() + " --output " + part.string() +
                " --kill-after 3 2>/dev/null") == 128 + 9);
    CHECK_FALSE(fs::exists(part));
    CHECK(shell(kCli + args + " --cache-dir " + b.path.string() + " --output " + part.string() + " 2>/dev/null") == 0);
    CHECK(slurp(full) == slurp(part));
    CHECK(slurp(full).find("1000000,") != std::string::npos);
}

}  // TEST_SUITE
