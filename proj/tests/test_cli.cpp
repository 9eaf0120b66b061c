#include <filesystem>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "gmodk/cli.hpp"

using namespace gmodk;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

// One generated file per process, shared across the cases below.
const std::string& tower_path(int64_t q = 19, const std::string& style = "totally_ramified") {
    static std::map<std::string, std::string> cache;
    std::string key = std::to_string(q) + style;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fs::path p = fs::temp_directory_path() / ("gmodk-cli-" + key + ".twr");
    RunResult r = run_cli({"lfgen", "--p", "3", "--q", std::to_string(q), "--n", "1", "--m", "2",
                           "--style", style, "--out", p.string()});
    REQUIRE(r.code == 0);
    return cache.emplace(key, p.string()).first->second;
}

}  // namespace

TEST_CASE("help exits zero and usage errors exit one", "[cli]") {
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"decompose"}).code == 1);  // missing required options
    CHECK(run_cli({"check"}).code == 1);
}

TEST_CASE("check reports every axiom and exits by verdict", "[cli]") {
    RunResult r = run_cli({"check", tower_path(), "--strict"});
    CHECK(r.code == 0);
    CHECK(r.out.find("shape PASS") != std::string::npos);
    CHECK(r.out.find("lms_sequence PASS") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);

    RunResult plain = run_cli({"check", tower_path()});
    CHECK(plain.code == 0);
    CHECK(plain.out.find("lms_sequence") == std::string::npos);
}

TEST_CASE("missing and malformed files map to exit one", "[cli]") {
    CHECK(run_cli({"check", "/nonexistent/x.twr"}).code == 1);
    fs::path bad = fs::temp_directory_path() / "gmodk-cli-bad.twr";
    {
        std::ofstream f(bad);
        f << "not a tower\n";
    }
    RunResult r = run_cli({"check", bad.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("decompose prints ascending summands and a frozen JSON shape", "[cli]") {
    RunResult r = run_cli({"decompose", tower_path(), "--level", "1", "--degree", "1"});
    CHECK(r.code == 0);
    CHECK(r.out == "A_1 x 2\n");

    RunResult j = run_cli({"decompose", tower_path(), "--level", "1", "--degree", "1", "--json"});
    CHECK(j.code == 0);
    CHECK(j.out == "{\"multiplicities\":{\"1\":2},\"dim\":2}\n");

    RunResult q13 = run_cli({"decompose", tower_path(13), "--level", "1", "--degree", "1"});
    CHECK(q13.out == "A_2 x 1\n");

    RunResult oob = run_cli({"decompose", tower_path(), "--level", "5", "--degree", "1"});
    CHECK(oob.code == 1);
    CHECK(oob.err.find("level out of range") != std::string::npos);
}

TEST_CASE("gamma lists the family generators", "[cli]") {
    RunResult r = run_cli({"gamma", tower_path(13), "--level", "1", "--degree", "2"});
    CHECK(r.code == 0);
    CHECK(r.out == "gamma level=1 degree=2 dim=1\nZ_0 x 1\n  [0 1]\n");
}

TEST_CASE("theorem1 prints verdict lines", "[cli]") {
    RunResult r = run_cli({"theorem1", tower_path(13), "--degree", "1"});
    CHECK(r.code == 0);
    CHECK(r.out == "A_2 x 1\ngap PASS\ncollapse PASS\n");
}

TEST_CASE("theorem2 prints clauses or a named refusal", "[cli]") {
    RunResult r = run_cli({"theorem2", tower_path(), "--degree", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("A_1 x 2\n") == 0);
    CHECK(r.out.find("sum_direct_and_full PASS") != std::string::npos);
    CHECK(r.out.find("fixed_norms_identity PASS") != std::string::npos);

    RunResult refuse = run_cli({"theorem2", tower_path(13), "--degree", "1"});
    CHECK(refuse.code == 2);
    CHECK(refuse.err.find("embeddable: tower not embeddable") != std::string::npos);
}

TEST_CASE("exceptional prints the frozen q=13 search result", "[cli]") {
    RunResult r = run_cli({"exceptional", tower_path(13)});
    CHECK(r.code == 0);
    CHECK(r.out == "candidate [1 0]\nindex 0\nembeddable false\nt 1\n");

    RunResult u = run_cli({"exceptional", tower_path(19)});
    CHECK(u.out.find("index -inf\nembeddable true") != std::string::npos);
}

TEST_CASE("lfgen validates its style and arithmetic", "[cli]") {
    fs::path p = fs::temp_directory_path() / "gmodk-cli-lfgen-reject.twr";
    RunResult bad_style = run_cli({"lfgen", "--p", "3", "--q", "19", "--n", "1", "--m", "2",
                                   "--style", "split", "--out", p.string()});
    CHECK(bad_style.code == 1);
    CHECK(bad_style.err.find("unknown style 'split'") != std::string::npos);

    RunResult bad_q = run_cli({"lfgen", "--p", "3", "--q", "11", "--n", "1", "--m", "2", "--out",
                               p.string()});
    CHECK(bad_q.code == 1);

    RunResult alias = run_cli({"lfgen", "--p", "3", "--q", "19", "--n", "1", "--m", "2", "--style",
                               "ramified", "--out", p.string()});
    CHECK(alias.code == 0);
    CHECK(alias.out == "wrote " + p.string() + "\n");
}

TEST_CASE("sum writes the file and reports lost exactness", "[cli]") {
    fs::path p = fs::temp_directory_path() / "gmodk-cli-sum.twr";
    RunResult r = run_cli({"sum", tower_path(), tower_path(), "--out", p.string()});
    CHECK(r.code == 2);
    CHECK(r.out == "wrote " + p.string() + "\n");
    CHECK(r.err.find("kummer_exactness FAIL") != std::string::npos);
    RunResult d = run_cli({"decompose", p.string(), "--level", "1", "--degree", "1"});
    CHECK(d.out == "A_1 x 4\n");
}

TEST_CASE("stdout is identical across repeated runs", "[cli]") {
    std::vector<std::string> cmd = {"theorem2", tower_path(), "--degree", "2"};
    RunResult a = run_cli(cmd);
    RunResult b = run_cli(cmd);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
}
