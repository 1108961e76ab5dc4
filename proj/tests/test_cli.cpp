#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "asep/cli.hpp"

using namespace asep;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run({"sample", "--ring", "4"}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"sample", "--ring", "4", "--counts", "3,3"}).code == kExitUsage);
    CHECK(run({"sample", "--ring", "4", "--counts", "1,1", "--q", "1"}).code == kExitUsage);
    CHECK(run({"verify", "--L", "3", "--counts", "1,1"}).code == kExitUsage);
    CHECK(run({"stats", "--mode", "nope"}).code == kExitUsage);
    CHECK(run({"stats", "--mode", "pairs", "--lambda", "0.7", "--mu", "0.6"}).code == kExitUsage);
    CHECK(run({"sample", "--help"}).code == kExitPass);
}

TEST_CASE("zero q on a full ring gives permutations") {
    const auto r = run({"sample", "--ring", "4", "--counts", "1,1,1,1", "--q", "0", "--n", "20", "--seed", "3"});
    REQUIRE(r.code == kExitPass);
    std::istringstream is(r.out);
    int lines = 0;
    for (std::string line; std::getline(is, line); ++lines) {
        std::istringstream ls(line);
        std::multiset<std::string> seen;
        for (std::string t; ls >> t;) seen.insert(t);
        CHECK(seen == std::multiset<std::string>{"1", "2", "3", "4"});
    }
    CHECK(lines == 20);
}

TEST_CASE("diagrams dump") {
    const auto r = run({"sample", "--ring", "5", "--counts", "1,2", "--q", "1/3", "--n", "2", "--dump-diagrams"});
    CHECK(r.code == kExitPass);
    CHECK(r.out.find("# sample 1") != std::string::npos);
}

TEST_CASE("verify small system") {
    const auto r = run({"verify", "--L", "3", "--counts", "1,1", "--q", "1/2"});
    CHECK(r.code == kExitPass);
    CHECK(r.out.find("tv weights oracle = 0 PASS") != std::string::npos);
    const auto m = run({"verify", "--L", "4", "--counts", "1,1,1", "--q", "0.5", "--methods", "mlq,oracle,matprod",
                        "--n", "20000", "--seed", "5"});
    CHECK(m.code == kExitPass);
    CHECK(m.out.find("chi2 mlq vs oracle") != std::string::npos);
}

TEST_CASE("verify symbolic prints the rotation classes") {
    const auto r = run({"verify", "--L", "4", "--counts", "1,1,1,1", "--symbolic", "--methods", "oracle,weights"});
    CHECK(r.code == kExitPass);
    CHECK(r.out.find("denominator (oracle): 96(1 + q)(1 + q + q^2)") != std::string::npos);
    for (const char* v : {"9 + 7q + 7q^2 + q^3", "3 + 9q + 9q^2 + 3q^3", "3 + 11q + 5q^2 + 5q^3",
                          "5 + 5q + 11q^2 + 3q^3", "1 + 7q + 7q^2 + 9q^3"})
        CHECK(r.out.find(std::string("  ") + v + "\n") != std::string::npos);
}

TEST_CASE("cap exceeded is a failure") {
    const auto r = run({"verify", "--L", "7", "--counts", "1,1,1,1,1,1,1", "--symbolic", "--methods", "oracle"});
    CHECK(r.code == kExitFail);
    CHECK(r.out.find("error") != std::string::npos);
}

TEST_CASE("stats modes") {
    const auto id = run({"stats", "--mode", "identity", "--alpha", "0.5", "--q", "0.5", "--terms", "60"});
    CHECK(id.code == kExitPass);
    const auto bad = run({"stats", "--mode", "identity", "--alpha", "0.9", "--q", "0.9", "--terms", "60"});
    CHECK(bad.code == kExitFail);
    const auto pairs = run({"stats", "--mode", "pairs", "--lambda", "0.3", "--mu", "0.6", "--q", "0.5", "--sites",
                            "2e5", "--seed", "7"});
    CHECK(pairs.code == kExitPass);
    CHECK(pairs.out.rfind("statistic,estimate,stderr,closed_form,z_score\n", 0) == 0);
    const auto convoy = run({"stats", "--mode", "convoy", "--x", "0.5", "--q", "0.3", "--steps", "1000", "--runs", "3"});
    CHECK(convoy.code == kExitPass);
}

TEST_CASE("manifest rerun reproduces output") {
    const auto dir = std::filesystem::temp_directory_path() / "asep_cli_test";
    std::filesystem::create_directories(dir);
    const std::string out = (dir / "s.txt").string();
    const auto r = run({"sample", "--ring", "6", "--counts", "2,1", "--q", "0.25", "--n", "50", "--seed", "42", "--out", out});
    REQUIRE(r.code == kExitPass);
    const std::string first = slurp(out);
    const Manifest m = Manifest::parse(slurp(out + ".manifest"));
    CHECK(m.entries.at("seed") == "42");
    CHECK(m.entries.at("command") == "sample");
    CHECK(m.entries.at("q") == "0.25");
    std::filesystem::remove(out);
    CHECK(run({"rerun", out + ".manifest"}).code == kExitPass);
    CHECK(slurp(out) == first);
    std::filesystem::remove_all(dir);
}

TEST_CASE("manifest round trip") {
    Manifest m;
    m.entries = {{"argv", "sample --ring 4"}, {"seed", "1"}};
    const Manifest back = Manifest::parse(m.serialize());
    CHECK(back.entries == m.entries);
    CHECK(back.argv() == std::vector<std::string>{"sample", "--ring", "4"});
    CHECK_THROWS_AS(Manifest::parse("garbage"), std::invalid_argument);
}
