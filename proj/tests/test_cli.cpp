#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "salb/bench.hpp"
#include "salb/instance.hpp"

using namespace salb;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err, "off");
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(SALB_DATA_DIR) + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "salb_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("solve the chain") {
    auto r = run({"solve", data("chain.native")});
    CHECK(r.code == cli::exit_ok);
    CHECK(r.out.find("1 1\n2 2\n3 3\n") == 0);
    CHECK(r.out.find("stations=3 ") != std::string::npos);
    CHECK(r.out.find("status=optimal") != std::string::npos);
}

TEST_CASE("solve every mode and cut family gives the same station count") {
    for (const char* mode : {"hybrid", "ip", "cp"})
        for (const char* cuts : {"none", "standard", "all"}) {
            auto r = run({"solve", data("synth_8.native"), "--mode", mode, "--cuts", cuts});
            CAPTURE(mode);
            CAPTURE(cuts);
            CHECK(r.code == cli::exit_ok);
            CHECK(r.out.find("stations=4 ") != std::string::npos);
        }
}

TEST_CASE("scholl input needs a cycle time") {
    CHECK(run({"solve", data("chain.in2"), "--format", "scholl", "--cycle-time", "5"}).code == cli::exit_ok);
    CHECK(run({"solve", data("chain.in2"), "--format", "scholl"}).code == cli::exit_error);
}

TEST_CASE("too few stations exits with the infeasible code") {
    auto r = run({"solve", data("chain.native"), "--stations", "2"});
    CHECK(r.code == cli::exit_infeasible);
    CHECK(r.out.find("infeasible") != std::string::npos);
}

TEST_CASE("malformed input reports the line") {
    const auto p = scratch("bad.native");
    std::ofstream(p) << "3 3\n5 5 5\n4 *\nfour *\n";
    auto r = run({"solve", p.string()});
    CHECK(r.code == cli::exit_error);
    CHECK(r.err.find("line 4") != std::string::npos);
    CHECK(run({"solve", scratch("missing.native").string()}).code == cli::exit_error);
    CHECK(run({"solve", data("chain.native"), "--mode", "fast"}).code == cli::exit_error);
}

TEST_CASE("--out writes the solution file") {
    const auto p = scratch("chain.sol");
    std::filesystem::remove(p);
    auto r = run({"solve", data("chain.native"), "--out", p.string()});
    CHECK(r.code == cli::exit_ok);
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str().find("1 1\n2 2\n3 3\nstations=3 ") == 0);
    CHECK(r.out.find("1 1\n") == std::string::npos);
}

TEST_CASE("reduce prints a monotone row") {
    auto r = run({"reduce", data("synth_12.native")});
    REQUIRE(r.code == cli::exit_ok);
    const auto row = parse_row(r.out.substr(0, r.out.find('\n')));
    CHECK(row.initial == 48);
    CHECK(row_violations(row).empty());
    auto h = run({"reduce", data("chain.native"), "--header", "--cuts", "standard"});
    CHECK(h.out.find(bench_header()) == 0);
}

TEST_CASE("gen is deterministic per seed") {
    auto a = run({"gen", "--tasks", "12", "--seed", "5", "--density", "0.3"});
    auto b = run({"gen", "--tasks", "12", "--seed", "5", "--density", "0.3"});
    auto c = run({"gen", "--tasks", "12", "--seed", "6", "--density", "0.3"});
    REQUIRE(a.code == cli::exit_ok);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    const Instance inst = parse_instance(a.out, InstanceFormat::native);
    CHECK(inst.n == 12);
    CHECK(run({"gen", "--tasks", "0"}).code == cli::exit_error);
    CHECK(run({"gen", "--tasks", "5", "--time-range", "9..2"}).code == cli::exit_error);
}

TEST_CASE("bench over a small manifest") {
    const auto dir = scratch("bench");
    std::filesystem::create_directories(dir);
    std::filesystem::copy_file(data("chain.native"), dir / "chain.native", std::filesystem::copy_options::overwrite_existing);
    std::ofstream(dir / "manifest.txt") << "# name format CT m\nchain.native native - -\nabsent.native native - -\n";
    auto r = run({"bench", dir.string(), "--jobs", "2"});
    CHECK(r.code == cli::exit_ok);
    CHECK(r.err.find("absent.native") != std::string::npos);
    const auto rows = r.out.substr(r.out.find("# Rows"));
    CHECK(rows.find("chain.native\t3\t5\t3\t9\t9\t3\t3\t") != std::string::npos);

    std::ofstream(dir / "manifest.txt") << "absent.native native - -\n";
    CHECK(run({"bench", dir.string()}).code == cli::exit_error);
}
