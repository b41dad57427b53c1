#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "icestring/cli.hpp"
#include "icestring/colouring_io.hpp"
#include "oracles.hpp"

using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "icestring");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = icestr::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<double> all_eigenvalues(const json& j) {
    std::vector<double> v;
    for (const auto& s : j["sectors"])
        for (const auto& e : s["eigenvalues"]) v.push_back(e.get<double>());
    return v;
}

}  // namespace

TEST_CASE("enumerate") {
    auto r = run({"enumerate", "--family", "fixed", "--N", "9", "--M", "6"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["size"] == 5005);
    r = run({"enumerate", "--family", "t11", "--m", "4", "--n", "7"});
    CHECK(json::parse(r.out)["size"] == 840);
    r = run({"enumerate", "--family", "fixed", "--N", "1", "--M", "1", "--list"});
    const json j = json::parse(r.out);
    CHECK(j["size"] == 2);
    CHECK(j["states"][0]["lambda"] == json::array({0}));
    CHECK(j["states"][1]["lambda"] == json::array({1}));
    r = run({"enumerate", "--family", "t12", "--m", "2", "--n", "3"});
    CHECK(r.code == 0);
}

TEST_CASE("exit codes") {
    CHECK(run({"enumerate", "--family", "fixed", "--N", "40", "--M", "20"}).code == 3);
    CHECK(run({"enumerate", "--family", "fixed", "--N", "3"}).code == 2);
    CHECK(run({"enumerate", "--family", "fixed", "--N", "3", "--M", "2", "--m", "2"}).code == 2);
    CHECK(run({"enumerate", "--family", "bogus", "--N", "3", "--M", "2"}).code == 2);
    CHECK(run({"spectrum", "--family", "t11", "--m", "2", "--n", "3", "--method", "secular"}).code == 2);
    CHECK(run({"spectrum", "--family", "t12", "--m", "2", "--n", "3", "--method", "bethe"}).code == 2);
    CHECK(run({"spectrum", "--family", "t11", "--m", "2", "--n", "3", "--a", "5"}).code == 2);
    CHECK(run({"spectrum", "--family", "fixed", "--N", "30", "--M", "30"}).code == 3);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("basis cap from the environment") {
    ::setenv("STRINGS_MAX_BASIS", "100", 1);
    CHECK(run({"enumerate", "--family", "fixed", "--N", "9", "--M", "6"}).code == 3);
    CHECK(run({"enumerate", "--family", "fixed", "--N", "3", "--M", "3"}).code == 0);
    ::setenv("STRINGS_MAX_BASIS", "many", 1);
    CHECK(run({"enumerate", "--family", "fixed", "--N", "3", "--M", "3"}).code == 2);
    ::unsetenv("STRINGS_MAX_BASIS");
}

TEST_CASE("spectrum") {
    auto r = run({"spectrum", "--family", "fixed", "--N", "1", "--M", "1", "--method", "bethe"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(oracle::max_gap(all_eigenvalues(j), {-1.0, 1.0}) <= 1e-12);
    CHECK(j["timing_ms"].is_null());

    r = run({"spectrum", "--family", "t11", "--m", "2", "--n", "3", "--method", "brute"});
    CHECK(all_eigenvalues(json::parse(r.out)).size() == 12);

    const auto brute = all_eigenvalues(json::parse(run({"spectrum", "--family", "t12", "--m", "2", "--n", "4"}).out));
    r = run({"spectrum", "--family", "t12", "--m", "2", "--n", "4", "--method", "secular"});
    REQUIRE(r.code == 0);
    CHECK(oracle::max_gap(brute, all_eigenvalues(json::parse(r.out))) < 1e-6);

    const auto bethe = all_eigenvalues(json::parse(run({"spectrum", "--family", "t11", "--m", "3", "--n", "3", "--method", "bethe"}).out));
    const auto dense = all_eigenvalues(json::parse(run({"spectrum", "--family", "t11", "--m", "3", "--n", "3"}).out));
    CHECK(oracle::max_gap(bethe, dense) < 1e-9);

    r = run({"spectrum", "--family", "t11", "--m", "2", "--n", "3", "--a", "1", "--b", "2", "--timing"});
    j = json::parse(r.out);
    REQUIRE(j["sectors"].size() == 1);
    CHECK(j["sectors"][0]["a"] == 1);
    CHECK(j["sectors"][0]["b"] == 2);
    CHECK(j["timing_ms"].is_number());
}

TEST_CASE("output is deterministic and both formats agree") {
    const std::vector<std::string> args{"spectrum", "--family", "t12", "--m", "2", "--n", "3"};
    const Run a = run(args), b = run(args);
    CHECK(a.out == b.out);
    const json j = json::parse(a.out);
    CHECK(json::parse(j.dump()) == j);

    auto csv_args = args;
    csv_args.insert(csv_args.end(), {"--format", "csv"});
    std::istringstream csv(run(csv_args).out);
    std::string line;
    std::getline(csv, line);
    CHECK(line == "a,b,index,eigenvalue");
    std::vector<double> from_csv;
    while (std::getline(csv, line)) from_csv.push_back(std::strtod(line.substr(line.rfind(',') + 1).c_str(), nullptr));
    CHECK(from_csv == all_eigenvalues(j));  // bit-for-bit
}

TEST_CASE("matrix export") {
    const std::string path = "cli_export_test.coo";
    REQUIRE(run({"spectrum", "--family", "fixed", "--N", "1", "--M", "1", "--export-matrix", path}).code == 0);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "0 1 1 0\n1 0 1 0\n");
    std::remove(path.c_str());
}

TEST_CASE("verify") {
    auto r = run({"verify", "--family", "t12", "--m", "2", "--n", "4"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    bool zap = false;
    for (const auto& c : j["checks"])
        if (c["name"].get<std::string>().find("forbidden-state annihilation") != std::string::npos) zap = c["passed"];
    CHECK(zap);

    r = run({"verify", "--family", "t11", "--m", "3", "--n", "3", "--inject-fault"});
    CHECK(r.code == 1);
    bool herm_failed = false;
    const json faulty = json::parse(r.out);
    for (const auto& c : faulty["checks"])
        if (c["name"].get<std::string>().find("hermitian") != std::string::npos && c["passed"] == false) herm_failed = true;
    CHECK(herm_failed);

    CHECK(run({"verify", "--family", "fixed", "--N", "3", "--M", "2"}).code == 0);

    // the alternative energy reading is reported but does not fail the run
    r = run({"verify", "--family", "t11", "--m", "3", "--n", "3"});
    CHECK(r.code == 0);
    bool alt_reported = false;
    const json t11 = json::parse(r.out);
    for (const auto& c : t11["checks"])
        if (c["informational"] == true) alt_reported = c["measured"].get<double>() > 1e-3;
    CHECK(alt_reported);
}

TEST_CASE("colouring files") {
    const std::string path = "cli_colouring_test.json";
    icestr::EdgeColouring c(3, 3);
    for (int i = 0; i < 3; ++i) c.set_eta(i, 1, 1);
    {
        std::ofstream os(path);
        os << icestr::dump_colouring({3, 3, icestr::Topology::Torus, 1.0}, c);
    }
    auto r = run({"colouring", "--file", path});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["ice"] == true);
    CHECK(j["strings"] == 1);
    CHECK(j["winding"]["mbar"] == 0);
    CHECK(j["winding"]["nbar"] == 1);
    {
        std::ofstream os(path);
        os << "{broken";
    }
    CHECK(run({"colouring", "--file", path}).code == 2);
    std::remove(path.c_str());
    CHECK(run({"colouring", "--file", "does-not-exist.json"}).code == 2);
}
