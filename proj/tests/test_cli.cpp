#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fminlab/cli.hpp"
#include "fminlab/rotsym.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fminlab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "fminlab");
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("fminlab_cli_" + name); }

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("verify on the slice") {
    Run r = run({"verify", "--surface", "slice", "--identity", "all", "--samples", "100", "--tol", "1e-8",
                 "--no-timestamp"});
    REQUIRE(r.code == kExitOk);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["samples"] == 100);
    CHECK(!j.contains("timestamp"));
    REQUIRE(j["identities"].size() == 14);
    int skipped = 0;
    for (const auto& e : j["identities"]) {
        CHECK(!e["anchor"].get<std::string>().empty());
        if (e["status"] == "skipped") ++skipped;
        else CHECK(e["status"] == "pass");
    }
    CHECK(skipped == 3);

    Run ts = run({"verify", "--surface", "slice", "--samples", "5"});
    CHECK(nlohmann::json::parse(ts.out).contains("timestamp"));

    Run list = run({"verify", "--list-identities"});
    CHECK(list.code == 0);
    CHECK(list.out.find("SIMONS_FULL") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"bogus"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({"verify", "--surface", "nope"}).code == kExitUsage);
    CHECK(run({"verify", "--surface", "slice", "--identity", "FOO"}).code == kExitUsage);
    CHECK(run({"verify", "--surface", "slice", "--tol", "0"}).code == kExitUsage);
    CHECK(run({"verify", "--surface", "slice", "--samples", "x"}).code == kExitUsage);

    // residuals of order 1e-16 cannot meet a 1e-30 tolerance
    Run f = run({"verify", "--surface", "shrinker-sphere", "--n", "3", "--identity", "SHRINKER_A2", "--samples",
                 "10", "--tol", "1e-30"});
    CHECK(f.code == kExitCheckFailed);
    CHECK(f.err.find("FAIL SHRINKER_A2 on shrinker-sphere") != std::string::npos);
    CHECK(f.err.find("at u = (") != std::string::npos);

    // not f-minimal: the identities do not apply
    fs::path g = temp("graph.txt");
    {
        std::ofstream os(g);
        os << "@model cylinder:2\n0.3 + 0.1*sin(u1)\n";
    }
    Run pre = run({"verify", "--surface", "graph:" + g.string(), "--identity", "HEIGHT"});
    CHECK(pre.code == kExitCheckFailed);
    fs::remove(g);

    Run num = run({"generate", "--tstart", "1e200", "--n", "3", "--out", temp("blowup.json").string()});
    CHECK(num.code == kExitNumeric);
    CHECK_FALSE(fs::exists(temp("blowup.json")));
}

TEST_CASE("determinism and CSV") {
    std::vector<std::string> args = {"verify", "--surface", "equator-cylinder", "--n", "3", "--samples", "40",
                                     "--seed", "17", "--no-timestamp"};
    Run a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    args[7] = "18";
    CHECK(run(args).out != a.out);

    Run csv = run({"verify", "--surface", "slice", "--identity", "HEIGHT,CYL_DALPHA2", "--samples", "5",
                   "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(csv.out.rfind("identity,status,max_residual,tol,anchor\n", 0) == 0);
    CHECK(csv.out.find("HEIGHT,pass,") != std::string::npos);
}

TEST_CASE("config precedence") {
    fs::path cfg = temp("config.json");
    {
        std::ofstream os(cfg);
        os << R"({"surface": "shrinker-sphere", "n": 3, "samples": 7, "tol": 1e-9, "no-timestamp": true})";
    }
    Run r = run({"verify", "--config", cfg.string(), "--samples", "12"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["surface"] == "shrinker-sphere");
    CHECK(j["n"] == 3);
    CHECK(j["samples"] == 12); // flag wins
    CHECK(j["tol"] == 1e-9);   // file wins over default
    CHECK(!j.contains("timestamp"));
    {
        std::ofstream os(cfg);
        os << R"({"samples": "many"})";
    }
    CHECK(run({"verify", "--surface", "slice", "--config", cfg.string()}).code == kExitUsage);
    {
        std::ofstream os(cfg);
        os << "[1, 2";
    }
    CHECK(run({"verify", "--surface", "slice", "--config", cfg.string()}).code == kExitUsage);
    fs::remove(cfg);
    CHECK(run({"verify", "--surface", "slice", "--config", cfg.string()}).code == kExitUsage);
}

TEST_CASE("spectrum") {
    Run r = run({"spectrum", "--surface", "slice", "--n", "2", "--kmax", "10", "--grid", "2000"});
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    std::string header, first;
    std::getline(is, header);
    std::getline(is, first);
    CHECK(header == "mode,k,mu,multiplicity");
    std::vector<std::string> cells;
    std::stringstream fs_(first);
    for (std::string c; std::getline(fs_, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 4);
    CHECK(std::stod(cells[2]) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(cells[3] == "1");
    CHECK(r.out.find("# index=1") != std::string::npos);

    Run closed = run({"spectrum", "--surface", "slice", "--n", "3", "--kmax", "3", "--method", "closed",
                      "--format", "json", "--no-timestamp"});
    REQUIRE(closed.code == 0);
    auto j = nlohmann::json::parse(closed.out);
    CHECK(j["index"] == 1);
    CHECK(j["convention"] == "L_f u = -mu u");
    CHECK(run({"spectrum", "--surface", "slice", "--method", "magic"}).code == kExitUsage);
    CHECK(run({"spectrum", "--surface", "slice", "--grid", "50"}).code == kExitUsage);
}

TEST_CASE("generate then integrals") {
    fs::path p = temp("slice.json");
    Run g = run({"generate", "--shoot", "--tstart", "0", "--n", "3", "--out", p.string()});
    REQUIRE(g.code == 0);
    ProfileCurve P = load_profile(p.string());
    CHECK(P.closed);
    CHECK(P.max_abs_t() <= 1e-10);
    Run i = run({"integrals", "--profile", p.string(), "--no-timestamp"});
    REQUIRE(i.code == 0);
    auto j = nlohmann::json::parse(i.out);
    CHECK(j["pass"] == true);
    for (const char* k : {"r1", "r2", "r3"}) CHECK(j["lemma_residuals"][k].get<double>() <= 1e-6);
    CHECK(j["rayleigh_alpha"].get<double>() == doctest::Approx(-0.5).epsilon(1e-8));

    // an open profile is a failed precondition
    fs::path q = temp("open.json");
    CHECK(run({"generate", "--tstart", "0.3", "--n", "3", "--max-length", "2", "--out", q.string()}).code == 0);
    CHECK(run({"integrals", "--profile", q.string()}).code == kExitCheckFailed);
    CHECK(run({"integrals", "--profile", temp("missing.json").string()}).code == kExitUsage);
    fs::remove(p);
    fs::remove(q);
}

TEST_CASE("reports are written atomically") {
    fs::path out = temp("report.json");
    fs::remove(out);
    Run r = run({"verify", "--surface", "slice", "--samples", "5", "--out", out.string(), "--no-timestamp"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::string text = slurp(out);
    CHECK(nlohmann::json::parse(text)["pass"] == true);
    for (const auto& e : fs::directory_iterator(out.parent_path()))
        CHECK(e.path().filename().string().find("fminlab_cli_report.json.") == std::string::npos);
    // a directory in the way: the old file is untouched and the run fails
    fs::path dir = temp("dir_target");
    fs::create_directories(dir);
    Run bad = run({"verify", "--surface", "slice", "--samples", "5", "--out", dir.string()});
    CHECK(bad.code != 0);
    CHECK(fs::is_directory(dir));
    fs::remove_all(dir);
    fs::remove(out);
}

TEST_CASE("report") {
    Run r = run({"report", "--n", "2", "--samples", "20", "--grid", "400", "--kmax", "4", "--no-timestamp"});
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["slice_spectrum"]["index"] == 1);
}
