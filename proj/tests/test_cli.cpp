#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crnerg/cli.hpp"

using namespace crnerg;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args, bool color = false) {
    args.insert(args.begin(), "crnerg");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err, color);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(CRNERG_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("analyze exit codes follow the verdict") {
    const auto sir = cli({"analyze", data("sir.crn"), "--mode", "structural"});
    CHECK(sir.code == kExitOk);
    const auto j = nlohmann::json::parse(sir.out);
    CHECK(j["verdict"] == "certified");
    CHECK(j["verification"]["ok"] == true);

    const auto toy = cli({"analyze", data("toy_case2.crn"), "--mode", "structural"});
    CHECK(toy.code == kExitRefuted);
    CHECK(nlohmann::json::parse(toy.out).contains("counterexample"));

    CHECK(cli({"analyze", data("pure_birth.crn"), "--mode", "nominal"}).code == kExitRefuted);
    CHECK(cli({"analyze", data("birth_death.crn")}).code == kExitOk);
}

TEST_CASE("analyze errors map to documented exit codes") {
    CHECK(cli({"analyze", "does-not-exist.crn"}).code == kExitNoInput);
    CHECK(cli({"analyze", data("sir.crn"), "--mode", "bogus"}).code == kExitUsage);
    CHECK(cli({"analyze", data("sir.crn"), "--unknown-flag"}).code == kExitUsage);
    CHECK(cli({}).code == kExitUsage);
    // nominal mode on a network with free rates is a prerequisite failure
    CHECK(cli({"analyze", data("sir.crn"), "--mode", "nominal"}).code == kExitPrerequisite);
}

TEST_CASE("parse errors exit 64 with a located diagnostic") {
    const auto path = std::string("cli_bad_input.crn");
    {
        std::ofstream(path) << "species: X\nreaction: X -> @@ k\n";
    }
    const auto r = cli({"analyze", path});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("line 2") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("reports are byte-identical apart from wall time") {
    auto strip = [](const std::string& s) {
        auto j = nlohmann::json::parse(s);
        j["diagnostics"]["wall_time_ms"] = 0;
        return j.dump();
    };
    for (const auto* f : {"sir.crn", "toy_robust.crn", "toy_case2.crn", "sir_interval.crn"}) {
        const auto a = cli({"analyze", data(f), "--seed", "9"});
        const auto b = cli({"analyze", data(f), "--seed", "9"});
        CHECK(strip(a.out) == strip(b.out));
    }
}

TEST_CASE("analysis flags are echoed into the diagnostics") {
    const auto r = cli({"analyze", data("toy_robust.crn"), "--mode", "robust", "--epsilon", "1e-6", "--seed", "4",
                        "--degree", "3", "--spot-checks", "7", "--recheck", "11", "--multistart", "16", "--serial"});
    CHECK(r.code == kExitOk);
    const auto d = nlohmann::json::parse(r.out)["diagnostics"];
    CHECK(d["tolerances"]["epsilon"] == 1e-6);
    CHECK(d["seed"] == 4);
    CHECK(d["handelman_degree"] == 3);
    CHECK(d["spot_checks"] == 7);
    CHECK(d["recheck_points"] == 11);
    CHECK(d["multistart"] == 16);
}

TEST_CASE("classify counts reaction classes") {
    auto counts = [](const std::string& f) { return nlohmann::json::parse(cli({"classify", data(f)}).out)["counts"]; };
    const auto c = counts("circadian.crn");
    CHECK(c["dg"] == 4);
    CHECK(c["ct"] == 2);
    CHECK(c["cv"] == 1);
    CHECK(c["bimolecular"] == 1);
    const auto s = counts("sir.crn");
    CHECK(s["dg"] == 3);
    CHECK(s["cv"] == 2);
    CHECK(s["bimolecular"] == 1);
    const auto e = nlohmann::json::parse(cli({"classify", data("empty.crn")}).out);
    CHECK(e["reactions"].empty());
}

TEST_CASE("controller feasibility") {
    const auto ok = cli({"controller", data("gene_expression.crn"), "--target", "Protein", "--actuated", "mRNA",
                         "--mu", "3", "--theta", "1"});
    CHECK(ok.code == kExitOk);
    CHECK(nlohmann::json::parse(ok.out)["setpoint_lower_bound"] == 0.0);
    const auto decoupled = cli({"controller", data("gene_expression.crn"), "--target", "mRNA", "--actuated",
                                "Protein", "--mu", "3"});
    CHECK(decoupled.code == kExitRefuted);
    CHECK(cli({"controller", data("pure_birth.crn"), "--target", "X"}).code == kExitPrerequisite);
    CHECK(cli({"controller", data("gene_expression.crn"), "--target", "Nope"}).code == kExitUsage);
}

TEST_CASE("simulate outputs") {
    const auto j = cli({"simulate", data("birth_death.crn"), "--t-end", "100", "--runs", "300", "--burn-in", "0.2"});
    CHECK(j.code == kExitOk);
    const double mean = nlohmann::json::parse(j.out)["mean"]["X"];
    CHECK(std::abs(mean - 10.0) < 0.3);

    const auto csv = cli({"simulate", data("birth_death.crn"), "--t-end", "1", "--x0", "3", "--format", "csv"});
    CHECK(csv.out.rfind("t,X\n0,3\n", 0) == 0);

    const auto loop = cli({"simulate", data("gene_expression.crn"), "--t-end", "200", "--runs", "40", "--controller",
                           "Protein,3,1,50,1", "--actuated", "mRNA"});
    CHECK(loop.code == kExitOk);
    const double p = nlohmann::json::parse(loop.out)["mean"]["Protein"];
    CHECK(std::abs(p - 3.0) < 0.3);

    CHECK(cli({"simulate", data("birth_death.crn"), "--t-end", "1", "--runs", "0"}).code == kExitUsage);
    CHECK(cli({"simulate", data("birth_death.crn"), "--t-end", "1", "--x0", "1,2"}).code == kExitUsage);
    CHECK(cli({"simulate", data("sir.crn"), "--t-end", "1"}).code == kExitPrerequisite);
}

TEST_CASE("text output honors NO_COLOR") {
    const std::vector<std::string> args{"analyze", data("sir.crn"), "--format", "text"};
    ::unsetenv("NO_COLOR");
    CHECK(cli(args, true).out.find("\033[") != std::string::npos);
    CHECK(cli(args, false).out.find("\033[") == std::string::npos);
    ::setenv("NO_COLOR", "1", 1);
    CHECK(cli(args, true).out.find("\033[") == std::string::npos);
    ::unsetenv("NO_COLOR");
}

TEST_CASE("help exits 0") { CHECK(cli({"--help"}).code == kExitOk); }
