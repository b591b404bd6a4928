#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string fixture(const std::string& name) { return std::string(CRNLYAP_FIXTURES) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    const auto err_path = fs::temp_directory_path() / ("crn_lyap_cli_err_" + std::to_string(::getpid()));
    const std::string cmd = std::string(CRN_LYAP_BIN) + " " + args + " 2>" + err_path.string();
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_path);
    fs::remove(err_path);
    return r;
}

Json run_json(const std::string& args, int expected_code = 0) {
    const auto r = run(args);
    EXPECT_EQ(r.code, expected_code) << args << "\n" << r.err;
    return Json::parse(r.out);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(CliAnalyze, NetB) {
    const auto j = run_json("analyze " + fixture("netb.crn") + " --x0 3,0");
    EXPECT_EQ(j["structure"]["dim"], 1);
    EXPECT_EQ(j["structure"]["deficiency"], 1);
    EXPECT_EQ(j["complex_balanced"], false);
    EXPECT_EQ(j["classification"], "dim1");
    ASSERT_EQ(j["equilibria"].size(), 1u);
    EXPECT_NEAR(j["equilibria"][0]["x_star"][0].get<double>(), 2.0, 1e-10);
    EXPECT_NEAR(j["equilibria"][0]["x_star"][1].get<double>(), 1.0, 1e-10);
}

TEST(CliAnalyze, NetAAndNetC) {
    EXPECT_EQ(run_json("analyze " + fixture("neta.crn"))["complex_balanced"], true);
    EXPECT_EQ(run_json("analyze " + fixture("netc.crn"))["classification"], "cycle3");
}

TEST(CliAnalyze, NoEquilibriumExitsThree) {
    const auto j = run_json("analyze " + fixture("neta.crn") + " --x0 0,0", 3);
    EXPECT_TRUE(j.contains("error"));
    EXPECT_TRUE(j["complex_balanced"].is_null());
}

TEST(CliLyapunov, Methods) {
    const auto b = run_json("lyapunov " + fixture("netb.crn"));
    EXPECT_EQ(b["lyapunov"]["method"], "dim1");
    EXPECT_NEAR(b["lyapunov"]["stability_margins"][0]["margin"].get<double>(), -5.0, 1e-9);

    const auto d = run_json("lyapunov " + fixture("netd.crn"));
    EXPECT_EQ(d["lyapunov"]["method"], "composite");
    EXPECT_EQ(d["lyapunov"]["parts"].size(), 2u);

    const auto c = run_json("lyapunov " + fixture("netc.crn"));
    EXPECT_EQ(c["lyapunov"]["method"], "cycle3");
    EXPECT_EQ(c["lyapunov"]["factor"], 2.0);
    EXPECT_EQ(c["lyapunov"]["boundary_complex_set"], "empty");
}

TEST(CliLyapunov, WrongMethodIsUnsupported) {
    EXPECT_EQ(run("lyapunov " + fixture("netb.crn") + " --method gibbs").code, 4);
    EXPECT_EQ(run("lyapunov " + fixture("netc.crn") + " --method dim1").code, 4);
}

TEST(CliLyapunov, GridTable) {
    const auto csv = fs::temp_directory_path() / ("crn_lyap_grid_" + std::to_string(::getpid()) + ".csv");
    const auto r = run("lyapunov " + fixture("netb.crn") + " --grid -1:1:20 --csv " + csv.string());
    EXPECT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(slurp(csv));
    fs::remove(csv);
    ASSERT_GT(rows.size(), 10u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"c1", "S1", "S2", "f", "fdot"}));
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(std::stod(rows[i][4]), 1e-12);
}

TEST(CliVerify, Verdicts) {
    const auto a = run_json("verify " + fixture("neta.crn") + " --samples 200");
    EXPECT_EQ(a["verification"]["verdict"], "certified");
    const auto b = run_json("verify " + fixture("netb.crn") + " --samples 200");
    EXPECT_EQ(b["verification"]["verdict"], "certified");
    const auto r = run("verify " + fixture("nete.crn") + " --samples 200");
    const auto e = Json::parse(r.out);
    EXPECT_NE(e["verification"]["verdict"], "failed");
}

TEST(CliVerify, ByteIdenticalAcrossRuns) {
    const auto r1 = run("verify " + fixture("netd.crn") + " --samples 100 --seed 5");
    const auto r2 = run("verify " + fixture("netd.crn") + " --samples 100 --seed 5");
    EXPECT_EQ(r1.code, 0);
    EXPECT_EQ(r1.out, r2.out);
}

TEST(CliVerify, ImpossibleToleranceIsNotCertified) {
    EXPECT_EQ(run("verify " + fixture("netb.crn") + " --samples 50 --tol 1e-30").code, 1);
}

TEST(CliSimulate, OdeMonitorDecreases) {
    const auto r = run("simulate ode " + fixture("netb.crn") + " --x0 3,0 --t-end 10 --monitor");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows[0], (std::vector<std::string>{"t", "S1", "S2", "f", "fdot"}));
    EXPECT_EQ(rows[1][3], "");  // t = 0 sits on the face S2 = 0
    double prev = INFINITY;
    int monitored = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][3].empty()) continue;
        const double f = std::stod(rows[i][3]);
        EXPECT_LE(f, prev + 1e-7);
        prev = f;
        ++monitored;
    }
    EXPECT_GT(monitored, 10);
    const auto& last = rows.back();
    EXPECT_NEAR(std::stod(last[1]), 2.0, 1e-4);
}

TEST(CliSimulate, SsaHistogram) {
    const auto r = run("simulate ssa " + fixture("neta.crn") + " --omega 10 --t-end 200 --seed 3");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"S1", "S2", "fraction"}));
    double total = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(std::stoll(rows[i][0]) + std::stoll(rows[i][1]), 20);
        total += std::stod(rows[i][2]);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_EQ(r.out, run("simulate ssa " + fixture("neta.crn") + " --omega 10 --t-end 200 --seed 3").out);
}

TEST(CliSimulate, SsaReportsAbsorption) {
    const auto r = run("simulate ssa " + fixture("nete.crn") + " --n0 1,2 --t-end 1000");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("absorbed"), std::string::npos) << r.err;
}

TEST(CliErrors, ExitCodes) {
    const auto parse = run("analyze " + fixture("malformed/bad_arrow.crn"));
    EXPECT_EQ(parse.code, 2);
    EXPECT_NE(parse.err.find("bad_arrow.crn:2:4:"), std::string::npos) << parse.err;
    EXPECT_EQ(run("analyze " + fixture("does_not_exist.crn")).code, 2);
    EXPECT_EQ(run("analyze " + fixture("netb.crn") + " --x0 1,2,3").code, 2);
    EXPECT_EQ(run("analyze " + fixture("netb.crn") + " --x0 a,b").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("simulate ode " + fixture("netb.crn") + " --t-end -1").code, 2);
    EXPECT_EQ(run("simulate ssa " + fixture("birth_death.crn")).code, 2);
}
