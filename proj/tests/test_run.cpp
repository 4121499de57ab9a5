#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "graywarp/run.hpp"
#include "oracle.hpp"

using namespace graywarp;
namespace fs = std::filesystem;

namespace {

fs::path artifact_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "graywarp_unit_artifacts";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string art(const std::string& name) {
    return (artifact_dir() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

std::vector<double> csv_row(const std::string& line) {
    std::vector<double> out;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::strtod(cell.c_str(), nullptr));
    return out;
}

}  // namespace

TEST_CASE("RunConfig round-trips through JSON") {
    RunConfig cfg;
    cfg.subcommand = "verify";
    cfg.family = "periodic";
    cfg.n = 4;
    cfg.tau = -3.0;
    cfg.A = 2.5;
    cfg.t_max = 7.0;
    cfg.rtol = 1e-11;
    cfg.csv_points = 64;
    cfg.samples = 17;
    cfg.seed = 1234;
    cfg.trim = 0.05;
    cfg.grid = 33;
    cfg.checks = {"gray", "invariants"};
    cfg.expect_no_ew = true;
    cfg.perturb = 0.01;
    cfg.geo_t0 = 0.7;
    cfg.E = 1.5;
    cfg.L = 0.25;
    cfg.dir = -1;
    cfg.duration = 3.5;
    cfg.A_from = 1.0;
    cfg.A_to = 4.0;
    cfg.steps = 6;
    cfg.out = "x.csv";
    cfg.report_out = "r.json";

    ordered_json j = cfg;
    const RunConfig back = j.get<RunConfig>();
    REQUIRE(back.subcommand == cfg.subcommand);
    REQUIRE(back.family == cfg.family);
    REQUIRE(back.n == cfg.n);
    REQUIRE(back.tau == cfg.tau);
    REQUIRE(std::isnan(back.C));  // C never set: stays unset
    REQUIRE(back.eps == 0);
    REQUIRE(back.t_max == cfg.t_max);
    REQUIRE(back.rtol == cfg.rtol);
    REQUIRE(back.csv_points == cfg.csv_points);
    REQUIRE(back.samples == cfg.samples);
    REQUIRE(back.seed == cfg.seed);
    REQUIRE(back.trim == cfg.trim);
    REQUIRE(back.grid == cfg.grid);
    REQUIRE(back.checks == cfg.checks);
    REQUIRE(back.expect_no_ew == cfg.expect_no_ew);
    REQUIRE(back.perturb == cfg.perturb);
    REQUIRE(back.geo_t0 == cfg.geo_t0);
    REQUIRE(back.E == cfg.E);
    REQUIRE(back.L == cfg.L);
    REQUIRE(back.dir == cfg.dir);
    REQUIRE(back.duration == cfg.duration);
    REQUIRE(back.A_from == cfg.A_from);
    REQUIRE(back.A_to == cfg.A_to);
    REQUIRE(back.steps == cfg.steps);
    REQUIRE(back.out == cfg.out);
    REQUIRE(back.report_out == cfg.report_out);
}

TEST_CASE("family resolution from a config") {
    RunConfig cfg;
    cfg.family = "compact";
    BuiltFamily bf = family_from_config(cfg);
    REQUIRE(bf.kind == FamilyKind::Compact);
    REQUIRE(bf.params.tau == 2.0);  // default n - 1
    REQUIRE(bf.params.C == 2.0);    // default +(n-1) for compact

    cfg.family = "periodic";
    cfg.tau = -2.0;
    cfg.A = 3.0;
    REQUIRE(family_from_config(cfg).params.C == -2.0);  // default -(n-1)

    cfg.eps = +1;
    REQUIRE(family_from_config(cfg).params.C == 2.0);

    cfg.C = 1.5;  // both --C and --eps: ambiguous
    REQUIRE_THROWS_AS(family_from_config(cfg), std::invalid_argument);

    RunConfig bad;
    bad.family = "torus";
    REQUIRE_THROWS_AS(family_from_config(bad), std::invalid_argument);
    RunConfig bad_eps;
    bad_eps.eps = 2;
    REQUIRE_THROWS_AS(family_from_config(bad_eps), std::invalid_argument);
}

TEST_CASE("solve subcommand writes profile, metadata and eigenvalue data") {
    RunConfig cfg;
    cfg.subcommand = "solve";
    cfg.family = "compact";
    cfg.A = -2.5;
    cfg.rtol = 1e-12;
    cfg.csv_points = 501;
    cfg.out = art("profile.csv");
    cfg.meta_out = art("profile_meta.json");
    cfg.eigen_out = art("eigen.csv");

    std::ostringstream out, err;
    REQUIRE(run_dispatch(cfg, out, err) == 0);
    REQUIRE(err.str().empty());
    REQUIRE(out.str().find("solved compact") != std::string::npos);

    const auto csv = lines_of(slurp(cfg.out));
    REQUIRE(csv.size() == 502);
    REQUIRE(csv[0] == "t,f,fp,fpp");
    const auto first = csv_row(csv[1]);
    REQUIRE(first[0] == 0.0);  // pole start
    REQUIRE(first[1] == 0.0);
    REQUIRE(first[2] == 1.0);  // normalized slope

    // Values round-trip at full precision: re-solving reproduces the cells.
    const Profile pr = solve(family_from_config(cfg).params, FamilyKind::Compact,
                             solve_settings_from(cfg));
    for (std::size_t i : {10u, 250u, 490u}) {
        const auto row = csv_row(csv[i + 1]);
        const ProfileSample s = pr.eval(row[0]);
        REQUIRE(row[1] == s.f);
        REQUIRE(row[2] == s.fp);
        REQUIRE(row[3] == s.fpp);
    }

    const ordered_json meta = ordered_json::parse(slurp(cfg.meta_out));
    REQUIRE(meta["family"].get<std::string>().find("compact") == 0);
    REQUIRE(meta["t0"].get<double>() ==
            Catch::Approx(oracle::kCompactT0_A25).margin(1e-9));
    REQUIRE(meta["roots"]["a"].get<double>() ==
            Catch::Approx(oracle::kCompactA_A25).margin(1e-12));
    REQUIRE(meta["roots"]["b"].get<double>() ==
            Catch::Approx(oracle::kCompactB_A25).margin(1e-12));
    REQUIRE(meta["reflect_err"].get<double>() < 1e-7);
    REQUIRE(meta["period"].is_null());
    REQUIRE(meta["blow_up_t"].is_null());
    REQUIRE(meta["domain"][1].get<double>() ==
            Catch::Approx(2.0 * oracle::kCompactT0_A25).margin(1e-9));

    const auto eig = lines_of(slurp(cfg.eigen_out));
    REQUIRE(eig[0] == "t,lambda,mu,scal,lambda_S,mu_S,alpha");
    REQUIRE(eig.size() == 502);
    // mu_S column is the constant nA(n-1)/(n+3) = -2.5.
    for (std::size_t i : {1u, 200u, 501u}) {
        const auto row = csv_row(eig[i]);
        REQUIRE(row[5] == Catch::Approx(-2.5).margin(1e-8));
    }
}

TEST_CASE("verify subcommand exit codes and report") {
    std::ostringstream out, err;

    RunConfig ok;
    ok.subcommand = "verify";
    ok.family = "ray";
    ok.A = -2.0;
    ok.rtol = 1e-12;
    ok.report_out = art("report.json");
    REQUIRE(run_dispatch(ok, out, err) == 0);
    REQUIRE(out.str().find("VERIFY PASS") != std::string::npos);
    const ordered_json rep = ordered_json::parse(slurp(ok.report_out));
    REQUIRE(rep.is_array());
    REQUIRE(rep.size() == 10);  // 6 single checks + 4 invariant rows
    for (const auto& r : rep) {
        REQUIRE(r["pass"].get<bool>());
        REQUIRE(r["max_residual"].get<double>() < r["tolerance"].get<double>());
        REQUIRE(r["seed"].get<std::uint64_t>() == 42);
    }

    // A perturbed profile fails its checks: exit code 1.
    RunConfig bad = ok;
    bad.perturb = 0.02;
    bad.checks = {"gray"};
    bad.report_out = art("report_bad.json");
    std::ostringstream out1, err1;
    REQUIRE(run_dispatch(bad, out1, err1) == 1);
    REQUIRE(out1.str().find("VERIFY FAIL") != std::string::npos);
    const ordered_json rep1 = ordered_json::parse(slurp(bad.report_out));
    REQUIRE(rep1.size() == 1);
    REQUIRE_FALSE(rep1[0]["pass"].get<bool>());

    // Invalid configurations: exit code 2 with a diagnostic on stderr.
    for (const auto& mutate : std::vector<std::function<void(RunConfig&)>>{
             [](RunConfig& c) { c.family = "torus"; },
             [](RunConfig& c) { c.family = "periodic"; },  // tau>0: no roots
             [](RunConfig& c) {
                 c.C = 1.0;
                 c.eps = 1;
             },
             [](RunConfig& c) {
                 c.family = "periodic";
                 c.tau = -2.0;
                 c.A = 3.0;
                 c.checks = {"conf-einstein"};  // imaginary gap field
             },
             [](RunConfig& c) { c.checks = {"bogus"}; }}) {
        RunConfig c = ok;
        c.report_out = art("report_invalid.json");
        mutate(c);
        std::ostringstream o, e;
        INFO(e.str());
        REQUIRE(run_dispatch(c, o, e) == 2);
        REQUIRE(e.str().rfind("error: ", 0) == 0);
    }

    // Obstruction mode on a C < 0 family passes.
    RunConfig obs;
    obs.subcommand = "verify";
    obs.family = "periodic";
    obs.tau = -2.0;
    obs.A = 3.0;
    obs.rtol = 1e-12;
    obs.expect_no_ew = true;
    obs.report_out = art("report_obs.json");
    std::ostringstream out2, err2;
    REQUIRE(run_dispatch(obs, out2, err2) == 0);
    REQUIRE(out2.str().find("PASS ew[expect-obstruction]") != std::string::npos);
}

TEST_CASE("verify runs are byte-identical across invocations") {
    RunConfig cfg;
    cfg.subcommand = "verify";
    cfg.family = "compact";
    cfg.A = -2.5;
    cfg.rtol = 1e-12;
    cfg.seed = 7;

    cfg.report_out = art("repro_a.json");
    std::ostringstream oa, ea;
    REQUIRE(run_dispatch(cfg, oa, ea) == 0);
    cfg.report_out = art("repro_b.json");
    std::ostringstream ob, eb;
    REQUIRE(run_dispatch(cfg, ob, eb) == 0);
    REQUIRE(slurp(art("repro_a.json")) == slurp(art("repro_b.json")));
    REQUIRE(oa.str() == ob.str());

    RunConfig sol;
    sol.subcommand = "solve";
    sol.family = "ray";
    sol.out = art("repro_a.csv");
    sol.meta_out = art("repro_a_meta.json");
    std::ostringstream os1, es1;
    REQUIRE(run_dispatch(sol, os1, es1) == 0);
    sol.out = art("repro_b.csv");
    sol.meta_out = art("repro_b_meta.json");
    std::ostringstream os2, es2;
    REQUIRE(run_dispatch(sol, os2, es2) == 0);
    REQUIRE(slurp(art("repro_a.csv")) == slurp(art("repro_b.csv")));
}

TEST_CASE("geodesic subcommand") {
    RunConfig cfg;
    cfg.subcommand = "geodesic";
    cfg.family = "ray";
    cfg.A = -2.0;
    cfg.t_max = 12.0;
    cfg.rtol = 1e-12;
    cfg.geo_t0 = 1.0;
    cfg.E = 1.0;
    cfg.L = 0.5;
    cfg.dir = +1;
    cfg.duration = 8.0;
    cfg.geo_out = art("geodesic.csv");

    std::ostringstream out, err;
    REQUIRE(run_dispatch(cfg, out, err) == 0);
    REQUIRE(out.str().find("outcome=completed") != std::string::npos);
    REQUIRE(out.str().find(" PASS") != std::string::npos);

    const auto csv = lines_of(slurp(cfg.geo_out));
    REQUIRE(csv[0] == "time,t,tdot,f,energy,killing_value");
    REQUIRE(csv.size() == 1002);
    const auto row = csv_row(csv[1]);
    REQUIRE(row[0] == 0.0);
    REQUIRE(row[1] == 1.0);
    REQUIRE(row[4] == Catch::Approx(1.0).margin(1e-12));   // energy
    REQUIRE(row[5] == Catch::Approx(-1.5).margin(1e-6));   // Ricci charge

    // Kinematically forbidden start: configuration error.
    RunConfig bad = cfg;
    bad.geo_t0 = 0.2;
    bad.L = 1.0;
    std::ostringstream o, e;
    REQUIRE(run_dispatch(bad, o, e) == 2);
    REQUIRE(e.str().find("forbidden") != std::string::npos);
}

TEST_CASE("sweep subcommand tabulates invariants over A") {
    RunConfig cfg;
    cfg.subcommand = "sweep";
    cfg.family = "compact";
    cfg.A_from = -4.0;
    cfg.A_to = -2.1;
    cfg.steps = 8;
    cfg.samples = 60;
    cfg.grid = 128;
    cfg.rtol = 1e-12;
    cfg.sweep_out = art("sweep.csv");

    std::ostringstream out, err;
    REQUIRE(run_dispatch(cfg, out, err) == 0);
    const auto csv = lines_of(slurp(cfg.sweep_out));
    REQUIRE(csv[0] == "A,t0_or_period,C0,mu_S,C1,max_gray_residual");
    REQUIRE(csv.size() == 9);
    for (int i = 0; i < 8; ++i) {
        const auto row = csv_row(csv[i + 1]);
        const double Ai = -4.0 + (-2.1 + 4.0) * i / 7.0;
        REQUIRE(row[0] == Catch::Approx(Ai).margin(1e-12));
        REQUIRE(row[2] == Catch::Approx(6.0 * Ai).margin(1e-6));  // C0 = n(n-1)A
        REQUIRE(row[3] == Catch::Approx(Ai).margin(1e-6));        // mu_S = A for n=3
        REQUIRE(row[5] < 1e-7);
    }
    // Turning-time column against the quadrature oracle at the first A.
    FamilyParams p;
    p.n = 3;
    p.tau = 2.0;
    p.A = -4.0;
    p.C = 2.0;
    const auto row = csv_row(csv[1]);
    REQUIRE(row[1] == Catch::Approx(oracle::t0_quadrature(p)).margin(1e-9));

    RunConfig bad = cfg;
    bad.steps = 1;
    std::ostringstream o, e;
    REQUIRE(run_dispatch(bad, o, e) == 2);

    // Unknown subcommand.
    RunConfig unk;
    unk.subcommand = "fly";
    std::ostringstream o2, e2;
    REQUIRE(run_dispatch(unk, o2, e2) == 2);
}
