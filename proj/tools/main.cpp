// graywarp: numerical laboratory for warped-product metrics whose Ricci
// tensor satisfies the cyclic-symmetry (Killing) condition.
//
// Subcommands:
//   solve     integrate a warp profile and export CSV/JSON
//   verify    run structural identity checks against a solved family
//   sweep     scan a parameter range, one CSV row per family
//   geodesic  integrate a radial geodesic and track its conserved quantities
//
// Exit codes: 0 success / all checks pass, 1 a check failed,
//             2 invalid configuration or parameters.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "graywarp/run.hpp"

namespace {

using graywarp::RunConfig;

void add_family_options(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--config", config_path,
                    "JSON config file (flags override its values)");
    sub->add_option("--family", cfg.family, "compact | ray | periodic");
    sub->add_option("--n", cfg.n, "fiber dimension (>= 2)");
    sub->add_option("--tau", cfg.tau, "fiber Einstein constant (default n-1)");
    sub->add_option("--A", cfg.A, "quadratic first-integral coefficient");
    sub->add_option("--C", cfg.C, "eigenvalue-gap coefficient");
    sub->add_option("--eps", cfg.eps,
                    "normalized gap sign: C = eps (n-1), eps = +1 or -1");
    sub->add_option("--t-max", cfg.t_max, "integration horizon (ray families)");
    sub->add_option("--rtol", cfg.rtol, "integrator relative tolerance");
}

CLI::App* add_solve(CLI::App& app, RunConfig& cfg, std::string& config_path) {
    CLI::App* sub = app.add_subcommand("solve", "solve a warp profile");
    add_family_options(sub, cfg, config_path);
    sub->add_option("--points", cfg.csv_points, "CSV sample count");
    sub->add_option("--out", cfg.out, "profile CSV path (default profile.csv)");
    sub->add_option("--meta-out", cfg.meta_out,
                    "metadata JSON path (default profile_meta.json)");
    sub->add_option("--eigen-out", cfg.eigen_out,
                    "eigenvalue CSV path (omitted unless set)");
    return sub;
}

CLI::App* add_verify(CLI::App& app, RunConfig& cfg, std::string& config_path,
                     std::string& checks_csv) {
    CLI::App* sub =
        app.add_subcommand("verify", "run structural checks on a family");
    add_family_options(sub, cfg, config_path);
    sub->add_option("--checks", checks_csv,
                    "comma-separated list (default: all applicable); names: "
                    "gray,killing,distribution,relations,invariants,ew,"
                    "conf-einstein");
    sub->add_option("--samples", cfg.samples, "random samples per check");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--trim", cfg.trim, "domain fraction trimmed at each end");
    sub->add_option("--grid", cfg.grid, "grid size for scan checks");
    sub->add_flag("--expect-no-ew", cfg.expect_no_ew,
                  "assert the Einstein-Weyl pair is obstructed");
    sub->add_option("--perturb", cfg.perturb,
                    "multiplicative profile perturbation amplitude");
    sub->add_option("--report-out", cfg.report_out,
                    "report JSON path (default report.json)");
    return sub;
}

CLI::App* add_geodesic(CLI::App& app, RunConfig& cfg, std::string& config_path) {
    CLI::App* sub = app.add_subcommand("geodesic", "integrate a geodesic");
    add_family_options(sub, cfg, config_path);
    sub->add_option("--t0", cfg.geo_t0, "initial abscissa");
    sub->add_option("--E", cfg.E, "energy tdot^2 + L^2/f^2");
    sub->add_option("--L", cfg.L, "fiber angular momentum");
    sub->add_option("--dir", cfg.dir, "initial radial direction (+1/-1)");
    sub->add_option("--duration", cfg.duration, "affine-parameter length");
    sub->add_option("--geo-out", cfg.geo_out,
                    "geodesic CSV path (default geodesic.csv)");
    return sub;
}

CLI::App* add_sweep(CLI::App& app, RunConfig& cfg, std::string& config_path) {
    CLI::App* sub = app.add_subcommand("sweep", "scan a range of A values");
    add_family_options(sub, cfg, config_path);
    sub->add_option("--A-from", cfg.A_from, "first A value");
    sub->add_option("--A-to", cfg.A_to, "last A value");
    sub->add_option("--steps", cfg.steps, "row count (>= 2)");
    sub->add_option("--samples", cfg.samples, "random samples per row");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--sweep-out", cfg.sweep_out,
                    "sweep CSV path (default sweep.csv)");
    return sub;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    // Pre-scan for --config so the file provides the defaults and explicit
    // flags override it during the regular parse below.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream f(argv[i + 1]);
            if (!f) {
                std::cerr << "error: cannot open config file: " << argv[i + 1]
                          << "\n";
                return 2;
            }
            try {
                graywarp::ordered_json j;
                f >> j;
                from_json(j, cfg);
            } catch (const std::exception& e) {
                std::cerr << "error: bad config file: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CLI::App app{
        "graywarp: warped-product metrics with cyclic-parallel Ricci tensor"};
    app.require_subcommand(1);
    std::string config_path;
    std::string checks_csv;
    CLI::App* s_solve = add_solve(app, cfg, config_path);
    CLI::App* s_verify = add_verify(app, cfg, config_path, checks_csv);
    CLI::App* s_geo = add_geodesic(app, cfg, config_path);
    CLI::App* s_sweep = add_sweep(app, cfg, config_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help exits 0; parse errors exit 2
    }

    if (s_solve->parsed()) cfg.subcommand = "solve";
    if (s_verify->parsed()) {
        cfg.subcommand = "verify";
        if (!checks_csv.empty()) cfg.checks = split_csv(checks_csv);
    }
    if (s_geo->parsed()) cfg.subcommand = "geodesic";
    if (s_sweep->parsed()) cfg.subcommand = "sweep";

    return graywarp::run_dispatch(cfg, std::cout, std::cerr);
}
