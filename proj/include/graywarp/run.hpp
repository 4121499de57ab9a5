#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "graywarp/curvature.hpp"
#include "graywarp/errors.hpp"
#include "graywarp/family.hpp"
#include "graywarp/geodesic.hpp"
#include "graywarp/profile.hpp"
#include "graywarp/verify.hpp"

namespace graywarp {

using ordered_json = nlohmann::ordered_json;

inline constexpr double kGeoEnergyTol = 1e-8;
inline constexpr double kGeoKillingDriftTol = 1e-7;
inline constexpr double kGeoKillingMatchTol = 1e-6;

/// One configuration object drives every subcommand; unset optional
/// parameters are NaN (doubles) or 0 (eps).  A JSON config file populates
/// the same fields and command-line flags override it.
struct RunConfig {
    std::string subcommand;

    // family
    std::string family = "ray";
    int n = 3;
    double tau = std::numeric_limits<double>::quiet_NaN();  // default n-1
    double A = -2.0;
    double C = std::numeric_limits<double>::quiet_NaN();
    int eps = 0;  // +-1: C = eps (n-1); 0 = unset

    // solver
    double t_max = 5.0;
    double rtol = 1e-10;
    int csv_points = 1001;

    // verification
    int samples = 100;
    std::uint64_t seed = 42;
    double trim = 0.02;
    int grid = 256;
    std::vector<std::string> checks;
    bool expect_no_ew = false;
    double perturb = 0.0;

    // geodesic
    double geo_t0 = 1.0;
    double E = 1.0;
    double L = 0.0;
    int dir = +1;
    double duration = 10.0;

    // sweep
    double A_from = -4.0;
    double A_to = -2.1;
    int steps = 10;

    // output paths ("" = subcommand default)
    std::string out, meta_out, eigen_out, report_out, geo_out, sweep_out;
};

inline void to_json(ordered_json& j, const RunConfig& c) {
    j = ordered_json{{"subcommand", c.subcommand},
                     {"family", c.family},
                     {"n", c.n},
                     {"A", c.A},
                     {"eps", c.eps},
                     {"t_max", c.t_max},
                     {"rtol", c.rtol},
                     {"csv_points", c.csv_points},
                     {"samples", c.samples},
                     {"seed", c.seed},
                     {"trim", c.trim},
                     {"grid", c.grid},
                     {"checks", c.checks},
                     {"expect_no_ew", c.expect_no_ew},
                     {"perturb", c.perturb},
                     {"geo_t0", c.geo_t0},
                     {"E", c.E},
                     {"L", c.L},
                     {"dir", c.dir},
                     {"duration", c.duration},
                     {"A_from", c.A_from},
                     {"A_to", c.A_to},
                     {"steps", c.steps},
                     {"out", c.out},
                     {"meta_out", c.meta_out},
                     {"eigen_out", c.eigen_out},
                     {"report_out", c.report_out},
                     {"geo_out", c.geo_out},
                     {"sweep_out", c.sweep_out}};
    if (!std::isnan(c.tau)) j["tau"] = c.tau;
    if (!std::isnan(c.C)) j["C"] = c.C;
}

inline void from_json(const ordered_json& j, RunConfig& c) {
    c.subcommand = j.value("subcommand", c.subcommand);
    c.family = j.value("family", c.family);
    c.n = j.value("n", c.n);
    if (j.contains("tau") && !j["tau"].is_null()) c.tau = j["tau"].get<double>();
    c.A = j.value("A", c.A);
    if (j.contains("C") && !j["C"].is_null()) c.C = j["C"].get<double>();
    c.eps = j.value("eps", c.eps);
    c.t_max = j.value("t_max", c.t_max);
    c.rtol = j.value("rtol", c.rtol);
    c.csv_points = j.value("csv_points", c.csv_points);
    c.samples = j.value("samples", c.samples);
    c.seed = j.value("seed", c.seed);
    c.trim = j.value("trim", c.trim);
    c.grid = j.value("grid", c.grid);
    c.checks = j.value("checks", c.checks);
    c.expect_no_ew = j.value("expect_no_ew", c.expect_no_ew);
    c.perturb = j.value("perturb", c.perturb);
    c.geo_t0 = j.value("geo_t0", c.geo_t0);
    c.E = j.value("E", c.E);
    c.L = j.value("L", c.L);
    c.dir = j.value("dir", c.dir);
    c.duration = j.value("duration", c.duration);
    c.A_from = j.value("A_from", c.A_from);
    c.A_to = j.value("A_to", c.A_to);
    c.steps = j.value("steps", c.steps);
    c.out = j.value("out", c.out);
    c.meta_out = j.value("meta_out", c.meta_out);
    c.eigen_out = j.value("eigen_out", c.eigen_out);
    c.report_out = j.value("report_out", c.report_out);
    c.geo_out = j.value("geo_out", c.geo_out);
    c.sweep_out = j.value("sweep_out", c.sweep_out);
}

struct BuiltFamily {
    FamilyParams params;
    FamilyKind kind;
};

/// Resolve family parameters from a config.  Defaults: tau = n - 1; the
/// gap coefficient defaults to the normalized value eps (n-1) with
/// eps = +1 (compact/ray) or -1 (periodic).  Passing both --C and --eps is
/// ambiguous and rejected.
inline BuiltFamily family_from_config(const RunConfig& c) {
    FamilyKind kind;
    if (c.family == "compact")
        kind = FamilyKind::Compact;
    else if (c.family == "ray")
        kind = FamilyKind::Ray;
    else if (c.family == "periodic")
        kind = FamilyKind::Periodic;
    else
        throw std::invalid_argument("unknown family '" + c.family +
                                    "' (expected compact|ray|periodic)");

    FamilyParams p;
    p.n = c.n;
    p.A = c.A;
    p.tau = std::isnan(c.tau)
                ? static_cast<double>(c.n - 1)
                : c.tau;
    const bool has_C = !std::isnan(c.C), has_eps = (c.eps != 0);
    if (has_C && has_eps)
        throw std::invalid_argument("pass either --C or --eps, not both");
    if (has_eps && c.eps != 1 && c.eps != -1)
        throw std::invalid_argument("--eps must be +1 or -1");
    if (has_C)
        p.C = c.C;
    else if (has_eps)
        p.C = static_cast<double>(c.eps) * (c.n - 1);
    else
        p.C = (kind == FamilyKind::Periodic ? -1.0 : 1.0) * (c.n - 1);
    p.validate();
    return {p, kind};
}

inline SolveSettings solve_settings_from(const RunConfig& c) {
    SolveSettings s;
    s.rtol = c.rtol;
    s.atol = std::min(1e-12, c.rtol);
    s.t_max = c.t_max;
    return s;
}

inline VerifySettings verify_settings_from(const RunConfig& c) {
    VerifySettings v;
    v.samples = c.samples;
    v.seed = c.seed;
    v.trim = c.trim;
    v.grid = c.grid;
    return v;
}

inline void to_json(ordered_json& j, const ResidualReport& r) {
    j = ordered_json{{"check", r.check},
                     {"family", r.family},
                     {"samples", r.samples},
                     {"max_residual", r.max_residual},
                     {"mean_residual", r.mean_residual},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass},
                     {"seed", r.seed}};
}

/// CSV of the eigenvalue data: t,lambda,mu,scal,lambda_S,mu_S,alpha.
inline void write_eigen_csv(std::ostream& os, const WarpedMetric& g,
                            int points = 1001) {
    const Profile& pr = g.profile();
    os << "t,lambda,mu,scal,lambda_S,mu_S,alpha\n";
    for (int i = 0; i < points; ++i) {
        const double t =
            pr.t_lo + pr.span() * static_cast<double>(i) / (points - 1);
        const EigenData e = scalar_and_shifted(g, t);
        os << g17(t) << ',' << g17(e.lambda) << ',' << g17(e.mu) << ','
           << g17(e.scal) << ',' << g17(e.lambda_S) << ',' << g17(e.mu_S) << ','
           << g17(e.alpha) << '\n';
    }
}

inline ordered_json profile_meta(const Profile& pr, const SolveSettings& s) {
    ordered_json j;
    j["family"] = detail::family_label(pr);
    j["params"] = {{"n", pr.params.n},
                   {"tau", pr.params.tau},
                   {"A", pr.params.A},
                   {"C", pr.params.C}};
    j["domain"] = {pr.t_lo, pr.t_hi};
    j["t0"] = pr.t0 ? ordered_json(*pr.t0) : ordered_json(nullptr);
    j["period"] = pr.period ? ordered_json(*pr.period) : ordered_json(nullptr);
    ordered_json roots;
    roots["a"] = pr.root_a ? ordered_json(*pr.root_a) : ordered_json(nullptr);
    roots["b"] = pr.root_b ? ordered_json(*pr.root_b) : ordered_json(nullptr);
    j["roots"] = roots;
    j["blow_up_t"] =
        pr.blow_up_t ? ordered_json(*pr.blow_up_t) : ordered_json(nullptr);
    if (pr.kind == ProfileKind::CompactNumeric) {
        j["far_pole"] = {{"f", pr.far_pole_f}, {"fp", pr.far_pole_fp}};
        j["reflect_err"] = pr.reflect_err;
    }
    j["settings"] = {{"rtol", s.rtol}, {"t_max", s.t_max}};
    return j;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open output file: " + path);
    f << content;
}

}  // namespace detail

inline int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const BuiltFamily bf = family_from_config(cfg);
        const SolveSettings ss = solve_settings_from(cfg);
        const Profile pr = solve(bf.params, bf.kind, ss);

        std::ostringstream csv;
        write_profile_csv(csv, pr, cfg.csv_points);
        detail::write_file(cfg.out.empty() ? "profile.csv" : cfg.out, csv.str());

        const ordered_json meta = profile_meta(pr, ss);
        detail::write_file(cfg.meta_out.empty() ? "profile_meta.json" : cfg.meta_out,
                           meta.dump(2) + "\n");

        if (!cfg.eigen_out.empty()) {
            const WarpedMetric g(pr);
            std::ostringstream ecsv;
            write_eigen_csv(ecsv, g, cfg.csv_points);
            detail::write_file(cfg.eigen_out, ecsv.str());
        }

        out << "solved " << detail::family_label(pr) << " on [" << g17(pr.t_lo)
            << ", " << g17(pr.t_hi) << "]";
        if (pr.t0) out << " t0=" << g17(*pr.t0);
        if (pr.period) out << " period=" << g17(*pr.period);
        if (pr.blow_up_t) out << " blow_up_t=" << g17(*pr.blow_up_t);
        out << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

inline int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const BuiltFamily bf = family_from_config(cfg);
        Profile pr = solve(bf.params, bf.kind, solve_settings_from(cfg));
        if (cfg.perturb != 0.0) pr = pr.perturbed(cfg.perturb);
        const WarpedMetric g(pr);
        const std::vector<ResidualReport> reps =
            run_checks(g, cfg.checks, verify_settings_from(cfg), cfg.expect_no_ew);

        ordered_json arr = ordered_json::array();
        bool all = true;
        for (const auto& r : reps) {
            arr.push_back(r);
            all = all && r.pass;
            out << (r.pass ? "PASS " : "FAIL ") << r.check
                << " max=" << g17(r.max_residual) << " mean="
                << g17(r.mean_residual) << " tol=" << g17(r.tolerance)
                << " samples=" << r.samples << " seed=" << r.seed << "\n";
        }
        detail::write_file(cfg.report_out.empty() ? "report.json" : cfg.report_out,
                           arr.dump(2) + "\n");
        out << (all ? "VERIFY PASS" : "VERIFY FAIL") << " ("
            << detail::family_label(pr) << ")\n";
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

inline int run_geodesic(const RunConfig& cfg, std::ostream& out,
                        std::ostream& err) {
    try {
        const BuiltFamily bf = family_from_config(cfg);
        const Profile pr = solve(bf.params, bf.kind, solve_settings_from(cfg));
        const WarpedMetric g(pr);
        GeodesicInit init;
        init.t0 = cfg.geo_t0;
        init.E = cfg.E;
        init.L = cfg.L;
        init.dir = cfg.dir;
        GeodesicSettings gs;
        gs.rtol = cfg.rtol;
        const GeodesicPath path = integrate_geodesic(g, init, cfg.duration, gs);

        std::ostringstream csv;
        write_geodesic_csv(csv, path);
        detail::write_file(cfg.geo_out.empty() ? "geodesic.csv" : cfg.geo_out,
                           csv.str());

        const double K0 = path.samples.front().killing;
        const double match = std::fabs(K0 - path.analytic_killing);
        const bool pass = path.energy_drift < kGeoEnergyTol &&
                          path.killing_drift < kGeoKillingDriftTol &&
                          match < kGeoKillingMatchTol;
        out << "geodesic outcome=" << to_string(path.outcome)
            << " end_time=" << g17(path.end_time)
            << " energy_drift=" << g17(path.energy_drift)
            << " killing_drift=" << g17(path.killing_drift)
            << " killing=" << g17(K0)
            << " analytic=" << g17(path.analytic_killing) << " "
            << (pass ? "PASS" : "FAIL") << "\n";
        return pass ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

inline int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.steps < 2)
            throw std::invalid_argument("sweep requires steps >= 2");
        const BuiltFamily base = family_from_config(cfg);

        struct Row {
            double A, t0_or_period, c0, mu_s, c1, max_gray;
        };
        std::vector<std::future<Row>> futs;
        for (int i = 0; i < cfg.steps; ++i) {
            const double Ai =
                cfg.A_from + (cfg.A_to - cfg.A_from) * i / (cfg.steps - 1);
            futs.push_back(std::async(std::launch::async, [Ai, &cfg, &base]() {
                FamilyParams p = base.params;
                p.A = Ai;
                const Profile pr = solve(p, base.kind, solve_settings_from(cfg));
                const WarpedMetric g(pr);
                const VerifySettings vs = verify_settings_from(cfg);
                const auto inv = invariants_scan(g, vs);
                Row row;
                row.A = Ai;
                row.t0_or_period =
                    pr.t0 ? *pr.t0
                          : (pr.period ? *pr.period
                                       : (pr.blow_up_t
                                              ? *pr.blow_up_t
                                              : std::numeric_limits<
                                                    double>::quiet_NaN()));
                row.c0 = inv[0].mean;
                row.c1 = inv[1].mean;
                row.mu_s = inv[2].mean;
                row.max_gray = check_gray(g, vs).max_residual;
                return row;
            }));
        }
        std::ostringstream csv;
        csv << "A,t0_or_period,C0,mu_S,C1,max_gray_residual\n";
        for (auto& f : futs) {
            const Row r = f.get();  // futures joined in A order
            csv << g17(r.A) << ',' << g17(r.t0_or_period) << ',' << g17(r.c0)
                << ',' << g17(r.mu_s) << ',' << g17(r.c1) << ','
                << g17(r.max_gray) << '\n';
        }
        detail::write_file(cfg.sweep_out.empty() ? "sweep.csv" : cfg.sweep_out,
                           csv.str());
        out << "sweep wrote " << cfg.steps << " rows over A in ["
            << g17(cfg.A_from) << ", " << g17(cfg.A_to) << "]\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

/// Dispatch on cfg.subcommand; returns the process exit code
/// (0 pass, 1 check failure, 2 invalid configuration).
inline int run_dispatch(const RunConfig& cfg, std::ostream& out,
                        std::ostream& err) {
    if (cfg.subcommand == "solve") return run_solve(cfg, out, err);
    if (cfg.subcommand == "verify") return run_verify(cfg, out, err);
    if (cfg.subcommand == "geodesic") return run_geodesic(cfg, out, err);
    if (cfg.subcommand == "sweep") return run_sweep(cfg, out, err);
    err << "error: unknown subcommand '" << cfg.subcommand << "'\n";
    return 2;
}

}  // namespace graywarp
