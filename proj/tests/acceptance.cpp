// Acceptance suite: one criterion per line, [PASS]/[FAIL] + measured numbers.
// argv[1] must be the path to the graywarp CLI binary (used by criterion 11).
// Exit code 0 iff every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "graywarp/geodesic.hpp"
#include "graywarp/run.hpp"
#include "graywarp/verify.hpp"
#include "oracle.hpp"

using namespace graywarp;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

FamilyParams normalized(double A, double C, int n = 3) {
    FamilyParams p;
    p.n = n;
    p.tau = n - 1;
    p.A = A;
    p.C = C;
    return p;
}

FamilyParams periodic_params() {
    FamilyParams p;
    p.n = 3;
    p.tau = -2.0;
    p.A = 3.0;
    p.C = -2.0;
    return p;
}

SolveSettings reference_settings(double t_max = 0.0) {
    SolveSettings ss;
    ss.rtol = 1e-12;
    ss.atol = 1e-14;
    if (t_max > 0.0) ss.t_max = t_max;
    return ss;
}

// The four canonical families, solved once at reference accuracy.
const Profile& tanh_ray() {
    static const Profile p = solve(normalized(-2.0, 2.0), FamilyKind::Ray,
                                   reference_settings(16.0));
    return p;
}
const Profile& compact_a25() {
    static const Profile p = solve(normalized(-2.5, 2.0), FamilyKind::Compact,
                                   reference_settings());
    return p;
}
const Profile& lemniscatic() {
    static const Profile p = solve(normalized(0.0, -2.0), FamilyKind::Compact,
                                   reference_settings());
    return p;
}
const Profile& periodic() {
    static const Profile p =
        solve(periodic_params(), FamilyKind::Periodic, reference_settings());
    return p;
}

std::vector<const Profile*> canonical_families() {
    return {&tanh_ray(), &compact_a25(), &lemniscatic(), &periodic()};
}

// --------------------------------------------------------------------------
// Criteria
// --------------------------------------------------------------------------

std::string c1_tanh_regression() {
    const Profile& pr = tanh_ray();
    const WarpedMetric g(pr);
    double worst_f = 0.0, worst_eig = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double t = 5.0 * i / 2000.0;
        const double ref = std::tanh(t);
        worst_f = std::max(worst_f, std::fabs(pr.eval(t).f - ref));
        const RicciPair e = ricci_eigenvalues(g, t);
        worst_eig = std::max(worst_eig,
                             std::fabs(e.lambda - (6.0 - 4.0 * ref * ref)));
        worst_eig =
            std::max(worst_eig, std::fabs(e.mu - (6.0 - 6.0 * ref * ref)));
    }
    expect(worst_f < 1e-8, "max |f - tanh| = " + fmt(worst_f) + " >= 1e-8");
    expect(worst_eig < 1e-7,
           "max eigenvalue error = " + fmt(worst_eig) + " >= 1e-7");
    return "max|f-tanh|=" + fmt(worst_f) + " max|eig err|=" + fmt(worst_eig);
}

std::string c2_tan_regression() {
    const Profile pr = solve(normalized(2.0, 2.0), FamilyKind::Ray,
                             reference_settings());
    double worst_rel = 0.0;
    for (int i = 1; i <= 1400; ++i) {
        const double t = 1.4 * i / 1400.0;
        const double ref = std::tan(t);
        worst_rel =
            std::max(worst_rel, std::fabs(pr.eval(t).f - ref) / std::fabs(ref));
    }
    expect(worst_rel < 1e-6,
           "max rel |f - tan| = " + fmt(worst_rel) + " >= 1e-6");
    expect(pr.blow_up_t.has_value(), "no blow-up reported");
    const double half_pi = 2.0 * std::atan(1.0);
    expect(*pr.blow_up_t < half_pi, "blow-up time not before pi/2");
    return "rel err=" + fmt(worst_rel) + " blow_up_t=" + g17(*pr.blow_up_t);
}

std::string c3_lemniscatic_sphere() {
    const Profile& pr = lemniscatic();
    expect(pr.t0.has_value(), "no turning time");
    const double quad = oracle::t0_quadrature(pr.params);  // independent Romberg
    const double dev_quad = std::fabs(*pr.t0 - quad);
    const double dev_ref = std::fabs(*pr.t0 - 1.3110287771);
    expect(dev_quad < 1e-6, "t0 vs quadrature: " + fmt(dev_quad));
    expect(dev_ref < 1e-6, "t0 vs reference decimal: " + fmt(dev_ref));
    const ProfileSample far = pr.eval(pr.t_hi);
    expect(std::fabs(far.f) < 1e-6, "f(2 t0) = " + fmt(far.f));
    expect(std::fabs(far.fp + 1.0) < 1e-6, "f'(2 t0) + 1 = " + fmt(far.fp + 1.0));
    const std::vector<double> parity = parity_check(pr, 0.0, 2);
    expect(parity[0] < 1e-5, "|f''(0)| estimate = " + fmt(parity[0]));
    expect(parity[1] < 1e-5, "|f''''(0)| estimate = " + fmt(parity[1]));
    return "t0 dev=" + fmt(dev_quad) + " f(2t0)=" + fmt(far.f) +
           " parity=(" + fmt(parity[0]) + "," + fmt(parity[1]) + ")";
}

std::string c4_compact_max_warp() {
    const Profile& pr = compact_a25();
    double fmax = 0.0;
    for (int i = 0; i <= 4000; ++i)
        fmax = std::max(fmax, pr.eval(pr.t_lo + pr.span() * i / 4000.0).f);
    const oracle::QuadRoots r = oracle::quad_roots(pr.params);
    const double expected = std::sqrt(r.u1);  // inner quartic root
    const double dev = std::fabs(fmax - expected);
    expect(dev < 1e-6, "max f deviates from quartic root by " + fmt(dev));
    expect(std::fabs(expected - oracle::kCompactA_A25) < 1e-12,
           "oracle root drifted from frozen value");
    return "max f=" + g17(fmax) + " dev=" + fmt(dev);
}

std::string c5_gray_condition() {
    double worst = 0.0;
    for (const Profile* pr : canonical_families()) {
        const ResidualReport rep = check_gray(WarpedMetric(*pr));
        expect(rep.pass, rep.family + ": gray max=" + fmt(rep.max_residual));
        worst = std::max(worst, rep.max_residual);
    }
    const Profile bad = tanh_ray().perturbed(0.01);
    const ResidualReport rep = check_gray(WarpedMetric(bad));
    expect(rep.max_residual > 1e-3,
           "perturbed residual only " + fmt(rep.max_residual));
    return "max=" + fmt(worst) + " perturbed=" + fmt(rep.max_residual);
}

std::string c6_killing_geodesics() {
    const struct {
        const Profile* pr;
        double t0;
    } cases[] = {
        {&tanh_ray(), 2.0},
        {&compact_a25(), oracle::kCompactT0_A25},
        {&lemniscatic(), oracle::kLemniscaticT0},
        {&periodic(), 1.2},
    };
    Rng rng(2026);
    double worst_drift = 0.0, worst_match = 0.0;
    for (const auto& c : cases) {
        const WarpedMetric g(*c.pr);
        const double f0 = c.pr->eval(c.t0).f;
        for (int i = 0; i < 20; ++i) {
            GeodesicInit init;
            init.t0 = c.t0;
            init.E = rng.uniform(0.5, 2.0);
            init.L = rng.uniform(0.0, 0.9) * std::sqrt(init.E) * f0;
            init.dir = (rng.uniform() < 0.5) ? -1 : +1;
            const GeodesicPath path = integrate_geodesic(g, init, 10.0);
            const double match =
                std::fabs(path.samples.front().killing - path.analytic_killing);
            worst_drift = std::max(worst_drift, path.killing_drift);
            worst_match = std::max(worst_match, match);
            expect(path.killing_drift < 1e-7,
                   detail::family_label(*c.pr) + " geodesic " +
                       std::to_string(i) + ": drift " + fmt(path.killing_drift));
            expect(match < 1e-6, detail::family_label(*c.pr) + " geodesic " +
                                     std::to_string(i) + ": |K - (mu_S E + C L^2)| " +
                                     fmt(match));
        }
    }
    return "80 geodesics, max drift=" + fmt(worst_drift) +
           " max |K-analytic|=" + fmt(worst_match);
}

std::string c7_einstein_weyl() {
    double worst = 0.0, worst_coh = 0.0;
    for (const Profile* pr : {&tanh_ray(), &compact_a25()}) {
        const EWOutcome out = einstein_weyl_scan(WarpedMetric(*pr));
        expect(out.has_pair, detail::family_label(*pr) + ": no pair");
        expect(out.plus.max_residual < 1e-8,
               "plus residual " + fmt(out.plus.max_residual));
        expect(out.minus.max_residual < 1e-8,
               "minus residual " + fmt(out.minus.max_residual));
        expect(out.coherence < 1e-9, "coherence " + fmt(out.coherence));
        worst = std::max({worst, out.plus.max_residual, out.minus.max_residual});
        worst_coh = std::max(worst_coh, out.coherence);
    }
    // Obstructed family: lambda <= mu across the grid and the branch
    // construction raises NegativeGap.
    const WarpedMetric g(periodic());
    const EWOutcome out = einstein_weyl_scan(g);
    expect(!out.has_pair, "periodic family unexpectedly has a pair");
    expect(out.max_gap <= 0.0, "lambda > mu somewhere: " + fmt(out.max_gap));
    bool raised = false;
    try {
        (void)lambda_bar(g, +1, out.witness_t);
    } catch (const NegativeGap&) {
        raised = true;
    }
    expect(raised, "NegativeGap not raised at the witness");
    return "max residual=" + fmt(worst) + " coherence=" + fmt(worst_coh) +
           " obstruction max_gap=" + fmt(out.max_gap);
}

std::string c8_conserved_quantities() {
    double worst_c0 = 0.0, worst_mu = 0.0, worst_c1 = 0.0;
    for (const Profile* pr : canonical_families()) {
        const FamilyParams& p = pr->params;
        const auto inv = invariants_scan(WarpedMetric(*pr));
        const std::string who = detail::family_label(*pr);
        expect(inv[0].drift < 1e-8, who + ": C0 drift " + fmt(inv[0].drift));
        expect(std::fabs(inv[0].mean - c0_expected(p)) < 1e-6,
               who + ": C0 value " + g17(inv[0].mean));
        expect(inv[2].drift < 1e-8, who + ": mu_S drift " + fmt(inv[2].drift));
        expect(std::fabs(inv[2].mean - mu_s_expected(p)) < 1e-6,
               who + ": mu_S value " + g17(inv[2].mean));
        expect(inv[1].drift < 1e-7, who + ": C1 drift " + fmt(inv[1].drift));
        expect(std::fabs(inv[1].mean - c1_expected(p)) < 1e-6,
               who + ": C1 value " + g17(inv[1].mean));
        worst_c0 = std::max(worst_c0, inv[0].drift);
        worst_mu = std::max(worst_mu, inv[2].drift);
        worst_c1 = std::max(worst_c1, inv[1].drift);
    }
    return "drifts: C0=" + fmt(worst_c0) + " mu_S=" + fmt(worst_mu) +
           " C1=" + fmt(worst_c1);
}

std::string c9_conformally_einstein() {
    double worst_abs = 0.0;
    for (const Profile* pr : {&tanh_ray(), &compact_a25()}) {
        for (int sign : {+1, -1}) {
            const ConfEinsteinResult r =
                conformally_einstein_residual(WarpedMetric(*pr), sign);
            double abs_diff = 0.0;
            for (const ConformalPoint& c : r.points) {
                if (std::fabs(c.F) < kConfWarpFloor) continue;
                abs_diff = std::max(abs_diff, std::fabs(c.lambda_t - c.mu_t));
            }
            expect(r.used >= 32, "too few resolvable grid points");
            expect(abs_diff < 1e-6, detail::family_label(*pr) + " sign " +
                                        std::to_string(sign) +
                                        ": max |lambda~-mu~| " + fmt(abs_diff));
            worst_abs = std::max(worst_abs, abs_diff);
            if (pr == &compact_a25())
                expect(r.lambda_drift < 1e-5,
                       "compact lambda~ drift " + fmt(r.lambda_drift));
        }
    }
    const ConfEinsteinResult round =
        conformally_einstein_residual(WarpedMetric(compact_a25()), +1);
    return "max |lambda~-mu~|=" + fmt(worst_abs) +
           " compact drift=" + fmt(round.lambda_drift);
}

std::string c10_fd_oracle() {
    Rng rng(424242);
    double worst = 0.0;
    for (const Profile* pr : canonical_families()) {
        const WarpedMetric g(*pr);
        const double lo = pr->t_lo + 0.05 * pr->span();
        const double hi = pr->t_hi - 0.05 * pr->span();
        for (int i = 0; i < 20; ++i) {
            const double t = rng.uniform(lo, hi);
            const oracle::FdEigen fd = oracle::fd_eigen(*pr, t);
            const RicciPair e = ricci_eigenvalues(g, t);
            const double dev = std::max(std::fabs(e.lambda - fd.lambda),
                                        std::fabs(e.mu - fd.mu));
            expect(dev < 1e-5, detail::family_label(*pr) + " t=" + g17(t) +
                                   ": |eig - fd| = " + fmt(dev));
            worst = std::max(worst, dev);
        }
    }
    return "80 points, max |eig - fd|=" + fmt(worst);
}

// Criterion 11 drives the installed CLI binary through a scripted matrix.
int run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = "'" + cli + "' " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1 || !WIFEXITED(rc)) return -1;
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    expect(f.good(), "cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string c11_cli_contract(const std::string& cli) {
    expect(!cli.empty(), "CLI binary path not supplied (argv[1])");
    const fs::path dir = fs::temp_directory_path() / "graywarp_acceptance";
    fs::create_directories(dir);
    const auto art = [&dir](const char* name) { return (dir / name).string(); };

    // Valid runs exit 0 and repeated runs are byte-identical.
    expect(run_cli(cli, "solve --family compact --A -2.5 --rtol 1e-12 --out " +
                            art("p1.csv") + " --meta-out " + art("m1.json")) == 0,
           "valid solve did not exit 0");
    expect(run_cli(cli, "solve --family compact --A -2.5 --rtol 1e-12 --out " +
                            art("p2.csv") + " --meta-out " + art("m2.json")) == 0,
           "second solve did not exit 0");
    expect(slurp(art("p1.csv")) == slurp(art("p2.csv")),
           "profile CSVs differ between runs");

    const std::string verify_args =
        "verify --family ray --A -2 --rtol 1e-12 --seed 42 --report-out ";
    expect(run_cli(cli, verify_args + art("r1.json")) == 0,
           "valid verify did not exit 0");
    expect(run_cli(cli, verify_args + art("r2.json")) == 0,
           "second verify did not exit 0");
    expect(slurp(art("r1.json")) == slurp(art("r2.json")),
           "verify reports differ between runs");

    expect(run_cli(cli, "geodesic --family ray --A -2 --t-max 12 --t0 1 --E 1 "
                        "--L 0.5 --duration 8 --geo-out " +
                            art("g1.csv")) == 0,
           "valid geodesic did not exit 0");

    expect(run_cli(cli, "sweep --family compact --A-from -4 --A-to -2.1 "
                        "--steps 4 --sweep-out " +
                            art("s1.csv")) == 0,
           "valid sweep did not exit 0");

    // Failing checks exit 1.
    expect(run_cli(cli, "verify --family ray --A -2 --perturb 0.02 "
                        "--checks gray --report-out " +
                            art("rf.json")) == 1,
           "perturbed verify did not exit 1");

    // Invalid configurations exit 2.
    const std::pair<const char*, std::string> invalid[] = {
        {"unknown family", "solve --family torus --out " + art("x.csv") +
                               " --meta-out " + art("x.json")},
        {"C and eps together", "solve --family ray --C 2 --eps 1 --out " +
                                   art("x.csv") + " --meta-out " + art("x.json")},
        {"sweep with steps=1", "sweep --family compact --steps 1 --sweep-out " +
                                   art("x.csv")},
        {"forbidden geodesic",
         "geodesic --family ray --A -2 --t0 0.2 --E 1 --L 1 --geo-out " +
             art("x.csv")},
        {"unknown check",
         "verify --family ray --checks bogus --report-out " + art("x.json")},
        {"unknown flag", "solve --no-such-flag"},
        {"periodic with positive tau",
         "verify --family periodic --report-out " + art("x.json")},
    };
    for (const auto& [what, args] : invalid) {
        const int rc = run_cli(cli, args);
        expect(rc == 2,
               std::string(what) + " exited " + std::to_string(rc) + ", not 2");
    }
    return "matrix of 8 valid/1 failing/7 invalid runs, byte-identical reruns";
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const struct {
        int id;
        const char* desc;
        std::function<std::string()> run;
    } criteria[] = {
        {1, "hyperbolic closed-form regression (profile + eigenvalues)",
         c1_tanh_regression},
        {2, "trigonometric blow-up regression", c2_tan_regression},
        {3, "lemniscatic sphere closes smoothly at the far pole",
         c3_lemniscatic_sphere},
        {4, "compact family peaks at the quartic root", c4_compact_max_warp},
        {5, "cyclic-parallel Ricci residual across families", c5_gray_condition},
        {6, "Killing-tensor conservation along geodesics", c6_killing_geodesics},
        {7, "Einstein-Weyl pair and its obstruction", c7_einstein_weyl},
        {8, "conserved quantities C0, mu_S, C1", c8_conserved_quantities},
        {9, "conformally-Einstein rescaling", c9_conformally_einstein},
        {10, "finite-difference curvature oracle agreement", c10_fd_oracle},
        {11, "CLI reproducibility and exit-code contract",
         [&cli] { return c11_cli_contract(cli); }},
    };

    int passed = 0, total = 0;
    for (const auto& c : criteria) {
        ++total;
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        char timing[32];
        std::snprintf(timing, sizeof(timing), "%.2fs", secs);
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "C" << c.id << ": "
                  << c.desc << " — " << detail << " (" << timing << ")\n";
        if (ok) ++passed;
    }
    std::cout << "ACCEPTANCE: " << passed << "/" << total << " criteria passed\n";
    return passed == total ? 0 : 1;
}
