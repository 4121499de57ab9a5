#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "graywarp/curvature.hpp"
#include "graywarp/errors.hpp"
#include "graywarp/profile.hpp"
#include "graywarp/util.hpp"

namespace graywarp {

// ---------------------------------------------------------------------------
// Tolerances.  Residuals of pointwise identities are reported relative to
// the magnitude of the terms entering the identity (floored at 1), so a
// check stays meaningful both near poles, where everything is small, and on
// blow-up rays, where the curvature grows without bound.  Conserved-quantity
// scans use absolute drift/deviation, except the first integral which is
// magnitude-scaled pointwise.
// ---------------------------------------------------------------------------
inline constexpr double kGrayTol = 1e-7;
inline constexpr double kKillingTol = 1e-7;
inline constexpr double kDistributionTol = 1e-8;
inline constexpr double kRelationsTol = 1e-8;
inline constexpr double kEwTol = 1e-8;
inline constexpr double kEwCoherenceTol = 1e-9;
inline constexpr double kEwGapSlack = 1e-10;
inline constexpr double kInvC0Tol = 1e-8;
inline constexpr double kInvC1Tol = 1e-7;
inline constexpr double kInvMuSTol = 1e-8;
inline constexpr double kInvFirstIntegralTol = 1e-8;
inline constexpr double kConfEinsteinTol = 1e-6;
inline constexpr double kConfDriftTol = 1e-5;
inline constexpr double kDegenerateGapFloor = 1e-10;
/// The rescaled warp F = e^u f decays toward a pole of the rescaled metric
/// on ray families.  Its eigenvalue formulas divide differences of order
/// machine-epsilon by F^2, so points with F below this floor carry no
/// information and are excluded from the conformally-Einstein statistics.
inline constexpr double kConfWarpFloor = 1e-2;

struct VerifySettings {
    int samples = 100;        ///< random samples for pointwise checks
    std::uint64_t seed = 42;  ///< RNG seed (reports are reproducible)
    double trim = 0.02;       ///< fraction of the domain excluded at each end
    int grid = 256;           ///< grid size for scans (invariants, EW, ...)
};

struct ResidualReport {
    std::string check;
    std::string family;
    int samples = 0;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
};

namespace detail {

inline double trim_lo(const Profile& pr, double trim) {
    return pr.t_lo + trim * pr.span();
}
inline double trim_hi(const Profile& pr, double trim) {
    return pr.t_hi - trim * pr.span();
}

inline std::vector<double> scan_grid(const Profile& pr, const VerifySettings& vs) {
    std::vector<double> ts(vs.grid);
    const double lo = trim_lo(pr, vs.trim), hi = trim_hi(pr, vs.trim);
    for (int i = 0; i < vs.grid; ++i)
        ts[i] = lo + (hi - lo) * static_cast<double>(i) / (vs.grid - 1);
    return ts;
}

inline TangentVector random_vector(Rng& rng) {
    TangentVector x;
    x.r = rng.symmetric();
    for (double& c : x.v) c = rng.symmetric();
    return x;
}

inline std::string family_label(const Profile& pr) {
    const FamilyParams& p = pr.params;
    const char* kind = "ray";
    switch (pr.kind) {
        case ProfileKind::CompactNumeric: kind = "compact"; break;
        case ProfileKind::PeriodicNumeric: kind = "periodic"; break;
        default: break;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s(n=%d,tau=%g,A=%g,C=%g)", kind, p.n,
                  p.tau, p.A, p.C);
    std::string s = buf;
    if (pr.perturb_amp != 0.0) s += "[perturbed " + g17(pr.perturb_amp) + "]";
    return s;
}

struct Accumulator {
    double max = 0.0, sum = 0.0;
    int count = 0;
    void add(double r) {
        max = std::max(max, std::fabs(r));
        sum += std::fabs(r);
        ++count;
    }
    double mean() const { return count ? sum / count : 0.0; }
};

inline ResidualReport make_report(const std::string& check, const Profile& pr,
                                  const Accumulator& acc, double tol,
                                  std::uint64_t seed) {
    return ResidualReport{check,      family_label(pr), acc.count, acc.max,
                          acc.mean(), tol,              acc.max < tol, seed};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pointwise residuals
// ---------------------------------------------------------------------------

/// Residual of the second-Bianchi-type symmetry satisfied by the Ricci
/// tensor of these metrics: the cyclic sum of (nabla_X Ric)(Y,Z) equals
/// 2/(m+2) times the cyclic sum of X(scal) g(Y,Z).
inline double gray_residual(const WarpedMetric& g, double t,
                            const TangentVector& X, const TangentVector& Y,
                            const TangentVector& Z) {
    const EigenRates r = eigen_rates(g, t);
    const double n1 = nabla_ricci(g, t, X, Y, Z);
    const double n2 = nabla_ricci(g, t, Y, Z, X);
    const double n3 = nabla_ricci(g, t, Z, X, Y);
    const double rhs = 2.0 / (g.m() + 2) * r.dscal *
                       (X.r * inner(g, t, Y, Z) + Y.r * inner(g, t, Z, X) +
                        Z.r * inner(g, t, X, Y));
    const double scale = std::max(
        1.0, std::fabs(n1) + std::fabs(n2) + std::fabs(n3) + std::fabs(rhs));
    return std::fabs(n1 + n2 + n3 - rhs) / scale;
}

/// Residual of the Killing-type identity (nabla_X T)(X, X) = 0 for the
/// traceless-part shift T = Ric - (2 scal/(m+2)) g.
inline double killing_residual(const WarpedMetric& g, double t,
                               const TangentVector& X) {
    const EigenData e = scalar_and_shifted(g, t);
    const EigenRates r = eigen_rates(g, t);
    const ProfileSample s = g.at(t);
    const double gXX = inner(g, t, X, X);
    const double t1 = X.r * r.dlambda_S * gXX;
    const double t2 = X.r * X.r * X.r * (r.dmu_S - r.dlambda_S);
    const double t3 =
        (e.mu_S - e.lambda_S) * (s.fp / s.f) * 2.0 * X.r * (gXX - X.r * X.r);
    const double scale =
        std::max(1.0, std::fabs(t1) + std::fabs(t2) + std::fabs(t3));
    return std::fabs(t1 + t2 + t3) / scale;
}

/// Both sides of the totally-geodesic/umbilic identity tying the second
/// fundamental form of the fiber distribution to the gradient of lambda_S:
///   g(nabla_X X, Y) = (Y lambda_S) / (2 (mu_S - lambda_S)) * |X|^2
/// for X tangent to the fiber and Y radial.  Only the fiber part of X and
/// the radial part of Y enter.
struct DistributionSides {
    double lhs, rhs, residual;
};

inline DistributionSides distribution_identity(const WarpedMetric& g, double t,
                                               const TangentVector& X,
                                               const TangentVector& Y) {
    const EigenData e = scalar_and_shifted(g, t);
    if (std::fabs(e.mu_S - e.lambda_S) < kDegenerateGapFloor)
        throw DegenerateGap(
            "distribution_identity: |mu_S - lambda_S| < 1e-10 at t = " + g17(t));
    const EigenRates r = eigen_rates(g, t);
    const ProfileSample s = g.at(t);
    const double xx = fiber_dot(X, X);
    const double lhs = -s.f * s.fp * xx * Y.r;
    const double rhs =
        0.5 * (Y.r * r.dlambda_S) / (e.mu_S - e.lambda_S) * (s.f * s.f * xx);
    const double scale = std::max(1.0, std::fabs(lhs) + std::fabs(rhs));
    return {lhs, rhs, std::fabs(lhs - rhs) / scale};
}

/// Residuals of the first-order system satisfied by the shifted eigenvalue
/// and the conformal scalar alpha = 2 sqrt|C| f' along the gap field
/// xi = sqrt|C| f dt:
///   r1:  d(lambda_S)/dt = sign(C) alpha xi_r
///   r2:  d(alpha)/dt    = -2 mu/(m-1) xi_r
struct RelationsResidual {
    double r1, r2;
};

inline RelationsResidual relations_residual(const WarpedMetric& g, double t) {
    const EigenData e = scalar_and_shifted(g, t);
    const EigenRates r = eigen_rates(g, t);
    const double sgn = (g.params().C > 0.0) ? 1.0 : -1.0;
    const double t1 = sgn * e.alpha * e.xi_r;
    const double r1 =
        std::fabs(r.dlambda_S - t1) /
        std::max(1.0, std::fabs(r.dlambda_S) + std::fabs(t1));
    const double t2 = 2.0 * e.mu / (g.m() - 1) * e.xi_r;
    const double r2 = std::fabs(r.dalpha + t2) /
                      std::max(1.0, std::fabs(r.dalpha) + std::fabs(t2));
    return {r1, r2};
}

// ---------------------------------------------------------------------------
// Einstein-Weyl structures
// ---------------------------------------------------------------------------

namespace detail {

struct EwPointwise {
    double omega, domega, Lambda_rad, Lambda_fib;
};

/// Pointwise Weyl data for one sign branch; requires gap = lambda - mu > 0.
inline EwPointwise ew_pointwise(const WarpedMetric& g, int sign, double t) {
    const EigenData e = scalar_and_shifted(g, t);
    const EigenRates r = eigen_rates(g, t);
    const ProfileSample s = g.at(t);
    const int m = g.m();
    const double gap = e.lambda - e.mu;
    if (!(gap > 0.0))
        throw NegativeGap("eigenvalue gap lambda - mu is not positive at t = " +
                              g17(t) + " (gap = " + g17(gap) + ")",
                          t);
    EwPointwise w;
    w.omega = sign * 2.0 * std::sqrt(gap / (m - 2));
    w.domega = sign * (r.dlambda - r.dmu) / std::sqrt((m - 2) * gap);
    w.Lambda_rad = e.mu + (m - 2) / 4.0 * (2.0 * w.domega + w.omega * w.omega);
    w.Lambda_fib = e.lambda + (m - 2) / 2.0 * w.omega * (s.fp / s.f);
    return w;
}

}  // namespace detail

struct EWBranch {
    int sign = +1;
    std::vector<double> omega_r;  ///< radial component of the Weyl one-form
    std::vector<double> Lambda;   ///< Einstein-Weyl constant, fiber evaluation
    double max_residual = 0.0;    ///< scaled |Lambda_rad - Lambda_fib|
};

struct EWOutcome {
    bool has_pair = false;   ///< both sign branches exist (gap > 0 on the grid)
    double witness_t = 0.0;  ///< first abscissa with negative gap (if !has_pair)
    double max_gap = -std::numeric_limits<double>::infinity();
    ///< max over the grid of (lambda - mu)/max(1,|lambda|+|mu|); <= 0 means
    ///< lambda <= mu everywhere, confirming the obstruction direction
    std::vector<double> ts;
    EWBranch plus, minus;
    double coherence = 0.0;  ///< scaled max |Lambda(+) + Lambda(-) - 2 lambda|
};

/// Scan the (trimmed) domain for the pair of opposite-sign Einstein-Weyl
/// structures.  If lambda - mu < 0 anywhere, the square root is imaginary
/// and the outcome records the obstruction witness instead of a pair.
inline EWOutcome einstein_weyl_scan(const WarpedMetric& g,
                                    const VerifySettings& vs = {}) {
    EWOutcome out;
    out.ts = detail::scan_grid(g.profile(), vs);
    out.plus.sign = +1;
    out.minus.sign = -1;

    bool negative = false;
    for (double t : out.ts) {
        const EigenData e = scalar_and_shifted(g, t);
        const double scale = std::max(1.0, std::fabs(e.lambda) + std::fabs(e.mu));
        const double gap_scaled = (e.lambda - e.mu) / scale;
        out.max_gap = std::max(out.max_gap, gap_scaled);
        if (!negative && gap_scaled < -kEwGapSlack) {
            negative = true;
            out.witness_t = t;
        }
    }
    if (negative) {
        out.has_pair = false;
        return out;
    }

    out.has_pair = true;
    for (double t : out.ts) {
        const EigenData e = scalar_and_shifted(g, t);
        const auto wp = detail::ew_pointwise(g, +1, t);
        const auto wm = detail::ew_pointwise(g, -1, t);
        for (const auto* w : {&wp, &wm}) {
            EWBranch& br = (w == &wp) ? out.plus : out.minus;
            br.omega_r.push_back(w->omega);
            br.Lambda.push_back(w->Lambda_fib);
            const double scale =
                std::max(1.0, std::fabs(w->Lambda_rad) + std::fabs(w->Lambda_fib));
            br.max_residual = std::max(
                br.max_residual, std::fabs(w->Lambda_rad - w->Lambda_fib) / scale);
        }
        const double cscale = std::max(1.0, std::fabs(e.lambda));
        out.coherence = std::max(
            out.coherence,
            std::fabs(wp.Lambda_fib + wm.Lambda_fib - 2.0 * e.lambda) / cscale);
    }
    return out;
}

/// The conformal-scale invariant built from one Einstein-Weyl branch:
///   lambda_bar = 2 Lambda + div(omega) - (m-2)/2 |omega|^2.
/// Throws NegativeGap where the branch does not exist.
inline double lambda_bar(const WarpedMetric& g, int sign, double t) {
    const auto w = detail::ew_pointwise(g, sign, t);
    const ProfileSample s = g.at(t);
    const double div = w.domega + g.n() * (s.fp / s.f) * w.omega;
    return 2.0 * w.Lambda_fib + div - (g.m() - 2) / 2.0 * w.omega * w.omega;
}

// ---------------------------------------------------------------------------
// Conformally-Einstein reconstruction
// ---------------------------------------------------------------------------

struct ConfEinsteinResult {
    double max_residual = 0.0;  ///< scaled max |lambda~ - mu~| of e^{2u} g
    double lambda_drift = 0.0;  ///< max - min of lambda~ over the grid
    double lambda_mean = 0.0;
    int used = 0;  ///< grid points above kConfWarpFloor entering the stats
    std::vector<ConformalPoint> points;  ///< all grid points, unfiltered
};

/// Rescale by e^{2u} with u = sign/2 * int omega_r dt, where omega_r =
/// 2 sqrt(C/(n-1)) f is the closed-form Weyl radial component of C > 0
/// families, and recompute the Ricci eigenvalues of the rescaled metric.
/// For a profile solving the model equation both rescaled eigenvalues
/// coincide and are constant (the rescaled metric is Einstein).
inline ConfEinsteinResult conformally_einstein_residual(
    const WarpedMetric& g, int sign, const VerifySettings& vs = {}) {
    const FamilyParams& p = g.params();
    if (!(p.C > 0.0))
        throw NegativeGap(
            "conformally-Einstein rescaling requires C > 0 (the gap field is "
            "imaginary for C < 0)",
            g.profile().t_lo);
    const std::vector<double> ts = detail::scan_grid(g.profile(), vs);
    const double k = 2.0 * std::sqrt(p.gamma());
    const auto omega = [&](double t) { return k * g.at(t).f; };

    // Cumulative phi = int omega dt by per-panel adaptive quadrature,
    // anchored at the left endpoint of the domain so the overall conformal
    // scale (and with it the rescaled Einstein constant) is canonical.
    const std::size_t G = ts.size();
    std::vector<double> u(G), du(G), ddu(G), umid(G - 1);
    double phi = adaptive_simpson(omega, g.profile().t_lo, ts[0], 1e-14);
    for (std::size_t i = 0; i < G; ++i) {
        if (i > 0) {
            const double mid_phi =
                phi + adaptive_simpson(omega, ts[i - 1],
                                       0.5 * (ts[i - 1] + ts[i]), 1e-14);
            umid[i - 1] = 0.5 * sign * mid_phi;
            phi += adaptive_simpson(omega, ts[i - 1], ts[i], 1e-14);
        }
        u[i] = 0.5 * sign * phi;
        du[i] = 0.5 * sign * omega(ts[i]);
        ddu[i] = 0.5 * sign * k * g.at(ts[i]).fp;
    }

    ConfEinsteinResult res;
    res.points = conformal_to_warped(g, ts, u, du, ddu, umid);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (const auto& c : res.points) {
        if (std::fabs(c.F) < kConfWarpFloor) continue;
        ++res.used;
        const double scale =
            std::max(1.0, std::fabs(c.lambda_t) + std::fabs(c.mu_t));
        res.max_residual =
            std::max(res.max_residual, std::fabs(c.lambda_t - c.mu_t) / scale);
        lo = std::min(lo, c.lambda_t);
        hi = std::max(hi, c.lambda_t);
        sum += c.lambda_t;
    }
    if (res.used < 8)
        throw PoleEvaluation(
            "conformally-Einstein scan: rescaled warp is below the resolution "
            "floor on nearly the whole grid");
    res.lambda_drift = hi - lo;
    res.lambda_mean = sum / res.used;
    return res;
}

// ---------------------------------------------------------------------------
// Conserved quantities
// ---------------------------------------------------------------------------

/// Expected constant value of C0 = (n+1) mu - 2n lambda.
inline double c0_expected(const FamilyParams& p) {
    return static_cast<double>(p.n) * (p.n - 1) * p.A;
}

/// Expected constant value of mu_S.
inline double mu_s_expected(const FamilyParams& p) {
    return p.n * p.A * static_cast<double>(p.n - 1) / (p.n + 3);
}

/// Sign of the mu^2 term in the constant combination C1:
///   C > 0:  C1 = n^2 alpha^2 - (n-1) mu^2
///   C < 0:  C1 = n^2 alpha^2 + (n-1) mu^2
inline int c1_mu2_sign(const FamilyParams& p) { return p.C > 0.0 ? -1 : +1; }

inline double c1_expected(const FamilyParams& p) {
    const double base = 4.0 * p.n * p.n * p.C * p.tau / (p.n - 1);
    const double quad = (p.n - 1) * static_cast<double>(p.n) * p.n * p.A * p.A;
    return p.C > 0.0 ? base - quad : -base + quad;
}

struct InvariantEntry {
    std::string name;
    int samples = 0;
    double drift = 0.0;          ///< max - min over the grid
    double mean = 0.0;
    double expected = 0.0;
    double max_deviation = 0.0;  ///< max |value - expected|
    double tolerance = 0.0;
    bool pass = false;
};

/// Scan the four conserved quantities over the trimmed domain: C0, the
/// branch-resolved C1, the shifted radial eigenvalue mu_S, and the
/// (magnitude-scaled) first-integral residual |f'^2 - P(f)|.
inline std::vector<InvariantEntry> invariants_scan(const WarpedMetric& g,
                                                   const VerifySettings& vs = {}) {
    const FamilyParams& p = g.params();
    const std::vector<double> ts = detail::scan_grid(g.profile(), vs);
    const int sgn = c1_mu2_sign(p);

    struct Series {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0,
               dev = 0.0;
        void add(double v, double expected) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
            dev = std::max(dev, std::fabs(v - expected));
        }
    } c0s, c1s, mus, fis;

    for (double t : ts) {
        const EigenData e = scalar_and_shifted(g, t);
        const ProfileSample s = g.at(t);
        c0s.add((p.n + 1) * e.mu - 2.0 * p.n * e.lambda, c0_expected(p));
        c1s.add(p.n * p.n * e.alpha * e.alpha + sgn * (p.n - 1) * e.mu * e.mu,
                c1_expected(p));
        mus.add(e.mu_S, mu_s_expected(p));
        const double P = first_integral_rhs(p, s.f);
        const double fi = std::fabs(s.fp * s.fp - P) /
                          std::max({1.0, s.fp * s.fp, std::fabs(P)});
        fis.add(fi, 0.0);
    }

    const int N = static_cast<int>(ts.size());
    const auto entry = [N](const std::string& name, const Series& s,
                           double expected, double tol) {
        InvariantEntry e;
        e.name = name;
        e.samples = N;
        e.drift = s.hi - s.lo;
        e.mean = s.sum / N;
        e.expected = expected;
        e.max_deviation = s.dev;
        e.tolerance = tol;
        e.pass = e.drift < tol && e.max_deviation < std::max(10.0 * tol, 1e-6);
        return e;
    };
    const std::string c1name = (sgn < 0) ? "invariants.c1[n2a2-mu2]"
                                         : "invariants.c1[n2a2+mu2]";
    return {entry("invariants.c0", c0s, c0_expected(p), kInvC0Tol),
            entry(c1name, c1s, c1_expected(p), kInvC1Tol),
            entry("invariants.mu_S", mus, mu_s_expected(p), kInvMuSTol),
            entry("invariants.first_integral", fis, 0.0, kInvFirstIntegralTol)};
}

// ---------------------------------------------------------------------------
// Check drivers
// ---------------------------------------------------------------------------

inline ResidualReport check_gray(const WarpedMetric& g,
                                 const VerifySettings& vs = {}) {
    Rng rng(vs.seed);
    detail::Accumulator acc;
    const Profile& pr = g.profile();
    const double lo = detail::trim_lo(pr, vs.trim), hi = detail::trim_hi(pr, vs.trim);
    for (int i = 0; i < vs.samples; ++i) {
        const double t = rng.uniform(lo, hi);
        const auto X = detail::random_vector(rng);
        const auto Y = detail::random_vector(rng);
        const auto Z = detail::random_vector(rng);
        acc.add(gray_residual(g, t, X, Y, Z));
    }
    return detail::make_report("gray", pr, acc, kGrayTol, vs.seed);
}

inline ResidualReport check_killing(const WarpedMetric& g,
                                    const VerifySettings& vs = {}) {
    Rng rng(vs.seed);
    detail::Accumulator acc;
    const Profile& pr = g.profile();
    const double lo = detail::trim_lo(pr, vs.trim), hi = detail::trim_hi(pr, vs.trim);
    for (int i = 0; i < vs.samples; ++i) {
        const double t = rng.uniform(lo, hi);
        const auto X = detail::random_vector(rng);
        acc.add(killing_residual(g, t, X));
    }
    return detail::make_report("killing", pr, acc, kKillingTol, vs.seed);
}

inline ResidualReport check_distribution(const WarpedMetric& g,
                                         const VerifySettings& vs = {}) {
    Rng rng(vs.seed);
    detail::Accumulator acc;
    const Profile& pr = g.profile();
    const double lo = detail::trim_lo(pr, vs.trim), hi = detail::trim_hi(pr, vs.trim);
    for (int i = 0; i < vs.samples; ++i) {
        const double t = rng.uniform(lo, hi);
        TangentVector X = detail::random_vector(rng);
        X.r = 0.0;
        TangentVector Y;
        Y.r = rng.symmetric();
        acc.add(distribution_identity(g, t, X, Y).residual);
    }
    return detail::make_report("distribution", pr, acc, kDistributionTol, vs.seed);
}

inline ResidualReport check_relations(const WarpedMetric& g,
                                      const VerifySettings& vs = {}) {
    Rng rng(vs.seed);
    detail::Accumulator acc;
    const Profile& pr = g.profile();
    const double lo = detail::trim_lo(pr, vs.trim), hi = detail::trim_hi(pr, vs.trim);
    for (int i = 0; i < vs.samples; ++i) {
        const double t = rng.uniform(lo, hi);
        const RelationsResidual r = relations_residual(g, t);
        acc.add(r.r1);
        acc.add(r.r2);
    }
    return detail::make_report("relations", pr, acc, kRelationsTol, vs.seed);
}

/// expect_no_ew = false: pass iff both sign branches exist with residual
/// below tolerance and the two branches cohere (Lambda+ + Lambda- = 2 lambda).
/// expect_no_ew = true: pass iff the pair is obstructed AND lambda <= mu
/// holds across the grid (reported residual is the positive part of the
/// scaled gap).
inline ResidualReport check_ew(const WarpedMetric& g, const VerifySettings& vs = {},
                               bool expect_no_ew = false) {
    const EWOutcome out = einstein_weyl_scan(g, vs);
    const Profile& pr = g.profile();
    ResidualReport rep;
    rep.family = detail::family_label(pr);
    rep.samples = static_cast<int>(out.ts.size());
    rep.seed = vs.seed;
    if (expect_no_ew) {
        rep.check = "ew[expect-obstruction]";
        rep.tolerance = kEwGapSlack;
        rep.max_residual = std::max(0.0, out.max_gap);
        rep.mean_residual = rep.max_residual;
        rep.pass = !out.has_pair && rep.max_residual <= kEwGapSlack;
        return rep;
    }
    rep.check = "ew";
    rep.tolerance = kEwTol;
    if (!out.has_pair) {
        // No real pair: report the (scaled) gap deficit as the residual.
        rep.max_residual = std::fabs(out.max_gap);
        rep.mean_residual = rep.max_residual;
        rep.pass = false;
        return rep;
    }
    rep.max_residual = std::max({out.plus.max_residual, out.minus.max_residual,
                                 out.coherence});
    rep.mean_residual =
        0.5 * (out.plus.max_residual + out.minus.max_residual);
    rep.pass = out.plus.max_residual < kEwTol &&
               out.minus.max_residual < kEwTol && out.coherence < kEwCoherenceTol;
    return rep;
}

inline ResidualReport check_conf_einstein(const WarpedMetric& g,
                                          const VerifySettings& vs = {}) {
    const Profile& pr = g.profile();
    ResidualReport rep;
    rep.check = "conf-einstein";
    rep.family = detail::family_label(pr);
    rep.seed = vs.seed;
    rep.tolerance = kConfEinsteinTol;
    double worst = 0.0, worst_drift = 0.0;
    for (int sign : {+1, -1}) {
        const ConfEinsteinResult r = conformally_einstein_residual(g, sign, vs);
        worst = std::max(worst, r.max_residual);
        worst_drift = std::max(worst_drift, r.lambda_drift);
        rep.samples = static_cast<int>(r.points.size());
    }
    rep.max_residual = worst;
    rep.mean_residual = worst_drift;  // drift of the rescaled eigenvalue
    rep.pass = worst < kConfEinsteinTol && worst_drift < kConfDriftTol;
    return rep;
}

inline std::vector<ResidualReport> check_invariants(const WarpedMetric& g,
                                                    const VerifySettings& vs = {}) {
    std::vector<ResidualReport> reps;
    for (const InvariantEntry& e : invariants_scan(g, vs)) {
        ResidualReport rep;
        rep.check = e.name;
        rep.family = detail::family_label(g.profile());
        rep.samples = e.samples;
        rep.max_residual = std::max(e.drift, e.max_deviation);
        rep.mean_residual = e.drift;
        rep.tolerance = e.tolerance;
        rep.pass = e.pass;
        rep.seed = vs.seed;
        reps.push_back(rep);
    }
    return reps;
}

/// The canonical check set for a family: the conformally-Einstein
/// reconstruction and the Einstein-Weyl pair are only run by default where
/// a real pair can exist (C > 0); for C < 0 the EW check is included in
/// obstruction mode when expect_no_ew is set.
inline std::vector<std::string> default_checks(const FamilyParams& p,
                                               bool expect_no_ew) {
    std::vector<std::string> cs = {"gray", "killing", "distribution",
                                   "relations", "invariants"};
    if (p.C > 0.0) {
        cs.push_back("ew");
        cs.push_back("conf-einstein");
    } else if (expect_no_ew) {
        cs.push_back("ew");
    }
    return cs;
}

/// Run a named list of checks (empty = default set for the family).
/// Unknown names raise std::invalid_argument.
inline std::vector<ResidualReport> run_checks(const WarpedMetric& g,
                                              std::vector<std::string> checks,
                                              const VerifySettings& vs = {},
                                              bool expect_no_ew = false) {
    if (checks.empty()) checks = default_checks(g.params(), expect_no_ew);
    std::vector<ResidualReport> reps;
    for (const std::string& c : checks) {
        if (c == "gray") {
            reps.push_back(check_gray(g, vs));
        } else if (c == "killing") {
            reps.push_back(check_killing(g, vs));
        } else if (c == "distribution") {
            reps.push_back(check_distribution(g, vs));
        } else if (c == "relations") {
            reps.push_back(check_relations(g, vs));
        } else if (c == "ew") {
            reps.push_back(check_ew(g, vs, expect_no_ew));
        } else if (c == "invariants") {
            for (auto& r : check_invariants(g, vs)) reps.push_back(std::move(r));
        } else if (c == "conf-einstein") {
            reps.push_back(check_conf_einstein(g, vs));
        } else {
            throw std::invalid_argument("unknown check: " + c);
        }
    }
    return reps;
}

}  // namespace graywarp
