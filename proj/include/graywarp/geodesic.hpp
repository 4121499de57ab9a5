#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "graywarp/curvature.hpp"
#include "graywarp/errors.hpp"
#include "graywarp/ode.hpp"
#include "graywarp/verify.hpp"

namespace graywarp {

/// Initial condition of a geodesic: base abscissa, conserved unit-speed
/// energy E = tdot^2 + L^2/f^2, fiber angular momentum L, and the sign of
/// the initial radial velocity.
struct GeodesicInit {
    double t0 = 1.0;
    double E = 1.0;
    double L = 0.0;
    int dir = +1;
};

struct GeodesicSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.025;
    int n_out = 1001;          ///< uniformly spaced output samples
    double pole_floor = 1e-5;  ///< stop when the warp factor drops below this
};

enum class GeodesicOutcome { Completed, PoleHit, DomainExit };

inline const char* to_string(GeodesicOutcome o) {
    switch (o) {
        case GeodesicOutcome::Completed: return "completed";
        case GeodesicOutcome::PoleHit: return "pole-hit";
        case GeodesicOutcome::DomainExit: return "domain-exit";
    }
    return "?";
}

struct GeodesicSample {
    double time, t, tdot, f, energy, killing;
};

struct GeodesicPath {
    std::vector<GeodesicSample> samples;
    GeodesicOutcome outcome = GeodesicOutcome::Completed;
    double end_time = 0.0;
    double analytic_killing = 0.0;  ///< mu_S E + C L^2 from the parameters alone
    double energy_drift = 0.0;      ///< max |E(s) - E(0)| over the samples
    double killing_drift = 0.0;     ///< max |K(s) - K(0)| over the samples
    double min_f = 0.0, max_f = 0.0;
};

/// Conserved quantity T(c', c') of the shifted Ricci tensor along a
/// geodesic with radial velocity tdot and angular momentum L.
inline double killing_value(const WarpedMetric& g, double t, double tdot,
                            double L) {
    const EigenData e = scalar_and_shifted(g, t);
    const ProfileSample s = g.at(t);
    return e.mu_S * tdot * tdot + e.lambda_S * L * L / (s.f * s.f);
}

/// Integrate the radial geodesic equation  tdot' = L^2 f'/f^3  for the
/// given duration (affine parameter), producing uniformly spaced samples.
/// Stops early when the path reaches a pole (warp below pole_floor) or
/// leaves the solved domain of a non-periodic profile.
inline GeodesicPath integrate_geodesic(const WarpedMetric& g,
                                       const GeodesicInit& init,
                                       double duration,
                                       const GeodesicSettings& gs = {}) {
    const Profile& pr = g.profile();
    if (!(duration > 0.0))
        throw std::invalid_argument("integrate_geodesic: duration must be > 0");
    if (init.dir != 1 && init.dir != -1)
        throw std::invalid_argument("integrate_geodesic: dir must be +1 or -1");
    const ProfileSample s0 = pr.eval(init.t0);
    const double pot = init.L * init.L / (s0.f * s0.f);
    if (pot > init.E)
        throw std::invalid_argument(
            "integrate_geodesic: kinematically forbidden start: L^2/f(t0)^2 = " +
            g17(pot) + " exceeds E = " + g17(init.E));
    const double tdot0 = init.dir * std::sqrt(std::max(0.0, init.E - pot));

    const bool periodic = (pr.kind == ProfileKind::PeriodicNumeric);
    const double L = init.L;
    const auto safe_eval = [&pr, periodic](double t) {
        if (!periodic) t = std::clamp(t, pr.t_lo, pr.t_hi);
        return pr.eval(t);
    };
    const auto rhs = [&safe_eval, L](double, const std::array<double, 2>& y,
                                     std::array<double, 2>& dy) {
        const ProfileSample s = safe_eval(y[0]);
        dy[0] = y[1];
        // Radial geodesics (L = 0) have a trivial right-hand side; evaluating
        // the quotient form at a pole stage (f = 0) would poison the step
        // with 0/0.  The barrier L^2/f^2 <= E keeps f away from 0 otherwise.
        const double f3 = s.f * s.f * s.f;
        dy[1] = (L == 0.0) ? 0.0 : L * L * s.fp / std::max(f3, 1e-300);
    };

    OdeSettings os;
    os.rtol = gs.rtol;
    os.atol = gs.atol;
    os.h_max = gs.h_max;
    const double floor = gs.pole_floor;
    std::vector<DenseNode<2>> nodes;
    const auto stop = [&](const DenseNode<2>&, const DenseNode<2>& cur) {
        if (safe_eval(cur.y[0]).f < floor) return true;
        if (!periodic && (cur.y[0] >= pr.t_hi || cur.y[0] <= pr.t_lo)) return true;
        return false;
    };
    const OdeStop st =
        integrate_ode<2>(rhs, {init.t0, tdot0}, 0.0, duration, os, nodes, stop);

    GeodesicPath path;
    path.analytic_killing =
        mu_s_expected(g.params()) * init.E + g.params().C * L * L;
    path.end_time = nodes.back().t;
    path.outcome = GeodesicOutcome::Completed;

    if (st == OdeStop::Predicate) {
        // Localize the earliest stop event inside the final interval.
        const auto& l = nodes[nodes.size() - 2];
        const auto& r = nodes[nodes.size() - 1];
        const auto q = QuinticHermite::make(l.t, r.t, l.y[0], l.y[1], l.dy[1],
                                            r.y[0], r.y[1], r.dy[1]);
        double s_stop = r.t;
        const double f_end = safe_eval(r.y[0]).f;
        if (f_end < floor) {
            path.outcome = GeodesicOutcome::PoleHit;
            s_stop = bisect(
                [&](double s) { return safe_eval(q.eval(s)).f - floor; }, l.t,
                r.t, 1e-13);
        }
        if (!periodic && (r.y[0] >= pr.t_hi || r.y[0] <= pr.t_lo)) {
            const double bound = (r.y[0] >= pr.t_hi) ? pr.t_hi : pr.t_lo;
            double s_exit = r.t;
            if ((q.eval(l.t) - bound) * (q.eval(r.t) - bound) < 0.0)
                s_exit = bisect([&](double s) { return q.eval(s) - bound; }, l.t,
                                r.t, 1e-13);
            if (path.outcome != GeodesicOutcome::PoleHit || s_exit < s_stop) {
                path.outcome = GeodesicOutcome::DomainExit;
                s_stop = s_exit;
            }
        }
        path.end_time = s_stop;
    }

    // Uniform output samples via Hermite interpolation on the state nodes.
    const int n_out = std::max(2, gs.n_out);
    path.min_f = std::numeric_limits<double>::infinity();
    path.max_f = -path.min_f;
    std::size_t seg = 0;
    for (int i = 0; i < n_out; ++i) {
        const double s = path.end_time * static_cast<double>(i) / (n_out - 1);
        while (seg + 2 < nodes.size() && nodes[seg + 1].t < s) ++seg;
        const auto& l = nodes[seg];
        const auto& r = nodes[seg + 1];
        const auto q = QuinticHermite::make(l.t, r.t, l.y[0], l.y[1], l.dy[1],
                                            r.y[0], r.y[1], r.dy[1]);
        GeodesicSample smp;
        smp.time = s;
        smp.t = q.eval(s);
        smp.tdot = q.deriv(s);
        const ProfileSample ps = safe_eval(smp.t);
        smp.f = ps.f;
        smp.energy = smp.tdot * smp.tdot + L * L / (ps.f * ps.f);
        smp.killing = killing_value(g, periodic ? smp.t
                                                : std::clamp(smp.t, pr.t_lo, pr.t_hi),
                                    smp.tdot, L);
        path.min_f = std::min(path.min_f, smp.f);
        path.max_f = std::max(path.max_f, smp.f);
        path.samples.push_back(smp);
    }
    const double E0 = path.samples.front().energy;
    const double K0 = path.samples.front().killing;
    for (const auto& smp : path.samples) {
        path.energy_drift = std::max(path.energy_drift, std::fabs(smp.energy - E0));
        path.killing_drift =
            std::max(path.killing_drift, std::fabs(smp.killing - K0));
    }
    return path;
}

/// CSV: time,t,tdot,f,energy,killing_value
inline void write_geodesic_csv(std::ostream& os, const GeodesicPath& path) {
    os << "time,t,tdot,f,energy,killing_value\n";
    for (const auto& s : path.samples)
        os << g17(s.time) << ',' << g17(s.t) << ',' << g17(s.tdot) << ','
           << g17(s.f) << ',' << g17(s.energy) << ',' << g17(s.killing) << '\n';
}

}  // namespace graywarp
