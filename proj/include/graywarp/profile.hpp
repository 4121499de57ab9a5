#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

#include "graywarp/errors.hpp"
#include "graywarp/family.hpp"
#include "graywarp/ode.hpp"
#include "graywarp/util.hpp"

namespace graywarp {

enum class ProfileKind {
    ClosedFormTanh,   // f = tanh t   (A = -2, C = n-1, tau = n-1)
    ClosedFormTan,    // f = tan t    (A = +2, C = n-1, tau = n-1)
    CompactNumeric,   // pole -> turning point -> mirrored far pole
    RayNumeric,       // pole -> infinity (possibly finite-time blow-up)
    PeriodicNumeric,  // oscillates between two positive turning radii
};

struct ProfileSample {
    double f, fp, fpp;
};

struct SolveSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.025;       ///< node spacing cap (controls interpolation error)
    double seed_offset = 1e-4;  ///< series seed distance from a pole
    double t_max = 5.0;         ///< integration horizon for ray families
    double ceiling = 1e6;       ///< blow-up detection threshold on f
    double event_tol = 1e-13;   ///< bisection tolerance for the f' = 0 event
    double reflect_tol = 1e-7;  ///< continued-vs-reflected self-check (<=0 disables)
};

/// A solved warp profile f on [t_lo, t_hi], evaluable together with f' and
/// f''.  Numeric kinds carry the accepted integration nodes and evaluate by
/// quintic Hermite interpolation; f'' is always reconstituted through the
/// profile equation f'' = A f + (2C/(n-1)) f^3 from the interpolated f.
class Profile {
public:
    ProfileKind kind = ProfileKind::RayNumeric;
    FamilyParams params;
    double t_lo = 0.0, t_hi = 0.0;

    std::optional<double> t0;       ///< turning time (compact: domain is [0, 2 t0])
    std::optional<double> period;   ///< period (periodic families)
    std::optional<double> root_a;   ///< smaller positive turning radius
    std::optional<double> root_b;   ///< larger positive turning radius
    std::optional<double> blow_up_t;  ///< abscissa where f crossed the ceiling

    // Compact-family self-check metadata: the integration is continued
    // through the turning point to the far pole and compared against the
    // reflection f(t0 + s) = f(t0 - s).
    double far_pole_f = 0.0;
    double far_pole_fp = 0.0;
    double reflect_err = 0.0;

    /// Multiplicative perturbation amplitude: eval returns
    /// f * (1 + amp sin 3t) with consistently perturbed derivatives.
    /// Used to demonstrate sensitivity of the verification checks.
    double perturb_amp = 0.0;

    std::vector<DenseNode<2>> nodes;  // (f, f') at accepted integration times

    double span() const { return t_hi - t_lo; }

    ProfileSample eval(double t) const {
        if (kind == ProfileKind::PeriodicNumeric) {
            // Periodic profiles extend to all of R by periodicity.
            if (t < t_lo || t > t_hi) {
                t = std::fmod(t - t_lo, *period);
                if (t < 0.0) t += *period;
                t += t_lo;
            }
        } else {
            const double slack = 1e-12 * std::max(1.0, span());
            if (t < t_lo - slack || t > t_hi + slack)
                throw OutOfDomain("profile evaluated at t = " + g17(t) +
                                  " outside [" + g17(t_lo) + ", " + g17(t_hi) +
                                  "]");
            t = std::clamp(t, t_lo, t_hi);
        }
        ProfileSample s = base_eval(t);
        if (perturb_amp != 0.0) {
            const double p = perturb_amp;
            const double sn = std::sin(3.0 * t), cs = std::cos(3.0 * t);
            const double g = 1.0 + p * sn;
            const double f = s.f, fp = s.fp, fpp = s.fpp;
            s.f = f * g;
            s.fp = fp * g + 3.0 * p * f * cs;
            s.fpp = fpp * g + 6.0 * p * fp * cs - 9.0 * p * f * sn;
        }
        return s;
    }

    /// A copy of this profile whose eval applies the multiplicative
    /// perturbation above.  The perturbed triple is internally consistent
    /// (derivatives of the perturbed f) but no longer solves the profile
    /// equation, so every structural identity must visibly fail on it.
    Profile perturbed(double amp) const {
        Profile q = *this;
        q.perturb_amp = amp;
        return q;
    }

private:
    ProfileSample base_eval(double t) const {
        switch (kind) {
            case ProfileKind::ClosedFormTanh: {
                const double f = std::tanh(t);
                const double s2 = 1.0 - f * f;  // sech^2
                return {f, s2, -2.0 * f * s2};
            }
            case ProfileKind::ClosedFormTan: {
                const double f = std::tan(t);
                const double s2 = 1.0 + f * f;  // sec^2
                return {f, s2, 2.0 * f * s2};
            }
            case ProfileKind::CompactNumeric: {
                if (t > *t0) {
                    ProfileSample s = node_eval(2.0 * *t0 - t);
                    s.fp = -s.fp;
                    return s;
                }
                return node_eval(t);
            }
            case ProfileKind::PeriodicNumeric:
            case ProfileKind::RayNumeric:
            default:
                return node_eval(t);
        }
    }

    ProfileSample node_eval(double t) const {
        const auto it = std::upper_bound(
            nodes.begin(), nodes.end(), t,
            [](double v, const DenseNode<2>& n) { return v < n.t; });
        std::size_t i = (it == nodes.begin()) ? 0 : (it - nodes.begin() - 1);
        i = std::min(i, nodes.size() - 2);
        const auto& l = nodes[i];
        const auto& r = nodes[i + 1];
        const auto q = QuinticHermite::make(l.t, r.t, l.y[0], l.y[1], l.dy[1],
                                            r.y[0], r.y[1], r.dy[1]);
        const double f = q.eval(t);
        return {f, q.deriv(t), accel_rhs(params, f)};
    }
};

namespace detail {

inline void require_pole_normalization(const FamilyParams& p) {
    if (std::fabs(p.tau - (p.n - 1)) > 1e-9 * std::max(1.0, std::fabs(p.tau)))
        throw FamilyMismatch(
            "pole-based families require tau = n - 1 (unit-speed pole "
            "normalization f'(0) = 1); got tau = " + g17(p.tau));
}

inline auto profile_rhs(const FamilyParams& p) {
    return [p](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = y[1];
        dy[1] = accel_rhs(p, y[0]);
    };
}

inline OdeSettings ode_settings(const SolveSettings& s) {
    OdeSettings o;
    o.rtol = s.rtol;
    o.atol = s.atol;
    o.h_max = s.h_max;
    o.h_init = std::min(1e-3, s.h_max);
    return o;
}

/// Interpolate f on a raw node list (used for the reflection self-check
/// before a Profile object exists).
inline double raw_f(const std::vector<DenseNode<2>>& nodes, double t) {
    const auto it = std::upper_bound(
        nodes.begin(), nodes.end(), t,
        [](double v, const DenseNode<2>& n) { return v < n.t; });
    std::size_t i = (it == nodes.begin()) ? 0 : (it - nodes.begin() - 1);
    i = std::min(i, nodes.size() - 2);
    const auto& l = nodes[i];
    const auto& r = nodes[i + 1];
    return QuinticHermite::make(l.t, r.t, l.y[0], l.y[1], l.dy[1], r.y[0],
                                r.y[1], r.dy[1])
        .eval(t);
}

}  // namespace detail

/// If the parameters match one of the two closed-form normalized families
/// (A = -2: f = tanh t; A = +2: f = tan t; both with tau = C = n - 1),
/// return the corresponding closed-form profile on [0, t_max] (truncated
/// before the blow-up for tan).  Otherwise nullopt.
inline std::optional<Profile> closed_form_lookup(const FamilyParams& p,
                                                 double t_max = 5.0) {
    p.validate();
    const double eps = 1e-12;
    if (std::fabs(p.tau - (p.n - 1)) > eps || std::fabs(p.C - (p.n - 1)) > eps)
        return std::nullopt;
    Profile pr;
    pr.params = p;
    pr.t_lo = 0.0;
    if (std::fabs(p.A + 2.0) <= eps) {
        pr.kind = ProfileKind::ClosedFormTanh;
        pr.t_hi = t_max;
        return pr;
    }
    if (std::fabs(p.A - 2.0) <= eps) {
        pr.kind = ProfileKind::ClosedFormTan;
        pr.t_hi = std::min(t_max, std::atan(1e6));
        if (pr.t_hi < t_max) pr.blow_up_t = pr.t_hi;
        return pr;
    }
    return std::nullopt;
}

/// Solve the warp-profile initial value problem for the requested family.
///
/// Compact:  pole start f(0)=0, f'(0)=1; the f'=0 turning event at t0 is
///           localized by bisection; the profile closes at the far pole
///           2 t0 by reflection, cross-checked against continuing the
///           integration through the turning point.
/// Ray:      pole start, integrated to t_max or until f exceeds the
///           blow-up ceiling.
/// Periodic: starts at the inner turning radius f(0) = a, f'(0) = 0; the
///           period is computed by quadrature of the first integral and
///           two full periods of nodes are stored.
inline Profile solve(const FamilyParams& p, FamilyKind kind,
                     const SolveSettings& s = {}) {
    p.validate();
    Profile pr;
    pr.params = p;
    pr.t_lo = 0.0;
    const auto rhs = detail::profile_rhs(p);
    const OdeSettings os = detail::ode_settings(s);
    const auto roots = positive_profile_roots(p);

    switch (kind) {
        case FamilyKind::Ray: {
            detail::require_pole_normalization(p);
            if (p.C < 0.0)
                throw FamilyMismatch(
                    "ray families require C > 0 (C < 0 profiles always turn)");
            if (roots.count != 0)
                throw FamilyMismatch(
                    "first integral has a positive root: the profile turns "
                    "and closes up (compact family), not a ray");
            pr.kind = ProfileKind::RayNumeric;
            const auto series = odd_series_coeffs(p);
            std::array<double, 2> y0;
            eval_odd_series(series, s.seed_offset, &y0[0], &y0[1]);
            pr.nodes.push_back(DenseNode<2>{0.0, {0.0, 1.0}, {1.0, 0.0}});
            const double ceiling = s.ceiling;
            const OdeStop st = integrate_ode<2>(
                rhs, y0, s.seed_offset, s.t_max, os, pr.nodes,
                [ceiling](const DenseNode<2>&, const DenseNode<2>& cur) {
                    return cur.y[0] >= ceiling;
                });
            pr.t_hi = pr.nodes.back().t;
            if (st == OdeStop::Predicate) pr.blow_up_t = pr.t_hi;
            return pr;
        }

        case FamilyKind::Compact: {
            detail::require_pole_normalization(p);
            if (p.C > 0.0) {
                if (roots.count != 2)
                    throw FamilyMismatch(
                        "compact family with C > 0 requires two positive "
                        "turning radii (A < -2 sqrt(C/(n-1)) strictly)");
                pr.root_a = roots.r[0];
                pr.root_b = roots.r[1];
            } else {
                if (roots.count < 1)
                    throw FamilyMismatch(
                        "compact family with C < 0: no positive turning radius");
                pr.root_a = roots.r[0];
            }
            pr.kind = ProfileKind::CompactNumeric;
            const auto series = odd_series_coeffs(p);
            std::array<double, 2> y0;
            eval_odd_series(series, s.seed_offset, &y0[0], &y0[1]);
            pr.nodes.push_back(DenseNode<2>{0.0, {0.0, 1.0}, {1.0, 0.0}});
            const OdeStop st = integrate_ode<2>(
                rhs, y0, s.seed_offset, 1e6, os, pr.nodes,
                [](const DenseNode<2>&, const DenseNode<2>& cur) {
                    return cur.y[1] <= 0.0;
                });
            if (st != OdeStop::Predicate)
                throw Error("compact solve: turning point not reached");

            // Localize the f' = 0 event inside the last accepted interval.
            const auto& l = pr.nodes[pr.nodes.size() - 2];
            const auto& r = pr.nodes[pr.nodes.size() - 1];
            const auto q = QuinticHermite::make(l.t, r.t, l.y[0], l.y[1],
                                                l.dy[1], r.y[0], r.y[1], r.dy[1]);
            const double t0 =
                (r.y[1] == 0.0)
                    ? r.t
                    : bisect([&q](double t) { return q.deriv(t); }, l.t, r.t,
                             s.event_tol);
            const double f0 = q.eval(t0), fp0 = q.deriv(t0);
            pr.nodes.back() = DenseNode<2>{t0, {f0, fp0}, {fp0, accel_rhs(p, f0)}};
            pr.t0 = t0;
            pr.t_hi = 2.0 * t0;

            // Self-check: continue through the turning point to the far
            // pole and compare with the reflection of the first half.
            std::vector<DenseNode<2>> cont;
            integrate_ode<2>(
                rhs, {f0, fp0}, t0, 2.0 * t0, os, cont,
                [](const DenseNode<2>&, const DenseNode<2>&) { return false; });
            double worst = 0.0;
            for (const auto& nd : cont) {
                const double mirrored = detail::raw_f(pr.nodes, 2.0 * t0 - nd.t);
                worst = std::max(worst, std::fabs(nd.y[0] - mirrored));
            }
            pr.reflect_err = worst;
            pr.far_pole_f = cont.back().y[0];
            pr.far_pole_fp = cont.back().y[1];
            if (s.reflect_tol > 0.0 && worst > s.reflect_tol)
                throw Error(
                    "compact solve: continued integration disagrees with the "
                    "reflected profile by " + g17(worst));
            return pr;
        }

        case FamilyKind::Periodic: {
            if (!(p.tau < 0.0))
                throw FamilyMismatch("periodic families require tau < 0");
            if (!(p.C < 0.0))
                throw FamilyMismatch("periodic families require C < 0");
            if (!(p.A > 0.0))
                throw FamilyMismatch("periodic families require A > 0");
            const RootPair rp = quartic_roots(p);  // throws NoRealRoots
            pr.root_a = rp.a;
            pr.root_b = rp.b;
            pr.kind = ProfileKind::PeriodicNumeric;

            // Period by quadrature: with u = f^2 and the substitution
            // f^2 = a^2 cos^2(th) + b^2 sin^2(th), the half-period integral
            // a->b of df/sqrt(P) becomes a smooth integral over [0, pi/2].
            const double gh = std::fabs(p.gamma());
            const double a2 = rp.a * rp.a, b2 = rp.b * rp.b;
            const double half = adaptive_simpson(
                [&](double th) {
                    const double c = std::cos(th), sn = std::sin(th);
                    return 1.0 / std::sqrt(gh * (a2 * c * c + b2 * sn * sn));
                },
                0.0, std::asin(1.0), 1e-13);
            pr.period = 2.0 * half;
            pr.t_hi = 2.0 * *pr.period;

            integrate_ode<2>(
                rhs, {rp.a, 0.0}, 0.0, pr.t_hi, os, pr.nodes,
                [](const DenseNode<2>&, const DenseNode<2>&) { return false; });
            return pr;
        }
    }
    throw Error("solve: unknown family kind");
}

/// Even-derivative estimates |f^(2)(pole)|, |f^(4)(pole)| (up to
/// max_order <= 2) at a pole of the profile.  f' is sampled on an inward
/// window, the odd model series of the profile equation is subtracted, and
/// the surviving even content is extracted by a least-squares fit; for a
/// true solution the estimates are at the numerical noise floor, while any
/// even contamination of the profile shows up at full magnitude.
inline std::vector<double> parity_check(const Profile& pr, double pole_t,
                                        int max_order) {
    if (max_order < 1 || max_order > 2)
        throw std::invalid_argument("parity_check: max_order must be 1 or 2");
    const double slack = 1e-9 * std::max(1.0, pr.span());
    int inward;
    if (std::fabs(pole_t - pr.t_lo) <= slack)
        inward = +1;
    else if (std::fabs(pole_t - pr.t_hi) <= slack)
        inward = -1;
    else
        throw PoleEvaluation("parity_check: pole_t is not a domain endpoint");
    if (std::fabs(pr.eval(pole_t).f) > 1e-6)
        throw PoleEvaluation("parity_check: profile does not vanish at pole_t");

    const auto series = odd_series_coeffs(pr.params);
    std::vector<double> out;
    for (int order = 1; order <= max_order; ++order) {
        const int M = (order == 1) ? 20 : 35;
        const int D = (order == 1) ? 4 : 5;
        const double W = std::min(order == 1 ? 0.20 : 0.35, 0.45 * pr.span());
        const double h = W / M;

        // Residual between the sampled f' and the odd-series model of f'.
        std::vector<double> x(M), rres(M);
        for (int j = 1; j <= M; ++j) {
            const double tj = j * h;
            const double sample_t = pole_t + inward * tj;
            const double fp_inward = inward * pr.eval(sample_t).fp;
            double fp_model;
            eval_odd_series(series, tj, nullptr, &fp_model);
            x[j - 1] = tj / W;
            rres[j - 1] = fp_inward - fp_model;
        }

        // Least-squares fit of the residual on the scaled window.
        std::vector<std::vector<double>> XtX(D + 1, std::vector<double>(D + 1, 0.0));
        std::vector<double> Xtr(D + 1, 0.0);
        for (int j = 0; j < M; ++j) {
            double pw_r = 1.0;
            std::vector<double> row(D + 1);
            for (int d = 0; d <= D; ++d) {
                row[d] = pw_r;
                pw_r *= x[j];
            }
            for (int a = 0; a <= D; ++a) {
                Xtr[a] += row[a] * rres[j];
                for (int b = 0; b <= D; ++b) XtX[a][b] += row[a] * row[b];
            }
        }
        const std::vector<double> c = solve_dense(XtX, Xtr);
        if (order == 1)
            out.push_back(std::fabs(c[1]) / W);  // coefficient of t in f'
        else
            out.push_back(6.0 * std::fabs(c[3]) / (W * W * W));  // of t^3
    }
    return out;
}

/// Write `points` uniformly spaced samples as CSV: t,f,fp,fpp.
inline void write_profile_csv(std::ostream& os, const Profile& pr,
                              int points = 1001) {
    os << "t,f,fp,fpp\n";
    for (int i = 0; i < points; ++i) {
        const double t =
            pr.t_lo + (pr.t_hi - pr.t_lo) * static_cast<double>(i) / (points - 1);
        const ProfileSample s = pr.eval(t);
        os << g17(t) << ',' << g17(s.f) << ',' << g17(s.fp) << ',' << g17(s.fpp)
           << '\n';
    }
}

}  // namespace graywarp
