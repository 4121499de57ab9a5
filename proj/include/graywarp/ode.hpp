#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace graywarp {

struct OdeSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.05;
    double h_init = 1e-3;
    long max_steps = 5'000'000;
};

/// One accepted integration node: time, state and state derivative.
template <int N>
struct DenseNode {
    double t;
    std::array<double, N> y;
    std::array<double, N> dy;
};

/// Outcome of integrate_ode.
enum class OdeStop { ReachedEnd, Predicate };

/// Explicit adaptive Dormand-Prince 5(4) integrator (FSAL).  Integrates
/// forward from t0 to t1, appending every accepted node to `nodes`
/// (including the initial one).  After each accepted step the predicate
/// `stop(prev, cur)` is consulted; returning true ends the integration with
/// OdeStop::Predicate (the triggering node is kept so the caller can
/// localize events inside the final interval).
template <int N, class RHS, class StopFn>
OdeStop integrate_ode(RHS&& rhs, std::array<double, N> y0, double t0, double t1,
                      const OdeSettings& s, std::vector<DenseNode<N>>& nodes,
                      StopFn&& stop) {
    if (!(t1 > t0)) throw std::invalid_argument("integrate_ode: requires t1 > t0");

    using State = std::array<double, N>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    State y = y0;
    State k1;
    rhs(t, y, k1);
    nodes.push_back(DenseNode<N>{t, y, k1});

    double h = std::min(s.h_init, s.h_max);
    State k2, k3, k4, k5, k6, k7, ytmp, ynew;

    for (long step = 0; step < s.max_steps; ++step) {
        if (t >= t1) return OdeStop::ReachedEnd;
        h = std::min({h, s.h_max, t1 - t});
        if (h < 1e-14 * std::max(1.0, std::fabs(t)))
            throw std::runtime_error("integrate_ode: step size underflow");

        for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (int i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        for (int i = 0; i < N; ++i) {
            const double est = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                    e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc =
                s.atol + s.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err += (est / sc) * (est / sc);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            nodes.push_back(DenseNode<N>{t, y, k1});
            const auto sz = nodes.size();
            if (stop(nodes[sz - 2], nodes[sz - 1])) return OdeStop::Predicate;
        }
        const double fac =
            (err > 0.0) ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        h *= fac;
    }
    throw std::runtime_error("integrate_ode: max step count exceeded");
}

/// Quintic Hermite interpolant on [t0, t1] built from values, first and
/// second derivatives at both endpoints.  Exact for polynomials of degree
/// <= 5; interpolation error is O(h^6 f^(6)).
struct QuinticHermite {
    double t0, h;
    std::array<double, 6> c;  // monomial coefficients in s = (t - t0)/h

    static QuinticHermite make(double t0, double t1, double v0, double d0,
                               double dd0, double v1, double d1, double dd1) {
        QuinticHermite q;
        q.t0 = t0;
        q.h = t1 - t0;
        const double m0 = d0 * q.h, a0 = dd0 * q.h * q.h;
        const double m1 = d1 * q.h, a1 = dd1 * q.h * q.h;
        const double D = v1 - v0 - m0 - 0.5 * a0;
        const double E = m1 - m0 - a0;
        const double F = a1 - a0;
        q.c = {v0,
               m0,
               0.5 * a0,
               10.0 * D - 4.0 * E + 0.5 * F,
               -15.0 * D + 7.0 * E - F,
               6.0 * D - 3.0 * E + 0.5 * F};
        return q;
    }

    double eval(double t) const {
        const double s = (t - t0) / h;
        return ((((c[5] * s + c[4]) * s + c[3]) * s + c[2]) * s + c[1]) * s + c[0];
    }

    double deriv(double t) const {
        const double s = (t - t0) / h;
        return ((((5.0 * c[5] * s + 4.0 * c[4]) * s + 3.0 * c[3]) * s +
                 2.0 * c[2]) * s + c[1]) / h;
    }
};

/// Locate a zero of `fn` in [lo, hi] by bisection; requires a sign change.
template <class F>
double bisect(F&& fn, double lo, double hi, double tol = 1e-13) {
    double flo = fn(lo), fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: no sign change in bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace graywarp
