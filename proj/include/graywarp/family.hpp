#pragma once

#include <array>
#include <cmath>
#include <string>

#include "graywarp/errors.hpp"
#include "graywarp/util.hpp"

namespace graywarp {

/// Which qualitative profile family to construct.
enum class FamilyKind { Compact, Ray, Periodic };

inline const char* to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::Compact: return "compact";
        case FamilyKind::Ray: return "ray";
        case FamilyKind::Periodic: return "periodic";
    }
    return "?";
}

/// Parameters of a warped-product metric dt^2 + f(t)^2 g_M over an
/// n-dimensional Einstein fiber with Ric = tau * g_M.  The warp profile
/// satisfies
///     f'' = A f + (2C/(n-1)) f^3
/// with first integral
///     (f')^2 = tau/(n-1) + A f^2 + (C/(n-1)) f^4.
/// C is the eigenvalue-gap coefficient: lambda - mu = C f^2.
struct FamilyParams {
    int n = 3;         ///< fiber dimension (total dimension m = n + 1)
    double tau = 2.0;  ///< fiber Einstein constant
    double A = -2.0;   ///< quadratic coefficient of the first integral
    double C = 2.0;    ///< eigenvalue-gap coefficient (C != 0)

    int m() const { return n + 1; }
    /// Quartic coefficient of the first integral, gamma = C/(n-1).
    double gamma() const { return C / (n - 1); }

    void validate() const {
        if (n < 2) throw FamilyMismatch("fiber dimension n must be >= 2");
        if (!(std::isfinite(tau) && std::isfinite(A) && std::isfinite(C)))
            throw FamilyMismatch("family parameters must be finite");
        if (C == 0.0)
            throw FamilyMismatch("C must be nonzero (C = 0 is the Einstein degeneration)");
    }
};

/// Right-hand side of the first integral: P(f) = tau/(n-1) + A f^2 + gamma f^4.
inline double first_integral_rhs(const FamilyParams& p, double f) {
    const double f2 = f * f;
    return p.tau / (p.n - 1) + p.A * f2 + p.gamma() * f2 * f2;
}

/// Profile acceleration: f'' = A f + 2 gamma f^3  (= P'(f)/2).
inline double accel_rhs(const FamilyParams& p, double f) {
    return p.A * f + 2.0 * p.gamma() * f * f * f;
}

/// d(f'')/df, so that f''' = accel_slope(f) * f'.
inline double accel_slope(const FamilyParams& p, double f) {
    return p.A + 6.0 * p.gamma() * f * f;
}

/// Positive simple roots of P(f) in f, ascending.  count is 0, 1 or 2.
/// A double root (discriminant ~ 0) is reported as count
/// 0 with `boundary` set: the profile approaches it asymptotically and
/// never turns.
struct PositiveRoots {
    int count = 0;
    std::array<double, 2> r{0.0, 0.0};
    bool boundary = false;  ///< quadratic-in-f^2 discriminant vanishes
};

inline PositiveRoots positive_profile_roots(const FamilyParams& p) {
    p.validate();
    const double g = p.gamma();
    const double tp = p.tau / (p.n - 1);
    const double disc = p.A * p.A - 4.0 * g * tp;
    PositiveRoots out;
    const double scale = p.A * p.A + std::fabs(4.0 * g * tp);
    if (disc <= 1e-14 * scale) {
        // No simple roots; flag the degenerate boundary where the double
        // root sits at positive u = f^2 (an asymptotic turning radius).
        out.boundary = (disc >= -1e-14 * scale) && (-p.A / (2.0 * g) > 0.0);
        return out;
    }
    // Numerically stable quadratic roots in u = f^2.
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (p.A + std::copysign(sq, p.A));
    double u1 = q / g;
    double u2 = (q != 0.0) ? tp / q : 0.0;
    if (u1 > u2) std::swap(u1, u2);
    if (u1 > 0.0) out.r[out.count++] = std::sqrt(u1);
    if (u2 > 0.0) out.r[out.count++] = std::sqrt(u2);
    if (out.count == 2 && out.r[0] > out.r[1]) std::swap(out.r[0], out.r[1]);
    return out;
}

/// The two positive turning radii (a < b) of a profile whose first integral
/// has two distinct positive simple roots.  Covers the compact C > 0
/// families (f oscillates in [0, a]) and the periodic C < 0 families
/// (f oscillates in [a, b]).  Throws NoRealRoots otherwise.
struct RootPair {
    double a = 0.0, b = 0.0;
};

inline RootPair quartic_roots(const FamilyParams& p) {
    const PositiveRoots pr = positive_profile_roots(p);
    if (pr.count != 2)
        throw NoRealRoots(
            "first integral does not have two distinct positive roots "
            "(found " + std::to_string(pr.count) + ")");
    return RootPair{pr.r[0], pr.r[1]};
}

/// Odd Taylor coefficients a_1..a_17 of the pole branch
///   f(t) = t + a3 t^3 + a5 t^5 + ... + a17 t^17,
/// generated by the recurrence obtained from substituting the odd series
/// into f'' = A f + B f^3 with B = 2C/(n-1).  Requires the pole
/// normalization tau = n - 1 (so that f'(0) = 1).
/// Index k holds a_{2k+1}.
inline std::array<double, 9> odd_series_coeffs(const FamilyParams& p) {
    const double A = p.A;
    const double B = 2.0 * p.gamma();
    std::array<double, 9> a{};
    a[0] = 1.0;
    a[1] = A / 6.0;                                      // a3
    a[2] = (A * a[1] + B) / 20.0;                        // a5
    a[3] = (A * a[2] + 3.0 * B * a[1]) / 42.0;           // a7
    a[4] = (A * a[3] + B * (3.0 * a[2] + 3.0 * a[1] * a[1])) / 72.0;  // a9
    a[5] = (A * a[4] + B * (3.0 * a[3] + 6.0 * a[1] * a[2] +
                            a[1] * a[1] * a[1])) / 110.0;             // a11
    a[6] = (A * a[5] + B * (3.0 * a[4] + 6.0 * a[1] * a[3] + 3.0 * a[2] * a[2] +
                            3.0 * a[1] * a[1] * a[2])) / 156.0;       // a13
    a[7] = (A * a[6] +
            B * (3.0 * a[5] + 6.0 * a[1] * a[4] + 6.0 * a[2] * a[3] +
                 3.0 * a[1] * a[1] * a[3] + 3.0 * a[1] * a[2] * a[2])) /
           210.0;                                                     // a15
    a[8] = (A * a[7] +
            B * (3.0 * a[6] + 6.0 * a[1] * a[5] + 6.0 * a[2] * a[4] +
                 3.0 * a[3] * a[3] + 3.0 * a[1] * a[1] * a[4] +
                 6.0 * a[1] * a[2] * a[3] + a[2] * a[2] * a[2])) /
           272.0;                                                     // a17
    return a;
}

/// Evaluate the odd pole series and its derivative at offset h from a pole.
inline void eval_odd_series(const std::array<double, 9>& a, double h,
                            double* f, double* fp) {
    const double h2 = h * h;
    double val = 0.0, der = 0.0, pw = h, dpw = 1.0;
    for (int k = 0; k < 9; ++k) {
        const double deg = 2.0 * k + 1.0;
        val += a[k] * pw;
        der += a[k] * deg * dpw;
        pw *= h2;
        dpw *= h2;
    }
    if (f) *f = val;
    if (fp) *fp = der;
}

}  // namespace graywarp
