#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "graywarp/errors.hpp"
#include "graywarp/profile.hpp"

namespace graywarp {

/// Tangent vector at a point of the warped product, written in the
/// orthonormal-adapted frame: a radial component r (along dt) and a fiber
/// component v expressed in coordinates that the fiber metric scales by
/// f(t)^2.  The fiber block is modelled with three slots, enough to exhibit
/// every curvature identity (they depend on fiber vectors only through
/// g-inner products and radial projections).
struct TangentVector {
    double r = 0.0;
    std::array<double, 3> v{0.0, 0.0, 0.0};
};

inline double fiber_dot(const TangentVector& x, const TangentVector& y) {
    return x.v[0] * y.v[0] + x.v[1] * y.v[1] + x.v[2] * y.v[2];
}

/// Immutable view of the warped-product metric g = dt^2 + f(t)^2 g_M built
/// on a solved profile.
class WarpedMetric {
public:
    explicit WarpedMetric(const Profile& pr) : prof_(&pr) {}

    const Profile& profile() const { return *prof_; }
    const FamilyParams& params() const { return prof_->params; }
    int n() const { return prof_->params.n; }
    int m() const { return prof_->params.m(); }
    ProfileSample at(double t) const { return prof_->eval(t); }

private:
    const Profile* prof_;
};

/// Metric inner product of two tangent vectors at abscissa t.
inline double inner(const WarpedMetric& g, double t, const TangentVector& x,
                    const TangentVector& y) {
    const ProfileSample s = g.at(t);
    return x.r * y.r + s.f * s.f * fiber_dot(x, y);
}

/// Below this warp value the direct eigenvalue formulas lose digits to
/// 0/0 cancellation and the equivalent pole-branch polynomials (exact for
/// solutions of the profile equation) are used instead.
inline constexpr double kPoleBranchF = 1e-3;

struct RicciPair {
    double lambda;  ///< fiber Ricci eigenvalue
    double mu;      ///< radial Ricci eigenvalue
};

/// The two Ricci eigenvalues of the warped product:
///   mu     = -n f''/f                       (radial direction)
///   lambda = (tau - f f'' - (n-1) f'^2)/f^2 (fiber directions)
/// Near a pole (f < kPoleBranchF) the removable singularity is evaluated
/// through the profile equation and its first integral, giving the exact
/// polynomial branch
///   mu     = -nA - 2nC/(n-1) f^2,   lambda = -nA - (n+1)C/(n-1) f^2,
/// so both eigenvalues extend continuously to the pole with value -nA.
inline RicciPair ricci_eigenvalues(const WarpedMetric& g, double t) {
    const FamilyParams& p = g.params();
    const ProfileSample s = g.at(t);
    const double f = s.f;
    if (std::fabs(f) < kPoleBranchF && g.profile().perturb_amp == 0.0) {
        const double f2 = f * f;
        return {-p.n * p.A - (p.n + 1) * p.gamma() * f2,
                -p.n * p.A - 2.0 * p.n * p.gamma() * f2};
    }
    if (f == 0.0) throw PoleEvaluation("ricci_eigenvalues: f = 0 for a profile off its model equation");
    const double mu = -p.n * s.fpp / f;
    const double lambda = (p.tau - f * s.fpp - (p.n - 1) * s.fp * s.fp) / (f * f);
    return {lambda, mu};
}

struct EigenData {
    double lambda, mu;        ///< Ricci eigenvalues
    double scal;              ///< scalar curvature mu + n lambda
    double lambda_S, mu_S;    ///< shifted: . - 2 scal/(m+2)
    double alpha;             ///< conformal scalar 2 sqrt|C| f'
    double xi_r;              ///< radial component sqrt|C| f of the gap field
};

inline EigenData scalar_and_shifted(const WarpedMetric& g, double t) {
    const FamilyParams& p = g.params();
    const RicciPair e = ricci_eigenvalues(g, t);
    const ProfileSample s = g.at(t);
    EigenData d;
    d.lambda = e.lambda;
    d.mu = e.mu;
    d.scal = e.mu + p.n * e.lambda;
    const double shift = 2.0 * d.scal / (p.m() + 2);
    d.lambda_S = e.lambda - shift;
    d.mu_S = e.mu - shift;
    const double sc = std::sqrt(std::fabs(p.C));
    d.alpha = 2.0 * sc * s.fp;
    d.xi_r = sc * s.f;
    return d;
}

struct EigenRates {
    double dlambda, dmu, dscal, dlambda_S, dmu_S, dalpha;
};

/// t-derivatives of the eigenvalue data, obtained by differentiating the
/// defining formulas with f''' supplied by the profile equation
/// (f''' = accel_slope(f) f').  Near a pole the equivalent polynomial
/// branch derivatives are used.
inline EigenRates eigen_rates(const WarpedMetric& g, double t) {
    const FamilyParams& p = g.params();
    const ProfileSample s = g.at(t);
    const double f = s.f, fp = s.fp, fpp = s.fpp;
    EigenRates r;
    if (std::fabs(f) < kPoleBranchF && g.profile().perturb_amp == 0.0) {
        r.dmu = -4.0 * p.n * p.gamma() * f * fp;
        r.dlambda = -2.0 * (p.n + 1) * p.gamma() * f * fp;
    } else {
        const double fppp = accel_slope(p, f) * fp;
        r.dmu = -p.n * (fppp * f - fpp * fp) / (f * f);
        const double N = p.tau - f * fpp - (p.n - 1) * fp * fp;
        const double dN = -fp * fpp - f * fppp - 2.0 * (p.n - 1) * fp * fpp;
        r.dlambda = dN / (f * f) - 2.0 * N * fp / (f * f * f);
    }
    r.dscal = r.dmu + p.n * r.dlambda;
    const double dshift = 2.0 * r.dscal / (p.m() + 2);
    r.dlambda_S = r.dlambda - dshift;
    r.dmu_S = r.dmu - dshift;
    r.dalpha = 2.0 * std::sqrt(std::fabs(p.C)) * fpp;
    return r;
}

namespace detail {

/// Covariant derivative (nabla_X h)(Y, Z) of a symmetric tensor of the form
/// h = a(t) g + (b(t) - a(t)) dt (x) dt in the adapted frame, where fields
/// are constant-component in the frame.  The general closed form is
///   X.r [ a' g(Y,Z) + (b'-a') Y.r Z.r ]
///   + (b-a)(f'/f) [ (g(X,Y) - X.r Y.r) Z.r + Y.r (g(X,Z) - X.r Z.r) ].
inline double nabla_radial_tensor(const WarpedMetric& g, double t, double a,
                                  double b, double da, double db,
                                  const TangentVector& X, const TangentVector& Y,
                                  const TangentVector& Z) {
    const ProfileSample s = g.at(t);
    if (std::fabs(s.f) < 1e-12)
        throw PoleEvaluation("covariant derivative requested at a pole");
    const double gYZ = inner(g, t, Y, Z);
    const double gXY = inner(g, t, X, Y);
    const double gXZ = inner(g, t, X, Z);
    const double conn = (b - a) * (s.fp / s.f);
    return X.r * (da * gYZ + (db - da) * Y.r * Z.r) +
           conn * ((gXY - X.r * Y.r) * Z.r + Y.r * (gXZ - X.r * Z.r));
}

}  // namespace detail

/// (nabla_X Ric)(Y, Z).
inline double nabla_ricci(const WarpedMetric& g, double t, const TangentVector& X,
                          const TangentVector& Y, const TangentVector& Z) {
    const EigenData e = scalar_and_shifted(g, t);
    const EigenRates r = eigen_rates(g, t);
    return detail::nabla_radial_tensor(g, t, e.lambda, e.mu, r.dlambda, r.dmu,
                                       X, Y, Z);
}

/// (nabla_X T)(Y, Z) for the shifted tensor T = Ric - (2 scal/(m+2)) g.
inline double nabla_shifted_ricci(const WarpedMetric& g, double t,
                                  const TangentVector& X, const TangentVector& Y,
                                  const TangentVector& Z) {
    const EigenData e = scalar_and_shifted(g, t);
    const EigenRates r = eigen_rates(g, t);
    return detail::nabla_radial_tensor(g, t, e.lambda_S, e.mu_S, r.dlambda_S,
                                       r.dmu_S, X, Y, Z);
}

/// Pointwise data of the conformally rescaled metric e^{2u} g rewritten as
/// a warped product dsigma^2 + F(sigma)^2 g_M in its own arclength sigma.
struct ConformalPoint {
    double t;         ///< original abscissa
    double sigma;     ///< arclength of the rescaled metric
    double F;         ///< rescaled warp e^u f
    double F1, F2;    ///< dF/dsigma, d^2F/dsigma^2
    double lambda_t;  ///< fiber Ricci eigenvalue of the rescaled metric
    double mu_t;      ///< radial Ricci eigenvalue of the rescaled metric
};

/// Recompute the warped-product data of e^{2u} g on a grid of abscissae.
/// u, du, ddu are the conformal exponent and its first two t-derivatives
/// evaluated on the same grid.  sigma is accumulated by Simpson panels of
/// e^u, using umid for panel midpoints (umid[i] corresponds to the midpoint
/// of [ts[i], ts[i+1]]).
inline std::vector<ConformalPoint> conformal_to_warped(
    const WarpedMetric& g, const std::vector<double>& ts,
    const std::vector<double>& u, const std::vector<double>& du,
    const std::vector<double>& ddu, const std::vector<double>& umid) {
    const FamilyParams& p = g.params();
    std::vector<ConformalPoint> out(ts.size());
    double sigma = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i > 0) {
            const double w = ts[i] - ts[i - 1];
            sigma += w / 6.0 *
                     (std::exp(u[i - 1]) + 4.0 * std::exp(umid[i - 1]) +
                      std::exp(u[i]));
        }
        const ProfileSample s = g.at(ts[i]);
        const double eu = std::exp(u[i]);
        ConformalPoint c;
        c.t = ts[i];
        c.sigma = sigma;
        c.F = eu * s.f;
        c.F1 = du[i] * s.f + s.fp;
        c.F2 = (ddu[i] * s.f + du[i] * s.fp + s.fpp) / eu;
        if (std::fabs(c.F) < 1e-12)
            throw PoleEvaluation("conformal_to_warped: rescaled warp vanishes");
        c.mu_t = -p.n * c.F2 / c.F;
        c.lambda_t =
            (p.tau - c.F * c.F2 - (p.n - 1) * c.F1 * c.F1) / (c.F * c.F);
        out[i] = c;
    }
    return out;
}

/// Convenience overload taking callables for u and its derivatives.
inline std::vector<ConformalPoint> conformal_to_warped(
    const WarpedMetric& g, const std::vector<double>& ts,
    const std::function<double(double)>& u, const std::function<double(double)>& du,
    const std::function<double(double)>& ddu) {
    std::vector<double> uv(ts.size()), duv(ts.size()), dduv(ts.size());
    std::vector<double> umid(ts.empty() ? 0 : ts.size() - 1);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        uv[i] = u(ts[i]);
        duv[i] = du(ts[i]);
        dduv[i] = ddu(ts[i]);
        if (i + 1 < ts.size()) umid[i] = u(0.5 * (ts[i] + ts[i + 1]));
    }
    return conformal_to_warped(g, ts, uv, duv, dduv, umid);
}

}  // namespace graywarp
