#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace graywarp {

/// Format a double with 17 significant digits (round-trip exact).
inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Deterministic RNG used by all stochastic verification checks.  The
/// mapping from seed to sample stream is fixed (mt19937_64 with the upper
/// 53 bits of each draw), so reports are reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return std::ldexp(static_cast<double>(gen_() >> 11), -53); }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in [-1, 1).
    double symmetric() { return uniform(-1.0, 1.0); }

private:
    std::mt19937_64 gen_;
};

/// Solve the dense linear system M x = b in place (partial pivoting).
/// Intended for the small normal-equation systems used by the parity
/// estimator; throws on (numerically) singular input.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> M,
                                       std::vector<double> b) {
    const std::size_t n = M.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
        if (std::fabs(M[piv][col]) < 1e-300)
            throw std::runtime_error("solve_dense: singular system");
        std::swap(M[col], M[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double w = M[r][col] / M[col][col];
            for (std::size_t c = col; c < n; ++c) M[r][c] -= w * M[col][c];
            b[r] -= w * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= M[i][c] * x[c];
        x[i] = s / M[i][i];
    }
    return x;
}

namespace detail {
template <class F>
double simpson_rec(F&& f, double a, double m, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-13,
                        int max_depth = 30) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace graywarp
