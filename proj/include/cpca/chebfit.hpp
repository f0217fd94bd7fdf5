#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpca/errors.hpp"

namespace cpca {

// Closed interval [lo, hi]; degenerate and reversed bounds are rejected.
struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo < hi)) throw std::invalid_argument("Interval: requires lo < hi");
    }

    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }

    /// Affine map onto the reference interval [-1, 1] and back.
    double to_unit(double x) const { return (2.0 * x - (lo + hi)) / (hi - lo); }
    double from_unit(double u) const { return 0.5 * (hi - lo) * u + 0.5 * (lo + hi); }
};

/// Truncated Chebyshev series c_0..c_m in the argument mapped to [-1, 1]:
/// p(x) = sum_j c_j T_j((2x - (lo+hi)) / (hi-lo)).
struct ChebProxy {
    Interval interval;
    std::vector<double> coeffs;

    ChebProxy(Interval iv, std::vector<double> c) : interval(iv), coeffs(std::move(c)) {
        if (coeffs.empty()) throw std::invalid_argument("ChebProxy: needs at least one coefficient");
    }

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Outcome of an adaptive fit. evals_used counts distinct sample points, i.e.
// zeroth-order queries; an accepted degree-m fit always costs 2m+1 of them.
struct ApproxReport {
    int degree = 0;
    double achieved_check_error = 0.0;
    int evals_used = 0;
};

/// Chebyshev extrema grid on `iv`:
///   x_k = (hi-lo)/2 * cos(k*pi/m) + (lo+hi)/2,  k = 0..m  (descending in x).
/// The angle is computed as (pi*k)/m so that shared abscissae of the nested
/// grids S_m and S_2m coincide bit-for-bit.
inline std::vector<double> cheb_points(int m, const Interval& iv) {
    if (m < 1) throw std::invalid_argument("cheb_points: m must be >= 1");
    const double half = 0.5 * (iv.hi - iv.lo);
    const double mid = 0.5 * (iv.lo + iv.hi);
    std::vector<double> pts(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k) {
        pts[static_cast<std::size_t>(k)] = half * std::cos((std::numbers::pi * k) / m) + mid;
    }
    return pts;
}

/// Coefficients of the degree-m interpolant through `values` sampled at
/// cheb_points(m, iv). Direct O(m^2) cosine sum; the first and last
/// coefficients are halved so the result interpolates at all m+1 nodes.
inline std::vector<double> coeffs_from_values(const std::vector<double>& values) {
    const int m = static_cast<int>(values.size()) - 1;
    if (m < 1) throw std::invalid_argument("coeffs_from_values: needs at least 2 values");
    std::vector<double> c(values.size());
    for (int j = 0; j <= m; ++j) {
        const double edge = (values[0] + (j % 2 == 0 ? values[static_cast<std::size_t>(m)]
                                                     : -values[static_cast<std::size_t>(m)])) /
                            m;
        double sum = 0.0;
        for (int k = 1; k < m; ++k) {
            // reduce j*k mod 2m to keep the cosine argument within one period
            const long long r = (static_cast<long long>(j) * k) % (2LL * m);
            sum += values[static_cast<std::size_t>(k)] * std::cos((std::numbers::pi * r) / m);
        }
        c[static_cast<std::size_t>(j)] = edge + (2.0 / m) * sum;
    }
    c.front() *= 0.5;
    c.back() *= 0.5;
    return c;
}

namespace detail {

// Iterative radix-2 Cooley-Tukey FFT, in place. Size must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::vector<std::complex<double>> w(len / 2);
        for (std::size_t i = 0; i < len / 2; ++i) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len);
            w[i] = {std::cos(ang), std::sin(ang)};
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w[k];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

inline bool is_power_of_two(int m) { return m >= 1 && (m & (m - 1)) == 0; }

}  // namespace detail

/// Fast-transform variant of coeffs_from_values via a length-2m FFT of the
/// even extension (a DCT-I). Requires m to be a power of two; agrees with the
/// direct sum to round-off.
inline std::vector<double> coeffs_from_values_dct(const std::vector<double>& values) {
    const int m = static_cast<int>(values.size()) - 1;
    if (m < 1) throw std::invalid_argument("coeffs_from_values_dct: needs at least 2 values");
    if (!detail::is_power_of_two(m))
        throw std::invalid_argument("coeffs_from_values_dct: m must be a power of two");
    const std::size_t n = 2 * static_cast<std::size_t>(m);
    std::vector<std::complex<double>> ext(n);
    for (int k = 0; k <= m; ++k) ext[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(k)];
    for (int k = 1; k < m; ++k) ext[n - static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(k)];
    detail::fft_pow2(ext);
    std::vector<double> c(values.size());
    for (int j = 0; j <= m; ++j) c[static_cast<std::size_t>(j)] = ext[static_cast<std::size_t>(j)].real() / m;
    c.front() *= 0.5;
    c.back() *= 0.5;
    return c;
}

/// Clenshaw backward recurrence; O(m) per evaluation. Arguments outside the
/// interval are accepted but unvalidated.
inline double eval_clenshaw(const ChebProxy& p, double x) {
    const double u = p.interval.to_unit(x);
    const auto& c = p.coeffs;
    const int m = p.degree();
    if (m == 0) return c[0];
    const double u2 = 2.0 * u;
    double b1 = 0.0, b2 = 0.0;
    for (int j = m; j >= 1; --j) {
        const double t = c[static_cast<std::size_t>(j)] + u2 * b1 - b2;
        b2 = b1;
        b1 = t;
    }
    return c[0] + u * b1 - b2;
}

/// Max of |f(x) - p(x)| over n uniformly spaced points spanning p.interval.
inline double max_error_on_grid(const std::function<double(double)>& f, const ChebProxy& p, int n) {
    if (n < 2) throw std::invalid_argument("max_error_on_grid: n must be >= 2");
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = p.interval.lo + p.interval.width() * i / (n - 1);
        worst = std::max(worst, std::abs(f(x) - eval_clenshaw(p, x)));
    }
    return worst;
}

struct FitOptions {
    int initial_degree = 2;
    // Also require the bound to hold on a small uniform grid before accepting;
    // guards against error functions that vanish at every new grid point.
    bool strict_uniform_check = false;
    int uniform_check_points = 33;
    bool use_fast_transform = false;
};

/// Degree-doubling Chebyshev fit of f on iv to uniform accuracy eps1.
///
/// Starting from the initial degree, the degree-m interpolant is built from
/// samples at S_m, then f is sampled at the points of S_2m not in S_m and the
/// fit is accepted once max_k |f(x_k) - p(x_k)| <= eps1 over those new points.
/// Grids nest, so every sample is taken exactly once and an accepted degree-m
/// fit has consumed 2m+1 evaluations. Throws DegreeCapExceeded when the next
/// doubling would pass m_max.
inline std::pair<ChebProxy, ApproxReport> adaptive_fit(const std::function<double(double)>& f,
                                                       const Interval& iv, double eps1, int m_max,
                                                       const FitOptions& opts = {}) {
    if (!(eps1 > 0.0)) throw std::invalid_argument("adaptive_fit: eps1 must be positive");
    if (opts.initial_degree < 1) throw std::invalid_argument("adaptive_fit: initial degree must be >= 1");

    int m = opts.initial_degree;
    std::vector<double> grid = cheb_points(m, iv);
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = f(grid[k]);
    int evals = static_cast<int>(values.size());

    for (;;) {
        const bool fast = opts.use_fast_transform && detail::is_power_of_two(m);
        ChebProxy proxy(iv, fast ? coeffs_from_values_dct(values) : coeffs_from_values(values));

        // extend to S_2m; even indices coincide with the current grid
        const std::vector<double> grid2 = cheb_points(2 * m, iv);
        std::vector<double> values2(grid2.size());
        double check_err = 0.0;
        for (std::size_t k = 0; k < grid2.size(); ++k) {
            if (k % 2 == 0) {
                values2[k] = values[k / 2];
            } else {
                values2[k] = f(grid2[k]);
                ++evals;
                check_err = std::max(check_err, std::abs(values2[k] - eval_clenshaw(proxy, grid2[k])));
            }
        }
        if (opts.strict_uniform_check)
            check_err = std::max(check_err, max_error_on_grid(f, proxy, opts.uniform_check_points));

        if (check_err <= eps1) {
            ApproxReport report{m, check_err, evals};
            return {std::move(proxy), report};
        }
        if (2 * m > m_max)
            throw DegreeCapExceeded("adaptive_fit: degree cap " + std::to_string(m_max) +
                                    " reached (best check error " + std::to_string(check_err) + ")");
        m *= 2;
        grid = std::move(grid2);
        values = std::move(values2);
    }
}

}  // namespace cpca
