#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cpca/chebfit.hpp"

namespace cpca {

// Stationary points of a proxy plus the interval endpoints, with values.
struct CriticalSet {
    std::vector<double> points;
    std::vector<double> values;
};

struct StationaryMin {
    double value = 0.0;
    std::vector<double> minimizers;
};

/// Chebyshev coefficients of dp/dx in the same mapped basis, by the backward
/// recurrence c~_j = c~_{j+2} + 2(j+1)*S*c_{j+1} (j = m-1..1) and
/// c~_0 = c~_2/2 + S*c_1, with S = 2/(hi-lo). O(m).
inline std::vector<double> derivative_coeffs(const ChebProxy& p) {
    const int m = p.degree();
    if (m == 0) return {0.0};
    const double scale = 2.0 / p.interval.width();
    std::vector<double> d(static_cast<std::size_t>(m) + 2, 0.0);  // two virtual zeros at the top
    for (int j = m - 1; j >= 1; --j)
        d[static_cast<std::size_t>(j)] =
            d[static_cast<std::size_t>(j) + 2] + 2.0 * (j + 1) * scale * p.coeffs[static_cast<std::size_t>(j) + 1];
    d[0] = (m >= 2 ? 0.5 * d[2] : 0.0) + scale * p.coeffs[1];
    d.resize(static_cast<std::size_t>(m));
    return d;
}

namespace detail {

// Diagonal similarity scaling by powers of two (Osborne-style) so the
// eigensolver sees a better-conditioned matrix.
inline void balance_in_place(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    for (int pass = 0; pass < 50; ++pass) {
        bool converged = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = a.col(i).lpNorm<1>() - std::abs(a(i, i));
            double r = a.row(i).lpNorm<1>() - std::abs(a(i, i));
            if (c == 0.0 || r == 0.0) continue;
            double f = 1.0;
            while (c < r / 2.0) {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while (c >= r * 2.0) {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (f != 1.0) {
                converged = false;
                a.col(i) *= f;
                a.row(i) /= f;
            }
        }
        if (converged) break;
    }
}

}  // namespace detail

/// Colleague matrix of sum_j a_j T_j (leading a_n nonzero): order-n matrix with
/// 1 on the first superdiagonal of row 0, 1/2 on the sub/superdiagonals of the
/// middle rows, and last row -a_j/(2 a_n) with an extra 1/2 in column n-2. Its
/// eigenvalues are the roots of the series in the mapped variable.
inline Eigen::MatrixXd colleague_matrix(const std::vector<double>& a) {
    const int n = static_cast<int>(a.size()) - 1;
    if (n < 1) throw std::invalid_argument("colleague_matrix: needs degree >= 1");
    const double lead = a[static_cast<std::size_t>(n)];
    if (lead == 0.0) throw std::invalid_argument("colleague_matrix: leading coefficient is zero");
    if (n == 1) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = -a[0] / lead;  // u*T_0 = T_1 has no 1/2 factor in the reduction
        return m;
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m(0, 1) = 1.0;
    for (int i = 1; i < n - 1; ++i) {
        m(i, i - 1) = 0.5;
        m(i, i + 1) = 0.5;
    }
    for (int j = 0; j < n; ++j) m(n - 1, j) = -a[static_cast<std::size_t>(j)] / (2.0 * lead);
    m(n - 1, n - 2) += 0.5;
    return m;
}

/// Real roots of the series `dcoeffs` (mapped basis) inside iv, via the QR
/// eigenvalues of the colleague matrix. Near-real eigenvalues within a small
/// tolerance band around [-1, 1] are kept, clamped, mapped back to iv, sorted
/// and deduplicated. Trailing coefficients below 1e-13 * max|c~| are dropped
/// first so the last row of the matrix stays well scaled.
inline std::vector<double> real_roots_in_interval(const std::vector<double>& dcoeffs, const Interval& iv) {
    double max_abs = 0.0;
    for (double c : dcoeffs) max_abs = std::max(max_abs, std::abs(c));
    if (max_abs == 0.0) return {};  // zero derivative; endpoints decide

    std::size_t len = dcoeffs.size();
    while (len > 0 && std::abs(dcoeffs[len - 1]) <= 1e-13 * max_abs) --len;
    if (len <= 1) return {};  // constant (or numerically constant) derivative

    std::vector<double> trimmed(dcoeffs.begin(), dcoeffs.begin() + static_cast<std::ptrdiff_t>(len));
    Eigen::MatrixXd m = colleague_matrix(trimmed);
    detail::balance_in_place(m);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) return {};

    double spectral_radius = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        spectral_radius = std::max(spectral_radius, std::abs(es.eigenvalues()[i]));
    const double imag_tol = 1e-8 * (1.0 + spectral_radius);
    const double edge_tol = 1e-10;
    const double dedup_tol = 1e-10;

    std::vector<double> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        if (std::abs(z.imag()) > imag_tol) continue;
        double u = z.real();
        if (u < -1.0 - edge_tol || u > 1.0 + edge_tol) continue;
        u = std::clamp(u, -1.0, 1.0);
        roots.push_back(iv.from_unit(u));
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots) {
        if (unique.empty() || r - unique.back() > dedup_tol * 0.5 * iv.width()) unique.push_back(r);
    }
    return unique;
}

/// All critical points of p: real roots of p' in the interval plus both
/// endpoints, with the proxy values at each.
inline CriticalSet critical_points(const ChebProxy& p) {
    CriticalSet cs;
    cs.points.push_back(p.interval.lo);
    for (double r : real_roots_in_interval(derivative_coeffs(p), p.interval)) {
        if (r > p.interval.lo && r < p.interval.hi) cs.points.push_back(r);
    }
    cs.points.push_back(p.interval.hi);
    cs.values.reserve(cs.points.size());
    for (double x : cs.points) cs.values.push_back(eval_clenshaw(p, x));
    return cs;
}

/// Global minimum of p on its interval by critical-point enumeration.
/// Returns the minimal value and every critical point attaining it within a
/// relative tie tolerance.
inline StationaryMin minimize_by_stationary_points(const ChebProxy& p) {
    const CriticalSet cs = critical_points(p);
    StationaryMin out;
    out.value = *std::min_element(cs.values.begin(), cs.values.end());
    const double tie_tol = 1e-9 * (1.0 + std::abs(out.value));
    for (std::size_t i = 0; i < cs.points.size(); ++i) {
        if (cs.values[i] <= out.value + tie_tol) out.minimizers.push_back(cs.points[i]);
    }
    return out;
}

}  // namespace cpca
