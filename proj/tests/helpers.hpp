#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cpca/chebfit.hpp"
#include "cpca/rng.hpp"

namespace test_helpers {

// Direct trigonometric evaluation of a Chebyshev series at |u| <= 1; the
// independent reference for the Clenshaw path.
inline double eval_cheb_direct_trig(const std::vector<double>& coeffs, double u) {
    const double theta = std::acos(u);
    double acc = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) acc += coeffs[j] * std::cos(j * theta);
    return acc;
}

// Multiply a Chebyshev series by the variable: x T_j = (T_{j+1} + T_{|j-1|}) / 2.
inline std::vector<double> cheb_mul_x(const std::vector<double>& c) {
    std::vector<double> out(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        out[j + 1] += 0.5 * c[j];
        out[j == 0 ? 1 : j - 1] += 0.5 * c[j];
    }
    return out;
}

// Chebyshev coefficients of x^k on [-1, 1], built by repeated multiplication.
inline std::vector<double> monomial_cheb(int k) {
    std::vector<double> c{1.0};
    for (int i = 0; i < k; ++i) c = cheb_mul_x(c);
    return c;
}

// Chebyshev coefficients of scale * prod_k (x - roots[k]) on [-1, 1].
inline std::vector<double> poly_from_roots_cheb(const std::vector<double>& roots, double scale) {
    std::vector<double> c{scale};
    for (double r : roots) {
        std::vector<double> shifted = cheb_mul_x(c);
        for (std::size_t j = 0; j < c.size(); ++j) shifted[j] -= r * c[j];
        c = std::move(shifted);
    }
    return c;
}

inline cpca::ChebProxy random_proxy(cpca::Rng& rng, int degree, const cpca::Interval& iv,
                                    double amplitude = 1.0) {
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (auto& x : c) x = rng.uniform(-amplitude, amplitude);
    if (std::abs(c.back()) < 0.2 * amplitude) c.back() = c.back() < 0 ? -0.5 * amplitude : 0.5 * amplitude;
    return cpca::ChebProxy(iv, c);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double pred = fit.intercept + fit.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace test_helpers
