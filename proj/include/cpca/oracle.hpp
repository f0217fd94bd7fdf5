#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "cpca/chebfit.hpp"

namespace cpca {

struct BruteForceResult {
    double f_star = 0.0;
    double x_star = 0.0;
};

/// Golden-section shrink of [a, b] down to `width`; returns the best probe.
inline BruteForceResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                                           double width) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > width) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? BruteForceResult{fc, c} : BruteForceResult{fd, d};
}

/// Scan a dense uniform grid, then golden-section refine around the best few
/// local minima. For an L-Lipschitz function the value error is bounded by
/// L * step / 2 plus the refinement width.
inline BruteForceResult brute_force_min(const std::function<double(double)>& f, const Interval& iv,
                                        int grid_points = 1000001) {
    const double step = iv.width() / (grid_points - 1);
    struct Candidate {
        double x;
        double v;
    };
    std::vector<Candidate> candidates;

    double prev2 = f(iv.lo);
    double prev1 = f(iv.lo + step);
    candidates.push_back({iv.lo, prev2});
    if (prev1 <= prev2) candidates.push_back({iv.lo + step, prev1});
    for (int i = 2; i < grid_points; ++i) {
        const double x = iv.lo + step * i;
        const double v = f(x);
        if (prev1 <= prev2 && prev1 <= v)
            candidates.push_back({iv.lo + step * (i - 1), prev1});
        prev2 = prev1;
        prev1 = v;
    }
    candidates.push_back({iv.hi, prev1});

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return a.v < b.v;
    });
    if (candidates.size() > 5) candidates.resize(5);

    BruteForceResult best{candidates[0].v, candidates[0].x};
    for (const auto& cand : candidates) {
        const double a = std::max(iv.lo, cand.x - step);
        const double b = std::min(iv.hi, cand.x + step);
        const BruteForceResult refined = golden_section_min(f, a, b, 1e-12);
        if (refined.f_star < best.f_star) best = refined;
    }
    return best;
}

}  // namespace cpca
