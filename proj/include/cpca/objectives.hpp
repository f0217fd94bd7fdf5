#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cpca/rng.hpp"

namespace cpca {

enum class ObjectiveFamily { ExpSum, LogisticLog, Custom };

struct Objective {
    std::function<double(double)> f;
    std::vector<double> params;
};

/// f(x) = a e^{bx} + c e^{-dx}; convex for positive parameters.
inline Objective make_expsum(double a, double b, double c, double d) {
    return {[=](double x) { return a * std::exp(b * x) + c * std::exp(-d * x); }, {a, b, c, d}};
}

/// f(x) = a / (1 + e^{-x}) + b log(1 + x^2); nonconvex on [-1, 1].
inline Objective make_logistic_log(double a, double b) {
    return {[=](double x) { return a / (1.0 + std::exp(-x)) + b * std::log1p(x * x); }, {a, b}};
}

/// Deterministic per (seed, agent_index). ExpSum draws a, b ~ U(1,2) and
/// c, d ~ U(2,4); LogisticLog draws a ~ N(10,2) and b ~ N(5,1), in that order.
inline Objective sample_objective(ObjectiveFamily family, std::uint64_t seed, int agent_index) {
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(agent_index));
    switch (family) {
        case ObjectiveFamily::ExpSum: {
            const double a = rng.uniform(1.0, 2.0);
            const double b = rng.uniform(1.0, 2.0);
            const double c = rng.uniform(2.0, 4.0);
            const double d = rng.uniform(2.0, 4.0);
            return make_expsum(a, b, c, d);
        }
        case ObjectiveFamily::LogisticLog: {
            const double a = rng.gaussian(10.0, 2.0);
            const double b = rng.gaussian(5.0, 1.0);
            return make_logistic_log(a, b);
        }
        case ObjectiveFamily::Custom:
            break;
    }
    throw std::invalid_argument("sample_objective: custom family needs an explicit sampler");
}

}  // namespace cpca
