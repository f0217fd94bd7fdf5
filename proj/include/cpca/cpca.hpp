#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpca/chebfit.hpp"
#include "cpca/consensus.hpp"
#include "cpca/errors.hpp"
#include "cpca/netgraph.hpp"
#include "cpca/polyalg.hpp"
#include "cpca/sdp.hpp"

namespace cpca {

enum class Backend { Sdp, StationaryPoints };

/// Error budget and run parameters. The three stage bounds must be positive
/// and sum to eps; the default split is eps/3 each.
struct CpcaConfig {
    double eps = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps3 = 0.0;
    Backend backend = Backend::Sdp;
    int U = 0;
    int m_max = 1 << 14;
    FitOptions fit_options{};

    static CpcaConfig with_default_split(double eps, Backend backend, int U) {
        CpcaConfig cfg;
        cfg.eps = eps;
        cfg.eps1 = cfg.eps2 = cfg.eps3 = eps / 3.0;
        cfg.backend = backend;
        cfg.U = U;
        return cfg;
    }

    void validate() const {
        if (!(eps > 0.0)) throw std::invalid_argument("CpcaConfig: eps must be positive");
        if (!(eps1 > 0.0 && eps2 > 0.0 && eps3 > 0.0))
            throw std::invalid_argument("CpcaConfig: all budget parts must be positive");
        if (std::abs(eps1 + eps2 + eps3 - eps) > 1e-12 * eps)
            throw std::invalid_argument("CpcaConfig: budget parts must sum to eps");
        if (U < 0) throw std::invalid_argument("CpcaConfig: U must be nonnegative");
        if (m_max < 2) throw std::invalid_argument("CpcaConfig: m_max must be >= 2");
    }
};

struct CpcaResult {
    explicit CpcaResult(Interval d) : domain(d) {}
    Interval domain;
    std::vector<double> f_e_star;                    // per agent
    std::vector<std::vector<double>> minimizer_set;  // per agent, from the stationary backend
    std::vector<int> queries_per_agent;              // 2 m_i + 1 each
    std::vector<int> proxy_degrees;
    long consensus_rounds = 0;
    int max_proxy_degree = 0;
};

/// Wraps a consensus output vector as a proxy on the feasible interval. No
/// coefficient trimming: the consensus tolerance already bounds the
/// elementwise error and trimming would break that chain.
inline ChebProxy recover_proxy(const std::vector<double>& vector, const Interval& iv) {
    return ChebProxy(iv, vector);
}

namespace detail {

template <typename Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (Error& e) {
        if (e.stage.empty()) e.stage = stage;
        throw;
    }
}

}  // namespace detail

/// The full pipeline on a synchronous network:
///   (i)   intersect the constraint intervals by max/min consensus,
///   (ii)  fit each local objective to eps1 on the common interval,
///   (iii) average the coefficient vectors to eps2 with distributed stopping,
///   (iv)  optimize each agent's recovered proxy to eps3.
/// Every agent's returned value is then within eps = eps1+eps2+eps3 of the
/// true optimum of the average objective. Minimizers always come from the
/// stationary-point backend; the configured backend chooses the value route.
inline CpcaResult run_cpca(const std::vector<std::function<double(double)>>& objectives,
                           const std::vector<Interval>& constraint_intervals, const Graph& g,
                           const CpcaConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(objectives.size()) != g.n || static_cast<int>(constraint_intervals.size()) != g.n)
        throw std::invalid_argument("run_cpca: one objective and one interval per agent required");

    const Interval domain = detail::run_stage("constraint-intersection", [&] {
        return intersect_constraints(g, constraint_intervals, cfg.U);
    });

    std::vector<ChebProxy> proxies;
    std::vector<ApproxReport> reports;
    detail::run_stage("local-approximation", [&] {
        proxies.reserve(objectives.size());
        reports.reserve(objectives.size());
        for (const auto& f : objectives) {
            auto [proxy, report] = adaptive_fit(f, domain, cfg.eps1, cfg.m_max, cfg.fit_options);
            proxies.push_back(std::move(proxy));
            reports.push_back(report);
        }
        return 0;
    });

    std::vector<std::vector<double>> init;
    init.reserve(proxies.size());
    for (const auto& p : proxies) init.push_back(p.coeffs);
    const ConsensusOutcome outcome = detail::run_stage("consensus", [&] {
        return run_average_consensus_with_stopping(g, init, cfg.eps2, cfg.U);
    });

    CpcaResult result(domain);
    detail::run_stage("polynomial-optimization", [&] {
        for (int i = 0; i < g.n; ++i) {
            const ChebProxy proxy = recover_proxy(outcome.final_vectors[static_cast<std::size_t>(i)], domain);
            const StationaryMin stat = minimize_by_stationary_points(proxy);
            const double value =
                cfg.backend == Backend::Sdp ? minimize_by_sdp(proxy, cfg.eps3) : stat.value;
            result.f_e_star.push_back(value);
            result.minimizer_set.push_back(stat.minimizers);
        }
        return 0;
    });

    for (const auto& rep : reports) {
        result.queries_per_agent.push_back(rep.evals_used);
        result.proxy_degrees.push_back(rep.degree);
    }
    result.consensus_rounds = outcome.rounds;
    result.max_proxy_degree = outcome.aligned_degree;
    return result;
}

}  // namespace cpca
