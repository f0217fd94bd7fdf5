#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpca/chebfit.hpp"
#include "cpca/errors.hpp"
#include "cpca/netgraph.hpp"

namespace cpca {

// Per-agent consensus state: the coefficient estimate and the max/min
// auxiliary envelopes used by the distributed stopping test.
struct AgentState {
    std::vector<double> p;
    std::vector<double> r;
    std::vector<double> s;
};

struct ConsensusTraceRow {
    long round = 0;
    double max_dev_from_mean = 0.0;
    int stop_check = -1;  // -1 no check this round, 0 check failed, 1 check passed
};

struct ConsensusOutcome {
    std::vector<std::vector<double>> final_vectors;
    long rounds = 0;
    double delta_used = 0.0;
    int aligned_degree = 0;
};

namespace detail {

inline double padded_at(const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; }

}  // namespace detail

/// Intersection of per-agent intervals via U synchronous rounds of max
/// consensus on the lower bounds and min consensus on the upper bounds
/// (closed neighborhoods, so the running extremum is never lost). With
/// U >= diameter every agent ends up holding [max_i lo_i, min_i hi_i].
inline Interval intersect_constraints(const Graph& g, const std::vector<Interval>& intervals, int U) {
    if (static_cast<int>(intervals.size()) != g.n)
        throw std::invalid_argument("intersect_constraints: one interval per agent required");
    if (U < diameter(g)) throw std::invalid_argument("intersect_constraints: U must be >= diameter");
    std::vector<double> lo(intervals.size()), hi(intervals.size());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        lo[i] = intervals[i].lo;
        hi[i] = intervals[i].hi;
    }
    for (int t = 0; t < U; ++t) {
        std::vector<double> nlo = lo, nhi = hi;
        for (int i = 0; i < g.n; ++i) {
            for (int j : g.adj[static_cast<std::size_t>(i)]) {
                nlo[static_cast<std::size_t>(i)] =
                    std::max(nlo[static_cast<std::size_t>(i)], lo[static_cast<std::size_t>(j)]);
                nhi[static_cast<std::size_t>(i)] =
                    std::min(nhi[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(j)]);
            }
        }
        lo = std::move(nlo);
        hi = std::move(nhi);
    }
    const double a = lo[0], b = hi[0];
    if (!(a < b))
        throw EmptyIntersection("intersect_constraints: empty feasible set [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]");
    return Interval(a, b);
}

/// One synchronous alignment exchange: every agent zero-pads its vector to the
/// longest length seen among itself and its neighbors. Repeating this
/// equalizes all lengths within diameter rounds.
inline std::vector<std::vector<double>> pad_align(const Graph& g,
                                                  const std::vector<std::vector<double>>& vectors) {
    if (static_cast<int>(vectors.size()) != g.n)
        throw std::invalid_argument("pad_align: one vector per agent required");
    std::vector<std::vector<double>> out = vectors;
    for (int i = 0; i < g.n; ++i) {
        std::size_t len = vectors[static_cast<std::size_t>(i)].size();
        for (int j : g.adj[static_cast<std::size_t>(i)])
            len = std::max(len, vectors[static_cast<std::size_t>(j)].size());
        out[static_cast<std::size_t>(i)].resize(len, 0.0);
    }
    return out;
}

/// Lazy-Metropolis average consensus with the periodic max/min stopping test.
///
/// Every round each agent averages its vector with its neighbors' (shorter
/// vectors are zero-padded, which leaves the network sum per element intact)
/// while the auxiliaries r and s run max and min consensus over closed
/// neighborhoods. At rounds t = l*U the agents compare ||r - s||_inf against
/// delta = eps2/(m+1), frozen at the first check once lengths have aligned;
/// on failure r and s are reset to the current vector, on success all agents
/// stop in the same round, with every vector within delta of the exact mean.
inline ConsensusOutcome run_average_consensus_with_stopping(const Graph& g,
                                                            const std::vector<std::vector<double>>& init,
                                                            double eps2, int U,
                                                            std::vector<ConsensusTraceRow>* trace = nullptr,
                                                            long round_cap = 1000000) {
    if (static_cast<int>(init.size()) != g.n)
        throw std::invalid_argument("consensus: one initial vector per agent required");
    if (!(eps2 > 0.0)) throw std::invalid_argument("consensus: eps2 must be positive");
    if (U < diameter(g)) throw std::invalid_argument("consensus: U must be >= diameter");
    for (const auto& v : init)
        if (v.empty()) throw std::invalid_argument("consensus: initial vectors must be nonempty");

    const std::size_t n = static_cast<std::size_t>(g.n);
    std::vector<AgentState> state(n);
    std::size_t max_len = 0;
    for (std::size_t i = 0; i < n; ++i) {
        state[i].p = init[i];
        state[i].r = init[i];
        state[i].s = init[i];
        max_len = std::max(max_len, init[i].size());
    }
    // exact mean of the (zero-padded) initial vectors, for trace output
    std::vector<double> mean(max_len, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < max_len; ++k) mean[k] += detail::padded_at(init[i], k) / g.n;

    const auto max_dev = [&]() {
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < max_len; ++k)
                dev = std::max(dev, std::abs(detail::padded_at(state[i].p, k) - mean[k]));
        return dev;
    };

    ConsensusOutcome out;
    long t = 0;
    long l = 1;
    bool delta_set = false;
    for (;;) {
        int stop_flag = -1;
        bool stop = false;
        if (t == l * static_cast<long>(U)) {
            if (!delta_set) {
                // lengths are aligned by the first check instant since U >= D
                out.aligned_degree = static_cast<int>(state[0].p.size()) - 1;
                out.delta_used = eps2 / static_cast<double>(state[0].p.size());
                delta_set = true;
            }
            int passed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double spread = 0.0;
                for (std::size_t k = 0; k < state[i].r.size(); ++k)
                    spread = std::max(spread, state[i].r[k] - state[i].s[k]);
                if (spread <= out.delta_used) ++passed;
            }
            if (passed != 0 && passed != g.n)
                throw std::logic_error("consensus: stopping test disagreed across agents");
            stop = passed == g.n;
            stop_flag = stop ? 1 : 0;
        }
        if (trace) trace->push_back({t, max_dev(), stop_flag});
        if (stop) break;
        if (stop_flag == 0) {
            for (auto& st : state) {
                st.r = st.p;
                st.s = st.p;
            }
            ++l;
        }
        if (t >= round_cap)
            throw RoundCapExceeded("consensus: round cap " + std::to_string(round_cap) + " reached");

        // synchronous exchange: everyone reads the previous round's state
        std::vector<AgentState> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t len = state[i].p.size();
            for (int j : g.adj[i]) len = std::max(len, state[static_cast<std::size_t>(j)].p.size());
            next[i].p.resize(len);
            next[i].r.resize(len);
            next[i].s.resize(len);
            const int di = g.degree(static_cast<int>(i));
            for (std::size_t k = 0; k < len; ++k) {
                const double own = detail::padded_at(state[i].p, k);
                double acc = own;
                double rmax = detail::padded_at(state[i].r, k);
                double smin = detail::padded_at(state[i].s, k);
                for (int j : g.adj[i]) {
                    const auto& other = state[static_cast<std::size_t>(j)];
                    acc += 0.5 * (detail::padded_at(other.p, k) - own) /
                           std::max(di, g.degree(j));
                    rmax = std::max(rmax, detail::padded_at(other.r, k));
                    smin = std::min(smin, detail::padded_at(other.s, k));
                }
                next[i].p[k] = acc;
                next[i].r[k] = rmax;
                next[i].s[k] = smin;
            }
        }
        state = std::move(next);
        ++t;
    }

    out.rounds = t;
    out.final_vectors.reserve(n);
    for (auto& st : state) out.final_vectors.push_back(std::move(st.p));
    return out;
}

}  // namespace cpca
