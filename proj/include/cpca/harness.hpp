#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpca/cpca.hpp"
#include "cpca/objectives.hpp"
#include "cpca/oracle.hpp"

namespace cpca {

/// One sweep: for each (eps, seed) cell, build the network, sample the local
/// objectives, run the pipeline, and score against the brute-force optimum of
/// the exact average objective.
struct ExperimentSpec {
    ObjectiveFamily family = ObjectiveFamily::ExpSum;
    int n_agents = 30;
    double edge_prob = 0.4;
    std::vector<std::uint64_t> seeds;
    std::vector<double> eps_list;
    Backend backend = Backend::Sdp;
    std::optional<int> fixed_U;  // nullopt: use the exact diameter
    Interval domain{-1.0, 1.0};
    // hook for ObjectiveFamily::Custom; not serialized
    std::function<Objective(std::uint64_t seed, int agent)> custom_sampler;

    void validate() const {
        if (n_agents < 1) throw std::invalid_argument("ExperimentSpec: n_agents must be >= 1");
        if (eps_list.empty() || seeds.empty())
            throw std::invalid_argument("ExperimentSpec: needs at least one eps and one seed");
        for (double e : eps_list)
            if (!(e > 0.0)) throw std::invalid_argument("ExperimentSpec: eps values must be positive");
        if (family == ObjectiveFamily::Custom && !custom_sampler)
            throw std::invalid_argument("ExperimentSpec: custom family needs custom_sampler");
    }
};

struct MetricsRecord {
    double eps = 0.0;
    std::uint64_t seed = 0;
    long rounds = 0;
    int queries = 0;  // max over agents
    int degree = 0;   // aligned proxy degree
    double abs_error = 0.0;
    long runtime_ms = 0;
    std::string status = "ok";
};

inline std::vector<MetricsRecord> run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<MetricsRecord> records;
    for (std::uint64_t seed : spec.seeds) {
        Graph g;
        std::string graph_status;
        try {
            g = spec.n_agents == 1 ? Graph::from_edges(1, {})
                                   : erdos_renyi_connected(spec.n_agents, spec.edge_prob, seed);
        } catch (const NotConnectedAfterRetries&) {
            graph_status = "not_connected";
        }
        if (!graph_status.empty()) {
            for (double eps : spec.eps_list)
                records.push_back({eps, seed, 0, 0, 0, std::nan(""), 0, graph_status});
            continue;
        }

        std::vector<std::function<double(double)>> objectives;
        for (int i = 0; i < spec.n_agents; ++i) {
            Objective obj = spec.family == ObjectiveFamily::Custom
                                ? spec.custom_sampler(seed, i)
                                : sample_objective(spec.family, seed, i);
            objectives.push_back(std::move(obj.f));
        }
        const auto average = [&](double x) {
            double acc = 0.0;
            for (const auto& f : objectives) acc += f(x);
            return acc / spec.n_agents;
        };
        // the oracle depends on the instance only, so compute it once per seed
        const BruteForceResult oracle = brute_force_min(average, spec.domain);
        const std::vector<Interval> intervals(static_cast<std::size_t>(spec.n_agents), spec.domain);
        const int U = spec.fixed_U ? *spec.fixed_U : diameter(g);

        for (double eps : spec.eps_list) {
            MetricsRecord rec;
            rec.eps = eps;
            rec.seed = seed;
            const auto start = std::chrono::steady_clock::now();
            try {
                const CpcaConfig cfg = CpcaConfig::with_default_split(eps, spec.backend, U);
                const CpcaResult res = run_cpca(objectives, intervals, g, cfg);
                rec.rounds = res.consensus_rounds;
                rec.queries = *std::max_element(res.queries_per_agent.begin(), res.queries_per_agent.end());
                rec.degree = res.max_proxy_degree;
                double worst = 0.0;
                for (double fe : res.f_e_star) worst = std::max(worst, std::abs(fe - oracle.f_star));
                rec.abs_error = worst;
            } catch (const Error& e) {
                rec.abs_error = std::nan("");
                rec.status = e.stage.empty() ? "error" : e.stage;
            }
            rec.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
            records.push_back(std::move(rec));
        }
    }
    return records;
}

/// Fixed schema: eps,seed,rounds,queries,degree,abs_error,runtime_ms,status.
/// Rows are sorted on (eps, seed) so assembly order never leaks into the file.
inline void write_metrics_csv(std::vector<MetricsRecord> records, std::ostream& os) {
    std::sort(records.begin(), records.end(), [](const MetricsRecord& a, const MetricsRecord& b) {
        return a.eps != b.eps ? a.eps < b.eps : a.seed < b.seed;
    });
    os << "eps,seed,rounds,queries,degree,abs_error,runtime_ms,status\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%g", r.eps);
        os << buf << "," << r.seed << "," << r.rounds << "," << r.queries << "," << r.degree << ",";
        if (std::isnan(r.abs_error)) {
            os << "nan";
        } else {
            std::snprintf(buf, sizeof(buf), "%.12g", r.abs_error);
            os << buf;
        }
        os << "," << r.runtime_ms << "," << r.status << "\n";
    }
}

inline ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
    ExperimentSpec spec;
    const std::string family = j.value("family", "expsum");
    if (family == "expsum") {
        spec.family = ObjectiveFamily::ExpSum;
    } else if (family == "logisticlog") {
        spec.family = ObjectiveFamily::LogisticLog;
    } else {
        throw std::invalid_argument("experiment spec: unknown family " + family);
    }
    spec.n_agents = j.value("n_agents", 30);
    spec.edge_prob = j.value("edge_prob", 0.4);
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    spec.eps_list = j.at("eps_list").get<std::vector<double>>();
    const std::string backend = j.value("backend", "sdp");
    if (backend == "sdp") {
        spec.backend = Backend::Sdp;
    } else if (backend == "stationary") {
        spec.backend = Backend::StationaryPoints;
    } else {
        throw std::invalid_argument("experiment spec: unknown backend " + backend);
    }
    if (j.contains("u_policy") && j["u_policy"].is_number_integer())
        spec.fixed_U = j["u_policy"].get<int>();
    if (j.contains("domain")) {
        const auto d = j["domain"].get<std::vector<double>>();
        if (d.size() != 2) throw std::invalid_argument("experiment spec: domain must be [lo, hi]");
        spec.domain = Interval(d[0], d[1]);
    }
    spec.validate();
    return spec;
}

inline ExperimentSpec experiment_spec_from_stream(std::istream& is) {
    nlohmann::json j;
    is >> j;
    return experiment_spec_from_json(j);
}

}  // namespace cpca
