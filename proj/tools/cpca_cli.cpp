// Command-line driver: proxy fitting, polynomial optimization, consensus
// demos, single runs, and metric sweeps. Exit codes: 0 success, 2 instance
// error (empty intersection, disconnected graph, bad input), 3 numerical
// failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cpca/cpca.hpp"
#include "cpca/harness.hpp"
#include "cpca/objectives.hpp"
#include "cpca/oracle.hpp"
#include "cpca/polyalg.hpp"
#include "cpca/sdp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInstance = 2;
constexpr int kExitNumerical = 3;

cpca::ObjectiveFamily parse_family(const std::string& name) {
    if (name == "expsum") return cpca::ObjectiveFamily::ExpSum;
    if (name == "logisticlog") return cpca::ObjectiveFamily::LogisticLog;
    throw CLI::ValidationError("--objective", "expected expsum or logisticlog");
}

cpca::Backend parse_backend(const std::string& name) {
    if (name == "sdp") return cpca::Backend::Sdp;
    if (name == "stationary") return cpca::Backend::StationaryPoints;
    throw CLI::ValidationError("--backend", "expected sdp or stationary");
}

nlohmann::json proxy_to_json(const cpca::ChebProxy& p, const cpca::ApproxReport& rep) {
    return {{"interval", {p.interval.lo, p.interval.hi}},
            {"coeffs", p.coeffs},
            {"degree", rep.degree},
            {"check_error", rep.achieved_check_error},
            {"evals", rep.evals_used}};
}

cpca::ChebProxy proxy_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    nlohmann::json j;
    in >> j;
    const auto iv = j.at("interval").get<std::vector<double>>();
    if (iv.size() != 2) throw std::invalid_argument("interval must be [lo, hi]");
    return cpca::ChebProxy(cpca::Interval(iv[0], iv[1]), j.at("coeffs").get<std::vector<double>>());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open " + path);
    out << text;
}

int cmd_fit(const std::string& objective, std::uint64_t seed, int agent, double eps, double lo,
            double hi, const std::string& output) {
    const cpca::Objective obj = cpca::sample_objective(parse_family(objective), seed, agent);
    const auto [proxy, report] = cpca::adaptive_fit(obj.f, cpca::Interval(lo, hi), eps, 1 << 14);
    std::printf("family=%s seed=%llu agent=%d\n", objective.c_str(), (unsigned long long)seed, agent);
    std::printf("degree=%d check_error=%.3e evals=%d\n", report.degree, report.achieved_check_error,
                report.evals_used);
    if (!output.empty()) {
        write_text(output, proxy_to_json(proxy, report).dump(2) + "\n");
        std::printf("proxy written to %s\n", output.c_str());
    }
    return kExitOk;
}

int cmd_optimize_poly(const std::string& input, double eps, const std::string& dump_sdp) {
    const cpca::ChebProxy proxy = proxy_from_json_file(input);
    if (!dump_sdp.empty() && proxy.degree() >= 1) {
        std::ofstream out(dump_sdp);
        cpca::build_reformulation(proxy.coeffs).dump(out);
    }
    const cpca::StationaryMin stat = cpca::minimize_by_stationary_points(proxy);
    std::printf("stationary: f* = %.12g at", stat.value);
    for (double x : stat.minimizers) std::printf(" %.12g", x);
    std::printf("\n");
    const double fe = cpca::minimize_by_sdp(proxy, eps);
    std::printf("sdp:        f* = %.12g (one-sided gap <= %.1e)\n", fe, eps);
    return kExitOk;
}

int cmd_consensus_demo(int agents, double edge_prob, std::uint64_t seed, const std::string& graph_path,
                       int dim, double eps, std::optional<int> upper_bound_u,
                       const std::string& output) {
    cpca::Graph g;
    if (!graph_path.empty()) {
        std::ifstream in(graph_path);
        if (!in) throw std::invalid_argument("cannot open " + graph_path);
        g = cpca::load_edge_list(in);
    } else {
        g = cpca::erdos_renyi_connected(agents, edge_prob, seed);
    }
    const int U = upper_bound_u.value_or(cpca::diameter(g));
    cpca::Rng rng = cpca::Rng::for_stream(seed, 1);
    std::vector<std::vector<double>> init(static_cast<std::size_t>(g.n));
    for (auto& v : init) {
        v.resize(static_cast<std::size_t>(dim));
        for (auto& x : v) x = rng.uniform(-5, 5);
    }
    std::vector<cpca::ConsensusTraceRow> trace;
    const cpca::ConsensusOutcome out = cpca::run_average_consensus_with_stopping(g, init, eps, U, &trace);
    std::string csv = "round,max_dev,stop_check\n";
    char buf[96];
    for (const auto& row : trace) {
        std::snprintf(buf, sizeof(buf), "%ld,%.12g,%d\n", row.round, row.max_dev_from_mean, row.stop_check);
        csv += buf;
    }
    if (!output.empty()) {
        write_text(output, csv);
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    std::printf("stopped after %ld rounds, delta = %.3e, aligned degree %d\n", out.rounds,
                out.delta_used, out.aligned_degree);
    return kExitOk;
}

int cmd_run(const std::string& objective, int agents, double edge_prob, std::uint64_t seed, double eps,
            const std::string& backend, std::optional<int> upper_bound_u, const std::string& output) {
    const cpca::Graph g = agents == 1 ? cpca::Graph::from_edges(1, {})
                                      : cpca::erdos_renyi_connected(agents, edge_prob, seed);
    const cpca::ObjectiveFamily family = parse_family(objective);
    std::vector<std::function<double(double)>> objs;
    for (int i = 0; i < agents; ++i) objs.push_back(cpca::sample_objective(family, seed, i).f);
    const int U = upper_bound_u.value_or(cpca::diameter(g));
    const cpca::CpcaConfig cfg = cpca::CpcaConfig::with_default_split(eps, parse_backend(backend), U);
    const cpca::CpcaResult res =
        cpca::run_cpca(objs, std::vector<cpca::Interval>(static_cast<std::size_t>(agents),
                                                         cpca::Interval(-1, 1)),
                       g, cfg);

    const auto avg = [&](double x) {
        double acc = 0.0;
        for (const auto& f : objs) acc += f(x);
        return acc / agents;
    };
    const cpca::BruteForceResult oracle = cpca::brute_force_min(avg, res.domain);
    double worst = 0.0;
    for (double fe : res.f_e_star) worst = std::max(worst, std::abs(fe - oracle.f_star));

    std::printf("agents=%d rounds=%ld max_degree=%d\n", agents, res.consensus_rounds,
                res.max_proxy_degree);
    std::printf("agent 0: f_e = %.12g, minimizers:", res.f_e_star[0]);
    for (double x : res.minimizer_set[0]) std::printf(" %.12g", x);
    std::printf("\noracle:  f* = %.12g at %.12g\n", oracle.f_star, oracle.x_star);
    std::printf("worst agent error %.3e (budget %.1e)\n", worst, eps);

    if (!output.empty()) {
        nlohmann::json j{{"f_e_star", res.f_e_star},
                         {"minimizers", res.minimizer_set},
                         {"queries_per_agent", res.queries_per_agent},
                         {"consensus_rounds", res.consensus_rounds},
                         {"max_proxy_degree", res.max_proxy_degree},
                         {"oracle", {{"f_star", oracle.f_star}, {"x_star", oracle.x_star}}}};
        write_text(output, j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& output) {
    std::ifstream in(spec_path);
    if (!in) throw std::invalid_argument("cannot open " + spec_path);
    const cpca::ExperimentSpec spec = cpca::experiment_spec_from_stream(in);
    const auto records = cpca::run_sweep(spec);
    if (!output.empty()) {
        std::ofstream out(output);
        if (!out) throw std::invalid_argument("cannot open " + output);
        cpca::write_metrics_csv(records, out);
        std::printf("%zu records written to %s\n", records.size(), output.c_str());
    } else {
        cpca::write_metrics_csv(records, std::cout);
    }
    int exit_code = kExitOk;
    for (const auto& r : records) {
        if (r.status == "ok") continue;
        const bool numerical = r.status == "consensus" || r.status == "polynomial-optimization";
        exit_code = numerical ? kExitNumerical : std::max(exit_code, kExitInstance);
        if (exit_code == kExitNumerical) break;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed global optimization of univariate objectives over a network"};
    app.require_subcommand(1);

    std::string objective = "expsum", backend = "sdp", output, input, graph_path, spec_path, dump_sdp;
    std::uint64_t seed = 42;
    int agents = 30, agent_index = 0, dim = 5;
    double eps = 1e-4, edge_prob = 0.4, lo = -1.0, hi = 1.0;
    std::optional<int> upper_bound_u;

    auto* fit = app.add_subcommand("fit", "fit a sampled objective and report the proxy");
    fit->add_option("--objective", objective, "expsum|logisticlog");
    fit->add_option("--seed", seed, "instance seed");
    fit->add_option("--agent", agent_index, "agent index within the instance");
    fit->add_option("--eps", eps, "uniform fit tolerance eps1");
    fit->add_option("--lo", lo, "interval lower bound");
    fit->add_option("--hi", hi, "interval upper bound");
    fit->add_option("--output", output, "write the proxy as JSON");

    auto* opt = app.add_subcommand("optimize-poly", "minimize a proxy from a coefficients file");
    opt->add_option("--input", input, "proxy JSON file {interval:[lo,hi], coeffs:[...]}")->required();
    opt->add_option("--eps", eps, "SDP duality-gap tolerance eps3");
    opt->add_option("--dump-sdp", dump_sdp, "write the reformulation as plain text");

    auto* demo = app.add_subcommand("consensus-demo", "run consensus with stopping, emit a trace CSV");
    demo->add_option("--agents", agents, "agent count (ignored with --graph)");
    demo->add_option("--edge-prob", edge_prob, "edge probability");
    demo->add_option("--seed", seed, "graph/init seed");
    demo->add_option("--graph", graph_path, "edge-list file instead of a random graph");
    demo->add_option("--dim", dim, "vector length per agent");
    demo->add_option("--eps", eps, "consensus tolerance eps2");
    demo->add_option("--upper-bound-U", upper_bound_u, "diameter upper bound U");
    demo->add_option("--output", output, "trace CSV path (stdout otherwise)");

    auto* run = app.add_subcommand("run", "run one full instance and compare with the oracle");
    run->add_option("--objective", objective, "expsum|logisticlog");
    run->add_option("--agents", agents, "agent count");
    run->add_option("--edge-prob", edge_prob, "edge probability");
    run->add_option("--seed", seed, "instance seed");
    run->add_option("--eps", eps, "overall accuracy budget");
    run->add_option("--backend", backend, "sdp|stationary");
    run->add_option("--upper-bound-U", upper_bound_u, "diameter upper bound U");
    run->add_option("--output", output, "write results as JSON");

    auto* sweep = app.add_subcommand("sweep", "run an experiment spec, emit a metrics CSV");
    sweep->add_option("--spec", spec_path, "experiment spec JSON")->required();
    sweep->add_option("--output", output, "metrics CSV path (stdout otherwise)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return cmd_fit(objective, seed, agent_index, eps, lo, hi, output);
        if (opt->parsed()) return cmd_optimize_poly(input, eps, dump_sdp);
        if (demo->parsed())
            return cmd_consensus_demo(agents, edge_prob, seed, graph_path, dim, eps, upper_bound_u,
                                      output);
        if (run->parsed())
            return cmd_run(objective, agents, edge_prob, seed, eps, backend, upper_bound_u, output);
        if (sweep->parsed()) return cmd_sweep(spec_path, output);
    } catch (const cpca::SolverFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const cpca::RoundCapExceeded& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const cpca::Error& e) {
        std::fprintf(stderr, "instance error%s%s: %s\n", e.stage.empty() ? "" : " in ",
                     e.stage.c_str(), e.what());
        return kExitInstance;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInstance;
    }
    return kExitOk;
}
