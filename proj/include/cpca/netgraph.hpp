#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpca/errors.hpp"
#include "cpca/rng.hpp"

namespace cpca {

/// Undirected simple graph on agents 0..n-1.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // stored with u < v
    std::vector<std::vector<int>> adj;

    static Graph from_edges(int n, std::vector<std::pair<int, int>> edge_list) {
        if (n < 1) throw std::invalid_argument("Graph: needs at least one node");
        Graph g;
        g.n = n;
        g.adj.assign(static_cast<std::size_t>(n), {});
        std::set<std::pair<int, int>> seen;
        for (auto [u, v] : edge_list) {
            if (u > v) std::swap(u, v);
            if (u < 0 || v >= n) throw std::invalid_argument("Graph: edge index out of range");
            if (u == v) throw std::invalid_argument("Graph: self-loop");
            if (!seen.insert({u, v}).second) throw std::invalid_argument("Graph: duplicate edge");
            g.edges.emplace_back(u, v);
            g.adj[static_cast<std::size_t>(u)].push_back(v);
            g.adj[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
        return g;
    }

    int degree(int i) const { return static_cast<int>(adj[static_cast<std::size_t>(i)].size()); }
};

inline bool is_connected(const Graph& g) {
    if (g.n == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int count = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : g.adj[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                queue.push_back(v);
            }
        }
    }
    return count == g.n;
}

/// Exact diameter by BFS from every node. Requires a connected graph.
inline int diameter(const Graph& g) {
    int best = 0;
    for (int src = 0; src < g.n; ++src) {
        std::vector<int> dist(static_cast<std::size_t>(g.n), -1);
        std::deque<int> queue{src};
        dist[static_cast<std::size_t>(src)] = 0;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : g.adj[static_cast<std::size_t>(u)]) {
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (int d : dist) {
            if (d < 0) throw std::invalid_argument("diameter: graph is not connected");
            best = std::max(best, d);
        }
    }
    return best;
}

/// Erdos-Renyi sample conditioned on connectivity: each pair, taken in
/// lexicographic order, is an edge with probability p; the whole graph is
/// resampled until connected. Deterministic given (n, p, seed); the generator
/// is mt19937_64 seeded through splitmix64.
inline Graph erdos_renyi_connected(int n, double p, std::uint64_t seed, int max_attempts = 1000) {
    if (n < 2) throw std::invalid_argument("erdos_renyi_connected: n must be >= 2");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("erdos_renyi_connected: p must be in (0, 1]");
    Rng rng = Rng::for_stream(seed, 0);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                if (rng.uniform01() < p) edges.emplace_back(u, v);
            }
        }
        Graph g = Graph::from_edges(n, std::move(edges));
        if (is_connected(g)) return g;
    }
    throw NotConnectedAfterRetries("erdos_renyi_connected: no connected sample in " +
                                   std::to_string(max_attempts) + " attempts (p too small for n?)");
}

/// Lazy Metropolis weight matrix:
///   w_ij = 1 / (2 max(deg i, deg j)) for neighbors, w_ii = 1 - sum_j w_ij.
/// Symmetric, doubly stochastic, diagonal >= 1/2.
inline Eigen::MatrixXd lazy_metropolis_weights(const Graph& g) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(g.n, g.n);
    for (auto [u, v] : g.edges) {
        const double wij = 1.0 / (2.0 * std::max(g.degree(u), g.degree(v)));
        w(u, v) = wij;
        w(v, u) = wij;
    }
    for (int i = 0; i < g.n; ++i) w(i, i) = 1.0 - w.row(i).sum();
    return w;
}

/// Plain-text edge list: header "n=<count>", then one "u v" pair per line.
inline void save_edge_list(const Graph& g, std::ostream& os) {
    os << "n=" << g.n << "\n";
    for (auto [u, v] : g.edges) os << u << " " << v << "\n";
}

inline Graph load_edge_list(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("n=", 0) != 0)
        throw std::invalid_argument("load_edge_list: expected header \"n=<count>\"");
    const int n = std::stoi(header.substr(2));
    std::vector<std::pair<int, int>> edges;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int u = 0, v = 0;
        if (!(ls >> u >> v)) throw std::invalid_argument("load_edge_list: bad edge line: " + line);
        edges.emplace_back(u, v);
    }
    return Graph::from_edges(n, std::move(edges));
}

}  // namespace cpca
