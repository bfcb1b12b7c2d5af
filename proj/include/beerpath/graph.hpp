#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "beerpath/dist_pair.hpp"
#include "beerpath/weight.hpp"

namespace beerpath {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotBiconnected : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ReferenceEdgeMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Edge-weighted multigraph with a beer-vertex set. Vertices are 1..n.
/// Each record is one underlying undirected edge carrying a weight per
/// direction; undirected graphs store the same weight twice.
template <typename T>
struct BeerGraph {
    using weight_type = T;

    struct Edge {
        int u = 0, v = 0;
        Weight<T> wuv, wvu;
        int other(int x) const { return x == u ? v : u; }
    };

    int n = 0;
    bool directed = false;
    std::vector<Edge> edges;
    std::vector<char> beer;  // size n + 1, index 0 unused

    int m() const { return static_cast<int>(edges.size()); }
    bool is_beer(int v) const { return beer[v] != 0; }

    std::vector<int> beer_vertices() const {
        std::vector<int> out;
        for (int v = 1; v <= n; ++v)
            if (beer[v]) out.push_back(v);
        return out;
    }

    void add_edge(int u, int v, Weight<T> wuv, Weight<T> wvu) {
        if (u < 1 || u > n || v < 1 || v > n) throw ParseError("edge endpoint out of range");
        if (u == v) throw ParseError("self loops are not allowed");
        edges.push_back(Edge{u, v, wuv, wvu});
    }
};

using IntGraph = BeerGraph<std::int64_t>;
using RealGraph = BeerGraph<double>;

/// Directed adjacency view over a BeerGraph or an edge subset.
/// arcs[v] holds (target, weight) pairs; reverse views swap directions.
template <typename T>
struct Adjacency {
    std::vector<std::vector<std::pair<int, Weight<T>>>> arcs;

    explicit Adjacency(int n) : arcs(static_cast<size_t>(n) + 1) {}

    template <typename EdgeRange>
    Adjacency(int n, const EdgeRange& edges, bool reverse = false) : Adjacency(n) {
        for (const auto& e : edges) add(e, reverse);
    }

    void add(const typename BeerGraph<T>::Edge& e, bool reverse) {
        if (!reverse) {
            if (!e.wuv.is_inf()) arcs[e.u].push_back({e.v, e.wuv});
            if (!e.wvu.is_inf()) arcs[e.v].push_back({e.u, e.wvu});
        } else {
            if (!e.wuv.is_inf()) arcs[e.v].push_back({e.u, e.wuv});
            if (!e.wvu.is_inf()) arcs[e.u].push_back({e.v, e.wvu});
        }
    }
};

/// Single-source shortest paths, binary-heap Dijkstra. Unreachable
/// vertices map to infinity. Weights must be nonnegative by construction.
template <typename T>
std::vector<Weight<T>> dijkstra(const Adjacency<T>& adj, int source) {
    const int n = static_cast<int>(adj.arcs.size()) - 1;
    std::vector<Weight<T>> dist(static_cast<size_t>(n) + 1, Weight<T>::infinity());
    using Item = std::pair<Weight<T>, int>;
    auto cmp = [](const Item& a, const Item& b) { return b.first < a.first; };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    dist[source] = Weight<T>::zero();
    pq.push({dist[source], source});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (dist[v] < d) continue;
        for (auto [to, w] : adj.arcs[v]) {
            Weight<T> cand = d + w;
            if (cand < dist[to]) {
                dist[to] = cand;
                pq.push({cand, to});
            }
        }
    }
    return dist;
}

namespace detail {

/// DFS low-link articulation check on the underlying undirected multigraph.
/// A parallel edge back to the parent counts as a cycle, so the check is
/// on edge ids rather than vertices.
template <typename T>
std::optional<int> find_articulation_vertex(const BeerGraph<T>& g) {
    const int n = g.n;
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<size_t>(n) + 1);
    for (int i = 0; i < g.m(); ++i) {
        adj[g.edges[i].u].push_back({g.edges[i].v, i});
        adj[g.edges[i].v].push_back({g.edges[i].u, i});
    }
    std::vector<int> tin(static_cast<size_t>(n) + 1, 0), low(static_cast<size_t>(n) + 1, 0);
    int timer = 0;
    std::optional<int> articulation;
    int visited = 0;

    struct Frame {
        int v, parent_edge;
        size_t it;
        int children;
    };
    std::vector<Frame> stack;
    stack.push_back({1, -1, 0, 0});
    tin[1] = low[1] = ++timer;
    ++visited;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.it < adj[f.v].size()) {
            auto [to, eid] = adj[f.v][f.it++];
            if (eid == f.parent_edge) continue;
            if (tin[to]) {
                low[f.v] = std::min(low[f.v], tin[to]);
            } else {
                tin[to] = low[to] = ++timer;
                ++visited;
                ++f.children;
                stack.push_back({to, eid, 0, 0});
            }
        } else {
            int v = f.v;
            int children = f.children;
            bool is_root = stack.size() == 1;
            stack.pop_back();
            if (!stack.empty()) {
                Frame& p = stack.back();
                low[p.v] = std::min(low[p.v], low[v]);
                if (!articulation && stack.size() > 1 && low[v] >= tin[p.v]) articulation = p.v;
            }
            if (is_root && children > 1 && !articulation) articulation = v;
        }
    }
    if (visited < n) return 0;  // disconnected, reported as vertex 0
    return articulation;
}

}  // namespace detail

/// True iff the underlying undirected multigraph has >= 2 vertices, is
/// connected and has no articulation vertex.
template <typename T>
bool validate_biconnected(const BeerGraph<T>& g) {
    if (g.n < 2) return false;
    if (g.m() == 0) return false;
    return !detail::find_articulation_vertex(g).has_value();
}

/// Diagnostic companion to validate_biconnected: the articulation vertex if
/// one exists, 0 when the graph is disconnected, nullopt when biconnected.
template <typename T>
std::optional<int> biconnectivity_defect(const BeerGraph<T>& g) {
    if (g.n < 2 || g.m() == 0) return 0;
    return detail::find_articulation_vertex(g);
}

// ---------------------------------------------------------------------------
// Text format
//
//   line 1:  n m mode          mode is U or D
//   m lines: u v w             (undirected)
//            u v w_uv w_vu     (directed; a weight token may be "inf")
//   last:    B k b1 ... bk
//
// '#' starts a comment; blank lines are skipped. Vertices are 1-indexed.
// ---------------------------------------------------------------------------

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line, int& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
}

template <typename T>
Weight<T> parse_weight_token(const std::string& tok, int lineno) {
    if (tok == "inf") return Weight<T>::infinity();
    try {
        if constexpr (std::is_same_v<T, double>) {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
            return Weight<T>(v);
        } else {
            size_t pos = 0;
            long long v = std::stoll(tok, &pos);
            if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
            return Weight<T>(v);
        }
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad weight token '" + tok + "'");
    }
}

}  // namespace detail

template <typename T>
BeerGraph<T> parse_graph(std::istream& in) {
    std::string line;
    int lineno = 0;
    if (!detail::next_content_line(in, line, lineno)) throw ParseError("empty graph file");

    BeerGraph<T> g;
    char mode = 0;
    int m = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> g.n >> m >> mode) || (mode != 'U' && mode != 'D'))
            throw ParseError("line " + std::to_string(lineno) + ": expected 'n m mode' with mode U or D");
        if (g.n < 1 || m < 0) throw ParseError("line " + std::to_string(lineno) + ": bad sizes");
    }
    g.directed = mode == 'D';
    g.beer.assign(static_cast<size_t>(g.n) + 1, 0);
    g.edges.reserve(static_cast<size_t>(m));

    for (int i = 0; i < m; ++i) {
        if (!detail::next_content_line(in, line, lineno))
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(m) +
                             " edge lines, got " + std::to_string(i));
        std::istringstream ss(line);
        int u, v;
        std::string w1, w2;
        if (!(ss >> u >> v >> w1))
            throw ParseError("line " + std::to_string(lineno) + ": malformed edge line");
        Weight<T> wuv = detail::parse_weight_token<T>(w1, lineno);
        Weight<T> wvu = wuv;
        if (g.directed) {
            if (!(ss >> w2)) throw ParseError("line " + std::to_string(lineno) + ": directed edge needs two weights");
            wvu = detail::parse_weight_token<T>(w2, lineno);
        }
        std::string rest;
        if (ss >> rest) throw ParseError("line " + std::to_string(lineno) + ": trailing tokens on edge line");
        try {
            g.add_edge(u, v, wuv, wvu);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }

    if (!detail::next_content_line(in, line, lineno))
        throw ParseError("missing beer-vertex line");
    {
        std::istringstream ss(line);
        std::string tag;
        int k;
        if (!(ss >> tag >> k) || tag != "B" || k < 0)
            throw ParseError("line " + std::to_string(lineno) + ": expected 'B k b1 ... bk'");
        for (int i = 0; i < k; ++i) {
            int b;
            if (!(ss >> b) || b < 1 || b > g.n)
                throw ParseError("line " + std::to_string(lineno) + ": bad beer vertex");
            g.beer[b] = 1;
        }
    }
    return g;
}

template <typename T>
void write_graph(const BeerGraph<T>& g, std::ostream& os) {
    os << g.n << " " << g.m() << " " << (g.directed ? 'D' : 'U') << "\n";
    for (const auto& e : g.edges) {
        os << e.u << " " << e.v << " " << to_string(e.wuv);
        if (g.directed) os << " " << to_string(e.wvu);
        os << "\n";
    }
    auto bs = g.beer_vertices();
    os << "B " << bs.size();
    for (int b : bs) os << " " << b;
    os << "\n";
}

/// Weight-domain detection for files: integer unless some weight token
/// contains '.' or an exponent.
inline bool graph_text_is_real(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    if (!detail::next_content_line(in, line, lineno)) return false;
    while (detail::next_content_line(in, line, lineno)) {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            if (tok == "B") break;
            if (tok.find_first_of(".eE") != std::string::npos && tok != "inf") return true;
        }
    }
    return false;
}

using AnyGraph = std::variant<IntGraph, RealGraph>;

inline AnyGraph parse_graph_auto(const std::string& text) {
    std::istringstream in(text);
    if (graph_text_is_real(text)) return parse_graph<double>(in);
    return parse_graph<std::int64_t>(in);
}

}  // namespace beerpath
