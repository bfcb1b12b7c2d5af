#pragma once

#include <vector>

#include "beerpath/graph.hpp"

namespace beerpath {

/// Ground-truth (dist, beer) for one pair: a forward Dijkstra from s plus a
/// Dijkstra from t on the reversed graph, minimized over beer vertices.
template <typename T>
DistPair<T> oracle_dist_pair(const BeerGraph<T>& g, int s, int t) {
    Adjacency<T> fwd(g.n, g.edges, false);
    Adjacency<T> bwd(g.n, g.edges, true);
    auto ds = dijkstra(fwd, s);
    auto dt = dijkstra(bwd, t);
    DistPair<T> out;
    out.dist = ds[t];
    out.beer = Weight<T>::infinity();
    for (int b = 1; b <= g.n; ++b)
        if (g.is_beer(b)) out.beer = min(out.beer, ds[b] + dt[b]);
    return out;
}

/// All-pairs oracle over an explicit edge subset. Used wherever a table
/// entry is checked against the distances of a materialized subgraph.
template <typename T>
class OracleTable {
public:
    template <typename EdgeRange>
    OracleTable(int n, const EdgeRange& edges, const std::vector<char>& beer) : n_(n), beer_(beer) {
        Adjacency<T> fwd(n, edges, false);
        Adjacency<T> bwd(n, edges, true);
        fwd_.reserve(n + 1);
        bwd_.reserve(n + 1);
        fwd_.emplace_back();
        bwd_.emplace_back();
        for (int v = 1; v <= n; ++v) {
            fwd_.push_back(dijkstra(fwd, v));
            bwd_.push_back(dijkstra(bwd, v));
        }
    }

    template <typename EdgeRange>
    OracleTable(const BeerGraph<T>& g, const EdgeRange& edges) : OracleTable(g.n, edges, g.beer) {}

    explicit OracleTable(const BeerGraph<T>& g) : OracleTable(g.n, g.edges, g.beer) {}

    Weight<T> dist(int u, int v) const { return fwd_[u][v]; }

    DistPair<T> pair(int u, int v) const {
        DistPair<T> out;
        out.dist = fwd_[u][v];
        out.beer = Weight<T>::infinity();
        for (int b = 1; b <= n_; ++b)
            if (beer_[b]) out.beer = min(out.beer, fwd_[u][b] + bwd_[v][b]);
        return out;
    }

private:
    int n_;
    std::vector<char> beer_;
    std::vector<std::vector<Weight<T>>> fwd_, bwd_;
};

}  // namespace beerpath
