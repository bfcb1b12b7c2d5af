#pragma once

#include <random>
#include <vector>

#include "beerpath/graph.hpp"
#include "beerpath/td.hpp"

namespace beerpath {

struct GenOptions {
    double beer_fraction = 0.25;
    long long max_weight = 100;
    bool directed = false;
    double inf_fraction = 0.0;  // directed only: chance a direction is inf
};

namespace detail {

template <typename T>
Weight<T> random_weight(std::mt19937_64& rng, const GenOptions& opt) {
    if (opt.inf_fraction > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < opt.inf_fraction) return Weight<T>::infinity();
    }
    if constexpr (std::is_same_v<T, double>) {
        std::uniform_real_distribution<double> d(0.0, static_cast<double>(opt.max_weight));
        return Weight<T>(d(rng));
    } else {
        std::uniform_int_distribution<long long> d(0, opt.max_weight);
        return Weight<T>(d(rng));
    }
}

template <typename T>
void assign_weights(BeerGraph<T>& g, std::mt19937_64& rng, const GenOptions& opt) {
    for (auto& e : g.edges) {
        e.wuv = random_weight<T>(rng, opt);
        if (g.directed) {
            e.wvu = random_weight<T>(rng, opt);
            // keep the underlying undirected edge usable in at least one direction
            if (e.wuv.is_inf() && e.wvu.is_inf()) e.wvu = Weight<T>::zero();
        } else {
            e.wvu = e.wuv;
        }
    }
}

template <typename T>
void assign_beer(BeerGraph<T>& g, std::mt19937_64& rng, double fraction) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int v = 1; v <= g.n; ++v) g.beer[v] = coin(rng) < fraction ? 1 : 0;
}

}  // namespace detail

/// Random two-terminal series-parallel graph with exactly `target_edges`
/// edges, biconnected (the top-level composition is parallel), together
/// with the width-2 tree decomposition read off the composition tree.
/// r = 0 for every instance this produces.
template <typename T>
std::pair<BeerGraph<T>, TreeDecomposition> gen_series_parallel_with_td(int target_edges,
                                                                       std::uint64_t seed,
                                                                       GenOptions opt = {}) {
    if (target_edges < 2) target_edges = 2;
    std::mt19937_64 rng(seed);
    BeerGraph<T> g;
    g.directed = opt.directed;
    g.n = 2;
    TreeDecomposition td;

    struct Task {
        int a, b, budget;
        bool force_parallel;
        int bag_parent;
    };
    std::vector<Task> todo;
    todo.push_back({1, 2, target_edges, true, -1});
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    while (!todo.empty()) {
        Task t = todo.back();
        todo.pop_back();
        int bag = td.node_count();
        td.parent.push_back(t.bag_parent);
        if (t.budget == 1) {
            td.bags.push_back({std::min(t.a, t.b), std::max(t.a, t.b)});
            g.edges.push_back({t.a, t.b, Weight<T>::zero(), Weight<T>::zero()});
            continue;
        }
        bool parallel = t.force_parallel || coin(rng) < 0.33;
        std::uniform_int_distribution<int> split(1, t.budget - 1);
        int left = split(rng);
        if (parallel) {
            td.bags.push_back({std::min(t.a, t.b), std::max(t.a, t.b)});
            todo.push_back({t.a, t.b, left, false, bag});
            todo.push_back({t.a, t.b, t.budget - left, false, bag});
        } else {
            int c = ++g.n;
            std::vector<int> bagset{t.a, t.b, c};
            std::sort(bagset.begin(), bagset.end());
            td.bags.push_back(bagset);
            todo.push_back({t.a, c, left, false, bag});
            todo.push_back({c, t.b, t.budget - left, false, bag});
        }
    }

    g.beer.assign(static_cast<size_t>(g.n) + 1, 0);
    detail::assign_weights(g, rng, opt);
    detail::assign_beer(g, rng, opt.beer_fraction);
    td.n = g.n;
    return {std::move(g), std::move(td)};
}

template <typename T>
BeerGraph<T> gen_series_parallel(int target_edges, std::uint64_t seed, GenOptions opt = {}) {
    return gen_series_parallel_with_td<T>(target_edges, seed, opt).first;
}

/// Random biconnected multigraph: a Hamiltonian cycle on n vertices plus
/// `chords` random chords (parallel chords allowed, self loops not).
template <typename T>
BeerGraph<T> gen_chorded_cycle(int n, int chords, std::uint64_t seed, GenOptions opt = {}) {
    if (n < 3) n = 3;
    std::mt19937_64 rng(seed);
    BeerGraph<T> g;
    g.directed = opt.directed;
    g.n = n;
    g.beer.assign(static_cast<size_t>(n) + 1, 0);
    for (int v = 1; v <= n; ++v)
        g.edges.push_back({v, v % n + 1, Weight<T>::zero(), Weight<T>::zero()});
    std::uniform_int_distribution<int> pick(1, n);
    for (int i = 0; i < chords; ++i) {
        int a = pick(rng), b = pick(rng);
        while (b == a) b = pick(rng);
        g.edges.push_back({a, b, Weight<T>::zero(), Weight<T>::zero()});
    }
    detail::assign_weights(g, rng, opt);
    detail::assign_beer(g, rng, opt.beer_fraction);
    return g;
}

/// Random connected graph of treewidth at most `width`, built together with
/// a witnessing decomposition: every new vertex replaces one member of an
/// existing bag and attaches to at least one bag mate.
template <typename T>
std::pair<BeerGraph<T>, TreeDecomposition> gen_graph_with_td(int n, int width, std::uint64_t seed,
                                                             GenOptions opt = {}) {
    if (width < 1) width = 1;
    if (n < width + 1) n = width + 1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    BeerGraph<T> g;
    g.directed = opt.directed;
    g.n = n;
    g.beer.assign(static_cast<size_t>(n) + 1, 0);
    TreeDecomposition td;
    td.n = n;

    std::vector<int> base;
    for (int v = 1; v <= width + 1; ++v) base.push_back(v);
    td.bags.push_back(base);
    td.parent.push_back(-1);
    for (int v = 1; v <= width; ++v)
        g.edges.push_back({v, v + 1, Weight<T>::zero(), Weight<T>::zero()});
    for (int a = 1; a <= width + 1; ++a)
        for (int b = a + 2; b <= width + 1; ++b)
            if (coin(rng) < 0.4) g.edges.push_back({a, b, Weight<T>::zero(), Weight<T>::zero()});

    for (int v = width + 2; v <= n; ++v) {
        std::uniform_int_distribution<int> pick_bag(0, td.node_count() - 1);
        int b = pick_bag(rng);
        std::vector<int> bag = td.bags[b];
        std::uniform_int_distribution<size_t> pick_drop(0, bag.size() - 1);
        bag.erase(bag.begin() + pick_drop(rng));
        // attach the new vertex to one mate for connectivity, more by chance
        std::uniform_int_distribution<size_t> pick_mate(0, bag.size() - 1);
        size_t anchor = pick_mate(rng);
        for (size_t i = 0; i < bag.size(); ++i)
            if (i == anchor || coin(rng) < 0.35)
                g.edges.push_back({bag[i], v, Weight<T>::zero(), Weight<T>::zero()});
        bag.push_back(v);
        std::sort(bag.begin(), bag.end());
        td.bags.push_back(bag);
        td.parent.push_back(b);
    }

    detail::assign_weights(g, rng, opt);
    detail::assign_beer(g, rng, opt.beer_fraction);
    return {std::move(g), std::move(td)};
}

}  // namespace beerpath
