#pragma once

#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "beerpath/tri_index.hpp"

namespace beerpath {

/// The tree path a query composes over: Q nodes for both endpoints, their
/// lowest common ancestor, and the top node of each leg.
struct QueryPlan {
    int theta, theta_prime;
    int pi = -1;
    int up_top = -1, down_top = -1;  // children of pi toward each endpoint
};

template <typename T>
QueryPlan plan_query(const TriIndex<T>& idx, int s, int t) {
    QueryPlan p{idx.tree.vertex_qnode[s], idx.tree.vertex_qnode[t]};
    if (p.theta == p.theta_prime) return p;
    p.pi = idx.lca.lca(p.theta, p.theta_prime);
    p.up_top = idx.lca.child_toward(p.pi, p.theta);
    p.down_top = idx.lca.child_toward(p.pi, p.theta_prime);
    return p;
}

namespace detail {

/// Product of F3 values along the leg from `top` (exclusive) down to `leaf`,
/// parent-side first. Strategy F12 recomputes each F3 image on the fly.
template <typename T>
std::optional<KGraph<T>> leg_product(const TriIndex<T>& idx, int top, int leaf,
                                     QueryStats* stats) {
    if (top == leaf) return std::nullopt;
    if (idx.strategy != Strategy::F12) return idx.tp.product_below(top, leaf, stats);

    std::vector<int> path;  // leaf up to just below top
    for (int v = leaf; v != top; v = idx.tree.nodes[v].parent) path.push_back(v);
    std::optional<KGraph<T>> acc;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        KGraph<T> f3 = compute_f3_value(idx, *it, stats);
        if (!acc) {
            acc = std::move(f3);
        } else {
            acc = oplus_hat(*acc, f3, stats);
        }
    }
    return acc;
}

}  // namespace detail

/// (distance, beer distance) from s to t.
template <typename T>
DistPair<T> query(const TriIndex<T>& idx, int s, int t, QueryStats* stats = nullptr) {
    if (s < 1 || s > idx.graph.n || t < 1 || t > idx.graph.n)
        throw std::out_of_range("query vertex out of range");
    QueryPlan plan = plan_query(idx, s, t);
    if (plan.theta == plan.theta_prime) {
        KGraph<T> k = oplus(idx.f1[plan.theta], idx.f2[plan.theta], stats);
        return k.at(s, t);
    }
    auto up = detail::leg_product(idx, plan.up_top, plan.theta, stats);
    auto down = detail::leg_product(idx, plan.down_top, plan.theta_prime, stats);
    KGraph<T> joint = compute_f4_value(idx, plan.pi, idx.pos_in_parent[plan.up_top],
                                       idx.pos_in_parent[plan.down_top], stats);

    KGraph<T> k = idx.f1[plan.theta];
    if (up) k = oplus(k, *up, stats);
    k = oplus(k, joint, stats);
    if (down) k = oplus(k, *down, stats);
    k = oplus(k, idx.f1[plan.theta_prime], stats);
    assert(!k.bottom);
    return k.at(s, t);
}

/// Elementwise queries, optionally fanned out over worker threads. Results
/// are positioned by input order regardless of thread count.
template <typename T>
std::vector<DistPair<T>> query_batch(const TriIndex<T>& idx,
                                     const std::vector<std::pair<int, int>>& pairs,
                                     int threads = 1, QueryStats* stats = nullptr) {
    std::vector<DistPair<T>> out(pairs.size());
    if (pairs.empty()) return out;
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto [s, t] = pairs[i];
        if (s < 1 || s > idx.graph.n || t < 1 || t > idx.graph.n)
            throw std::out_of_range("query pair #" + std::to_string(i) + " (" +
                                    std::to_string(s) + ", " + std::to_string(t) +
                                    ") is out of range");
    }
    threads = std::max(1, std::min<int>(threads, static_cast<int>(pairs.size())));
    if (threads == 1) {
        for (size_t i = 0; i < pairs.size(); ++i)
            out[i] = query(idx, pairs[i].first, pairs[i].second, stats);
        return out;
    }
    std::vector<QueryStats> per_thread(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (size_t i = w; i < pairs.size(); i += threads)
                out[i] = query(idx, pairs[i].first, pairs[i].second, &per_thread[w]);
        });
    }
    for (auto& th : pool) th.join();
    if (stats)
        for (const auto& st : per_thread) *stats += st;
    return out;
}

}  // namespace beerpath
