#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "beerpath/counters.hpp"
#include "beerpath/weight.hpp"

namespace beerpath {

/// Sparse-table range minimum over an arbitrary idempotent combiner.
/// O(n log n) build, O(1) query. Queries use 1-based inclusive bounds.
template <typename V, typename Combine>
class SparseTable {
public:
    SparseTable() = default;
    SparseTable(std::vector<V> values, Combine comb = {}) : comb_(comb) {
        const int n = static_cast<int>(values.size());
        if (n == 0) return;
        int levels = std::bit_width(static_cast<unsigned>(n));
        table_.resize(levels);
        table_[0] = std::move(values);
        for (int p = 1; p < levels; ++p) {
            int len = n - (1 << p) + 1;
            table_[p].resize(len);
            for (int i = 0; i < len; ++i)
                table_[p][i] = comb_(table_[p - 1][i], table_[p - 1][i + (1 << (p - 1))]);
        }
    }

    int size() const { return table_.empty() ? 0 : static_cast<int>(table_[0].size()); }

    V query(int i, int j) const {
        if (i < 1 || j > size() || i > j) throw std::out_of_range("range query out of bounds");
        int p = std::bit_width(static_cast<unsigned>(j - i + 1)) - 1;
        return comb_(table_[p][i - 1], table_[p][j - (1 << p)]);
    }

    /// Minimum over [i, j] or nullopt when the range is empty.
    std::optional<V> query_or_empty(int i, int j) const {
        if (i > j) return std::nullopt;
        return query(i, j);
    }

private:
    Combine comb_;
    std::vector<std::vector<V>> table_;
};

template <typename T>
struct WeightMin {
    Weight<T> operator()(Weight<T> a, Weight<T> b) const { return min(a, b); }
};

/// Range minimum table over weights; 1-based inclusive queries.
template <typename T>
class RmqTable {
public:
    RmqTable() = default;
    explicit RmqTable(std::vector<Weight<T>> values) : st_(std::move(values)) {}

    int size() const { return st_.size(); }
    Weight<T> query(int i, int j) const { return st_.query(i, j); }
    Weight<T> query_or_inf(int i, int j) const {
        auto v = st_.query_or_empty(i, j);
        return v ? *v : Weight<T>::infinity();
    }

private:
    SparseTable<Weight<T>, WeightMin<T>> st_;
};

/// Lowest common ancestors by Euler tour + depth RMQ, plus binary-lifting
/// ancestor jumps. Nodes are 0-based ids; the root's parent entry is ignored.
class LcaIndex {
    struct MinByDepth {
        std::pair<int, int> operator()(std::pair<int, int> a, std::pair<int, int> b) const {
            return a.first <= b.first ? a : b;
        }
    };

public:
    LcaIndex() = default;

    LcaIndex(const std::vector<int>& parent, int root) : parent_(parent), root_(root) {
        const int n = static_cast<int>(parent.size());
        depth_.assign(n, 0);
        first_.assign(n, -1);
        std::vector<std::vector<int>> children(n);
        for (int v = 0; v < n; ++v)
            if (v != root) children[parent[v]].push_back(v);

        std::vector<std::pair<int, int>> euler;  // (depth, node)
        euler.reserve(2 * static_cast<size_t>(n));
        struct Frame {
            int v;
            size_t it;
        };
        std::vector<Frame> st{{root, 0}};
        while (!st.empty()) {
            auto& f = st.back();
            if (f.it == 0) {
                first_[f.v] = static_cast<int>(euler.size());
                euler.push_back({depth_[f.v], f.v});
            }
            if (f.it < children[f.v].size()) {
                int c = children[f.v][f.it++];
                depth_[c] = depth_[f.v] + 1;
                st.push_back({c, 0});
            } else {
                st.pop_back();
                if (!st.empty()) euler.push_back({depth_[st.back().v], st.back().v});
            }
        }
        euler_rmq_ = SparseTable<std::pair<int, int>, MinByDepth>(std::move(euler));

        int levels = 1;
        while ((1 << levels) < n + 1) ++levels;
        up_.assign(levels, std::vector<int>(n, root));
        for (int v = 0; v < n; ++v) up_[0][v] = v == root ? root : parent[v];
        for (int p = 1; p < levels; ++p)
            for (int v = 0; v < n; ++v) up_[p][v] = up_[p - 1][up_[p - 1][v]];
    }

    int depth(int v) const { return depth_[v]; }
    int parent(int v) const { return v == root_ ? -1 : parent_[v]; }

    int lca(int u, int v) const {
        int a = first_[u], b = first_[v];
        if (a > b) std::swap(a, b);
        return euler_rmq_.query(a + 1, b + 1).second;
    }

    int ancestor(int v, int steps) const {
        for (int p = 0; steps > 0; ++p, steps >>= 1)
            if (steps & 1) v = up_[p][v];
        return v;
    }

    /// The child of `anc` on the path toward the descendant v.
    int child_toward(int anc, int v) const {
        assert(depth_[v] > depth_[anc]);
        return ancestor(v, depth_[v] - depth_[anc] - 1);
    }

private:
    std::vector<int> parent_;
    int root_ = 0;
    std::vector<int> depth_, first_;
    SparseTable<std::pair<int, int>, MinByDepth> euler_rmq_;
    std::vector<std::vector<int>> up_;
};

/// Upward path products of a semigroup over tree nodes by binary lifting.
/// f maps every non-root node to a value; products run parent-side first.
template <typename V, typename Op>
class TreeProductIndex {
public:
    TreeProductIndex() = default;

    TreeProductIndex(const std::vector<int>& parent, int root, std::vector<V> f, Op op = {})
        : parent_(parent), root_(root), op_(op) {
        const int n = static_cast<int>(parent.size());
        depth_.assign(n, 0);
        // ids are not ordered by depth in general; compute depths by chasing
        std::vector<int> order;
        order.reserve(n);
        {
            std::vector<std::vector<int>> children(n);
            for (int v = 0; v < n; ++v)
                if (v != root) children[parent[v]].push_back(v);
            std::vector<int> bfs{root};
            while (!bfs.empty()) {
                int v = bfs.back();
                bfs.pop_back();
                order.push_back(v);
                for (int c : children[v]) {
                    depth_[c] = depth_[v] + 1;
                    bfs.push_back(c);
                }
            }
        }
        int maxd = 0;
        for (int v = 0; v < n; ++v) maxd = std::max(maxd, depth_[v]);
        int levels = 1;
        while ((1 << levels) <= maxd) ++levels;

        up_.assign(levels, std::vector<int>(n, root));
        val_.assign(levels, std::vector<V>(n));
        val_[0] = std::move(f);
        for (int v = 0; v < n; ++v) up_[0][v] = v == root ? root : parent[v];
        for (int p = 1; p < levels; ++p)
            for (int v : order) {
                int mid = up_[p - 1][v];
                up_[p][v] = up_[p - 1][mid];
                if (depth_[v] >= (1 << p))
                    val_[p][v] = op_(val_[p - 1][mid], val_[p - 1][v]);
            }
    }

    /// Product of f over the nodes strictly below `anc` along the path down
    /// to `v` inclusive, ordered top to bottom. Empty when v == anc.
    std::optional<V> product_below(int anc, int v, QueryStats* stats = nullptr) const {
        int steps = depth_[v] - depth_[anc];
        assert(steps >= 0);
        if (steps == 0) return std::nullopt;
        std::optional<V> acc;
        int cur = v;
        // walk from the bottom, prepending higher blocks
        for (int p = 0; steps > 0; ++p, steps >>= 1) {
            if (steps & 1) {
                if (acc) {
                    acc = op_(val_[p][cur], *acc);
                    if (stats) ++stats->oplus_hat_ops;
                } else {
                    acc = val_[p][cur];
                }
                cur = up_[p][cur];
            }
        }
        return acc;
    }

private:
    std::vector<int> parent_;
    int root_ = 0;
    Op op_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> up_;
    std::vector<std::vector<V>> val_;
};

}  // namespace beerpath
