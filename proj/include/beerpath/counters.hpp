#pragma once

namespace beerpath {

/// Per-query work counters. Queries fill a caller-owned instance so that
/// concurrent readers never share mutable state.
struct QueryStats {
    long long oplus_ops = 0;      // joining compositions
    long long oplus_hat_ops = 0;  // semigroup products inside leg folds
    long long dijkstra_calls = 0; // shortest-path runs on skeleton graphs

    QueryStats& operator+=(const QueryStats& o) {
        oplus_ops += o.oplus_ops;
        oplus_hat_ops += o.oplus_hat_ops;
        dijkstra_calls += o.dijkstra_calls;
        return *this;
    }
};

}  // namespace beerpath
