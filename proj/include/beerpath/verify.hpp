#pragma once

#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "beerpath/oracle.hpp"
#include "beerpath/td.hpp"
#include "beerpath/tri_query.hpp"

namespace beerpath {

struct VerifyReport {
    bool ok = true;
    long long pairs_checked = 0;
    std::string failing_strategy;
    int bad_s = 0, bad_t = 0;
    std::string detail;
};

/// Pair selection: either every ordered pair or k seeded random pairs.
inline std::vector<std::pair<int, int>> select_pairs(int n, const std::string& spec,
                                                     std::uint64_t seed) {
    std::vector<std::pair<int, int>> pairs;
    if (spec == "all") {
        for (int s = 1; s <= n; ++s)
            for (int t = 1; t <= n; ++t) pairs.push_back({s, t});
        return pairs;
    }
    if (spec.rfind("random:", 0) == 0) {
        int k = std::stoi(spec.substr(7));
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> d(1, n);
        for (int i = 0; i < k; ++i) pairs.push_back({d(rng), d(rng)});
        return pairs;
    }
    throw ParseError("bad --pairs spec '" + spec + "' (want all or random:k)");
}

template <typename T>
bool answers_match(const DistPair<T>& got, const DistPair<T>& expect) {
    if constexpr (std::is_same_v<T, double>) {
        return dist_pairs_close(got, expect);
    } else {
        return got == expect;
    }
}

/// Compares one built index against the brute-force oracle.
template <typename T, typename QueryFn>
VerifyReport verify_against_oracle(const BeerGraph<T>& g,
                                   const std::vector<std::pair<int, int>>& pairs,
                                   const std::string& label, QueryFn&& query_fn) {
    VerifyReport r;
    OracleTable<T> oracle(g);
    for (auto [s, t] : pairs) {
        ++r.pairs_checked;
        DistPair<T> expect = oracle.pair(s, t);
        DistPair<T> got = query_fn(s, t);
        if (!answers_match(got, expect)) {
            r.ok = false;
            r.failing_strategy = label;
            r.bad_s = s;
            r.bad_t = t;
            std::ostringstream ss;
            ss << label << " query(" << s << ", " << t << ") = " << got << ", oracle says "
               << expect;
            r.detail = ss.str();
            return r;
        }
    }
    return r;
}

/// Builds every requested strategy over the instance and checks the selected
/// pairs; stops at the first mismatch.
template <typename T>
VerifyReport verify_instance(const BeerGraph<T>& g, const std::vector<std::pair<int, int>>& pairs,
                             const std::vector<Strategy>& strategies,
                             const TreeDecomposition* td = nullptr) {
    VerifyReport last;
    for (Strategy st : strategies) {
        auto idx = build_tri_index(g, st);
        auto r = verify_against_oracle(g, pairs, strategy_name(st),
                                       [&](int s, int t) { return query(idx, s, t); });
        last.pairs_checked += r.pairs_checked;
        if (!r.ok) {
            r.pairs_checked = last.pairs_checked;
            return r;
        }
    }
    if (td) {
        auto idx = build_td_index(g, *td);
        auto r = verify_against_oracle(g, pairs, "td",
                                       [&](int s, int t) { return td_query(idx, s, t); });
        last.pairs_checked += r.pairs_checked;
        if (!r.ok) {
            r.pairs_checked = last.pairs_checked;
            return r;
        }
    }
    return last;
}

/// Greedy shrink of a failing instance: repeatedly drop edges while the
/// graph stays biconnected and the mismatch persists. Returns the smaller
/// graph and a failing pair on it.
template <typename T>
std::pair<BeerGraph<T>, std::pair<int, int>> shrink_failure(
    const BeerGraph<T>& g0, const std::vector<Strategy>& strategies,
    const TreeDecomposition* td = nullptr) {
    BeerGraph<T> g = g0;
    auto all_pairs = [](const BeerGraph<T>& h) {
        std::vector<std::pair<int, int>> ps;
        for (int s = 1; s <= h.n; ++s)
            for (int t = 1; t <= h.n; ++t) ps.push_back({s, t});
        return ps;
    };
    auto failure = [&](const BeerGraph<T>& h) -> std::optional<std::pair<int, int>> {
        if (!validate_biconnected(h)) return std::nullopt;
        try {
            auto r = verify_instance(h, all_pairs(h), strategies, td);
            if (!r.ok) return std::pair{r.bad_s, r.bad_t};
        } catch (const std::exception&) {
            return std::nullopt;  // shrink must preserve a clean failure
        }
        return std::nullopt;
    };
    auto bad = failure(g);
    if (!bad) return {g, {0, 0}};
    bool improved = true;
    while (improved && g.m() > 2) {
        improved = false;
        for (int e = 0; e < g.m(); ++e) {
            BeerGraph<T> h = g;
            h.edges.erase(h.edges.begin() + e);
            if (auto b = failure(h)) {
                g = std::move(h);
                bad = b;
                improved = true;
                break;
            }
        }
    }
    return {g, *bad};
}

}  // namespace beerpath
