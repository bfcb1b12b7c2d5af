#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "beerpath/generators.hpp"
#include "beerpath/oracle.hpp"
#include "beerpath/tri_index.hpp"

using namespace beerpath;

namespace {

template <typename T>
std::vector<typename BeerGraph<T>::Edge> edges_from_ids(const BeerGraph<T>& g,
                                                        const std::vector<int>& ids) {
    std::vector<typename BeerGraph<T>::Edge> out;
    out.reserve(ids.size());
    for (int e : ids) out.push_back(g.edges[e]);
    return out;
}

std::vector<int> id_complement(int m, const std::vector<int>& ids) {
    std::vector<char> in(m, 0);
    for (int e : ids) in[e] = 1;
    std::vector<int> out;
    for (int e = 0; e < m; ++e)
        if (!in[e]) out.push_back(e);
    return out;
}

std::vector<int> id_minus(const std::vector<int>& a, const std::vector<int>& b) {
    std::set<int> drop(b.begin(), b.end());
    std::vector<int> out;
    for (int e : a)
        if (!drop.count(e)) out.push_back(e);
    return out;
}

/// Checks every stored table entry of `idx` against oracle distances on the
/// materialized subgraphs the definitions name.
template <typename T>
void check_definitions(const TriIndex<T>& idx) {
    const auto& g = idx.graph;
    const auto& t = idx.tree;
    auto sets = subtree_edge_sets(t);

    auto check_pairs = [&](const KGraph<T>& k, const OracleTable<T>& oracle) {
        for (int a = 0; a < k.nv; ++a)
            for (int b = 0; b < k.nv; ++b) {
                auto expect = oracle.pair(k.verts[a], k.verts[b]);
                INFO("pair " << k.verts[a] << "->" << k.verts[b] << " got " << k.w[a][b]
                             << " expect " << expect);
                REQUIRE(dist_pairs_close(k.w[a][b], expect));
                bool beer_dominates = k.w[a][b].beer >= k.w[a][b].dist ||
                                      weights_close(k.w[a][b].beer, k.w[a][b].dist);
                REQUIRE(beer_dominates);
            }
    };

    for (int v = 0; v < t.node_count(); ++v) {
        if (v == t.root) continue;
        {
            OracleTable<T> oracle(g, edges_from_ids(g, sets[v]));
            check_pairs(idx.f1[v], oracle);
        }
        {
            OracleTable<T> oracle(g, edges_from_ids(g, id_complement(g.m(), sets[v])));
            check_pairs(idx.f2[v], oracle);
        }
        if (!idx.f3.empty() && v != t.root_child) {
            OracleTable<T> oracle(
                g, edges_from_ids(g, id_minus(sets[t.nodes[v].parent], sets[v])));
            check_pairs(idx.f3[v], oracle);
        }
    }
    if (!idx.f4r.empty()) {
        for (int v = 0; v < t.node_count(); ++v) {
            if (idx.f4r[v].empty()) continue;
            const auto& ch = t.nodes[v].children;
            int c = static_cast<int>(ch.size());
            int flat = 0;
            for (int a = 0; a < c; ++a)
                for (int b = a + 1; b < c; ++b, ++flat) {
                    OracleTable<T> oracle(
                        g, edges_from_ids(
                               g, id_minus(id_complement(g.m(), sets[ch[a]]), sets[ch[b]])));
                    check_pairs(idx.f4r[v][flat], oracle);
                }
        }
    }

    // composing f1 and f2 at the root child reproduces whole-graph values
    OracleTable<T> whole(g);
    const SpqrNode& rc = t.nodes[t.root_child];
    KGraph<T> k = oplus(idx.f1[t.root_child], idx.f2[t.root_child]);
    for (int u : {rc.x, rc.y})
        for (int w : {rc.x, rc.y}) REQUIRE(dist_pairs_close(k.at(u, w), whole.pair(u, w)));
}

template <typename T>
BeerGraph<T> two_parallel(long long w_ref, long long w_other, std::vector<int> beer) {
    BeerGraph<T> g;
    g.n = 2;
    g.beer.assign(3, 0);
    g.add_edge(1, 2, Weight<T>(w_ref), Weight<T>(w_ref));
    g.add_edge(1, 2, Weight<T>(w_other), Weight<T>(w_other));
    for (int b : beer) g.beer[b] = 1;
    return g;
}

}  // namespace

TEST_CASE("Q-node f1 follows the edge weight table") {
    {
        auto g = two_parallel<std::int64_t>(7, 5, {});
        auto idx = build_tri_index(g, Strategy::F12);
        const auto& f = idx.f1[idx.tree.root_child];
        CHECK(f.at(1, 2).dist == IntWeight(5));
        CHECK(f.at(1, 2).beer.is_inf());
        CHECK(f.at(1, 1).dist == IntWeight(0));
    }
    {
        auto g = two_parallel<std::int64_t>(7, 5, {2});
        auto idx = build_tri_index(g, Strategy::F12);
        const auto& f = idx.f1[idx.tree.root_child];
        CHECK(f.at(1, 1).beer == IntWeight(10));  // w(x,y) + w(y,x)
        CHECK(f.at(1, 2).beer == IntWeight(5));   // stay-in-place leg at y
        CHECK(f.at(2, 2).beer == IntWeight(0));
    }
}

TEST_CASE("f2 at the root child sees only the reference edge") {
    auto g = two_parallel<std::int64_t>(7, 5, {2});
    auto idx = build_tri_index(g, Strategy::F12);
    const auto& f = idx.f2[idx.tree.root_child];
    CHECK(f.at(1, 2).dist == IntWeight(7));
    CHECK(f.at(1, 2).beer == IntWeight(7));
    CHECK(f.at(1, 1).beer == IntWeight(14));
}

TEST_CASE("S-node f1 via prefix tables") {
    // chain 1 - 3 - 2 with weights 1, 2 plus reference edge {1,2}
    IntGraph g;
    g.n = 3;
    g.beer.assign(4, 0);
    g.beer[3] = 1;
    g.add_edge(1, 2, IntWeight(9), IntWeight(9));
    g.add_edge(1, 3, IntWeight(1), IntWeight(1));
    g.add_edge(3, 2, IntWeight(2), IntWeight(2));
    auto idx = build_tri_index(g, Strategy::F1234R);
    int rc = idx.tree.root_child;
    REQUIRE(idx.tree.nodes[rc].kind == NodeKind::S);
    const auto& f = idx.f1[rc];
    CHECK(f.at(1, 2).dist == IntWeight(3));
    CHECK(f.at(1, 2).beer == IntWeight(3));  // beer vertex 3 lies on the path
    CHECK(f.at(1, 1).beer == IntWeight(2));  // round trip to 3 and back
    CHECK(f.at(2, 2).beer == IntWeight(4));
    check_definitions(idx);
}

TEST_CASE("f3 S-node boundary cases") {
    // chain of three edges between the reference endpoints
    IntGraph g;
    g.n = 4;
    g.beer.assign(5, 0);
    g.beer[1] = 1;
    g.add_edge(1, 2, IntWeight(5), IntWeight(5));
    g.add_edge(1, 3, IntWeight(1), IntWeight(1));
    g.add_edge(3, 4, IntWeight(2), IntWeight(2));
    g.add_edge(4, 2, IntWeight(3), IntWeight(3));
    auto idx = build_tri_index(g, Strategy::F1234R);
    int rc = idx.tree.root_child;
    const auto& nd = idx.tree.nodes[rc];
    REQUIRE(nd.kind == NodeKind::S);
    REQUIRE(nd.children.size() == 3);

    // first child: x_mu equals x_child, beer iff the shared vertex is in B
    const auto& f3a = idx.f3[nd.children[0]];
    CHECK(f3a.at(1, 1).dist == IntWeight(0));
    CHECK(f3a.at(1, 1).beer == IntWeight(0));

    // middle child: prefix sums on both sides, cross pairs unreachable
    const auto& f3b = idx.f3[nd.children[1]];
    CHECK(f3b.at(1, 3).dist == IntWeight(1));
    CHECK(f3b.at(1, 3).beer == IntWeight(1));  // vertex 1 is a beer vertex
    CHECK(f3b.at(4, 2).dist == IntWeight(3));
    CHECK(f3b.at(4, 2).beer.is_inf());
    CHECK(f3b.at(1, 4).dist.is_inf());
    CHECK(f3b.at(3, 2).dist.is_inf());
    check_definitions(idx);
}

TEST_CASE("f4 on S nodes: adjacent and separated children") {
    IntGraph g;
    g.n = 5;
    g.beer.assign(6, 0);
    g.beer[3] = 1;
    g.add_edge(1, 2, IntWeight(4), IntWeight(4));
    g.add_edge(1, 3, IntWeight(1), IntWeight(1));
    g.add_edge(3, 4, IntWeight(1), IntWeight(1));
    g.add_edge(4, 5, IntWeight(1), IntWeight(1));
    g.add_edge(5, 2, IntWeight(1), IntWeight(1));
    auto idx = build_tri_index(g, Strategy::F123);
    int rc = idx.tree.root_child;
    REQUIRE(idx.tree.nodes[rc].kind == NodeKind::S);
    REQUIRE(idx.tree.nodes[rc].children.size() == 4);

    QueryStats stats;
    // adjacent children share vertex 3, which is a beer vertex
    KGraph<std::int64_t> adj = compute_f4_value(idx, rc, 1, 2, &stats);
    CHECK(adj.at(3, 3).dist == IntWeight(0));
    CHECK(adj.at(3, 3).beer == IntWeight(0));

    // children 1 and 3: inner piece is the single middle edge
    KGraph<std::int64_t> mid = compute_f4_value(idx, rc, 1, 3, &stats);
    CHECK(mid.at(3, 4).dist == IntWeight(1));
    CHECK(mid.at(3, 4).beer == IntWeight(1));
    CHECK(mid.at(1, 5).dist == IntWeight(5));  // around through the reference edge
    CHECK(mid.at(1, 5).beer.is_inf());
    CHECK(stats.dijkstra_calls == 0);

    // oracle cross-check of every f4 pair
    auto sets = subtree_edge_sets(idx.tree);
    const auto& ch = idx.tree.nodes[rc].children;
    for (int a = 1; a <= 4; ++a)
        for (int b = a + 1; b <= 4; ++b) {
            auto k = compute_f4_value(idx, rc, a, b, &stats);
            OracleTable<std::int64_t> oracle(
                g, edges_from_ids(
                       g, id_minus(id_complement(g.m(), sets[ch[a - 1]]), sets[ch[b - 1]])));
            for (int i = 0; i < k.nv; ++i)
                for (int j = 0; j < k.nv; ++j)
                    REQUIRE(k.w[i][j] == oracle.pair(k.verts[i], k.verts[j]));
        }
}

TEST_CASE("f4r tables: absent for series-parallel, equal to on-the-fly for K4") {
    auto sp = gen_series_parallel<std::int64_t>(20, 5);
    auto spi = build_tri_index(sp, Strategy::F1234R);
    for (const auto& tab : spi.f4r) CHECK(tab.empty());

    IntGraph k4;
    k4.n = 4;
    k4.beer.assign(5, 0);
    k4.beer[4] = 1;
    int id = 0;
    for (int u = 1; u <= 4; ++u)
        for (int v = u + 1; v <= 4; ++v) {
            ++id;
            k4.add_edge(u, v, IntWeight(id), IntWeight(id));
        }
    auto idx = build_tri_index(k4, Strategy::F1234R);
    auto idx3 = build_tri_index(k4, Strategy::F123);
    int rc = idx.tree.root_child;
    REQUIRE(idx.tree.nodes[rc].kind == NodeKind::R);
    int c = static_cast<int>(idx.tree.nodes[rc].children.size());
    QueryStats stats;
    for (int a = 1; a <= c; ++a)
        for (int b = a + 1; b <= c; ++b) {
            auto stored = compute_f4_value(idx, rc, a, b, &stats);
            auto fresh = compute_f4_value(idx3, rc, a, b, &stats);
            CHECK(kgraph_equal(stored, fresh));
        }
    check_definitions(idx);
}

TEST_CASE("definitional correctness on random small instances") {
    std::mt19937_64 rng(2024);
    int done = 0;
    for (int seed = 0; done < 60; ++seed) {
        GenOptions opt;
        opt.max_weight = 10;
        opt.beer_fraction = (seed % 3) * 0.3;
        opt.directed = seed % 2 == 1;
        if (opt.directed && seed % 4 == 1) opt.inf_fraction = 0.15;
        BeerGraph<std::int64_t> g;
        if (seed % 2 == 0)
            g = gen_series_parallel<std::int64_t>(4 + seed % 9, seed, opt);
        else
            g = gen_chorded_cycle<std::int64_t>(4 + seed % 7, seed % 5, seed, opt);
        if (g.n > 12) continue;
        ++done;
        std::uniform_int_distribution<int> refd(0, g.m() - 1);
        auto idx = build_tri_index(g, Strategy::F1234R, refd(rng));
        check_definitions(idx);
    }
}

TEST_CASE("definitional correctness in real mode") {
    for (int seed = 0; seed < 8; ++seed) {
        GenOptions opt;
        opt.max_weight = 10;
        opt.beer_fraction = 0.4;
        auto g = gen_chorded_cycle<double>(4 + seed, 3, 500 + seed, opt);
        auto idx = build_tri_index(g, Strategy::F1234R);
        check_definitions(idx);
    }
}
