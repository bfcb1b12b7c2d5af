#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "beerpath/generators.hpp"
#include "beerpath/oracle.hpp"
#include "beerpath/td.hpp"
#include "beerpath/tri_query.hpp"

using namespace beerpath;

namespace {

template <typename T>
std::vector<typename BeerGraph<T>::Edge> edges_inside(const BeerGraph<T>& g,
                                                      const std::set<int>& verts) {
    std::vector<typename BeerGraph<T>::Edge> out;
    for (const auto& e : g.edges)
        if (verts.count(e.u) && verts.count(e.v)) out.push_back(e);
    return out;
}

template <typename T>
std::vector<typename BeerGraph<T>::Edge> edges_not_inside(const BeerGraph<T>& g,
                                                          const std::set<int>& a,
                                                          const std::set<int>* b = nullptr) {
    std::vector<typename BeerGraph<T>::Edge> out;
    for (const auto& e : g.edges) {
        bool in_a = a.count(e.u) && a.count(e.v);
        bool in_b = b && b->count(e.u) && b->count(e.v);
        if (!in_a && !in_b) out.push_back(e);
    }
    return out;
}

std::vector<std::set<int>> subtree_vertex_sets(const TreeDecomposition& td,
                                               const std::vector<std::vector<int>>& children) {
    std::vector<std::set<int>> s(td.node_count());
    // children ids can be arbitrary; recurse by depth using a stack
    std::vector<int> order{0};
    for (size_t i = 0; i < order.size(); ++i)
        for (int c : children[order[i]]) order.push_back(c);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        s[*it].insert(td.bags[*it].begin(), td.bags[*it].end());
        for (int c : children[*it]) s[*it].insert(s[c].begin(), s[c].end());
    }
    return s;
}

template <typename T>
void check_bag_pairs(const BagKGraph<T>& k, const OracleTable<T>& oracle) {
    for (int i = 0; i < k.nv(); ++i)
        for (int j = 0; j < k.nv(); ++j) {
            auto expect = oracle.pair(k.verts[i], k.verts[j]);
            INFO("pair " << k.verts[i] << "->" << k.verts[j]);
            REQUIRE(dist_pairs_close(k.w[i * k.verts.size() + j], expect));
        }
}

template <typename T>
void check_td_definitions(const TdIndex<T>& idx) {
    const auto& g = idx.graph;
    auto sv = subtree_vertex_sets(idx.td, idx.children);
    for (int v = 0; v < idx.td.node_count(); ++v) {
        {
            OracleTable<T> oracle(g, edges_inside(g, sv[v]));
            check_bag_pairs(idx.f1[v], oracle);
        }
        {
            OracleTable<T> oracle(g, edges_not_inside(g, sv[v]));
            check_bag_pairs(idx.f2[v], oracle);
        }
        if (v != 0) {
            // edges of the parent subtree graph that are not in mine
            std::vector<typename BeerGraph<T>::Edge> zone;
            for (const auto& e : g.edges) {
                bool in_par = sv[idx.td.parent[v]].count(e.u) && sv[idx.td.parent[v]].count(e.v);
                bool in_me = sv[v].count(e.u) && sv[v].count(e.v);
                if (in_par && !in_me) zone.push_back(e);
            }
            OracleTable<T> oracle(g.n, zone, g.beer);
            check_bag_pairs(idx.f3[v], oracle);
        }
    }
    for (int v = 0; v < idx.td.node_count(); ++v) {
        const auto& ch = idx.children[v];
        int c = static_cast<int>(ch.size());
        int flat = 0;
        for (int a = 0; a < c; ++a)
            for (int b = a + 1; b < c; ++b, ++flat) {
                OracleTable<T> oracle(g, edges_not_inside(g, sv[ch[a]], &sv[ch[b]]));
                check_bag_pairs(idx.f4[v][flat], oracle);
            }
    }
}

template <typename T>
void check_td_queries(const TdIndex<T>& idx) {
    OracleTable<T> oracle(idx.graph);
    for (int s = 1; s <= idx.graph.n; ++s)
        for (int t = 1; t <= idx.graph.n; ++t) {
            auto got = td_query(idx, s, t);
            INFO("s=" << s << " t=" << t << " got " << got << " expect " << oracle.pair(s, t));
            REQUIRE(dist_pairs_close(got, oracle.pair(s, t)));
        }
}

}  // namespace

TEST_CASE("parse_td and validation") {
    IntGraph tri;
    tri.n = 3;
    tri.beer.assign(4, 0);
    tri.add_edge(1, 2, IntWeight(1), IntWeight(1));
    tri.add_edge(2, 3, IntWeight(1), IntWeight(1));
    tri.add_edge(1, 3, IntWeight(1), IntWeight(1));

    std::istringstream single("s td 1 3 3\nb 1 1 2 3\n");
    auto td = parse_td(single);
    CHECK(td.width() == 2);
    validate_td(td, tri);

    IntGraph path;
    path.n = 3;
    path.beer.assign(4, 0);
    path.add_edge(1, 2, IntWeight(1), IntWeight(1));
    path.add_edge(2, 3, IntWeight(1), IntWeight(1));
    std::istringstream two("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
    auto td2 = parse_td(two);
    CHECK(td2.width() == 1);
    validate_td(td2, path);

    // missing edge coverage names the edge
    std::istringstream bad("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
    auto td3 = parse_td(bad);
    try {
        validate_td(td3, tri);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("{1,3}") != std::string::npos);
    }

    std::istringstream loose("s td 2 2 3\nb 1 1 2\nb 2 2 3\n");
    CHECK_THROWS_AS(parse_td(loose), ParseError);  // not enough tree edges

    // round trip through the writer
    std::ostringstream os;
    write_td(td2, os);
    std::istringstream back(os.str());
    auto td4 = parse_td(back);
    CHECK(td4.bags == td2.bags);
    CHECK(td4.parent == td2.parent);
}

TEST_CASE("single-bag decomposition equals whole-graph oracle") {
    IntGraph tri;
    tri.n = 3;
    tri.beer.assign(4, 0);
    tri.beer[3] = 1;
    tri.add_edge(1, 2, IntWeight(2), IntWeight(2));
    tri.add_edge(2, 3, IntWeight(3), IntWeight(3));
    tri.add_edge(1, 3, IntWeight(4), IntWeight(4));
    TreeDecomposition td;
    td.n = 3;
    td.bags = {{1, 2, 3}};
    td.parent = {-1};
    auto idx = build_td_index(tri, td);
    check_td_definitions(idx);
    check_td_queries(idx);
}

TEST_CASE("td_query worked examples") {
    IntGraph path;
    path.n = 3;
    path.beer.assign(4, 0);
    path.beer[2] = 1;
    path.add_edge(1, 2, IntWeight(1), IntWeight(1));
    path.add_edge(2, 3, IntWeight(1), IntWeight(1));
    TreeDecomposition td;
    td.n = 3;
    td.bags = {{1, 2}, {2, 3}};
    td.parent = {-1, 0};
    auto idx = build_td_index(path, td);
    auto p = td_query(idx, 1, 3);
    CHECK(p.dist == IntWeight(2));
    CHECK(p.beer == IntWeight(2));  // the beer vertex lies on the path
    auto q = td_query(idx, 2, 2);
    CHECK(q.dist == IntWeight(0));
    CHECK(q.beer == IntWeight(0));
    CHECK_THROWS_AS(td_query(idx, 0, 1), std::out_of_range);

    // leaf bag with no beer vertex keeps infinite beer entries
    IntGraph nb = path;
    nb.beer.assign(4, 0);
    auto idx2 = build_td_index(nb, td);
    CHECK(idx2.f1[1].at(2, 2).beer.is_inf());
    check_td_definitions(idx2);
}

TEST_CASE("width-2 series-parallel decompositions check out") {
    for (int seed = 0; seed < 12; ++seed) {
        GenOptions opt;
        opt.max_weight = 9;
        opt.beer_fraction = 0.3;
        auto [g, td] = gen_series_parallel_with_td<std::int64_t>(4 + seed, seed, opt);
        if (g.n > 12) continue;
        validate_td(td, g);
        CHECK(td.width() <= 2);
        auto idx = build_td_index(g, td);
        check_td_definitions(idx);
        check_td_queries(idx);
    }
}

TEST_CASE("random width-bounded instances vs oracle") {
    for (int seed = 0; seed < 12; ++seed) {
        GenOptions opt;
        opt.max_weight = 10;
        opt.beer_fraction = (seed % 3) * 0.3;
        opt.directed = seed % 2 == 1;
        auto [g, td] = gen_graph_with_td<std::int64_t>(6 + seed % 6, 1 + seed % 3, seed, opt);
        validate_td(td, g);
        auto idx = build_td_index(g, td);
        check_td_definitions(idx);
        check_td_queries(idx);
    }
}

TEST_CASE("agreement with the triconnected index where both apply") {
    for (int seed = 0; seed < 6; ++seed) {
        GenOptions opt;
        opt.max_weight = 8;
        opt.beer_fraction = 0.35;
        auto [g, td] = gen_series_parallel_with_td<std::int64_t>(10 + seed, 100 + seed, opt);
        auto tdi = build_td_index(g, td);
        auto tri = build_tri_index(g, Strategy::F123);
        for (int s = 1; s <= g.n; ++s)
            for (int t = 1; t <= g.n; ++t) REQUIRE(td_query(tdi, s, t) == query(tri, s, t));
    }
}

TEST_CASE("answers are bag-choice invariant") {
    std::mt19937_64 rng(5);
    GenOptions opt;
    opt.max_weight = 7;
    opt.beer_fraction = 0.4;
    auto [g, td] = gen_graph_with_td<std::int64_t>(12, 3, 42, opt);
    auto idx = build_td_index(g, td);
    std::vector<std::vector<int>> holding(static_cast<size_t>(g.n) + 1);
    for (int b = 0; b < td.node_count(); ++b)
        for (int v : td.bags[b]) holding[v].push_back(b);
    OracleTable<std::int64_t> oracle(g);
    for (int s = 1; s <= g.n; ++s)
        for (int t = 1; t <= g.n; ++t) {
            auto expect = oracle.pair(s, t);
            for (int trial = 0; trial < 3; ++trial) {
                int bs = holding[s][rng() % holding[s].size()];
                int bt = holding[t][rng() % holding[t].size()];
                auto got = td_query(idx, s, t, nullptr, bs, bt);
                INFO("s=" << s << " t=" << t << " bags " << bs << "," << bt);
                REQUIRE(got == expect);
            }
        }
}
