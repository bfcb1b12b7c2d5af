#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "beerpath/generators.hpp"
#include "beerpath/graph.hpp"
#include "beerpath/oracle.hpp"

using namespace beerpath;

namespace {

IntGraph triangle(std::vector<int> beer = {}) {
    IntGraph g;
    g.n = 3;
    g.beer.assign(4, 0);
    g.add_edge(1, 2, IntWeight(1), IntWeight(1));
    g.add_edge(2, 3, IntWeight(1), IntWeight(1));
    g.add_edge(1, 3, IntWeight(1), IntWeight(1));
    for (int b : beer) g.beer[b] = 1;
    return g;
}

IntGraph cycle4(std::vector<int> beer = {}) {
    IntGraph g;
    g.n = 4;
    g.beer.assign(5, 0);
    g.add_edge(1, 2, IntWeight(1), IntWeight(1));
    g.add_edge(2, 3, IntWeight(1), IntWeight(1));
    g.add_edge(3, 4, IntWeight(1), IntWeight(1));
    g.add_edge(4, 1, IntWeight(1), IntWeight(1));
    for (int b : beer) g.beer[b] = 1;
    return g;
}

}  // namespace

TEST_CASE("validate_biconnected basics") {
    CHECK(validate_biconnected(triangle()));

    IntGraph path;  // 1 - 2 - 3, vertex 2 is an articulation point
    path.n = 3;
    path.beer.assign(4, 0);
    path.add_edge(1, 2, IntWeight(1), IntWeight(1));
    path.add_edge(2, 3, IntWeight(1), IntWeight(1));
    CHECK(!validate_biconnected(path));
    CHECK(biconnectivity_defect(path).value() == 2);

    IntGraph parallel;
    parallel.n = 2;
    parallel.beer.assign(3, 0);
    parallel.add_edge(1, 2, IntWeight(1), IntWeight(1));
    parallel.add_edge(1, 2, IntWeight(2), IntWeight(2));
    CHECK(validate_biconnected(parallel));

    IntGraph disconnected;
    disconnected.n = 4;
    disconnected.beer.assign(5, 0);
    disconnected.add_edge(1, 2, IntWeight(1), IntWeight(1));
    disconnected.add_edge(3, 4, IntWeight(1), IntWeight(1));
    CHECK(!validate_biconnected(disconnected));
}

TEST_CASE("dijkstra on small digraphs") {
    IntGraph g;
    g.n = 3;
    g.directed = true;
    g.beer.assign(4, 0);
    g.add_edge(1, 2, IntWeight(1), IntWeight::infinity());
    g.add_edge(2, 3, IntWeight(2), IntWeight::infinity());
    Adjacency<std::int64_t> adj(g.n, g.edges);
    auto d = dijkstra(adj, 1);
    CHECK(d[1].value() == 0);
    CHECK(d[2].value() == 1);
    CHECK(d[3].value() == 3);

    // source with no outgoing arcs
    IntGraph h;
    h.n = 2;
    h.directed = true;
    h.beer.assign(3, 0);
    h.add_edge(2, 1, IntWeight(1), IntWeight::infinity());
    Adjacency<std::int64_t> hadj(h.n, h.edges);
    auto hd = dijkstra(hadj, 1);
    CHECK(hd[1].value() == 0);
    CHECK(hd[2].is_inf());

    IntGraph c;  // directed 4-cycle
    c.n = 4;
    c.directed = true;
    c.beer.assign(5, 0);
    c.add_edge(1, 2, IntWeight(1), IntWeight::infinity());
    c.add_edge(2, 3, IntWeight(1), IntWeight::infinity());
    c.add_edge(3, 4, IntWeight(1), IntWeight::infinity());
    c.add_edge(4, 1, IntWeight(1), IntWeight::infinity());
    Adjacency<std::int64_t> cadj(c.n, c.edges);
    auto cd = dijkstra(cadj, 1);
    CHECK(cd[2].value() == 1);
    CHECK(cd[3].value() == 2);
    CHECK(cd[4].value() == 3);
}

TEST_CASE("oracle_dist_pair examples") {
    auto g = triangle({3});
    auto p = oracle_dist_pair(g, 1, 2);
    CHECK(p.dist.value() == 1);
    CHECK(p.beer.value() == 2);

    auto empty_beer = triangle();
    CHECK(oracle_dist_pair(empty_beer, 1, 2).beer.is_inf());

    auto c = cycle4({3});
    auto q = oracle_dist_pair(c, 1, 2);
    CHECK(q.dist.value() == 1);
    CHECK(q.beer.value() == 3);
}

TEST_CASE("oracle invariants on random graphs") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 20; ++iter) {
        GenOptions opt;
        opt.beer_fraction = 0.3;
        opt.max_weight = 10;
        auto g = gen_chorded_cycle<std::int64_t>(8, 4, 100 + iter, opt);
        OracleTable<std::int64_t> table(g);
        std::uniform_int_distribution<int> pick(1, g.n);
        for (int k = 0; k < 30; ++k) {
            int s = pick(rng), t = pick(rng), x = pick(rng);
            auto p = table.pair(s, t);
            CHECK(p.beer >= p.dist);
            CHECK(p.dist <= table.dist(s, x) + table.dist(x, t));
            auto q = table.pair(t, s);
            CHECK(p.dist == q.dist);  // undirected symmetry
            CHECK(p.beer == q.beer);
        }
        for (int s = 1; s <= g.n; ++s) {
            auto p = table.pair(s, s);
            CHECK(p.dist.value() == 0);
            IntWeight best = IntWeight::infinity();
            for (int b = 1; b <= g.n; ++b)
                if (g.is_beer(b)) best = min(best, table.dist(s, b) + table.dist(s, b));
            CHECK(p.beer == best);
        }
    }
}

TEST_CASE("graph text format round trip and errors") {
    std::string text =
        "# comment line\n"
        "3 3 U\n"
        "1 2 1\n"
        "2 3 1\n"
        "1 3 1\n"
        "B 1 3\n";
    std::istringstream in(text);
    auto g = parse_graph<std::int64_t>(in);
    CHECK(g.n == 3);
    CHECK(g.m() == 3);
    CHECK(!g.directed);
    CHECK(g.is_beer(3));

    std::ostringstream out;
    write_graph(g, out);
    std::istringstream in2(out.str());
    auto g2 = parse_graph<std::int64_t>(in2);
    CHECK(g2.m() == g.m());
    CHECK(g2.beer == g.beer);

    std::istringstream bad1("3 1 U\n1 2\nB 0\n");
    CHECK_THROWS_AS(parse_graph<std::int64_t>(bad1), ParseError);
    std::istringstream bad2("3 1 U\n1 1 4\nB 0\n");
    CHECK_THROWS_AS(parse_graph<std::int64_t>(bad2), ParseError);  // self loop
    std::istringstream bad3("3 1 X\n1 2 4\nB 0\n");
    CHECK_THROWS_AS(parse_graph<std::int64_t>(bad3), ParseError);
    std::istringstream bad4("3 1 U\n1 2 -4\nB 0\n");
    CHECK_THROWS_AS(parse_graph<std::int64_t>(bad4), ParseError);

    // line numbers appear in diagnostics
    std::istringstream bad5("3 2 U\n1 2 1\n2 3 oops\nB 0\n");
    try {
        parse_graph<std::int64_t>(bad5);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    CHECK(!graph_text_is_real(text));
    CHECK(graph_text_is_real("2 1 U\n1 2 0.5\nB 0\n"));

    std::string dtext = "2 2 D\n1 2 3 inf\n1 2 1 2\nB 1 1\n";
    std::istringstream din(dtext);
    auto dg = parse_graph<std::int64_t>(din);
    CHECK(dg.directed);
    CHECK(dg.edges[0].wvu.is_inf());
}

TEST_CASE("generators produce valid biconnected instances") {
    for (int seed = 0; seed < 10; ++seed) {
        auto sp = gen_series_parallel<std::int64_t>(30, seed);
        CHECK(validate_biconnected(sp));
        auto ch = gen_chorded_cycle<std::int64_t>(12, 5, seed);
        CHECK(validate_biconnected(ch));
    }
}
