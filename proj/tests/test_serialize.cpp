#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "beerpath/generators.hpp"
#include "beerpath/serialize.hpp"

using namespace beerpath;

namespace {

template <typename T>
std::string to_bytes(const TriIndex<T>& idx) {
    std::ostringstream os(std::ios::binary);
    save_index(idx, os);
    return os.str();
}

}  // namespace

TEST_CASE("tri index round trip preserves bytes and answers") {
    for (Strategy st : {Strategy::F12, Strategy::F123, Strategy::F1234R}) {
        GenOptions opt;
        opt.beer_fraction = 0.3;
        opt.max_weight = 20;
        auto g = gen_chorded_cycle<std::int64_t>(20, 8, 12, opt);
        auto idx = build_tri_index(g, st);
        std::string bytes = to_bytes(idx);

        std::istringstream in(bytes, std::ios::binary);
        auto h = read_header(in);
        CHECK(!h.real_mode);
        CHECK(!h.directed);
        CHECK(h.strategy == static_cast<int>(st));
        auto loaded = load_tri_index<std::int64_t>(in, h);

        CHECK(to_bytes(loaded) == bytes);
        std::mt19937_64 rng(4);
        std::uniform_int_distribution<int> d(1, g.n);
        for (int i = 0; i < 300; ++i) {
            int s = d(rng), t = d(rng);
            REQUIRE(query(idx, s, t) == query(loaded, s, t));
        }
    }
}

TEST_CASE("directed and real graphs round trip") {
    GenOptions opt;
    opt.beer_fraction = 0.4;
    opt.directed = true;
    opt.inf_fraction = 0.2;
    auto g = gen_chorded_cycle<double>(10, 4, 3, opt);
    auto idx = build_tri_index(g, Strategy::F1234R);
    std::string bytes = to_bytes(idx);
    std::istringstream in(bytes, std::ios::binary);
    auto h = read_header(in);
    CHECK(h.real_mode);
    CHECK(h.directed);
    auto loaded = load_tri_index<double>(in, h);
    for (int s = 1; s <= g.n; ++s)
        for (int t = 1; t <= g.n; ++t) {
            auto a = query(idx, s, t);
            auto b = query(loaded, s, t);
            REQUIRE(a == b);  // bitwise identical, not merely close
        }
}

TEST_CASE("td index round trip") {
    GenOptions opt;
    opt.beer_fraction = 0.3;
    auto [g, td] = gen_graph_with_td<std::int64_t>(14, 3, 9, opt);
    auto idx = build_td_index(g, td);
    std::ostringstream os(std::ios::binary);
    save_index(idx, os);
    std::string bytes = os.str();

    std::istringstream in(bytes, std::ios::binary);
    auto h = read_header(in);
    CHECK(h.strategy == 3);
    auto loaded = load_td_index<std::int64_t>(in, h);
    std::ostringstream os2(std::ios::binary);
    save_index(loaded, os2);
    CHECK(os2.str() == bytes);
    for (int s = 1; s <= g.n; ++s)
        for (int t = 1; t <= g.n; ++t) REQUIRE(td_query(idx, s, t) == td_query(loaded, s, t));
}

TEST_CASE("corrupt headers are rejected") {
    std::istringstream junk("NOTBP....", std::ios::binary);
    CHECK_THROWS_AS(read_header(junk), SerializeError);
    std::istringstream empty("", std::ios::binary);
    CHECK_THROWS_AS(read_header(empty), SerializeError);
}
