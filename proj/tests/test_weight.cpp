#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "beerpath/dist_pair.hpp"
#include "beerpath/weight.hpp"

using namespace beerpath;

TEST_CASE("infinity is absorbing under addition and maximal under min") {
    IntWeight inf = IntWeight::infinity();
    IntWeight five(5);
    CHECK((inf + five).is_inf());
    CHECK((five + inf).is_inf());
    CHECK((inf + inf).is_inf());
    CHECK(min(inf, five) == five);
    CHECK(min(five, inf) == five);
    CHECK(min(inf, inf).is_inf());
    CHECK(five < inf);
    CHECK(!(inf < five));
    CHECK(inf == IntWeight::infinity());
}

TEST_CASE("finite arithmetic is exact in integer mode") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<long long> d(0, 1'000'000);
    for (int i = 0; i < 1000; ++i) {
        long long a = d(rng), b = d(rng);
        CHECK((IntWeight(a) + IntWeight(b)).value() == a + b);
        CHECK(min(IntWeight(a), IntWeight(b)).value() == std::min(a, b));
    }
}

TEST_CASE("extra_over handles infinities") {
    IntWeight inf = IntWeight::infinity();
    CHECK(extra_over(inf, IntWeight(3)).is_inf());
    CHECK(extra_over(inf, inf).is_inf());
    CHECK(extra_over(IntWeight(7), IntWeight(3)).value() == 4);
}

TEST_CASE("DistPair invariants") {
    auto p = DistPair<std::int64_t>::self(true);
    CHECK(p.dist.value() == 0);
    CHECK(p.beer.value() == 0);
    auto q = DistPair<std::int64_t>::self(false);
    CHECK(q.beer.is_inf());
    auto u = DistPair<std::int64_t>::unreachable();
    CHECK(u.dist.is_inf());
    CHECK(u.beer.is_inf());
}

TEST_CASE("real-mode comparison uses an absolute floor") {
    RealWeight a(1.0), b(1.0 + 5e-10);
    CHECK(weights_close(a, b));
    CHECK(!weights_close(RealWeight(1.0), RealWeight(1.0 + 1e-7)));
    CHECK(weights_close(RealWeight::infinity(), RealWeight::infinity()));
    CHECK(!weights_close(RealWeight::infinity(), RealWeight(1.0)));
}
