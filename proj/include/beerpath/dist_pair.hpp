#pragma once

#include "beerpath/weight.hpp"

namespace beerpath {

/// A (distance, beer distance) value. Invariant: beer >= dist, since every
/// beer walk is a walk.
template <typename T>
struct DistPair {
    Weight<T> dist = Weight<T>::infinity();
    Weight<T> beer = Weight<T>::infinity();

    static constexpr DistPair unreachable() { return DistPair{}; }
    static constexpr DistPair self(bool at_beer_vertex) {
        DistPair p;
        p.dist = Weight<T>::zero();
        p.beer = at_beer_vertex ? Weight<T>::zero() : Weight<T>::infinity();
        return p;
    }

    friend constexpr bool operator==(const DistPair& a, const DistPair& b) {
        return a.dist == b.dist && a.beer == b.beer;
    }
    friend constexpr bool operator!=(const DistPair& a, const DistPair& b) { return !(a == b); }

    friend constexpr DistPair min(const DistPair& a, const DistPair& b) {
        return DistPair{min(a.dist, b.dist), min(a.beer, b.beer)};
    }

    friend std::ostream& operator<<(std::ostream& os, const DistPair& p) {
        return os << "(" << p.dist << ", " << p.beer << ")";
    }
};

template <typename T>
bool dist_pairs_close(const DistPair<T>& a, const DistPair<T>& b, double tol = 1e-9) {
    return weights_close(a.dist, b.dist, tol) && weights_close(a.beer, b.beer, tol);
}

}  // namespace beerpath
