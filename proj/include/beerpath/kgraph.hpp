#pragma once

#include <array>
#include <cassert>
#include <ostream>

#include "beerpath/counters.hpp"
#include "beerpath/dist_pair.hpp"

namespace beerpath {

/// Complete weighted graph on the terminals of up to two tree nodes, or
/// bottom. Tags identify the contributing nodes; terminals are graph
/// vertices and may coincide, in which case they share one slot.
template <typename T>
struct KGraph {
    bool bottom = true;
    int mu = -1, lambda = -1;
    int mu_x = 0, mu_y = 0;
    int la_x = 0, la_y = 0;
    int nv = 0;
    std::array<int, 4> verts{};
    std::array<std::array<DistPair<T>, 4>, 4> w{};

    static KGraph bot() { return {}; }

    static KGraph make(int mu, int mu_x, int mu_y, int lambda, int la_x, int la_y) {
        KGraph k;
        k.bottom = false;
        k.mu = mu;
        k.lambda = lambda;
        k.mu_x = mu_x;
        k.mu_y = mu_y;
        k.la_x = la_x;
        k.la_y = la_y;
        for (int v : {mu_x, mu_y, la_x, la_y})
            if (k.slot(v) < 0) k.verts[k.nv++] = v;
        for (int i = 0; i < k.nv; ++i) w_init(k, i);
        return k;
    }

    /// Self-tagged value K_{mu,mu} on a single terminal pair.
    static KGraph make_single(int mu, int x, int y) { return make(mu, x, y, mu, x, y); }

    int slot(int v) const {
        for (int i = 0; i < nv; ++i)
            if (verts[i] == v) return i;
        return -1;
    }

    DistPair<T>& at(int u, int v) {
        int a = slot(u), b = slot(v);
        assert(a >= 0 && b >= 0);
        return w[a][b];
    }
    const DistPair<T>& at(int u, int v) const {
        int a = slot(u), b = slot(v);
        assert(a >= 0 && b >= 0);
        return w[a][b];
    }

    /// Keeps the existing entry if it is already smaller. Useful when two
    /// formula cases write the same collapsed vertex pair.
    void relax(int u, int v, const DistPair<T>& p) { at(u, v) = min(at(u, v), p); }

    std::pair<int, int> pair_of(int tag) const {
        assert(tag == mu || tag == lambda);
        return tag == mu ? std::pair{mu_x, mu_y} : std::pair{la_x, la_y};
    }

private:
    static void w_init(KGraph& k, int i) {
        for (int j = 0; j < k.nv; ++j) k.w[i][j] = DistPair<T>::unreachable();
        k.w[i][i].dist = Weight<T>::zero();
    }
};

template <typename T>
bool kgraph_equal(const KGraph<T>& a, const KGraph<T>& b) {
    if (a.bottom || b.bottom) return a.bottom == b.bottom;
    if (a.mu != b.mu || a.lambda != b.lambda) return false;
    if (a.nv != b.nv) return false;
    for (int i = 0; i < a.nv; ++i) {
        if (b.slot(a.verts[i]) < 0) return false;
        for (int j = 0; j < a.nv; ++j)
            if (a.w[i][j] != b.at(a.verts[i], a.verts[j])) return false;
    }
    return true;
}

template <typename T>
std::ostream& operator<<(std::ostream& os, const KGraph<T>& k) {
    if (k.bottom) return os << "K(bottom)";
    os << "K(tags " << k.mu << "," << k.lambda << ";";
    for (int i = 0; i < k.nv; ++i)
        for (int j = 0; j < k.nv; ++j)
            os << " " << k.verts[i] << "->" << k.verts[j] << "=" << k.w[i][j];
    return os << ")";
}

/// Overlay composition: shortest paths over the union multigraph of both
/// inputs, beer weights minimized over a single beer-carrying overlay edge.
/// Bottom when the inputs do not share exactly one node tag.
template <typename T>
KGraph<T> oplus(const KGraph<T>& h1, const KGraph<T>& h2, QueryStats* stats = nullptr) {
    if (stats) ++stats->oplus_ops;
    if (h1.bottom || h2.bottom) return KGraph<T>::bot();

    // shared node tags, each distinct tag of h1 counted once
    int shared = -1;
    int shared_count = 0;
    const int tags1[2] = {h1.mu, h1.lambda};
    const int distinct1 = h1.mu == h1.lambda ? 1 : 2;
    for (int i = 0; i < distinct1; ++i) {
        if (tags1[i] == h2.mu || tags1[i] == h2.lambda) {
            shared = tags1[i];
            ++shared_count;
        }
    }
    if (shared_count != 1) return KGraph<T>::bot();

    auto outer = [&](const KGraph<T>& h) {
        if (h.mu == h.lambda) return h.mu;
        return h.mu == shared ? h.lambda : h.mu;
    };
    int theta1 = outer(h1), theta2 = outer(h2);
    auto [t1x, t1y] = h1.pair_of(theta1);
    auto [t2x, t2y] = h2.pair_of(theta2);

    // overlay vertex set
    std::array<int, 8> ov{};
    int on = 0;
    auto add_vertex = [&](int v) {
        for (int i = 0; i < on; ++i)
            if (ov[i] == v) return;
        ov[on++] = v;
    };
    for (int i = 0; i < h1.nv; ++i) add_vertex(h1.verts[i]);
    for (int i = 0; i < h2.nv; ++i) add_vertex(h2.verts[i]);
    auto oslot = [&](int v) {
        for (int i = 0; i < on; ++i)
            if (ov[i] == v) return i;
        return -1;
    };

    // shortest paths over the union, parallel edges collapsed by min
    std::array<std::array<Weight<T>, 8>, 8> d{};
    for (int i = 0; i < on; ++i)
        for (int j = 0; j < on; ++j) d[i][j] = i == j ? Weight<T>::zero() : Weight<T>::infinity();
    for (const KGraph<T>* h : {&h1, &h2})
        for (int i = 0; i < h->nv; ++i)
            for (int j = 0; j < h->nv; ++j) {
                int a = oslot(h->verts[i]), b = oslot(h->verts[j]);
                d[a][b] = min(d[a][b], h->w[i][j].dist);
            }
    for (int k = 0; k < on; ++k)
        for (int i = 0; i < on; ++i)
            for (int j = 0; j < on; ++j) d[i][j] = min(d[i][j], d[i][k] + d[k][j]);

    KGraph<T> out = KGraph<T>::make(theta1, t1x, t1y, theta2, t2x, t2y);
    for (int a = 0; a < out.nv; ++a)
        for (int b = 0; b < out.nv; ++b) {
            int u = oslot(out.verts[a]), v = oslot(out.verts[b]);
            Weight<T> beer = Weight<T>::infinity();
            for (const KGraph<T>* h : {&h1, &h2})
                for (int i = 0; i < h->nv; ++i)
                    for (int j = 0; j < h->nv; ++j) {
                        int p = oslot(h->verts[i]), q = oslot(h->verts[j]);
                        beer = min(beer, d[u][p] + h->w[i][j].beer + d[q][v]);
                    }
            out.w[a][b].dist = d[u][v];
            out.w[a][b].beer = beer;
        }
    return out;
}

/// Chain-restricted composition. Defined on descendant-oriented values;
/// bottom unless the first input's lambda equals the second input's mu.
template <typename T>
KGraph<T> oplus_hat(const KGraph<T>& h1, const KGraph<T>& h2, QueryStats* stats = nullptr) {
    if (stats) ++stats->oplus_hat_ops;
    if (h1.bottom || h2.bottom) return KGraph<T>::bot();
    if (h1.lambda != h2.mu) return KGraph<T>::bot();
    QueryStats scratch;  // the inner oplus is part of this application
    return oplus(h1, h2, &scratch);
}

}  // namespace beerpath
