#pragma once

#include <algorithm>
#include <cassert>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "beerpath/counters.hpp"
#include "beerpath/graph.hpp"
#include "beerpath/query_structures.hpp"
#include "beerpath/tri_index.hpp"

namespace beerpath {

/// Rooted tree decomposition; node 0 is the root (bag 1 of the file format).
struct TreeDecomposition {
    int n = 0;  // graph vertex count the decomposition covers
    std::vector<std::vector<int>> bags;  // sorted vertex lists
    std::vector<int> parent;             // parent[0] == -1

    int node_count() const { return static_cast<int>(bags.size()); }
    int width() const {
        size_t w = 0;
        for (const auto& b : bags) w = std::max(w, b.size());
        return static_cast<int>(w) - 1;
    }
    bool bag_contains(int node, int v) const {
        const auto& b = bags[node];
        return std::binary_search(b.begin(), b.end(), v);
    }
};

// ---------------------------------------------------------------------------
// File format:
//   s td <num_bags> <max_bag_size> <n>
//   b <id> <v...>          one line per bag, ids 1-based; bag 1 is the root
//   <id1> <id2>            remaining lines are tree edges
// ---------------------------------------------------------------------------

inline TreeDecomposition parse_td(std::istream& in) {
    std::string line;
    int lineno = 0;
    int num_bags = -1, max_bag = 0, n = 0;
    std::vector<std::vector<int>> bags;
    std::vector<std::pair<int, int>> tree_edges;
    while (detail::next_content_line(in, line, lineno)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "s") {
            std::string td;
            if (!(ss >> td >> num_bags >> max_bag >> n) || td != "td" || num_bags < 1)
                throw ParseError("line " + std::to_string(lineno) + ": bad td header");
            bags.assign(num_bags, {});
        } else if (tag == "b") {
            int id;
            if (num_bags < 0 || !(ss >> id) || id < 1 || id > num_bags)
                throw ParseError("line " + std::to_string(lineno) + ": bad bag id");
            int v;
            while (ss >> v) {
                if (v < 1 || v > n)
                    throw ParseError("line " + std::to_string(lineno) + ": bag vertex " +
                                     std::to_string(v) + " out of range");
                bags[id - 1].push_back(v);
            }
            std::sort(bags[id - 1].begin(), bags[id - 1].end());
            bags[id - 1].erase(std::unique(bags[id - 1].begin(), bags[id - 1].end()),
                               bags[id - 1].end());
            if (static_cast<int>(bags[id - 1].size()) > max_bag)
                throw ParseError("line " + std::to_string(lineno) + ": bag exceeds stated size");
        } else {
            int a = 0, b = 0;
            std::istringstream ss2(line);
            if (!(ss2 >> a >> b) || a < 1 || b < 1 || a > num_bags || b > num_bags)
                throw ParseError("line " + std::to_string(lineno) + ": bad tree edge");
            tree_edges.push_back({a - 1, b - 1});
        }
    }
    if (num_bags < 0) throw ParseError("missing td header");
    if (static_cast<int>(tree_edges.size()) != num_bags - 1)
        throw ParseError("expected " + std::to_string(num_bags - 1) + " tree edges, got " +
                         std::to_string(tree_edges.size()));

    TreeDecomposition td;
    td.n = n;
    td.bags = std::move(bags);
    td.parent.assign(num_bags, -2);
    std::vector<std::vector<int>> adj(num_bags);
    for (auto [a, b] : tree_edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> queue{0};
    td.parent[0] = -1;
    for (size_t i = 0; i < queue.size(); ++i) {
        int v = queue[i];
        for (int o : adj[v])
            if (td.parent[o] == -2) {
                td.parent[o] = v;
                queue.push_back(o);
            }
    }
    if (static_cast<int>(queue.size()) != num_bags)
        throw ParseError("tree edges do not form a tree over the bags");
    return td;
}

inline void write_td(const TreeDecomposition& td, std::ostream& os) {
    size_t maxb = 0;
    for (const auto& b : td.bags) maxb = std::max(maxb, b.size());
    os << "s td " << td.node_count() << " " << maxb << " " << td.n << "\n";
    for (int i = 0; i < td.node_count(); ++i) {
        os << "b " << i + 1;
        for (int v : td.bags[i]) os << " " << v;
        os << "\n";
    }
    for (int i = 1; i < td.node_count(); ++i) os << td.parent[i] + 1 << " " << i + 1 << "\n";
}

/// Checks the three decomposition invariants against a graph; throws
/// ParseError naming the offending vertex or edge.
template <typename T>
void validate_td(const TreeDecomposition& td, const BeerGraph<T>& g) {
    if (td.n != g.n) throw ParseError("decomposition covers a different vertex count");
    std::vector<char> seen(static_cast<size_t>(g.n) + 1, 0);
    for (const auto& b : td.bags)
        for (int v : b) seen[v] = 1;
    for (int v = 1; v <= g.n; ++v)
        if (!seen[v]) throw ParseError("vertex " + std::to_string(v) + " appears in no bag");
    for (const auto& e : g.edges) {
        bool covered = false;
        for (int i = 0; i < td.node_count() && !covered; ++i)
            covered = td.bag_contains(i, e.u) && td.bag_contains(i, e.v);
        if (!covered)
            throw ParseError("edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             "} is covered by no bag");
    }
    // connectivity of each vertex's bag set
    for (int v = 1; v <= g.n; ++v) {
        int root_most = -1, count = 0;
        for (int i = 0; i < td.node_count(); ++i)
            if (td.bag_contains(i, v)) {
                ++count;
                if (root_most < 0) root_most = i;
            }
        // walk every bag holding v toward the first one; the walk must stay
        // inside bags holding v until it reaches it
        int reached = 0;
        for (int i = 0; i < td.node_count(); ++i) {
            if (!td.bag_contains(i, v)) continue;
            int cur = i;
            while (cur != root_most && cur >= 0 && td.bag_contains(cur, v)) cur = td.parent[cur];
            if (cur == root_most) ++reached;
        }
        if (reached != count)
            throw ParseError("bags containing vertex " + std::to_string(v) +
                             " do not form a connected subtree");
    }
}

// ---------------------------------------------------------------------------
// Bag-level distance values: the same algebra as the four-terminal case but
// over interface sets of up to t+1 vertices per tag.
// ---------------------------------------------------------------------------

template <typename T>
struct BagKGraph {
    bool bottom = true;
    int mu = -1, la = -1;
    std::vector<int> mu_terms, la_terms;
    std::vector<int> verts;
    std::vector<DistPair<T>> w;  // verts.size()^2, row-major

    static BagKGraph bot() { return {}; }

    static BagKGraph make(int mu, std::vector<int> mu_terms, int la, std::vector<int> la_terms) {
        BagKGraph k;
        k.bottom = false;
        k.mu = mu;
        k.la = la;
        k.mu_terms = std::move(mu_terms);
        k.la_terms = std::move(la_terms);
        for (int v : k.mu_terms) k.add_vert(v);
        for (int v : k.la_terms) k.add_vert(v);
        k.w.assign(k.verts.size() * k.verts.size(), DistPair<T>::unreachable());
        for (size_t i = 0; i < k.verts.size(); ++i) k.w[i * k.verts.size() + i].dist = Weight<T>::zero();
        return k;
    }

    int nv() const { return static_cast<int>(verts.size()); }
    int slot(int v) const {
        for (size_t i = 0; i < verts.size(); ++i)
            if (verts[i] == v) return static_cast<int>(i);
        return -1;
    }
    DistPair<T>& at(int u, int v) {
        int a = slot(u), b = slot(v);
        assert(a >= 0 && b >= 0);
        return w[a * verts.size() + b];
    }
    const DistPair<T>& at(int u, int v) const {
        int a = slot(u), b = slot(v);
        assert(a >= 0 && b >= 0);
        return w[a * verts.size() + b];
    }
    const std::vector<int>& terms_of(int tag) const {
        assert(tag == mu || tag == la);
        return tag == mu ? mu_terms : la_terms;
    }

private:
    void add_vert(int v) {
        if (slot(v) < 0) verts.push_back(v);
    }
};

template <typename T>
bool bag_kgraph_equal(const BagKGraph<T>& a, const BagKGraph<T>& b) {
    if (a.bottom || b.bottom) return a.bottom == b.bottom;
    if (a.mu != b.mu || a.la != b.la || a.nv() != b.nv()) return false;
    for (int i = 0; i < a.nv(); ++i) {
        if (b.slot(a.verts[i]) < 0) return false;
        for (int j = 0; j < a.nv(); ++j)
            if (a.w[i * a.verts.size() + j] != b.at(a.verts[i], a.verts[j])) return false;
    }
    return true;
}

template <typename T>
BagKGraph<T> oplus_bag(const BagKGraph<T>& h1, const BagKGraph<T>& h2,
                       QueryStats* stats = nullptr) {
    if (stats) ++stats->oplus_ops;
    if (h1.bottom || h2.bottom) return BagKGraph<T>::bot();
    int shared = -1, shared_count = 0;
    const int tags1[2] = {h1.mu, h1.la};
    const int distinct1 = h1.mu == h1.la ? 1 : 2;
    for (int i = 0; i < distinct1; ++i)
        if (tags1[i] == h2.mu || tags1[i] == h2.la) {
            shared = tags1[i];
            ++shared_count;
        }
    if (shared_count != 1) return BagKGraph<T>::bot();

    auto outer = [&](const BagKGraph<T>& h) {
        if (h.mu == h.la) return h.mu;
        return h.mu == shared ? h.la : h.mu;
    };
    int theta1 = outer(h1), theta2 = outer(h2);

    std::vector<int> ov;
    auto oslot = [&](int v) {
        for (size_t i = 0; i < ov.size(); ++i)
            if (ov[i] == v) return static_cast<int>(i);
        return -1;
    };
    for (const BagKGraph<T>* h : {&h1, &h2})
        for (int v : h->verts)
            if (oslot(v) < 0) ov.push_back(v);
    const int on = static_cast<int>(ov.size());

    std::vector<Weight<T>> d(static_cast<size_t>(on) * on, Weight<T>::infinity());
    for (int i = 0; i < on; ++i) d[i * on + i] = Weight<T>::zero();
    for (const BagKGraph<T>* h : {&h1, &h2})
        for (int i = 0; i < h->nv(); ++i)
            for (int j = 0; j < h->nv(); ++j) {
                int a = oslot(h->verts[i]), b = oslot(h->verts[j]);
                d[a * on + b] = min(d[a * on + b], h->w[i * h->verts.size() + j].dist);
            }
    for (int k = 0; k < on; ++k)
        for (int i = 0; i < on; ++i)
            for (int j = 0; j < on; ++j)
                d[i * on + j] = min(d[i * on + j], d[i * on + k] + d[k * on + j]);

    BagKGraph<T> out = BagKGraph<T>::make(theta1, h1.terms_of(theta1), theta2, h2.terms_of(theta2));
    for (int a = 0; a < out.nv(); ++a)
        for (int b = 0; b < out.nv(); ++b) {
            int u = oslot(out.verts[a]), v = oslot(out.verts[b]);
            Weight<T> beer = Weight<T>::infinity();
            for (const BagKGraph<T>* h : {&h1, &h2})
                for (int i = 0; i < h->nv(); ++i)
                    for (int j = 0; j < h->nv(); ++j) {
                        int p = oslot(h->verts[i]), q = oslot(h->verts[j]);
                        beer = min(beer,
                                   d[u * on + p] + h->w[i * h->verts.size() + j].beer + d[q * on + v]);
                    }
            out.w[a * out.verts.size() + b] = {d[u * on + v], beer};
        }
    return out;
}

template <typename T>
BagKGraph<T> oplus_hat_bag(const BagKGraph<T>& h1, const BagKGraph<T>& h2,
                           QueryStats* stats = nullptr) {
    if (stats) ++stats->oplus_hat_ops;
    if (h1.bottom || h2.bottom) return BagKGraph<T>::bot();
    if (h1.la != h2.mu) return BagKGraph<T>::bot();
    return oplus_bag(h1, h2);
}

// ---------------------------------------------------------------------------
// TdIndex
// ---------------------------------------------------------------------------

template <typename T>
struct BagHatOp {
    BagKGraph<T> operator()(const BagKGraph<T>& a, const BagKGraph<T>& b) const {
        return oplus_hat_bag(a, b);
    }
};

template <typename T>
struct TdIndex {
    BeerGraph<T> graph;
    TreeDecomposition td;
    std::vector<std::vector<int>> a_set;     // interface A_mu per node
    std::vector<std::vector<int>> bag_edges; // edge ids with both ends in the bag
    std::vector<std::vector<int>> children;
    // g1 holds interior values d(G[S_mu] minus interface-internal edges); it
    // is the overlay ingredient that keeps sibling edge zones disjoint
    std::vector<BagKGraph<T>> g1, f1, f2, f3;
    std::vector<std::vector<BagKGraph<T>>> f4;  // per node, child pairs i < j
    LcaIndex lca;
    TreeProductIndex<BagKGraph<T>, BagHatOp<T>> tp;
    std::vector<int> shallowest_bag;  // per graph vertex
    QueryStats build_stats;
};

namespace td_detail {

template <typename T>
struct UniverseSpec {
    const TdIndex<T>* idx;
    int node;                       // bag providing the local universe
    std::vector<int> drop_internal; // children whose interface-internal bag edges are dropped
    std::vector<int> skip_children; // children contributing no overlay
    bool with_f2_overlay = false;
};

template <typename T>
bool edge_inside(const std::vector<int>& sorted_set, const typename BeerGraph<T>::Edge& e) {
    return std::binary_search(sorted_set.begin(), sorted_set.end(), e.u) &&
           std::binary_search(sorted_set.begin(), sorted_set.end(), e.v);
}

/// Local weighted digraph for one bag universe plus the beer insertion
/// candidates that go with it.
template <typename T>
std::pair<LocalGraph<T>, std::vector<BeerSource<T>>> build_universe(const UniverseSpec<T>& spec) {
    const TdIndex<T>& idx = *spec.idx;
    const auto& g = idx.graph;
    LocalGraph<T> h;
    std::vector<BeerSource<T>> sources;
    for (int v : idx.td.bags[spec.node]) h.ensure(v);

    auto dropped = [&](const typename BeerGraph<T>::Edge& e) {
        for (int c : spec.drop_internal)
            if (edge_inside<T>(idx.a_set[c], e)) return true;
        return false;
    };
    for (int eid : idx.bag_edges[spec.node]) {
        const auto& e = g.edges[eid];
        if (dropped(e)) continue;
        if (!e.wuv.is_inf()) h.arc(e.u, e.v, e.wuv);
        if (!e.wvu.is_inf()) h.arc(e.v, e.u, e.wvu);
    }
    for (int b : idx.td.bags[spec.node])
        if (g.is_beer(b)) sources.push_back({b, b, Weight<T>::zero()});

    for (int c : idx.children[spec.node]) {
        if (std::find(spec.skip_children.begin(), spec.skip_children.end(), c) !=
            spec.skip_children.end())
            continue;
        const BagKGraph<T>& kc = idx.g1[c];
        for (int p : idx.a_set[c])
            for (int q : idx.a_set[c]) {
                if (p != q) h.arc(p, q, kc.at(p, q).dist);
                sources.push_back({p, q, kc.at(p, q).beer});
            }
    }
    if (spec.with_f2_overlay) {
        const BagKGraph<T>& k2 = idx.f2[spec.node];
        for (int p : idx.a_set[spec.node])
            for (int q : idx.a_set[spec.node]) {
                if (p != q) h.arc(p, q, k2.at(p, q).dist);
                sources.push_back({p, q, k2.at(p, q).beer});
            }
    }
    return {std::move(h), std::move(sources)};
}

template <typename T>
BagKGraph<T> evaluate(const LocalGraph<T>& h, const std::vector<BeerSource<T>>& sources, int tag1,
                      std::vector<int> terms1, int tag2, std::vector<int> terms2,
                      QueryStats* stats) {
    BagKGraph<T> out = BagKGraph<T>::make(tag1, std::move(terms1), tag2, std::move(terms2));
    std::vector<std::vector<Weight<T>>> from(out.nv()), to(out.nv());
    for (int i = 0; i < out.nv(); ++i) {
        int s = h.slot(out.verts[i]);
        assert(s >= 0);
        from[i] = h.run_dijkstra(s, false, stats);
        to[i] = h.run_dijkstra(s, true, stats);
    }
    for (int a = 0; a < out.nv(); ++a)
        for (int b = 0; b < out.nv(); ++b) {
            Weight<T> beer = Weight<T>::infinity();
            for (const auto& src : sources) {
                int ps = h.slot(src.p), qs = h.slot(src.q);
                beer = min(beer, from[a][ps] + src.beer + to[b][qs]);
            }
            Weight<T> d = a == b ? Weight<T>::zero() : from[a][h.slot(out.verts[b])];
            out.w[a * out.verts.size() + b] = {d, beer};
        }
    return out;
}

}  // namespace td_detail

template <typename T>
TdIndex<T> build_td_index(const BeerGraph<T>& g, const TreeDecomposition& td) {
    validate_td(td, g);
    TdIndex<T> idx;
    idx.graph = g;
    idx.td = td;
    const int nb = td.node_count();

    idx.children.assign(nb, {});
    for (int v = 1; v < nb; ++v) idx.children[td.parent[v]].push_back(v);

    idx.a_set.assign(nb, {});
    idx.a_set[0] = td.bags[0];  // the full root bag serves as its interface
    for (int v = 1; v < nb; ++v) {
        std::set_intersection(td.bags[v].begin(), td.bags[v].end(),
                              td.bags[td.parent[v]].begin(), td.bags[td.parent[v]].end(),
                              std::back_inserter(idx.a_set[v]));
    }

    idx.bag_edges.assign(nb, {});
    for (int e = 0; e < g.m(); ++e)
        for (int b = 0; b < nb; ++b)
            if (td.bag_contains(b, g.edges[e].u) && td.bag_contains(b, g.edges[e].v))
                idx.bag_edges[b].push_back(e);

    idx.shallowest_bag.assign(static_cast<size_t>(g.n) + 1, -1);
    {
        LcaIndex depths(td.parent, 0);
        for (int b = 0; b < nb; ++b)
            for (int v : td.bags[b])
                if (idx.shallowest_bag[v] < 0 ||
                    depths.depth(b) < depths.depth(idx.shallowest_bag[v]))
                    idx.shallowest_bag[v] = b;
    }

    // g1 and f1 bottom-up (children have larger... no such guarantee; order by depth)
    std::vector<int> order(nb);
    {
        std::vector<int> bfs{0};
        for (size_t i = 0; i < bfs.size(); ++i)
            for (int c : idx.children[bfs[i]]) bfs.push_back(c);
        order = bfs;
    }

    idx.g1.assign(nb, BagKGraph<T>::bot());
    idx.f1.assign(nb, BagKGraph<T>::bot());
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        {
            td_detail::UniverseSpec<T> spec{&idx, v, {v}, {}, false};
            auto [h, sources] = td_detail::build_universe(spec);
            idx.g1[v] = td_detail::evaluate(h, sources, v, idx.a_set[v], v, idx.a_set[v],
                                            &idx.build_stats);
        }
        {
            td_detail::UniverseSpec<T> spec{&idx, v, {}, {}, false};
            auto [h, sources] = td_detail::build_universe(spec);
            idx.f1[v] = td_detail::evaluate(h, sources, v, idx.a_set[v], v, idx.a_set[v],
                                            &idx.build_stats);
        }
    }

    // f3 per tree edge, on the parent's universe
    idx.f3.assign(nb, BagKGraph<T>::bot());
    for (int v = 1; v < nb; ++v) {
        int par = td.parent[v];
        td_detail::UniverseSpec<T> spec{&idx, par, {v}, {v}, false};
        auto [h, sources] = td_detail::build_universe(spec);
        idx.f3[v] = td_detail::evaluate(h, sources, par, idx.a_set[par], v, idx.a_set[v],
                                        &idx.build_stats);
    }

    // f2 top-down: the complement of a subtree splits into the parent's
    // complement and the parent-minus-child zone that f3 already captures
    idx.f2.assign(nb, BagKGraph<T>::bot());
    {
        BagKGraph<T> root = BagKGraph<T>::make(0, idx.a_set[0], 0, idx.a_set[0]);
        for (int u : idx.a_set[0]) {
            root.at(u, u).dist = Weight<T>::zero();
            root.at(u, u).beer = g.is_beer(u) ? Weight<T>::zero() : Weight<T>::infinity();
        }
        idx.f2[0] = root;
    }
    for (int v : order) {
        if (v == 0) continue;
        BagKGraph<T> joined = oplus_bag(idx.f2[td.parent[v]], idx.f3[v]);
        BagKGraph<T> proj = BagKGraph<T>::make(v, idx.a_set[v], v, idx.a_set[v]);
        for (int p : idx.a_set[v])
            for (int q : idx.a_set[v]) proj.at(p, q) = joined.at(p, q);
        idx.f2[v] = std::move(proj);
    }

    // f4 per child pair
    idx.f4.assign(nb, {});
    for (int v = 0; v < nb; ++v) {
        const auto& ch = idx.children[v];
        int c = static_cast<int>(ch.size());
        if (c < 2) continue;
        std::vector<BagKGraph<T>> table;
        table.reserve(static_cast<size_t>(c) * (c - 1) / 2);
        for (int a = 0; a < c; ++a)
            for (int b = a + 1; b < c; ++b) {
                td_detail::UniverseSpec<T> spec{&idx, v, {ch[a], ch[b]}, {ch[a], ch[b]}, true};
                auto [h, sources] = td_detail::build_universe(spec);
                table.push_back(td_detail::evaluate(h, sources, ch[a], idx.a_set[ch[a]], ch[b],
                                                    idx.a_set[ch[b]], &idx.build_stats));
            }
        idx.f4[v] = std::move(table);
    }

    idx.lca = LcaIndex(td.parent, 0);
    idx.tp = TreeProductIndex<BagKGraph<T>, BagHatOp<T>>(td.parent, 0, idx.f3);
    return idx;
}

namespace td_detail {

/// f1 augmented with extra terminals from the bag (query endpoints).
template <typename T>
BagKGraph<T> aug_f1(const TdIndex<T>& idx, int node, std::vector<int> extra, QueryStats* stats) {
    UniverseSpec<T> spec{&idx, node, {}, {}, false};
    auto [h, sources] = build_universe(spec);
    std::vector<int> terms = idx.a_set[node];
    for (int v : extra)
        if (std::find(terms.begin(), terms.end(), v) == terms.end()) terms.push_back(v);
    return evaluate(h, sources, node, terms, node, terms, stats);
}

/// Complement values of a node, augmented with an endpoint that lives in the
/// parent's bag: distances in G minus E(G[S_node]) over {s} and A_node.
template <typename T>
BagKGraph<T> aug_f2(const TdIndex<T>& idx, int node, int s, QueryStats* stats) {
    int par = idx.td.parent[node];
    assert(par >= 0);
    UniverseSpec<T> spec{&idx, par, {node}, {node}, true};
    auto [h, sources] = build_universe(spec);
    std::vector<int> terms = idx.a_set[node];
    if (std::find(terms.begin(), terms.end(), s) == terms.end()) terms.push_back(s);
    return evaluate(h, sources, node, terms, node, terms, stats);
}

template <typename T>
std::optional<BagKGraph<T>> leg_product(const TdIndex<T>& idx, int top, int leaf,
                                        QueryStats* stats) {
    if (top == leaf) return std::nullopt;
    return idx.tp.product_below(top, leaf, stats);
}

}  // namespace td_detail

/// (distance, beer distance) via the decomposition index. Explicit bag
/// choices override the shallowest-bag defaults; answers must not depend on
/// them.
template <typename T>
DistPair<T> td_query(const TdIndex<T>& idx, int s, int t, QueryStats* stats = nullptr,
                     int bag_s = -1, int bag_t = -1) {
    if (s < 1 || s > idx.graph.n || t < 1 || t > idx.graph.n)
        throw std::out_of_range("query vertex out of range");
    int ts = bag_s >= 0 ? bag_s : idx.shallowest_bag[s];
    int tt = bag_t >= 0 ? bag_t : idx.shallowest_bag[t];
    assert(idx.td.bag_contains(ts, s) && idx.td.bag_contains(tt, t));

    if (ts == tt) {
        BagKGraph<T> k = oplus_bag(td_detail::aug_f1(idx, ts, {s, t}, stats), idx.f2[ts], stats);
        return k.at(s, t);
    }
    int pi = idx.lca.lca(ts, tt);
    if (pi == ts) {
        // ts is an ancestor of tt: compose the complement of the child
        // toward tt with everything inside that child's subtree
        int top = idx.lca.child_toward(ts, tt);
        BagKGraph<T> inner = td_detail::aug_f1(idx, tt, {t}, stats);
        if (auto leg = td_detail::leg_product(idx, top, tt, stats))
            inner = oplus_bag(*leg, inner, stats);
        BagKGraph<T> k = oplus_bag(td_detail::aug_f2(idx, top, s, stats), inner, stats);
        return k.at(s, t);
    }
    if (pi == tt) {
        int top = idx.lca.child_toward(tt, ts);
        BagKGraph<T> inner = td_detail::aug_f1(idx, ts, {s}, stats);
        if (auto leg = td_detail::leg_product(idx, top, ts, stats))
            inner = oplus_bag(*leg, inner, stats);
        BagKGraph<T> k = oplus_bag(td_detail::aug_f2(idx, top, t, stats), inner, stats);
        return k.at(s, t);
    }

    int up_top = idx.lca.child_toward(pi, ts);
    int down_top = idx.lca.child_toward(pi, tt);
    // the stored f4 table is keyed by the child pair in child-list order
    const auto& ch = idx.children[pi];
    int ia = -1, ib = -1;
    for (size_t i = 0; i < ch.size(); ++i) {
        if (ch[i] == up_top) ia = static_cast<int>(i);
        if (ch[i] == down_top) ib = static_cast<int>(i);
    }
    int a = std::min(ia, ib), b = std::max(ia, ib);
    int c = static_cast<int>(ch.size());
    const BagKGraph<T>& joint = idx.f4[pi][a * (2 * c - a - 1) / 2 + (b - a - 1)];

    BagKGraph<T> k = td_detail::aug_f1(idx, ts, {s}, stats);
    if (auto up = td_detail::leg_product(idx, up_top, ts, stats)) k = oplus_bag(k, *up, stats);
    k = oplus_bag(k, joint, stats);
    if (auto down = td_detail::leg_product(idx, down_top, tt, stats)) k = oplus_bag(k, *down, stats);
    k = oplus_bag(k, td_detail::aug_f1(idx, tt, {t}, stats), stats);
    return k.at(s, t);
}

}  // namespace beerpath
