#pragma once

#include <cassert>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "beerpath/counters.hpp"
#include "beerpath/graph.hpp"
#include "beerpath/kgraph.hpp"
#include "beerpath/query_structures.hpp"
#include "beerpath/spqr.hpp"

namespace beerpath {

enum class Strategy { F12, F123, F1234R };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::F12: return "f12";
        case Strategy::F123: return "f123";
        default: return "f1234r";
    }
}

inline std::optional<Strategy> strategy_from_name(const std::string& s) {
    if (s == "f12") return Strategy::F12;
    if (s == "f123") return Strategy::F123;
    if (s == "f1234r") return Strategy::F1234R;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// S-node tables: prefix path sums along the chain, range minima of per-child
// beer detours, and anchored round-trip minima. All queries are O(1) and
// infinity-safe (sums track an infinite-entry count instead of subtracting
// through the sentinel).
// ---------------------------------------------------------------------------

template <typename T>
class PrefixPathSum {
public:
    PrefixPathSum() = default;
    explicit PrefixPathSum(const std::vector<Weight<T>>& a) {  // 1-based input
        int k = static_cast<int>(a.size()) - 1;
        sum_.assign(k + 1, T{});
        infs_.assign(k + 1, 0);
        for (int i = 1; i <= k; ++i) {
            sum_[i] = sum_[i - 1] + (a[i].is_inf() ? T{} : a[i].value());
            infs_[i] = infs_[i - 1] + (a[i].is_inf() ? 1 : 0);
        }
    }

    /// Sum over children [i, j]; empty ranges are zero.
    Weight<T> range(int i, int j) const {
        if (i > j) return Weight<T>::zero();
        if (infs_[j] - infs_[i - 1] > 0) return Weight<T>::infinity();
        return Weight<T>(sum_[j] - sum_[i - 1]);
    }

private:
    std::vector<T> sum_;
    std::vector<int> infs_;
};

template <typename T>
struct SNodeTables {
    int k = 0;
    std::vector<int> cv;  // chain vertices c_0 .. c_k
    PrefixPathSum<T> psxy, psyx;
    RmqTable<T> bxy_rmq, byx_rmq;
    // round-trip sparse tables; rtx_ anchors ranges at their left chain end,
    // rty_ at their right chain end
    std::vector<std::vector<Weight<T>>> rtx_, rty_;

    Weight<T> sxy(int i, int j) const { return psxy.range(i, j); }
    Weight<T> syx(int i, int j) const { return psyx.range(i, j); }
    Weight<T> min_bxy(int i, int j) const { return i > j ? Weight<T>::infinity() : bxy_rmq.query(i, j); }
    Weight<T> min_byx(int i, int j) const { return i > j ? Weight<T>::infinity() : byx_rmq.query(i, j); }

    /// Best beer round trip from c_{l-1} that turns inside children [l, r]:
    /// min over j of sxy(l, j-1) + bd(x_j, x_j) + syx(l, j-1).
    Weight<T> rt_x(int l, int r) const {
        if (l > r) return Weight<T>::infinity();
        int p = std::bit_width(static_cast<unsigned>(r - l + 1)) - 1;
        int l2 = r - (1 << p) + 1;
        Weight<T> left = rtx_[p][l - 1];
        Weight<T> right = sxy(l, l2 - 1) + syx(l, l2 - 1) + rtx_[p][l2 - 1];
        return min(left, right);
    }

    /// Best beer round trip from c_r turning inside [l, r]:
    /// min over j of syx(j+1, r) + bd(y_j, y_j) + sxy(j+1, r).
    Weight<T> rt_y(int l, int r) const {
        if (l > r) return Weight<T>::infinity();
        int p = std::bit_width(static_cast<unsigned>(r - l + 1)) - 1;
        int l2 = r - (1 << p) + 1;
        Weight<T> right = rty_[p][l2 - 1];
        Weight<T> left = rty_[p][l - 1] + syx(l + (1 << p), r) + sxy(l + (1 << p), r);
        return min(left, right);
    }

    static SNodeTables build(const std::vector<int>& chain, std::vector<Weight<T>> dxy,
                             std::vector<Weight<T>> dyx, std::vector<Weight<T>> bdxx,
                             std::vector<Weight<T>> bdxy, std::vector<Weight<T>> bdyx,
                             std::vector<Weight<T>> bdyy) {
        SNodeTables t;
        t.k = static_cast<int>(chain.size()) - 1;
        t.cv = chain;
        t.psxy = PrefixPathSum<T>(dxy);
        t.psyx = PrefixPathSum<T>(dyx);
        std::vector<Weight<T>> bxy(t.k), byx(t.k);
        for (int i = 1; i <= t.k; ++i) {
            bxy[i - 1] = extra_over(bdxy[i], dxy[i]);
            byx[i - 1] = extra_over(bdyx[i], dyx[i]);
        }
        t.bxy_rmq = RmqTable<T>(std::move(bxy));
        t.byx_rmq = RmqTable<T>(std::move(byx));

        int levels = std::bit_width(static_cast<unsigned>(t.k));
        t.rtx_.resize(levels);
        t.rty_.resize(levels);
        t.rtx_[0].assign(bdxx.begin() + 1, bdxx.end());
        t.rty_[0].assign(bdyy.begin() + 1, bdyy.end());
        for (int p = 1; p < levels; ++p) {
            int len = t.k - (1 << p) + 1;
            t.rtx_[p].resize(len);
            t.rty_[p].resize(len);
            for (int l = 1; l <= len; ++l) {
                int mid = l + (1 << (p - 1));
                int r0 = l + (1 << p) - 1;
                t.rtx_[p][l - 1] =
                    min(t.rtx_[p - 1][l - 1],
                        t.sxy(l, mid - 1) + t.syx(l, mid - 1) + t.rtx_[p - 1][mid - 1]);
                t.rty_[p][l - 1] =
                    min(t.rty_[p - 1][mid - 1],
                        t.rty_[p - 1][l - 1] + t.syx(mid, r0) + t.sxy(mid, r0));
            }
        }
        return t;
    }
};

/// Per-child f1 minima for P nodes, queried with one or two children masked
/// out.
template <typename T>
struct PNodeTables {
    int k = 0;
    RmqTable<T> dxy, dyx, bxx, bxy, byx, byy;

    Weight<T> excl(const RmqTable<T>& t, int skip1, int skip2 = -1) const {
        if (skip2 < 0) skip2 = skip1;
        int a = std::min(skip1, skip2), b = std::max(skip1, skip2);
        Weight<T> out = Weight<T>::infinity();
        if (a > 1) out = min(out, t.query(1, a - 1));
        if (b - a > 1) out = min(out, t.query(a + 1, b - 1));
        if (b < k) out = min(out, t.query(b + 1, k));
        return out;
    }
};

/// Six parallel-branch minima feeding the P-node weight table.
template <typename T>
struct BranchMins {
    Weight<T> dxy = Weight<T>::infinity(), dyx = Weight<T>::infinity();
    Weight<T> bxx = Weight<T>::infinity(), bxy = Weight<T>::infinity();
    Weight<T> byx = Weight<T>::infinity(), byy = Weight<T>::infinity();

    friend BranchMins min(const BranchMins& a, const BranchMins& b) {
        return BranchMins{min(a.dxy, b.dxy), min(a.dyx, b.dyx), min(a.bxx, b.bxx),
                          min(a.bxy, b.bxy), min(a.byx, b.byx), min(a.byy, b.byy)};
    }
};

/// Writes the P-node weight table for terminals (x, y) into k.
template <typename T>
void fill_parallel_table(KGraph<T>& k, int x, int y, const BranchMins<T>& l) {
    k.relax(x, x, {Weight<T>::zero(),
                   min(min(l.bxx, l.dxy + l.byy + l.dyx), min(l.bxy + l.dyx, l.dxy + l.byx))});
    k.relax(y, y, {Weight<T>::zero(),
                   min(min(l.byy, l.dyx + l.bxx + l.dxy), min(l.byx + l.dxy, l.dyx + l.bxy))});
    k.relax(x, y, {l.dxy, min(min(l.bxx + l.dxy, l.dxy + l.byy),
                              min(l.bxy, l.dxy + l.dxy + l.byx))});
    k.relax(y, x, {l.dyx, min(min(l.byy + l.dyx, l.dyx + l.bxx),
                              min(l.byx, l.dyx + l.dyx + l.bxy))});
}

// ---------------------------------------------------------------------------
// Small weighted digraphs materialized from skeletons. One Dijkstra per
// needed source or target; beer weights come from insertion candidates.
// ---------------------------------------------------------------------------

/// Arc tag marking the reference edge in a tagged skeleton graph.
inline constexpr int kRefArcTag = -2;
inline constexpr int kNoSkip = std::numeric_limits<int>::min();

template <typename T>
struct LocalGraph {
    struct Arc {
        int to;
        Weight<T> w;
        int tag;  // child position, kRefArcTag, or -1 for untagged arcs
    };
    std::vector<int> verts;
    std::unordered_map<int, int> index;
    std::vector<std::vector<Arc>> fwd, bwd;

    int slot(int v) const {
        auto it = index.find(v);
        return it == index.end() ? -1 : it->second;
    }
    int ensure(int v) {
        auto [it, fresh] = index.try_emplace(v, static_cast<int>(verts.size()));
        if (fresh) {
            verts.push_back(v);
            fwd.emplace_back();
            bwd.emplace_back();
        }
        return it->second;
    }
    void arc(int u, int v, Weight<T> w, int tag = -1) {
        int a = ensure(u), b = ensure(v);
        fwd[a].push_back({b, w, tag});
        bwd[b].push_back({a, w, tag});
    }

    /// Shortest paths from (or to) a vertex, ignoring arcs whose tag matches
    /// either skip value.
    std::vector<Weight<T>> run_dijkstra(int src_slot, bool backward, QueryStats* stats,
                                        int skip_a = kNoSkip, int skip_b = kNoSkip) const {
        if (stats) ++stats->dijkstra_calls;
        const auto& adj = backward ? bwd : fwd;
        std::vector<Weight<T>> dist(verts.size(), Weight<T>::infinity());
        using Item = std::pair<Weight<T>, int>;
        auto cmp = [](const Item& a, const Item& b) { return b.first < a.first; };
        std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
        dist[src_slot] = Weight<T>::zero();
        pq.push({dist[src_slot], src_slot});
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (dist[v] < d) continue;
            for (const Arc& a : adj[v]) {
                if (a.tag == skip_a || a.tag == skip_b) continue;
                Weight<T> cand = d + a.w;
                if (cand < dist[a.to]) {
                    dist[a.to] = cand;
                    pq.push({cand, a.to});
                }
            }
        }
        return dist;
    }
};

/// A beer insertion candidate: detouring through (p, q) costs `beer` between
/// the overlay distances.
template <typename T>
struct BeerSource {
    int p, q;
    Weight<T> beer;
};

/// KGraph over the tagged terminal pairs, evaluated on an explicit local
/// graph: distances by Dijkstra, beer by single-insertion minimization.
template <typename T>
KGraph<T> kgraph_from_local(const LocalGraph<T>& h, int tag1, int t1x, int t1y, int tag2, int t2x,
                            int t2y, const std::vector<BeerSource<T>>& sources, QueryStats* stats,
                            int skip_a = kNoSkip, int skip_b = kNoSkip) {
    KGraph<T> out = KGraph<T>::make(tag1, t1x, t1y, tag2, t2x, t2y);
    std::vector<std::vector<Weight<T>>> from(out.nv), to(out.nv);
    for (int i = 0; i < out.nv; ++i) {
        int s = h.slot(out.verts[i]);
        assert(s >= 0);
        from[i] = h.run_dijkstra(s, false, stats, skip_a, skip_b);
        to[i] = h.run_dijkstra(s, true, stats, skip_a, skip_b);
    }
    for (int a = 0; a < out.nv; ++a)
        for (int b = 0; b < out.nv; ++b) {
            Weight<T> d = from[a][h.slot(out.verts[b])];
            Weight<T> beer = Weight<T>::infinity();
            for (const auto& src : sources) {
                int ps = h.slot(src.p), qs = h.slot(src.q);
                assert(ps >= 0 && qs >= 0);
                beer = min(beer, from[a][ps] + src.beer + to[b][qs]);
            }
            out.w[a][b] = {a == b ? Weight<T>::zero() : d, beer};
        }
    return out;
}

// ---------------------------------------------------------------------------
// TriIndex
// ---------------------------------------------------------------------------

template <typename T>
struct HatOp {
    KGraph<T> operator()(const KGraph<T>& a, const KGraph<T>& b) const { return oplus_hat(a, b); }
};

template <typename T>
struct TriIndex {
    BeerGraph<T> graph;
    SpqrTree tree;
    Strategy strategy = Strategy::F123;

    std::vector<KGraph<T>> f1, f2;       // per node; bottom at the root
    std::vector<KGraph<T>> f3;           // per node v: F3({parent(v), v})
    std::vector<std::vector<KGraph<T>>> f4r;  // per R node: child pairs i < j
    std::vector<int> s_slot, p_slot;
    std::vector<SNodeTables<T>> s_tables;
    std::vector<PNodeTables<T>> p_tables;
    std::vector<int> pos_in_parent;  // 1-based child position
    // per R node: its skeleton as a tagged graph (child arcs tagged by
    // position, reference arcs carrying the node's f2 distances), shared by
    // every H-variant via skip tags
    std::vector<LocalGraph<T>> r_base;
    LcaIndex lca;
    TreeProductIndex<KGraph<T>, HatOp<T>> tp;
    QueryStats build_stats;

    const SNodeTables<T>& stab(int node) const { return s_tables[s_slot[node]]; }
    const PNodeTables<T>& ptab(int node) const { return p_tables[p_slot[node]]; }

    Weight<T> edge_weight(int edge, int from, int to) const {
        const auto& e = graph.edges[edge];
        assert((e.u == from && e.v == to) || (e.v == from && e.u == to));
        return e.u == from ? e.wuv : e.wvu;
    }
};

namespace detail {

template <typename T>
KGraph<T> q_table(int tag, int x, int y, Weight<T> wxy, Weight<T> wyx, bool x_beer, bool y_beer) {
    KGraph<T> k = KGraph<T>::make_single(tag, x, y);
    auto w = [&](int u, int v) -> Weight<T> {
        if (u == v) return Weight<T>::zero();
        return u == x ? wxy : wyx;
    };
    for (int u : {x, y})
        for (int v : {x, y}) {
            Weight<T> beer = Weight<T>::infinity();
            if (x_beer) beer = min(beer, w(u, x) + w(x, v));
            if (y_beer) beer = min(beer, w(u, y) + w(y, v));
            k.at(u, v) = {w(u, v), beer};
        }
    return k;
}

/// Skeleton of `node` minus the reference edge, with virtual edges carrying
/// child f1 distances. Used for the bottom-up pass before f2 exists.
template <typename T>
LocalGraph<T> skeleton_graph(const TriIndex<T>& idx, int node) {
    const SpqrNode& nd = idx.tree.nodes[node];
    LocalGraph<T> h;
    for (const auto& se : nd.skeleton) {
        if (se.is_ref) {
            h.ensure(se.u);
            h.ensure(se.v);
            continue;
        }
        int c = nd.children[se.child];
        h.arc(se.u, se.v, idx.f1[c].at(se.u, se.v).dist);
        h.arc(se.v, se.u, idx.f1[c].at(se.v, se.u).dist);
    }
    return h;
}

/// Builds the shared tagged skeleton graph of an R node. Needs f2[node].
template <typename T>
void ensure_r_base(TriIndex<T>& idx, int node) {
    if (!idx.r_base[node].verts.empty()) return;
    const SpqrNode& nd = idx.tree.nodes[node];
    LocalGraph<T>& h = idx.r_base[node];
    for (const auto& se : nd.skeleton) {
        if (se.is_ref) continue;
        int c = nd.children[se.child];
        h.arc(se.u, se.v, idx.f1[c].at(se.u, se.v).dist, se.child);
        h.arc(se.v, se.u, idx.f1[c].at(se.v, se.u).dist, se.child);
    }
    h.arc(nd.x, nd.y, idx.f2[node].at(nd.x, nd.y).dist, kRefArcTag);
    h.arc(nd.y, nd.x, idx.f2[node].at(nd.y, nd.x).dist, kRefArcTag);
}

template <typename T>
void add_child_sources(const TriIndex<T>& idx, int node, int skip_a, int skip_b,
                       std::vector<BeerSource<T>>& out) {
    const SpqrNode& nd = idx.tree.nodes[node];
    for (size_t pos = 0; pos < nd.children.size(); ++pos) {
        if (static_cast<int>(pos) == skip_a || static_cast<int>(pos) == skip_b) continue;
        int c = nd.children[pos];
        const KGraph<T>& k = idx.f1[c];
        int cx = idx.tree.nodes[c].x, cy = idx.tree.nodes[c].y;
        for (int p : {cx, cy})
            for (int q : {cx, cy}) out.push_back({p, q, k.at(p, q).beer});
    }
}

template <typename T>
void add_f2_sources(const TriIndex<T>& idx, int node, std::vector<BeerSource<T>>& out) {
    const SpqrNode& nd = idx.tree.nodes[node];
    for (int p : {nd.x, nd.y})
        for (int q : {nd.x, nd.y}) out.push_back({p, q, idx.f2[node].at(p, q).beer});
}

template <typename T>
BranchMins<T> sibling_mins(const TriIndex<T>& idx, int parent, int skip1, int skip2) {
    const PNodeTables<T>& pt = idx.ptab(parent);
    BranchMins<T> l;
    l.dxy = pt.excl(pt.dxy, skip1, skip2);
    l.dyx = pt.excl(pt.dyx, skip1, skip2);
    l.bxx = pt.excl(pt.bxx, skip1, skip2);
    l.bxy = pt.excl(pt.bxy, skip1, skip2);
    l.byx = pt.excl(pt.byx, skip1, skip2);
    l.byy = pt.excl(pt.byy, skip1, skip2);
    return l;
}

template <typename T>
BranchMins<T> f2_branch(const TriIndex<T>& idx, int node) {
    const KGraph<T>& k = idx.f2[node];
    const SpqrNode& nd = idx.tree.nodes[node];
    BranchMins<T> l;
    l.dxy = k.at(nd.x, nd.y).dist;
    l.dyx = k.at(nd.y, nd.x).dist;
    l.bxx = k.at(nd.x, nd.x).beer;
    l.bxy = k.at(nd.x, nd.y).beer;
    l.byx = k.at(nd.y, nd.x).beer;
    l.byy = k.at(nd.y, nd.y).beer;
    return l;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// F1: bottom-up distances within G_mu
// ---------------------------------------------------------------------------

/// Builds and registers the prefix/RMQ tables of an S node from its
/// children's f1 values.
template <typename T>
void attach_snode_tables(TriIndex<T>& idx, int v) {
    const SpqrNode& nd = idx.tree.nodes[v];
    int k = static_cast<int>(nd.children.size());
    std::vector<int> chain(k + 1);
    std::vector<Weight<T>> dxy(k + 1), dyx(k + 1), bdxx(k + 1), bdxy(k + 1), bdyx(k + 1),
        bdyy(k + 1);
    chain[0] = nd.x;
    for (int i = 1; i <= k; ++i) {
        int c = nd.children[i - 1];
        const SpqrNode& cn = idx.tree.nodes[c];
        assert(cn.x == chain[i - 1]);
        chain[i] = cn.y;
        const KGraph<T>& f = idx.f1[c];
        dxy[i] = f.at(cn.x, cn.y).dist;
        dyx[i] = f.at(cn.y, cn.x).dist;
        bdxx[i] = f.at(cn.x, cn.x).beer;
        bdxy[i] = f.at(cn.x, cn.y).beer;
        bdyx[i] = f.at(cn.y, cn.x).beer;
        bdyy[i] = f.at(cn.y, cn.y).beer;
    }
    assert(chain[k] == nd.y);
    idx.s_slot[v] = static_cast<int>(idx.s_tables.size());
    idx.s_tables.push_back(SNodeTables<T>::build(chain, dxy, dyx, bdxx, bdxy, bdyx, bdyy));
}

template <typename T>
void attach_pnode_tables(TriIndex<T>& idx, int v) {
    const SpqrNode& nd = idx.tree.nodes[v];
    int k = static_cast<int>(nd.children.size());
    std::vector<Weight<T>> dxy(k), dyx(k), bxx(k), bxy(k), byx(k), byy(k);
    for (int i = 0; i < k; ++i) {
        int c = nd.children[i];
        assert(idx.tree.nodes[c].x == nd.x && idx.tree.nodes[c].y == nd.y);
        const KGraph<T>& f = idx.f1[c];
        dxy[i] = f.at(nd.x, nd.y).dist;
        dyx[i] = f.at(nd.y, nd.x).dist;
        bxx[i] = f.at(nd.x, nd.x).beer;
        bxy[i] = f.at(nd.x, nd.y).beer;
        byx[i] = f.at(nd.y, nd.x).beer;
        byy[i] = f.at(nd.y, nd.y).beer;
    }
    idx.p_slot[v] = static_cast<int>(idx.p_tables.size());
    idx.p_tables.push_back(PNodeTables<T>{k, RmqTable<T>(dxy), RmqTable<T>(dyx), RmqTable<T>(bxx),
                                          RmqTable<T>(bxy), RmqTable<T>(byx), RmqTable<T>(byy)});
}

template <typename T>
void compute_f1(TriIndex<T>& idx) {
    const SpqrTree& t = idx.tree;
    const BeerGraph<T>& g = idx.graph;
    idx.f1.assign(t.node_count(), KGraph<T>::bot());
    idx.s_slot.assign(t.node_count(), -1);
    idx.p_slot.assign(t.node_count(), -1);

    for (int v = t.node_count() - 1; v >= 0; --v) {
        if (v == t.root) continue;
        const SpqrNode& nd = t.nodes[v];
        switch (nd.kind) {
            case NodeKind::Q: {
                idx.f1[v] = detail::q_table(v, nd.x, nd.y, idx.edge_weight(nd.graph_edge, nd.x, nd.y),
                                            idx.edge_weight(nd.graph_edge, nd.y, nd.x),
                                            g.is_beer(nd.x), g.is_beer(nd.y));
                break;
            }
            case NodeKind::S: {
                attach_snode_tables(idx, v);
                const SNodeTables<T>& st = idx.stab(v);
                int k = st.k;
                KGraph<T> k1 = KGraph<T>::make_single(v, nd.x, nd.y);
                k1.at(nd.x, nd.x) = {Weight<T>::zero(), st.rt_x(1, k)};
                k1.at(nd.y, nd.y) = {Weight<T>::zero(), st.rt_y(1, k)};
                k1.at(nd.x, nd.y) = {st.sxy(1, k), st.sxy(1, k) + st.min_bxy(1, k)};
                k1.at(nd.y, nd.x) = {st.syx(1, k), st.syx(1, k) + st.min_byx(1, k)};
                idx.f1[v] = k1;
                break;
            }
            case NodeKind::P: {
                attach_pnode_tables(idx, v);
                const PNodeTables<T>& pt = idx.ptab(v);
                int k = pt.k;
                BranchMins<T> l{pt.dxy.query(1, k), pt.dyx.query(1, k), pt.bxx.query(1, k),
                                pt.bxy.query(1, k), pt.byx.query(1, k), pt.byy.query(1, k)};
                KGraph<T> k1 = KGraph<T>::make_single(v, nd.x, nd.y);
                fill_parallel_table(k1, nd.x, nd.y, l);
                idx.f1[v] = k1;
                break;
            }
            case NodeKind::R: {
                LocalGraph<T> h = detail::skeleton_graph(idx, v);
                std::vector<BeerSource<T>> sources;
                detail::add_child_sources(idx, v, -1, -1, sources);
                idx.f1[v] = kgraph_from_local(h, v, nd.x, nd.y, v, nd.x, nd.y, sources,
                                              &idx.build_stats);
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// F2: top-down distances within the complement of G_mu
// ---------------------------------------------------------------------------

template <typename T>
void compute_f2(TriIndex<T>& idx) {
    const SpqrTree& t = idx.tree;
    const BeerGraph<T>& g = idx.graph;
    idx.f2.assign(t.node_count(), KGraph<T>::bot());

    for (int v = 0; v < t.node_count(); ++v) {
        if (v == t.root) continue;
        const SpqrNode& nd = t.nodes[v];
        if (v == t.root_child) {
            // only the reference edge remains
            idx.f2[v] = detail::q_table(v, nd.x, nd.y, idx.edge_weight(t.ref_edge, nd.x, nd.y),
                                        idx.edge_weight(t.ref_edge, nd.y, nd.x), g.is_beer(nd.x),
                                        g.is_beer(nd.y));
            continue;
        }
        int par = nd.parent;
        const SpqrNode& pn = t.nodes[par];
        int i = idx.pos_in_parent[v];
        switch (pn.kind) {
            case NodeKind::S: {
                const SNodeTables<T>& st = idx.stab(par);
                int k = st.k;
                const KGraph<T>& pf2 = idx.f2[par];
                Weight<T> d2xy = pf2.at(pn.x, pn.y).dist, d2yx = pf2.at(pn.y, pn.x).dist;
                Weight<T> b2xx = pf2.at(pn.x, pn.x).beer, b2xy = pf2.at(pn.x, pn.y).beer;
                Weight<T> b2yx = pf2.at(pn.y, pn.x).beer, b2yy = pf2.at(pn.y, pn.y).beer;

                KGraph<T> k2 = KGraph<T>::make_single(v, nd.x, nd.y);
                Weight<T> dxy = st.syx(1, i - 1) + d2xy + st.syx(i + 1, k);
                Weight<T> dyx = st.sxy(i + 1, k) + d2yx + st.sxy(1, i - 1);
                Weight<T> exy = min(min(st.min_byx(1, i - 1), st.min_byx(i + 1, k)),
                                    extra_over(b2xy, d2xy));
                Weight<T> eyx = min(min(st.min_bxy(1, i - 1), st.min_bxy(i + 1, k)),
                                    extra_over(b2yx, d2yx));
                k2.at(nd.x, nd.y) = {dxy, dxy + exy};
                k2.at(nd.y, nd.x) = {dyx, dyx + eyx};
                k2.at(nd.x, nd.x) = {
                    Weight<T>::zero(),
                    min(min(st.rt_y(1, i - 1),
                            st.syx(1, i - 1) + b2xx + st.sxy(1, i - 1)),
                        st.syx(1, i - 1) + d2xy + st.rt_y(i + 1, k) + d2yx + st.sxy(1, i - 1))};
                k2.at(nd.y, nd.y) = {
                    Weight<T>::zero(),
                    min(min(st.rt_x(i + 1, k),
                            st.sxy(i + 1, k) + b2yy + st.syx(i + 1, k)),
                        st.sxy(i + 1, k) + d2yx + st.rt_x(1, i - 1) + d2xy + st.syx(i + 1, k))};
                idx.f2[v] = k2;
                break;
            }
            case NodeKind::P: {
                assert(nd.x == pn.x && nd.y == pn.y);
                BranchMins<T> l =
                    min(detail::sibling_mins(idx, par, i, -1), detail::f2_branch(idx, par));
                KGraph<T> k2 = KGraph<T>::make_single(v, nd.x, nd.y);
                fill_parallel_table(k2, nd.x, nd.y, l);
                idx.f2[v] = k2;
                break;
            }
            case NodeKind::R: {
                detail::ensure_r_base(idx, par);
                std::vector<BeerSource<T>> sources;
                detail::add_child_sources(idx, par, i - 1, -1, sources);
                detail::add_f2_sources(idx, par, sources);
                idx.f2[v] = kgraph_from_local(idx.r_base[par], v, nd.x, nd.y, v, nd.x, nd.y,
                                              sources, &idx.build_stats, i - 1);
                break;
            }
            default:
                assert(false && "Q nodes have no children");
        }
    }
}

// ---------------------------------------------------------------------------
// F3: distances in G_mu minus a child subgraph, per tree edge
// ---------------------------------------------------------------------------

/// F3({parent(child), child}), computed on demand. `stats` counts Dijkstra
/// work for R parents.
template <typename T>
KGraph<T> compute_f3_value(const TriIndex<T>& idx, int child, QueryStats* stats) {
    const SpqrTree& t = idx.tree;
    const SpqrNode& nd = t.nodes[child];
    int par = nd.parent;
    const SpqrNode& pn = t.nodes[par];
    int i = idx.pos_in_parent[child];
    switch (pn.kind) {
        case NodeKind::S: {
            const SNodeTables<T>& st = idx.stab(par);
            int k = st.k;
            KGraph<T> k3 = KGraph<T>::make(par, pn.x, pn.y, child, nd.x, nd.y);
            // left piece spans chain positions [1, i-1]
            if (i == 1) {
                k3.relax(pn.x, pn.x,
                         DistPair<T>::self(idx.graph.is_beer(pn.x)));
            } else {
                k3.relax(pn.x, pn.x, {Weight<T>::zero(), st.rt_x(1, i - 1)});
                k3.relax(nd.x, nd.x, {Weight<T>::zero(), st.rt_y(1, i - 1)});
                k3.relax(pn.x, nd.x,
                         {st.sxy(1, i - 1), st.sxy(1, i - 1) + st.min_bxy(1, i - 1)});
                k3.relax(nd.x, pn.x,
                         {st.syx(1, i - 1), st.syx(1, i - 1) + st.min_byx(1, i - 1)});
            }
            // right piece spans [i+1, k]
            if (i == k) {
                k3.relax(pn.y, pn.y, DistPair<T>::self(idx.graph.is_beer(pn.y)));
            } else {
                k3.relax(nd.y, nd.y, {Weight<T>::zero(), st.rt_x(i + 1, k)});
                k3.relax(pn.y, pn.y, {Weight<T>::zero(), st.rt_y(i + 1, k)});
                k3.relax(nd.y, pn.y,
                         {st.sxy(i + 1, k), st.sxy(i + 1, k) + st.min_bxy(i + 1, k)});
                k3.relax(pn.y, nd.y,
                         {st.syx(i + 1, k), st.syx(i + 1, k) + st.min_byx(i + 1, k)});
            }
            return k3;
        }
        case NodeKind::P: {
            KGraph<T> k3 = KGraph<T>::make(par, pn.x, pn.y, child, nd.x, nd.y);
            fill_parallel_table(k3, pn.x, pn.y, detail::sibling_mins(idx, par, i, -1));
            return k3;
        }
        case NodeKind::R: {
            std::vector<BeerSource<T>> sources;
            detail::add_child_sources(idx, par, i - 1, -1, sources);
            return kgraph_from_local(idx.r_base[par], par, pn.x, pn.y, child, nd.x, nd.y, sources,
                                     stats, i - 1, kRefArcTag);
        }
        default:
            assert(false);
            return KGraph<T>::bot();
    }
}

template <typename T>
void compute_f3(TriIndex<T>& idx) {
    const SpqrTree& t = idx.tree;
    idx.f3.assign(t.node_count(), KGraph<T>::bot());
    for (int v = 0; v < t.node_count(); ++v) {
        if (v == t.root || v == t.root_child) continue;
        idx.f3[v] = compute_f3_value(idx, v, &idx.build_stats);
    }
}

// ---------------------------------------------------------------------------
// F4: distances in the complement of two sibling subgraphs
// ---------------------------------------------------------------------------

/// F4({a, b}) for two children of `par`, identified by their positions
/// (1-based). O(1) for S and P parents; Dijkstra work on R parents unless a
/// stored F4R table is available.
template <typename T>
KGraph<T> compute_f4_value(const TriIndex<T>& idx, int par, int pos_i, int pos_j,
                           QueryStats* stats) {
    const SpqrTree& t = idx.tree;
    const SpqrNode& pn = t.nodes[par];
    if (pos_i > pos_j) std::swap(pos_i, pos_j);
    int ci = pn.children[pos_i - 1], cj = pn.children[pos_j - 1];
    const SpqrNode& ni = t.nodes[ci];
    const SpqrNode& nj = t.nodes[cj];
    switch (pn.kind) {
        case NodeKind::S: {
            const SNodeTables<T>& st = idx.stab(par);
            int k = st.k;
            int i = pos_i, j = pos_j;
            const KGraph<T>& pf2 = idx.f2[par];
            Weight<T> d2xy = pf2.at(pn.x, pn.y).dist, d2yx = pf2.at(pn.y, pn.x).dist;
            Weight<T> b2xx = pf2.at(pn.x, pn.x).beer, b2xy = pf2.at(pn.x, pn.y).beer;
            Weight<T> b2yx = pf2.at(pn.y, pn.x).beer, b2yy = pf2.at(pn.y, pn.y).beer;

            KGraph<T> k4 = KGraph<T>::make(ci, ni.x, ni.y, cj, nj.x, nj.y);
            // inner piece: chain positions [i+1, j-1] between y_i and x_j
            if (j == i + 1) {
                k4.relax(ni.y, ni.y, DistPair<T>::self(idx.graph.is_beer(ni.y)));
            } else {
                k4.relax(ni.y, ni.y, {Weight<T>::zero(), st.rt_x(i + 1, j - 1)});
                k4.relax(nj.x, nj.x, {Weight<T>::zero(), st.rt_y(i + 1, j - 1)});
                k4.relax(ni.y, nj.x,
                         {st.sxy(i + 1, j - 1), st.sxy(i + 1, j - 1) + st.min_bxy(i + 1, j - 1)});
                k4.relax(nj.x, ni.y,
                         {st.syx(i + 1, j - 1), st.syx(i + 1, j - 1) + st.min_byx(i + 1, j - 1)});
            }
            // outer piece: [j+1, k], the complement edge, then [1, i-1]
            Weight<T> doxy = st.syx(1, i - 1) + d2xy + st.syx(j + 1, k);
            Weight<T> doyx = st.sxy(j + 1, k) + d2yx + st.sxy(1, i - 1);
            Weight<T> eoxy = min(min(st.min_byx(1, i - 1), st.min_byx(j + 1, k)),
                                 extra_over(b2xy, d2xy));
            Weight<T> eoyx = min(min(st.min_bxy(1, i - 1), st.min_bxy(j + 1, k)),
                                 extra_over(b2yx, d2yx));
            k4.relax(ni.x, nj.y, {doxy, doxy + eoxy});
            k4.relax(nj.y, ni.x, {doyx, doyx + eoyx});
            k4.relax(ni.x, ni.x,
                     {Weight<T>::zero(),
                      min(min(st.rt_y(1, i - 1), st.syx(1, i - 1) + b2xx + st.sxy(1, i - 1)),
                          st.syx(1, i - 1) + d2xy + st.rt_y(j + 1, k) + d2yx + st.sxy(1, i - 1))});
            k4.relax(nj.y, nj.y,
                     {Weight<T>::zero(),
                      min(min(st.rt_x(j + 1, k), st.sxy(j + 1, k) + b2yy + st.syx(j + 1, k)),
                          st.sxy(j + 1, k) + d2yx + st.rt_x(1, i - 1) + d2xy + st.syx(j + 1, k))});
            return k4;
        }
        case NodeKind::P: {
            BranchMins<T> l =
                min(detail::sibling_mins(idx, par, pos_i, pos_j), detail::f2_branch(idx, par));
            KGraph<T> k4 = KGraph<T>::make(ci, ni.x, ni.y, cj, nj.x, nj.y);
            fill_parallel_table(k4, pn.x, pn.y, l);
            return k4;
        }
        case NodeKind::R: {
            if (!idx.f4r.empty() && !idx.f4r[par].empty()) {
                int c = static_cast<int>(pn.children.size());
                int a = pos_i - 1, b = pos_j - 1;
                int flat = a * (2 * c - a - 1) / 2 + (b - a - 1);
                return idx.f4r[par][flat];
            }
            std::vector<BeerSource<T>> sources;
            detail::add_child_sources(idx, par, pos_i - 1, pos_j - 1, sources);
            detail::add_f2_sources(idx, par, sources);
            return kgraph_from_local(idx.r_base[par], ci, ni.x, ni.y, cj, nj.x, nj.y, sources,
                                     stats, pos_i - 1, pos_j - 1);
        }
        default:
            assert(false);
            return KGraph<T>::bot();
    }
}

template <typename T>
void compute_f4r(TriIndex<T>& idx) {
    const SpqrTree& t = idx.tree;
    idx.f4r.assign(t.node_count(), {});
    for (int v = 0; v < t.node_count(); ++v) {
        if (t.nodes[v].kind != NodeKind::R) continue;
        int c = static_cast<int>(t.nodes[v].children.size());
        std::vector<KGraph<T>> table;
        table.reserve(static_cast<size_t>(c) * (c - 1) / 2);
        for (int a = 1; a <= c; ++a)
            for (int b = a + 1; b <= c; ++b)
                table.push_back(compute_f4_value(idx, v, a, b, &idx.build_stats));
        idx.f4r[v] = std::move(table);
    }
}

// ---------------------------------------------------------------------------

template <typename T>
void build_derived_structures(TriIndex<T>& idx) {
    const SpqrTree& t = idx.tree;
    std::vector<int> parent(t.node_count());
    for (int v = 0; v < t.node_count(); ++v) parent[v] = t.nodes[v].parent;
    idx.lca = LcaIndex(parent, t.root);
    if (idx.strategy != Strategy::F12) {
        idx.tp = TreeProductIndex<KGraph<T>, HatOp<T>>(parent, t.root, idx.f3);
    }
}

template <typename T>
TriIndex<T> build_tri_index(const BeerGraph<T>& g, Strategy strategy, int ref_edge = 0) {
    TriIndex<T> idx;
    idx.graph = g;
    idx.tree = build_spqr(g, ref_edge);
    idx.strategy = strategy;
    idx.pos_in_parent.assign(idx.tree.node_count(), 0);
    for (int v = 0; v < idx.tree.node_count(); ++v) {
        const auto& ch = idx.tree.nodes[v].children;
        for (size_t p = 0; p < ch.size(); ++p) idx.pos_in_parent[ch[p]] = static_cast<int>(p) + 1;
    }
    idx.r_base.assign(idx.tree.node_count(), {});
    compute_f1(idx);
    compute_f2(idx);
    if (strategy != Strategy::F12) compute_f3(idx);
    if (strategy == Strategy::F1234R) compute_f4r(idx);
    build_derived_structures(idx);
    return idx;
}

}  // namespace beerpath
