#pragma once

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <variant>

#include "beerpath/td.hpp"
#include "beerpath/tri_index.hpp"
#include "beerpath/tri_query.hpp"

// Versioned binary index container. Layout (little endian):
//   magic "BPIX1", u8 version, u8 weight mode, u8 directed, u8 strategy,
//   graph section, then the strategy-selected tables. Derived structures
//   (S/P tables, LCA, tree products) are rebuilt on load; the persisted
//   tables make reloads reproduce query answers bit-exactly.

namespace beerpath {

struct SerializeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace ser {

inline void put_bytes(std::ostream& os, const void* p, size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}
inline void get_bytes(std::istream& in, void* p, size_t n) {
    if (!in.read(static_cast<char*>(p), static_cast<std::streamsize>(n)))
        throw SerializeError("unexpected end of index file");
}

inline void put_u8(std::ostream& os, std::uint8_t v) { put_bytes(os, &v, 1); }
inline std::uint8_t get_u8(std::istream& in) {
    std::uint8_t v;
    get_bytes(in, &v, 1);
    return v;
}
inline void put_i32(std::ostream& os, std::int32_t v) { put_bytes(os, &v, 4); }
inline std::int32_t get_i32(std::istream& in) {
    std::int32_t v;
    get_bytes(in, &v, 4);
    return v;
}
inline void put_i64(std::ostream& os, std::int64_t v) { put_bytes(os, &v, 8); }
inline std::int64_t get_i64(std::istream& in) {
    std::int64_t v;
    get_bytes(in, &v, 8);
    return v;
}

template <typename T>
void put_weight(std::ostream& os, Weight<T> w) {
    put_u8(os, w.is_inf() ? 1 : 0);
    if constexpr (std::is_same_v<T, double>) {
        double v = w.is_inf() ? 0.0 : w.value();
        std::int64_t bits;
        std::memcpy(&bits, &v, 8);
        put_i64(os, bits);
    } else {
        put_i64(os, w.is_inf() ? 0 : w.value());
    }
}

template <typename T>
Weight<T> get_weight(std::istream& in) {
    bool inf = get_u8(in) != 0;
    std::int64_t bits = get_i64(in);
    if (inf) return Weight<T>::infinity();
    if constexpr (std::is_same_v<T, double>) {
        double v;
        std::memcpy(&v, &bits, 8);
        return Weight<T>(v);
    } else {
        return Weight<T>(bits);
    }
}

template <typename T>
void put_pair(std::ostream& os, const DistPair<T>& p) {
    put_weight(os, p.dist);
    put_weight(os, p.beer);
}
template <typename T>
DistPair<T> get_pair(std::istream& in) {
    DistPair<T> p;
    p.dist = get_weight<T>(in);
    p.beer = get_weight<T>(in);
    return p;
}

template <typename T>
void put_kgraph(std::ostream& os, const KGraph<T>& k) {
    put_u8(os, k.bottom ? 1 : 0);
    if (k.bottom) return;
    put_i32(os, k.mu);
    put_i32(os, k.lambda);
    put_i32(os, k.mu_x);
    put_i32(os, k.mu_y);
    put_i32(os, k.la_x);
    put_i32(os, k.la_y);
    for (int i = 0; i < k.nv; ++i)
        for (int j = 0; j < k.nv; ++j) put_pair(os, k.w[i][j]);
}

template <typename T>
KGraph<T> get_kgraph(std::istream& in) {
    if (get_u8(in)) return KGraph<T>::bot();
    int mu = get_i32(in), la = get_i32(in);
    int mx = get_i32(in), my = get_i32(in), lx = get_i32(in), ly = get_i32(in);
    KGraph<T> k = KGraph<T>::make(mu, mx, my, la, lx, ly);
    for (int i = 0; i < k.nv; ++i)
        for (int j = 0; j < k.nv; ++j) k.w[i][j] = get_pair<T>(in);
    return k;
}

inline void put_ints(std::ostream& os, const std::vector<int>& v) {
    put_i32(os, static_cast<std::int32_t>(v.size()));
    for (int x : v) put_i32(os, x);
}
inline std::vector<int> get_ints(std::istream& in) {
    int n = get_i32(in);
    if (n < 0) throw SerializeError("negative list length");
    std::vector<int> v(n);
    for (int& x : v) x = get_i32(in);
    return v;
}

template <typename T>
void put_bag_kgraph(std::ostream& os, const BagKGraph<T>& k) {
    put_u8(os, k.bottom ? 1 : 0);
    if (k.bottom) return;
    put_i32(os, k.mu);
    put_i32(os, k.la);
    put_ints(os, k.mu_terms);
    put_ints(os, k.la_terms);
    for (const auto& p : k.w) put_pair(os, p);
}

template <typename T>
BagKGraph<T> get_bag_kgraph(std::istream& in) {
    if (get_u8(in)) return BagKGraph<T>::bot();
    int mu = get_i32(in), la = get_i32(in);
    auto mt = get_ints(in);
    auto lt = get_ints(in);
    BagKGraph<T> k = BagKGraph<T>::make(mu, std::move(mt), la, std::move(lt));
    for (auto& p : k.w) p = get_pair<T>(in);
    return k;
}

template <typename T>
void put_graph(std::ostream& os, const BeerGraph<T>& g) {
    put_i32(os, g.n);
    put_i32(os, g.m());
    for (const auto& e : g.edges) {
        put_i32(os, e.u);
        put_i32(os, e.v);
        put_weight(os, e.wuv);
        put_weight(os, e.wvu);
    }
    put_ints(os, g.beer_vertices());
}

template <typename T>
BeerGraph<T> get_graph(std::istream& in, bool directed) {
    BeerGraph<T> g;
    g.directed = directed;
    g.n = get_i32(in);
    int m = get_i32(in);
    g.beer.assign(static_cast<size_t>(g.n) + 1, 0);
    for (int e = 0; e < m; ++e) {
        int u = get_i32(in), v = get_i32(in);
        auto wuv = get_weight<T>(in);
        auto wvu = get_weight<T>(in);
        g.add_edge(u, v, wuv, wvu);
    }
    for (int b : get_ints(in)) g.beer[b] = 1;
    return g;
}

}  // namespace ser

constexpr char kIndexMagic[5] = {'B', 'P', 'I', 'X', '1'};

struct IndexHeader {
    bool real_mode = false;
    bool directed = false;
    int strategy = 0;  // 0 f12, 1 f123, 2 f1234r, 3 td
};

inline void write_header(std::ostream& os, const IndexHeader& h) {
    ser::put_bytes(os, kIndexMagic, 5);
    ser::put_u8(os, 1);
    ser::put_u8(os, h.real_mode ? 1 : 0);
    ser::put_u8(os, h.directed ? 1 : 0);
    ser::put_u8(os, static_cast<std::uint8_t>(h.strategy));
}

inline IndexHeader read_header(std::istream& in) {
    char magic[5];
    ser::get_bytes(in, magic, 5);
    if (std::memcmp(magic, kIndexMagic, 5) != 0)
        throw SerializeError("bad magic: not a beerpath index file");
    if (ser::get_u8(in) != 1) throw SerializeError("unsupported index version");
    IndexHeader h;
    h.real_mode = ser::get_u8(in) != 0;
    h.directed = ser::get_u8(in) != 0;
    h.strategy = ser::get_u8(in);
    if (h.strategy > 3) throw SerializeError("unknown strategy byte");
    return h;
}

template <typename T>
void save_index(const TriIndex<T>& idx, std::ostream& os) {
    IndexHeader h;
    h.real_mode = std::is_same_v<T, double>;
    h.directed = idx.graph.directed;
    h.strategy = static_cast<int>(idx.strategy);
    write_header(os, h);
    ser::put_graph(os, idx.graph);

    const SpqrTree& t = idx.tree;
    ser::put_i32(os, t.ref_edge);
    ser::put_i32(os, t.node_count());
    ser::put_i32(os, t.root);
    ser::put_i32(os, t.root_child);
    for (const auto& nd : t.nodes) {
        ser::put_u8(os, static_cast<std::uint8_t>(nd.kind));
        ser::put_i32(os, nd.parent);
        ser::put_i32(os, nd.x);
        ser::put_i32(os, nd.y);
        ser::put_i32(os, nd.graph_edge);
        ser::put_ints(os, nd.children);
    }
    std::vector<int> vq(t.vertex_qnode.begin() + 1, t.vertex_qnode.end());
    ser::put_ints(os, vq);

    for (int v = 0; v < t.node_count(); ++v)
        if (v != t.root) ser::put_kgraph(os, idx.f1[v]);
    for (int v = 0; v < t.node_count(); ++v)
        if (v != t.root) ser::put_kgraph(os, idx.f2[v]);
    if (idx.strategy != Strategy::F12) {
        for (int v = 0; v < t.node_count(); ++v)
            if (v != t.root && v != t.root_child) ser::put_kgraph(os, idx.f3[v]);
    }
    if (idx.strategy == Strategy::F1234R) {
        for (int v = 0; v < t.node_count(); ++v) {
            if (t.nodes[v].kind != NodeKind::R) continue;
            ser::put_i32(os, static_cast<std::int32_t>(idx.f4r[v].size()));
            for (const auto& k : idx.f4r[v]) ser::put_kgraph(os, k);
        }
    }
}

template <typename T>
TriIndex<T> load_tri_index(std::istream& in, const IndexHeader& h) {
    TriIndex<T> idx;
    idx.strategy = static_cast<Strategy>(h.strategy);
    idx.graph = ser::get_graph<T>(in, h.directed);

    SpqrTree& t = idx.tree;
    t.n = idx.graph.n;
    t.ref_edge = ser::get_i32(in);
    int nodes = ser::get_i32(in);
    t.root = ser::get_i32(in);
    t.root_child = ser::get_i32(in);
    t.nodes.resize(nodes);
    for (auto& nd : t.nodes) {
        nd.kind = static_cast<NodeKind>(ser::get_u8(in));
        nd.parent = ser::get_i32(in);
        nd.x = ser::get_i32(in);
        nd.y = ser::get_i32(in);
        nd.graph_edge = ser::get_i32(in);
        nd.children = ser::get_ints(in);
    }
    auto vq = ser::get_ints(in);
    t.vertex_qnode.assign(static_cast<size_t>(t.n) + 1, -1);
    for (int v = 1; v <= t.n; ++v) t.vertex_qnode[v] = vq[v - 1];

    // skeletons, depths, edge map and r are all derivable
    t.edge_qnode.assign(idx.graph.m(), -1);
    for (int v = 0; v < nodes; ++v) {
        SpqrNode& nd = t.nodes[v];
        nd.skeleton.clear();
        if (v == t.root) {
            nd.skeleton.push_back({nd.x, nd.y, -1, t.ref_edge, true});
            t.edge_qnode[t.ref_edge] = v;
            continue;
        }
        nd.skeleton.push_back({nd.x, nd.y, -1, -1, true});
        if (nd.kind == NodeKind::Q) {
            const auto& e = idx.graph.edges[nd.graph_edge];
            nd.skeleton.push_back({e.u, e.v, -1, nd.graph_edge, false});
            t.edge_qnode[nd.graph_edge] = v;
        } else {
            for (size_t p = 0; p < nd.children.size(); ++p) {
                const SpqrNode& cn = t.nodes[nd.children[p]];
                nd.skeleton.push_back({cn.x, cn.y, static_cast<int>(p), -1, false});
            }
        }
    }
    t.nodes[t.root].depth = 0;
    t.nodes[t.root_child].depth = 1;
    for (int v = 0; v < nodes; ++v) {
        if (v == t.root) continue;
        for (int c : t.nodes[v].children) t.nodes[c].depth = t.nodes[v].depth + 1;
    }
    t.r = 0;
    for (const auto& nd : t.nodes)
        if (nd.kind == NodeKind::R) t.r = std::max(t.r, nd.skeleton_edge_count());

    idx.pos_in_parent.assign(nodes, 0);
    for (int v = 0; v < nodes; ++v) {
        const auto& ch = t.nodes[v].children;
        for (size_t p = 0; p < ch.size(); ++p) idx.pos_in_parent[ch[p]] = static_cast<int>(p) + 1;
    }

    idx.f1.assign(nodes, KGraph<T>::bot());
    idx.f2.assign(nodes, KGraph<T>::bot());
    for (int v = 0; v < nodes; ++v)
        if (v != t.root) idx.f1[v] = ser::get_kgraph<T>(in);
    for (int v = 0; v < nodes; ++v)
        if (v != t.root) idx.f2[v] = ser::get_kgraph<T>(in);
    if (idx.strategy != Strategy::F12) {
        idx.f3.assign(nodes, KGraph<T>::bot());
        for (int v = 0; v < nodes; ++v)
            if (v != t.root && v != t.root_child) idx.f3[v] = ser::get_kgraph<T>(in);
    }
    if (idx.strategy == Strategy::F1234R) {
        idx.f4r.assign(nodes, {});
        for (int v = 0; v < nodes; ++v) {
            if (t.nodes[v].kind != NodeKind::R) continue;
            int cnt = ser::get_i32(in);
            idx.f4r[v].reserve(cnt);
            for (int i = 0; i < cnt; ++i) idx.f4r[v].push_back(ser::get_kgraph<T>(in));
        }
    }

    idx.s_slot.assign(nodes, -1);
    idx.p_slot.assign(nodes, -1);
    for (int v = nodes - 1; v >= 0; --v) {
        if (v == t.root) continue;
        if (t.nodes[v].kind == NodeKind::S) attach_snode_tables(idx, v);
        if (t.nodes[v].kind == NodeKind::P) attach_pnode_tables(idx, v);
    }
    idx.r_base.assign(nodes, {});
    for (int v = 0; v < nodes; ++v)
        if (t.nodes[v].kind == NodeKind::R) detail::ensure_r_base(idx, v);
    build_derived_structures(idx);
    return idx;
}

template <typename T>
void save_index(const TdIndex<T>& idx, std::ostream& os) {
    IndexHeader h;
    h.real_mode = std::is_same_v<T, double>;
    h.directed = idx.graph.directed;
    h.strategy = 3;
    write_header(os, h);
    ser::put_graph(os, idx.graph);

    ser::put_i32(os, idx.td.node_count());
    for (const auto& b : idx.td.bags) ser::put_ints(os, b);
    ser::put_ints(os, idx.td.parent);

    auto put_table = [&](const std::vector<BagKGraph<T>>& tab) {
        for (const auto& k : tab) ser::put_bag_kgraph(os, k);
    };
    put_table(idx.g1);
    put_table(idx.f1);
    put_table(idx.f2);
    put_table(idx.f3);
    for (const auto& pairs : idx.f4) {
        ser::put_i32(os, static_cast<std::int32_t>(pairs.size()));
        for (const auto& k : pairs) ser::put_bag_kgraph(os, k);
    }
}

template <typename T>
TdIndex<T> load_td_index(std::istream& in, const IndexHeader& h) {
    TdIndex<T> idx;
    idx.graph = ser::get_graph<T>(in, h.directed);
    int nb = ser::get_i32(in);
    idx.td.n = idx.graph.n;
    idx.td.bags.resize(nb);
    for (auto& b : idx.td.bags) b = ser::get_ints(in);
    idx.td.parent = ser::get_ints(in);

    idx.children.assign(nb, {});
    for (int v = 1; v < nb; ++v) idx.children[idx.td.parent[v]].push_back(v);
    idx.a_set.assign(nb, {});
    idx.a_set[0] = idx.td.bags[0];
    for (int v = 1; v < nb; ++v)
        std::set_intersection(idx.td.bags[v].begin(), idx.td.bags[v].end(),
                              idx.td.bags[idx.td.parent[v]].begin(),
                              idx.td.bags[idx.td.parent[v]].end(),
                              std::back_inserter(idx.a_set[v]));
    idx.bag_edges.assign(nb, {});
    for (int e = 0; e < idx.graph.m(); ++e)
        for (int b = 0; b < nb; ++b)
            if (idx.td.bag_contains(b, idx.graph.edges[e].u) &&
                idx.td.bag_contains(b, idx.graph.edges[e].v))
                idx.bag_edges[b].push_back(e);

    auto get_table = [&](std::vector<BagKGraph<T>>& tab) {
        tab.resize(nb);
        for (auto& k : tab) k = ser::get_bag_kgraph<T>(in);
    };
    get_table(idx.g1);
    get_table(idx.f1);
    get_table(idx.f2);
    get_table(idx.f3);
    idx.f4.assign(nb, {});
    for (int v = 0; v < nb; ++v) {
        int cnt = ser::get_i32(in);
        idx.f4[v].reserve(cnt);
        for (int i = 0; i < cnt; ++i) idx.f4[v].push_back(ser::get_bag_kgraph<T>(in));
    }

    idx.lca = LcaIndex(idx.td.parent, 0);
    idx.tp = TreeProductIndex<BagKGraph<T>, BagHatOp<T>>(idx.td.parent, 0, idx.f3);
    idx.shallowest_bag.assign(static_cast<size_t>(idx.graph.n) + 1, -1);
    for (int b = 0; b < nb; ++b)
        for (int v : idx.td.bags[b])
            if (idx.shallowest_bag[v] < 0 ||
                idx.lca.depth(b) < idx.lca.depth(idx.shallowest_bag[v]))
                idx.shallowest_bag[v] = b;
    return idx;
}

// file helpers ---------------------------------------------------------------

template <typename IndexT>
void save_index_file(const IndexT& idx, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw SerializeError("cannot open " + path + " for writing");
    save_index(idx, f);
}

inline IndexHeader peek_index_header(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SerializeError("cannot open " + path);
    return read_header(f);
}

using AnyIndex = std::variant<TriIndex<std::int64_t>, TriIndex<double>, TdIndex<std::int64_t>,
                              TdIndex<double>>;

inline AnyIndex load_index_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SerializeError("cannot open " + path);
    IndexHeader h = read_header(f);
    if (h.strategy == 3) {
        if (h.real_mode) return load_td_index<double>(f, h);
        return load_td_index<std::int64_t>(f, h);
    }
    if (h.real_mode) return load_tri_index<double>(f, h);
    return load_tri_index<std::int64_t>(f, h);
}

}  // namespace beerpath
