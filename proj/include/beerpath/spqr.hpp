#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beerpath/graph.hpp"

namespace beerpath {

enum class NodeKind : std::uint8_t { S, P, Q, R };

inline char kind_letter(NodeKind k) {
    switch (k) {
        case NodeKind::S: return 'S';
        case NodeKind::P: return 'P';
        case NodeKind::Q: return 'Q';
        default: return 'R';
    }
}

/// One skeleton edge: the reference edge, a virtual edge standing for a
/// child subtree, or (Q nodes only) a real graph edge.
struct SkeletonEdge {
    int u = 0, v = 0;     // virtual edges are oriented (x_child, y_child)
    int child = -1;       // position in the node's children list
    int graph_edge = -1;  // original edge id
    bool is_ref = false;
};

struct SpqrNode {
    NodeKind kind = NodeKind::Q;
    int parent = -1;
    int x = 0, y = 0;  // reference pair (x_mu, y_mu)
    int graph_edge = -1;  // Q nodes: the real edge this node represents
    int depth = 0;
    std::vector<int> children;
    std::vector<SkeletonEdge> skeleton;

    int skeleton_edge_count() const { return static_cast<int>(skeleton.size()); }
};

/// Rooted SPQR tree. The root rho is a Q node whose skeleton holds only the
/// reference edge; its single child rho' carries the rest of the graph.
struct SpqrTree {
    int n = 0;
    int ref_edge = -1;
    int root = -1;
    int root_child = -1;
    int r = 0;  // max R-skeleton edge count, 0 if no R node
    std::vector<SpqrNode> nodes;
    std::vector<int> edge_qnode;    // per graph edge; the reference edge maps to rho
    std::vector<int> vertex_qnode;  // per graph vertex; never rho

    int r_plus() const { return r < 1 ? 1 : r; }
    int node_count() const { return static_cast<int>(nodes.size()); }

    int count(NodeKind k) const {
        int c = 0;
        for (const auto& nd : nodes)
            if (nd.kind == k) ++c;
        return c;
    }
};

using EdgeEnds = std::vector<std::pair<int, int>>;

template <typename T>
EdgeEnds edge_endpoints(const BeerGraph<T>& g) {
    EdgeEnds ends;
    ends.reserve(g.edges.size());
    for (const auto& e : g.edges) ends.push_back({e.u, e.v});
    return ends;
}

/// All split pairs of a connected multigraph: pairs {u,v} that are adjacent
/// or whose removal disconnects the rest. Intended for small inputs.
inline std::vector<std::pair<int, int>> split_pairs(int n, const EdgeEnds& ends) {
    std::vector<std::pair<int, int>> out;
    std::vector<std::vector<int>> adj(static_cast<size_t>(n) + 1);
    for (int e = 0; e < static_cast<int>(ends.size()); ++e) {
        adj[ends[e].first].push_back(e);
        adj[ends[e].second].push_back(e);
    }
    std::vector<char> seen(static_cast<size_t>(n) + 1);
    for (int u = 1; u <= n; ++u) {
        for (int v = u + 1; v <= n; ++v) {
            bool adjacent = false;
            for (int e : adj[u]) {
                int o = ends[e].first == u ? ends[e].second : ends[e].first;
                if (o == v) adjacent = true;
            }
            if (!adjacent) {
                // BFS over remaining vertices
                std::fill(seen.begin(), seen.end(), 0);
                seen[u] = seen[v] = 1;
                int start = 0;
                for (int w = 1; w <= n; ++w)
                    if (w != u && w != v) {
                        start = w;
                        break;
                    }
                if (start == 0) continue;
                std::vector<int> bfs{start};
                seen[start] = 1;
                int cnt = 1;
                while (!bfs.empty()) {
                    int w = bfs.back();
                    bfs.pop_back();
                    for (int e : adj[w]) {
                        int o = ends[e].first == w ? ends[e].second : ends[e].first;
                        if (!seen[o]) {
                            seen[o] = 1;
                            ++cnt;
                            bfs.push_back(o);
                        }
                    }
                }
                if (cnt < n - 2) out.push_back({u, v});
            } else {
                out.push_back({u, v});
            }
        }
    }
    return out;
}

namespace detail {

class SpqrBuilder {
public:
    SpqrBuilder(int n, const EdgeEnds& ends) : n_(n), ends_(ends) {}

    SpqrTree build(int ref_edge) {
        if (ref_edge < 0 || ref_edge >= static_cast<int>(ends_.size()))
            throw ReferenceEdgeMissing("reference edge index out of range");
        tree_.n = n_;
        tree_.ref_edge = ref_edge;
        tree_.edge_qnode.assign(ends_.size(), -1);
        std::vector<int> eids;
        eids.reserve(ends_.size() - 1);
        for (int e = 0; e < static_cast<int>(ends_.size()); ++e)
            if (e != ref_edge) eids.push_back(e);
        auto [x, y] = ends_[ref_edge];

        int rc = build_rec(eids, x, y);

        int rho = new_node(NodeKind::Q, x, y);
        tree_.nodes[rho].graph_edge = ref_edge;
        tree_.nodes[rho].skeleton.push_back({x, y, -1, ref_edge, true});
        tree_.nodes[rho].children.push_back(rc);
        tree_.nodes[rc].parent = rho;
        tree_.edge_qnode[ref_edge] = rho;
        tree_.root = rho;
        tree_.root_child = rc;

        finalize();
        return std::move(tree_);
    }

private:
    int n_;
    const EdgeEnds& ends_;
    SpqrTree tree_;

    int new_node(NodeKind k, int x, int y) {
        SpqrNode nd;
        nd.kind = k;
        nd.x = x;
        nd.y = y;
        tree_.nodes.push_back(std::move(nd));
        return static_cast<int>(tree_.nodes.size()) - 1;
    }

    struct ChildSpec {
        std::vector<int> edges;
        int x, y;
        int order_key;
    };

    int attach_children(int id, std::vector<ChildSpec>& specs) {
        std::sort(specs.begin(), specs.end(),
                  [](const ChildSpec& a, const ChildSpec& b) { return a.order_key < b.order_key; });
        SpqrNode& nd0 = tree_.nodes[id];
        nd0.skeleton.push_back({nd0.x, nd0.y, -1, -1, true});
        for (auto& sp : specs) {
            int cid = build_rec(sp.edges, sp.x, sp.y);
            SpqrNode& nd = tree_.nodes[id];  // re-fetch, recursion reallocates
            int pos = static_cast<int>(nd.children.size());
            nd.children.push_back(cid);
            tree_.nodes[cid].parent = id;
            tree_.nodes[id].skeleton.push_back({sp.x, sp.y, pos, -1, false});
        }
        return id;
    }

    int build_rec(const std::vector<int>& eids, int x, int y) {
        std::vector<int> xy, rest;
        for (int e : eids) {
            auto [a, b] = ends_[e];
            if ((a == x && b == y) || (a == y && b == x))
                xy.push_back(e);
            else
                rest.push_back(e);
        }

        if (rest.empty() && xy.size() == 1) {
            int id = new_node(NodeKind::Q, x, y);
            tree_.nodes[id].graph_edge = xy[0];
            tree_.nodes[id].skeleton.push_back({x, y, -1, -1, true});
            tree_.nodes[id].skeleton.push_back({ends_[xy[0]].first, ends_[xy[0]].second, -1, xy[0], false});
            tree_.edge_qnode[xy[0]] = id;
            return id;
        }
        if (rest.empty() && xy.empty())
            throw NotBiconnected("spqr: empty split component");

        // Components of the non-reference part after removing {x, y}.
        std::map<int, int> comp;  // free vertex -> component id
        std::vector<std::vector<int>> comp_edges;
        {
            std::map<int, std::vector<int>> adj;  // free vertex -> incident rest edges
            for (int e : rest) {
                auto [a, b] = ends_[e];
                if (a != x && a != y) adj[a].push_back(e);
                if (b != x && b != y) adj[b].push_back(e);
            }
            for (auto& [v0, _] : adj) {
                if (comp.count(v0)) continue;
                int cid = static_cast<int>(comp_edges.size());
                comp_edges.emplace_back();
                std::vector<int> bfs{v0};
                comp[v0] = cid;
                while (!bfs.empty()) {
                    int w = bfs.back();
                    bfs.pop_back();
                    for (int e : adj[w]) {
                        auto [a, b] = ends_[e];
                        for (int o : {a, b}) {
                            if (o == x || o == y || comp.count(o)) continue;
                            comp[o] = cid;
                            bfs.push_back(o);
                        }
                    }
                }
            }
            for (int e : rest) {
                auto [a, b] = ends_[e];
                int fv = (a != x && a != y) ? a : b;
                comp_edges[comp.at(fv)].push_back(e);
            }
        }
        int num_comps = static_cast<int>(comp_edges.size());

        int split_components = static_cast<int>(xy.size()) + 1 + num_comps;
        if (split_components >= 3) {
            // Parallel case
            int id = new_node(NodeKind::P, x, y);
            std::vector<ChildSpec> specs;
            for (int e : xy) specs.push_back({{e}, x, y, e});
            for (auto& ce : comp_edges)
                specs.push_back({ce, x, y, *std::min_element(ce.begin(), ce.end())});
            return attach_children(id, specs);
        }

        // Exactly two split components: the reference edge and one subgraph H.
        const std::vector<int>& H = rest;
        auto [blocks, cuts] = block_decomposition(H);
        if (blocks.size() == 1) return build_rigid(H, x, y);

        // Series case: blocks form a chain x = c_0, c_1, ..., c_k = y.
        return build_series(x, y, blocks, cuts);
    }

    // Biconnected components of the subgraph given by edge ids. Returns the
    // blocks as edge-id groups plus the set of cut vertices.
    std::pair<std::vector<std::vector<int>>, std::set<int>> block_decomposition(
        const std::vector<int>& eids) {
        std::map<int, std::vector<std::pair<int, int>>> adj;  // v -> (to, edge)
        for (int e : eids) {
            auto [a, b] = ends_[e];
            adj[a].push_back({b, e});
            adj[b].push_back({a, e});
        }
        std::map<int, int> tin, low;
        std::set<int> cuts;
        std::vector<std::vector<int>> blocks;
        std::vector<int> estack;
        int timer = 0;

        struct Frame {
            int v, pe;
            size_t it;
            int children;
        };
        int root_v = ends_[eids[0]].first;
        std::vector<Frame> st;
        st.push_back({root_v, -1, 0, 0});
        tin[root_v] = low[root_v] = ++timer;
        while (!st.empty()) {
            Frame& f = st.back();
            auto& lst = adj[f.v];
            if (f.it < lst.size()) {
                auto [to, e] = lst[f.it++];
                if (e == f.pe) continue;
                auto it = tin.find(to);
                if (it != tin.end()) {
                    if (it->second < tin[f.v]) estack.push_back(e);
                    low[f.v] = std::min(low[f.v], it->second);
                } else {
                    estack.push_back(e);
                    tin[to] = low[to] = ++timer;
                    ++f.children;
                    st.push_back({to, e, 0, 0});
                }
            } else {
                int v = f.v, pe = f.pe;
                st.pop_back();
                if (!st.empty()) {
                    Frame& p = st.back();
                    low[p.v] = std::min(low[p.v], low[v]);
                    if (low[v] >= tin[p.v]) {
                        bool p_is_dfs_root = st.size() == 1;
                        if (!p_is_dfs_root || p.children > 1) cuts.insert(p.v);
                        blocks.emplace_back();
                        while (true) {
                            int e = estack.back();
                            estack.pop_back();
                            blocks.back().push_back(e);
                            if (e == pe) break;
                        }
                    }
                }
            }
        }
        if (static_cast<int>(tin.size()) != count_vertices(eids))
            throw NotBiconnected("spqr: split component is disconnected");
        return {blocks, cuts};
    }

    int count_vertices(const std::vector<int>& eids) {
        std::set<int> vs;
        for (int e : eids) {
            vs.insert(ends_[e].first);
            vs.insert(ends_[e].second);
        }
        return static_cast<int>(vs.size());
    }

    int build_series(int x, int y,
                     const std::vector<std::vector<int>>& blocks, const std::set<int>& cuts) {
        // Boundary vertices per block: cut vertices plus the terminals.
        std::map<int, std::vector<int>> touch;  // boundary vertex -> block ids
        std::vector<std::array<int, 2>> bound(blocks.size(), {-1, -1});
        for (size_t b = 0; b < blocks.size(); ++b) {
            std::set<int> vs;
            for (int e : blocks[b]) {
                vs.insert(ends_[e].first);
                vs.insert(ends_[e].second);
            }
            int cnt = 0;
            for (int v : vs) {
                if (cuts.count(v) || v == x || v == y) {
                    if (cnt < 2) bound[b][cnt] = v;
                    ++cnt;
                    touch[v].push_back(static_cast<int>(b));
                }
            }
            if (cnt != 2) throw NotBiconnected("spqr: series component is not a chain");
        }
        std::vector<char> used(blocks.size(), 0);
        std::vector<ChildSpec> specs;
        int cur = x;
        for (size_t step = 0; step < blocks.size(); ++step) {
            int next_block = -1;
            for (int b : touch[cur])
                if (!used[b]) {
                    next_block = b;
                    break;
                }
            if (next_block < 0) throw NotBiconnected("spqr: broken series chain");
            used[next_block] = 1;
            int nxt = bound[next_block][0] == cur ? bound[next_block][1] : bound[next_block][0];
            specs.push_back({blocks[next_block], cur, nxt, 0});
            cur = nxt;
        }
        if (cur != y) throw NotBiconnected("spqr: series chain does not end at y");

        int id = new_node(NodeKind::S, x, y);
        // chain order is structural; keep it (attach_children sorts by key)
        for (size_t i = 0; i < specs.size(); ++i) specs[i].order_key = static_cast<int>(i);
        return attach_children(id, specs);
    }

    int build_rigid(const std::vector<int>& H, int x, int y) {
        // Local vertex universe of G' = H + the virtual reference edge.
        std::vector<int> verts;
        {
            std::set<int> vs{x, y};
            for (int e : H) {
                vs.insert(ends_[e].first);
                vs.insert(ends_[e].second);
            }
            verts.assign(vs.begin(), vs.end());
        }
        const int nv = static_cast<int>(verts.size());
        std::map<int, int> lidx;
        for (int i = 0; i < nv; ++i) lidx[verts[i]] = i;
        const int lx = lidx[x], ly = lidx[y];

        // adjacency over local indices; edge -1 stands for the reference edge
        std::vector<std::vector<std::pair<int, int>>> adj(nv);
        for (int e : H) {
            int a = lidx[ends_[e].first], b = lidx[ends_[e].second];
            adj[a].push_back({b, e});
            adj[b].push_back({a, e});
        }
        adj[lx].push_back({ly, -1});
        adj[ly].push_back({lx, -1});

        // Split pairs of G' with the component labeling of G' minus the pair.
        struct SplitPair {
            int a, b;  // local indices, a < b
            std::vector<int> label;
            int comps;
        };
        std::vector<SplitPair> sps;
        std::vector<int> label(nv);
        for (int a = 0; a < nv; ++a) {
            for (int b = a + 1; b < nv; ++b) {
                bool adjacent = false;
                for (auto [to, e] : adj[a])
                    if (to == b) adjacent = true;
                std::fill(label.begin(), label.end(), -1);
                int comps = 0;
                for (int s = 0; s < nv; ++s) {
                    if (s == a || s == b || label[s] >= 0) continue;
                    std::vector<int> bfs{s};
                    label[s] = comps;
                    while (!bfs.empty()) {
                        int w = bfs.back();
                        bfs.pop_back();
                        for (auto [to, e] : adj[w]) {
                            if (to == a || to == b || label[to] >= 0) continue;
                            label[to] = comps;
                            bfs.push_back(to);
                        }
                    }
                    ++comps;
                }
                if (adjacent || comps >= 2) sps.push_back({a, b, label, comps});
            }
        }

        // Maximal split pairs with respect to the reference edge.
        std::vector<std::pair<int, int>> maximal;
        const int ref_a = std::min(lx, ly), ref_b = std::max(lx, ly);
        for (const auto& sp : sps) {
            if (sp.a == ref_a && sp.b == ref_b) continue;
            bool ok = true;
            for (const auto& other : sps) {
                if (&other == &sp) continue;
                int want = -2;
                bool bad = false;
                for (int v : {sp.a, sp.b, lx, ly}) {
                    if (v == other.a || v == other.b) continue;
                    if (want == -2)
                        want = other.label[v];
                    else if (other.label[v] != want)
                        bad = true;
                }
                if (bad) {
                    ok = false;
                    break;
                }
            }
            if (ok) maximal.push_back({sp.a, sp.b});
        }
        if (maximal.empty()) throw NotBiconnected("spqr: rigid case found no maximal split pairs");

        // Children: per maximal pair, the real a-b edges plus every component
        // of G' minus the pair that does not contain the reference edge.
        std::vector<ChildSpec> specs;
        std::vector<int> assigned(ends_.size(), 0);
        for (auto [a, b] : maximal) {
            const SplitPair* sp = nullptr;
            for (const auto& s : sps)
                if (s.a == a && s.b == b) sp = &s;
            int eside;
            if (lx != a && lx != b)
                eside = sp->label[lx];
            else
                eside = sp->label[ly];
            std::vector<int> child_edges;
            for (int e : H) {
                int la = lidx[ends_[e].first], lb = lidx[ends_[e].second];
                bool a_in = la == a || la == b, b_in = lb == a || lb == b;
                if (a_in && b_in) {
                    child_edges.push_back(e);
                } else {
                    int fv = a_in ? lb : la;
                    if (sp->label[fv] != eside) child_edges.push_back(e);
                }
            }
            if (child_edges.empty()) throw NotBiconnected("spqr: empty rigid child");
            for (int e : child_edges) ++assigned[e];
            int ga = verts[a], gb = verts[b];
            if (ga > gb) std::swap(ga, gb);
            specs.push_back({std::move(child_edges), ga, gb, 0});
        }
        for (int e : H)
            if (assigned[e] != 1) throw NotBiconnected("spqr: rigid children do not partition the edges");

        std::sort(specs.begin(), specs.end(), [](const ChildSpec& p, const ChildSpec& q) {
            return std::pair(p.x, p.y) < std::pair(q.x, q.y);
        });
        for (size_t i = 0; i < specs.size(); ++i) specs[i].order_key = static_cast<int>(i);
        int id = new_node(NodeKind::R, x, y);
        return attach_children(id, specs);
    }

    void finalize() {
        // depths; apart from the root (created last) parents have smaller ids
        tree_.nodes[tree_.root].depth = 0;
        tree_.nodes[tree_.root_child].depth = 1;
        for (int id = 0; id < tree_.node_count(); ++id) {
            if (id == tree_.root) continue;
            for (int c : tree_.nodes[id].children)
                tree_.nodes[c].depth = tree_.nodes[id].depth + 1;
        }
        tree_.r = 0;
        for (const auto& nd : tree_.nodes)
            if (nd.kind == NodeKind::R) tree_.r = std::max(tree_.r, nd.skeleton_edge_count());

        // default vertex -> Q node map: smallest incident non-reference edge
        tree_.vertex_qnode.assign(static_cast<size_t>(n_) + 1, -1);
        for (int e = 0; e < static_cast<int>(ends_.size()); ++e) {
            if (e == tree_.ref_edge) continue;
            for (int v : {ends_[e].first, ends_[e].second})
                if (tree_.vertex_qnode[v] < 0) tree_.vertex_qnode[v] = tree_.edge_qnode[e];
        }
        for (int v = 1; v <= n_; ++v)
            if (tree_.vertex_qnode[v] < 0)
                throw NotBiconnected("vertex " + std::to_string(v) + " has no non-reference edge");
    }
};

}  // namespace detail

inline SpqrTree build_spqr(int n, const EdgeEnds& ends, int ref_edge) {
    return detail::SpqrBuilder(n, ends).build(ref_edge);
}

template <typename T>
SpqrTree build_spqr(const BeerGraph<T>& g, int ref_edge = 0) {
    if (g.m() < 2 || !validate_biconnected(g)) {
        auto defect = biconnectivity_defect(g);
        if (defect.has_value() && *defect > 0)
            throw NotBiconnected("graph is not biconnected: articulation vertex " +
                                 std::to_string(*defect));
        throw NotBiconnected("graph is not biconnected");
    }
    return build_spqr(g.n, edge_endpoints(g), ref_edge);
}

/// Real-edge multiset of G_mu per node, as sorted edge-id lists. The root
/// entry stays empty; every other node's set is the union of its children,
/// grounded at Q nodes.
inline std::vector<std::vector<int>> subtree_edge_sets(const SpqrTree& t) {
    // children always carry larger ids than their parent, so a descending
    // sweep visits every child before its parent
    std::vector<std::vector<int>> sets(t.node_count());
    for (int id = t.node_count() - 1; id >= 0; --id) {
        if (id == t.root) continue;
        const SpqrNode& nd = t.nodes[id];
        if (nd.kind == NodeKind::Q) {
            sets[id].push_back(nd.graph_edge);
        } else {
            for (int c : nd.children) {
                sets[id].insert(sets[id].end(), sets[c].begin(), sets[c].end());
            }
            std::sort(sets[id].begin(), sets[id].end());
        }
    }
    return sets;
}

/// Exhaustive triconnectivity test for small simple skeletons: >= 4
/// vertices, no parallel edges, and connectivity after deleting any vertex
/// pair.
inline bool skeleton_is_triconnected(const SpqrNode& nd) {
    std::set<int> vs;
    std::set<std::pair<int, int>> simple;
    std::vector<std::pair<int, int>> es;
    for (const auto& se : nd.skeleton) {
        int a = se.u, b = se.v;
        if (a > b) std::swap(a, b);
        if (a == b) return false;
        if (!simple.insert({a, b}).second) return false;  // parallel edge
        vs.insert(a);
        vs.insert(b);
        es.push_back({a, b});
    }
    if (vs.size() < 4) return false;
    std::vector<int> verts(vs.begin(), vs.end());
    auto connected_without = [&](int skip1, int skip2) {
        std::map<int, std::vector<int>> adj;
        for (auto [a, b] : es) {
            if (a == skip1 || a == skip2 || b == skip1 || b == skip2) continue;
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        int want = 0, start = -1;
        for (int v : verts)
            if (v != skip1 && v != skip2) {
                ++want;
                start = v;
            }
        if (want == 0) return true;
        std::set<int> seen{start};
        std::vector<int> bfs{start};
        while (!bfs.empty()) {
            int w = bfs.back();
            bfs.pop_back();
            for (int o : adj[w])
                if (seen.insert(o).second) bfs.push_back(o);
        }
        return static_cast<int>(seen.size()) == want;
    };
    for (size_t i = 0; i < verts.size(); ++i)
        for (size_t j = i + 1; j < verts.size(); ++j)
            if (!connected_without(verts[i], verts[j])) return false;
    return true;
}

/// Debug dump, one line per node: `id kind parent x_mu y_mu [child ids]`.
inline void dump_spqr(const SpqrTree& t, std::ostream& os) {
    for (int id = 0; id < t.node_count(); ++id) {
        const SpqrNode& nd = t.nodes[id];
        os << id << " " << kind_letter(nd.kind) << " " << nd.parent << " " << nd.x << " " << nd.y
           << " [";
        for (size_t i = 0; i < nd.children.size(); ++i) {
            if (i) os << " ";
            os << nd.children[i];
        }
        os << "]\n";
    }
}

/// Re-pick each vertex's Q node uniformly among its incident non-reference
/// edges. Query answers must not depend on this choice.
inline void randomize_vertex_qnodes(SpqrTree& t, const EdgeEnds& ends, std::mt19937_64& rng) {
    std::vector<std::vector<int>> incident(static_cast<size_t>(t.n) + 1);
    for (int e = 0; e < static_cast<int>(ends.size()); ++e) {
        if (e == t.ref_edge) continue;
        incident[ends[e].first].push_back(e);
        incident[ends[e].second].push_back(e);
    }
    for (int v = 1; v <= t.n; ++v) {
        if (incident[v].empty()) continue;
        std::uniform_int_distribution<size_t> d(0, incident[v].size() - 1);
        t.vertex_qnode[v] = t.edge_qnode[incident[v][d(rng)]];
    }
}

}  // namespace beerpath
