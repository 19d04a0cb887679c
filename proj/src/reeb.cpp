#include "tqs/reeb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace tqs {

namespace {

struct SweepState {
    const TorusField* field = nullptr;
    std::vector<char> edge_active;
    std::vector<int> edge_arc;
    std::vector<int> tri_arc;
    std::vector<double> tri_start_val;
    std::vector<int> tri_start_rank;
    std::vector<ReebNode> nodes;
    std::vector<ReebArc> arcs;

    // Epoch-stamped union-find over edges for saddle rebuilds.
    std::vector<int> uf_parent, uf_stamp;
    int uf_epoch = 0;
    // Dedup stamp for affected triangles.
    std::vector<int> tri_stamp;
    int tri_epoch = 0;

    int uf_find(int x) {
        auto fresh = [&](int y) {
            if (uf_stamp[size_t(y)] != uf_epoch) {
                uf_stamp[size_t(y)] = uf_epoch;
                uf_parent[size_t(y)] = y;
            }
        };
        fresh(x);
        while (uf_parent[size_t(x)] != x) {
            const int p = uf_parent[size_t(x)];
            fresh(p);
            uf_parent[size_t(x)] = uf_parent[size_t(p)];
            x = uf_parent[size_t(x)];
        }
        return x;
    }

    void uf_union(int a, int b) {
        a = uf_find(a);
        b = uf_find(b);
        if (a != b)
            uf_parent[size_t(a)] = b;
    }

    int new_node(int vertex) {
        nodes.push_back({vertex, field->value(vertex), 0});
        return int(nodes.size()) - 1;
    }

    int new_arc(int node_lo) {
        ReebArc a;
        a.node_lo = node_lo;
        a.val_lo = nodes[size_t(node_lo)].value;
        arcs.push_back(std::move(a));
        return int(arcs.size()) - 1;
    }

    void close_arc(int arc, int node_hi) {
        arcs[size_t(arc)].node_hi = node_hi;
        arcs[size_t(arc)].val_hi = nodes[size_t(node_hi)].value;
    }

    void close_piece(int tri, double end_val, int end_rank) {
        const int arc = tri_arc[size_t(tri)];
        if (arc < 0)
            return;
        const TorusGrid& g = field->grid();
        const auto corners = g.tri_corners(tri);
        const auto off = g.tri_corner_offsets(tri);
        const std::array<double, 3> vals = {field->value(corners[0]),
                                            field->value(corners[1]),
                                            field->value(corners[2])};
        const double inv_n2 = 1.0 / (double(g.n()) * double(g.n()));
        ReebPiece p;
        p.tri = tri;
        p.flat = vals[0] == vals[1] && vals[1] == vals[2];
        if (p.flat) {
            // Slab in the symbolic perturbation coordinate (vertex index).
            const std::array<double, 3> ranks = {double(corners[0]),
                                                 double(corners[1]),
                                                 double(corners[2])};
            const ClipResult hi = clip_below(off, ranks, double(end_rank));
            const ClipResult lo =
                clip_below(off, ranks, double(tri_start_rank[size_t(tri)]));
            p.area = (hi.area - lo.area) * inv_n2;
            p.flat_value = vals[0];
            p.integral = p.flat_value * p.area;
            p.lo = p.hi = vals[0];
        } else {
            const ClipResult hi = clip_below(off, vals, end_val);
            const ClipResult lo =
                clip_below(off, vals, tri_start_val[size_t(tri)]);
            p.area = (hi.area - lo.area) * inv_n2;
            p.integral = (hi.integral - lo.integral) * inv_n2;
            p.lo = tri_start_val[size_t(tri)];
            p.hi = end_val;
        }
        if (p.area > 0.0) {
            arcs[size_t(arc)].measure += p.area;
            arcs[size_t(arc)].integral += p.integral;
            arcs[size_t(arc)].pieces.push_back(p);
        }
    }
};

SweepState& scratch_state() {
    thread_local SweepState s;
    return s;
}

void smooth_degree_two(std::vector<ReebNode>& nodes, std::vector<ReebArc>& arcs) {
    const int nn = int(nodes.size());
    // Arc-end incidence per node; self-loops appear twice.
    std::vector<std::vector<int>> ends(static_cast<size_t>(nn));
    for (int a = 0; a < int(arcs.size()); ++a) {
        ends[size_t(arcs[size_t(a)].node_lo)].push_back(a);
        ends[size_t(arcs[size_t(a)].node_hi)].push_back(a);
    }
    std::vector<char> dead_node(size_t(nn), 0);
    auto replace_end = [&](int arc, int from, int to) {
        ReebArc& x = arcs[size_t(arc)];
        if (x.node_lo == from)
            x.node_lo = to;
        else
            x.node_hi = to;
    };
    for (int u = 0; u < nn; ++u) {
        int w = u;
        while (!dead_node[size_t(w)] && ends[size_t(w)].size() == 2 &&
               ends[size_t(w)][0] != ends[size_t(w)][1]) {
            const int a = ends[size_t(w)][0], b = ends[size_t(w)][1];
            ReebArc& aa = arcs[size_t(a)];
            ReebArc& bb = arcs[size_t(b)];
            const int far_b = bb.node_lo == w ? bb.node_hi : bb.node_lo;
            // Absorb b into a.
            replace_end(a, w, far_b);
            aa.val_lo = std::min(aa.val_lo, bb.val_lo);
            aa.val_hi = std::max(aa.val_hi, bb.val_hi);
            aa.measure += bb.measure;
            aa.integral += bb.integral;
            aa.pieces.insert(aa.pieces.end(), bb.pieces.begin(), bb.pieces.end());
            bb.node_lo = bb.node_hi = -1;
            bb.pieces.clear();
            bb.measure = bb.integral = 0.0;
            dead_node[size_t(w)] = 1;
            auto& fe = ends[size_t(far_b)];
            std::replace(fe.begin(), fe.end(), b, a);
            ends[size_t(w)].clear();
            w = far_b; // the far node may have become smoothable
        }
    }

    std::vector<int> node_map(size_t(nn), -1);
    std::vector<ReebNode> new_nodes;
    for (int u = 0; u < nn; ++u)
        if (!dead_node[size_t(u)]) {
            node_map[size_t(u)] = int(new_nodes.size());
            new_nodes.push_back(nodes[size_t(u)]);
        }
    std::vector<ReebArc> new_arcs;
    for (auto& a : arcs) {
        if (a.node_lo < 0)
            continue;
        a.node_lo = node_map[size_t(a.node_lo)];
        a.node_hi = node_map[size_t(a.node_hi)];
        new_arcs.push_back(std::move(a));
    }
    nodes = std::move(new_nodes);
    arcs = std::move(new_arcs);
    for (auto& n : nodes)
        n.degree = 0;
    for (const auto& a : arcs) {
        nodes[size_t(a.node_lo)].degree += 1;
        nodes[size_t(a.node_hi)].degree += 1;
    }
}

} // namespace

ReebGraph build_reeb(const TorusField& field) {
    const TorusGrid& g = field.grid();
    const int num_edges = g.num_edges();
    const int num_tris = g.num_triangles();

    SweepState& s = scratch_state();
    s.field = &field;
    s.edge_active.assign(size_t(num_edges), 0);
    s.edge_arc.assign(size_t(num_edges), -1);
    s.tri_arc.assign(size_t(num_tris), -1);
    s.tri_start_val.assign(size_t(num_tris), 0.0);
    s.tri_start_rank.assign(size_t(num_tris), 0);
    s.nodes.clear();
    s.arcs.clear();
    s.uf_parent.assign(size_t(num_edges), 0);
    s.uf_stamp.assign(size_t(num_edges), -1);
    s.uf_epoch = 0;
    s.tri_stamp.assign(size_t(num_tris), -1);
    s.tri_epoch = 0;

    const std::vector<int> order = field.sweep_order();

    std::vector<int> lower_e, upper_e, affected, closed_arcs;
    std::vector<std::pair<int, int>> root_arcs; // (uf root, fresh arc)

    for (const int v : order) {
        const double value = field.value(v);
        lower_e.clear();
        upper_e.clear();
        affected.clear();
        ++s.tri_epoch;
        auto touch = [&](int t) {
            if (s.tri_stamp[size_t(t)] != s.tri_epoch) {
                s.tri_stamp[size_t(t)] = s.tri_epoch;
                affected.push_back(t);
            }
        };
        for (int k = 0; k < 6; ++k) {
            const int e = g.star_edge(v, k).first;
            if (field.less(g.link_neighbor(v, k), v))
                lower_e.push_back(e);
            else
                upper_e.push_back(e);
            touch(g.star_triangle(v, k));
        }
        const auto [lo_comps, up_comps] = field.link_component_counts(v);

        if (lo_comps == 1 && up_comps == 1) {
            // Regular vertex: the contour passes through.
            const int arc = s.edge_arc[size_t(lower_e[0])];
            for (const int e : lower_e) {
                if (s.edge_arc[size_t(e)] != arc)
                    throw topology_error("regular vertex with mixed contours");
                s.edge_active[size_t(e)] = 0;
            }
            for (const int e : upper_e) {
                s.edge_active[size_t(e)] = 1;
                s.edge_arc[size_t(e)] = arc;
            }
        } else if (lo_comps == 0) {
            // Local minimum: a contour is born around v.
            const int nid = s.new_node(v);
            const int arc = s.new_arc(nid);
            for (const int e : upper_e) {
                s.edge_active[size_t(e)] = 1;
                s.edge_arc[size_t(e)] = arc;
            }
        } else if (up_comps == 0) {
            // Local maximum: the contour around v dies.
            const int nid = s.new_node(v);
            const int arc = s.edge_arc[size_t(lower_e[0])];
            for (const int e : lower_e) {
                if (s.edge_arc[size_t(e)] != arc)
                    throw topology_error("local maximum with mixed contours");
                s.edge_active[size_t(e)] = 0;
            }
            s.close_arc(arc, nid);
        } else {
            // Saddle-like event: close the incoming contours, recompute the
            // level components globally, open a fresh arc per component
            // touching the star of v.
            const int nid = s.new_node(v);
            closed_arcs.clear();
            for (const int e : lower_e) {
                const int a = s.edge_arc[size_t(e)];
                if (std::find(closed_arcs.begin(), closed_arcs.end(), a) ==
                    closed_arcs.end())
                    closed_arcs.push_back(a);
                s.edge_active[size_t(e)] = 0;
            }
            for (const int a : closed_arcs)
                s.close_arc(a, nid);
            for (const int e : upper_e) {
                s.edge_active[size_t(e)] = 1;
                s.edge_arc[size_t(e)] = -2;
            }

            ++s.uf_epoch;
            for (int e = 0; e < num_edges; ++e) {
                if (!s.edge_active[size_t(e)])
                    continue;
                for (const auto& [t, kk] : g.edge_tris(e)) {
                    for (int k2 = 0; k2 < 3; ++k2) {
                        const int e2 = g.tri_edge(t, k2).first;
                        if (e2 != e && s.edge_active[size_t(e2)])
                            s.uf_union(e, e2);
                    }
                }
            }
            root_arcs.clear();
            for (const int e : upper_e) {
                const int r = s.uf_find(e);
                bool seen = false;
                for (const auto& [root, arc] : root_arcs)
                    seen = seen || root == r;
                if (!seen)
                    root_arcs.emplace_back(r, s.new_arc(nid));
            }
            for (int e = 0; e < num_edges; ++e) {
                if (!s.edge_active[size_t(e)])
                    continue;
                const int r = s.uf_find(e);
                int arc = -1;
                for (const auto& [root, na] : root_arcs)
                    if (root == r)
                        arc = na;
                if (arc >= 0) {
                    s.edge_arc[size_t(e)] = arc;
                    for (const auto& [t, kk] : g.edge_tris(e))
                        touch(t);
                } else {
                    const int cur = s.edge_arc[size_t(e)];
                    if (cur < 0 || std::find(closed_arcs.begin(),
                                             closed_arcs.end(),
                                             cur) != closed_arcs.end())
                        throw topology_error(
                            "level component detached from the event star");
                }
            }
        }

        // Re-derive the slab assignment of every affected triangle.
        for (const int t : affected) {
            int cnt = 0, arc = -1;
            for (int k = 0; k < 3; ++k) {
                const int e = g.tri_edge(t, k).first;
                if (s.edge_active[size_t(e)]) {
                    ++cnt;
                    const int a = s.edge_arc[size_t(e)];
                    if (arc >= 0 && a != arc)
                        throw topology_error("triangle spans two contours");
                    arc = a;
                }
            }
            if (cnt != 0 && cnt != 2)
                throw topology_error("triangle with an odd cut-edge count");
            const int new_arc = (cnt == 2) ? arc : -1;
            if (new_arc == -2)
                throw topology_error("unresolved contour label");
            if (new_arc != s.tri_arc[size_t(t)]) {
                s.close_piece(t, value, v);
                s.tri_arc[size_t(t)] = new_arc;
                s.tri_start_val[size_t(t)] = value;
                s.tri_start_rank[size_t(t)] = v;
            }
        }
    }

    for (int e = 0; e < num_edges; ++e)
        if (s.edge_active[size_t(e)])
            throw topology_error("active level edges after the sweep");
    for (int t = 0; t < num_tris; ++t)
        if (s.tri_arc[size_t(t)] >= 0)
            throw topology_error("active triangles after the sweep");

    ReebGraph graph;
    graph.nodes = std::move(s.nodes);
    graph.arcs = std::move(s.arcs);
    for (const auto& a : graph.arcs)
        if (a.node_hi < 0)
            throw topology_error("unclosed Reeb arc");
    smooth_degree_two(graph.nodes, graph.arcs);

    // Betti number via E - V + C; the torus forces exactly one cycle.
    {
        std::vector<int> parent(graph.nodes.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[size_t(x)] != x) {
                parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
                x = parent[size_t(x)];
            }
            return x;
        };
        for (const auto& a : graph.arcs) {
            const int x = find(a.node_lo), y = find(a.node_hi);
            if (x != y)
                parent[size_t(x)] = y;
        }
        int comps = 0;
        for (int u = 0; u < int(graph.nodes.size()); ++u)
            if (find(u) == u)
                ++comps;
        if (comps != 1)
            throw topology_error("Reeb graph is disconnected");
        graph.betti = int(graph.arcs.size()) - int(graph.nodes.size()) + comps;
    }
    if (graph.betti != 1)
        throw topology_error("Reeb graph Betti number is " +
                             std::to_string(graph.betti) + ", expected 1");

    double total = 0.0;
    for (const auto& a : graph.arcs)
        total += a.measure;
    if (std::abs(total - 1.0) > 1e-9)
        throw topology_error("Reeb arc measures do not tile the torus");

    return graph;
}

CycleTreeDecomposition decompose(const ReebGraph& graph) {
    const int nn = int(graph.nodes.size());
    const int na = int(graph.arcs.size());
    std::vector<int> degree(size_t(nn), 0);
    std::vector<std::vector<int>> incident(static_cast<size_t>(nn));
    for (int a = 0; a < na; ++a) {
        const auto& arc = graph.arcs[size_t(a)];
        degree[size_t(arc.node_lo)] += 1;
        degree[size_t(arc.node_hi)] += 1;
        incident[size_t(arc.node_lo)].push_back(a);
        if (arc.node_hi != arc.node_lo)
            incident[size_t(arc.node_hi)].push_back(a);
    }

    std::vector<char> arc_alive(size_t(na), 1);
    std::vector<char> node_stripped(size_t(nn), 0);
    std::vector<int> stack;
    for (int u = 0; u < nn; ++u)
        if (degree[size_t(u)] == 1)
            stack.push_back(u);
    struct Strip {
        int arc, leaf, far;
    };
    std::vector<Strip> strips;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        if (node_stripped[size_t(u)] || degree[size_t(u)] != 1)
            continue;
        int arc = -1;
        for (const int a : incident[size_t(u)])
            if (arc_alive[size_t(a)])
                arc = a;
        if (arc < 0)
            throw topology_error("decompose: stranded leaf node");
        const ReebArc& aa = graph.arcs[size_t(arc)];
        const int far = aa.node_lo == u ? aa.node_hi : aa.node_lo;
        arc_alive[size_t(arc)] = 0;
        node_stripped[size_t(u)] = 1;
        degree[size_t(u)] -= 1;
        degree[size_t(far)] -= 1;
        strips.push_back({arc, u, far});
        if (degree[size_t(far)] == 1)
            stack.push_back(far);
    }

    CycleTreeDecomposition d;
    int cycle_nodes = 0;
    for (int u = 0; u < nn; ++u) {
        if (node_stripped[size_t(u)])
            continue;
        ++cycle_nodes;
        if (degree[size_t(u)] != 2)
            throw topology_error("decompose: residue node of degree " +
                                 std::to_string(degree[size_t(u)]));
    }
    for (int a = 0; a < na; ++a)
        if (arc_alive[size_t(a)])
            d.cycle_arcs.push_back(a);
    if (d.cycle_arcs.empty() || int(d.cycle_arcs.size()) != cycle_nodes)
        throw topology_error("decompose: residue is not a single cycle");
    for (const int a : d.cycle_arcs) {
        d.cycle_measure += graph.arcs[size_t(a)].measure;
        d.cycle_integral += graph.arcs[size_t(a)].integral;
    }

    // Resolve attachments; walking the strips backwards guarantees the far
    // node's attachment is already known.
    std::vector<int> att(size_t(nn), -1);
    for (int u = 0; u < nn; ++u)
        if (!node_stripped[size_t(u)])
            att[size_t(u)] = u;
    std::vector<int> arc_att(size_t(na), -1);
    for (auto it = strips.rbegin(); it != strips.rend(); ++it) {
        const int root = att[size_t(it->far)];
        if (root < 0)
            throw topology_error("decompose: unresolved attachment");
        att[size_t(it->leaf)] = root;
        arc_att[size_t(it->arc)] = root;
    }

    std::vector<int> tree_of_node(size_t(nn), -1);
    for (int a = 0; a < na; ++a) {
        if (arc_att[size_t(a)] < 0)
            continue;
        const int sj = arc_att[size_t(a)];
        if (tree_of_node[size_t(sj)] < 0) {
            tree_of_node[size_t(sj)] = int(d.trees.size());
            ReebTree t;
            t.attachment_node = sj;
            t.alpha = graph.nodes[size_t(sj)].value;
            d.trees.push_back(std::move(t));
        }
        ReebTree& t = d.trees[size_t(tree_of_node[size_t(sj)])];
        t.arcs.push_back(a);
        t.measure += graph.arcs[size_t(a)].measure;
        t.integral += graph.arcs[size_t(a)].integral;
    }
    for (auto& t : d.trees) {
        double lo = t.alpha, hi = t.alpha;
        for (const int a : t.arcs) {
            lo = std::min(lo, graph.arcs[size_t(a)].val_lo);
            hi = std::max(hi, graph.arcs[size_t(a)].val_hi);
        }
        if (hi <= t.alpha)
            t.side = -1;
        else if (lo >= t.alpha)
            t.side = +1;
        else
            t.side = 0;
    }
    return d;
}

int arcs_spanning(const ReebGraph& graph, double t) {
    int count = 0;
    for (const auto& a : graph.arcs)
        if (a.val_lo < t && t < a.val_hi)
            ++count;
    return count;
}

SubSurface tree_region_retract(const TorusField& field, const ReebGraph& graph,
                               const CycleTreeDecomposition& decomp,
                               size_t tree_index) {
    if (tree_index >= decomp.trees.size())
        throw std::invalid_argument("tree index out of range");
    const ReebTree& tree = decomp.trees[size_t(tree_index)];
    const bool above = tree.side == +1;

    const std::vector<double> vals = field.distinct_values();
    const auto it = std::lower_bound(vals.begin(), vals.end(), tree.alpha);
    if (it == vals.end() || *it != tree.alpha)
        throw topology_error("attachment value is not a vertex value");
    double tstar;
    if (above) {
        if (it + 1 == vals.end())
            throw topology_error("no regular value above the attachment");
        tstar = 0.5 * (tree.alpha + *(it + 1));
    } else {
        if (it == vals.begin())
            throw topology_error("no regular value below the attachment");
        tstar = 0.5 * (*(it - 1) + tree.alpha);
    }
    if (tstar == tree.alpha || field.is_vertex_value(tstar))
        throw topology_error("value gap too tight for a retract level");

    SubSurface region = SubSurface::sublevel(field, tstar);
    if (above)
        region = region.complement();

    std::vector<char> candidate(size_t(field.grid().num_triangles()), 0);
    for (const int a : tree.arcs)
        for (const ReebPiece& p : graph.arcs[size_t(a)].pieces)
            candidate[size_t(p.tri)] = 1;

    int count = 0;
    const std::vector<int> labels = region.region_components(&count);
    std::vector<char> keep(size_t(count), 0);
    for (int t = 0; t < int(candidate.size()); ++t)
        if (candidate[size_t(t)] && labels[size_t(t)] >= 0)
            keep[size_t(labels[size_t(t)])] = 1;
    return region.restrict_components(labels, keep);
}

} // namespace tqs
