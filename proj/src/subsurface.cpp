#include "tqs/subsurface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace tqs {

namespace {

// Chord endpoints by region mask: (source local edge, target local edge),
// oriented with the region on the left.
std::pair<int, int> chord_edges(uint8_t mask) {
    switch (mask) {
    case 1: return {0, 2}; // in {0}
    case 2: return {1, 0}; // in {1}
    case 4: return {2, 1}; // in {2}
    case 6: return {2, 0}; // out {0}
    case 5: return {0, 1}; // out {1}
    case 3: return {1, 2}; // out {2}
    default:
        throw topology_error("chord_edges: triangle is not cut");
    }
}

// Fan from the first point so slivers near a polygon vertex do not cancel
// catastrophically.
double poly_area(const std::vector<std::array<double, 2>>& pts) {
    double s = 0.0;
    for (size_t i = 1; i + 1 < pts.size(); ++i) {
        const double ax = pts[i][0] - pts[0][0], ay = pts[i][1] - pts[0][1];
        const double bx = pts[i + 1][0] - pts[0][0], by = pts[i + 1][1] - pts[0][1];
        s += ax * by - ay * bx;
    }
    return 0.5 * s;
}

// Area and integral of a linear interpolant over a CCW polygon, both in
// cell units; `vals` are the interpolant values at the polygon vertices.
ClipResult poly_area_integral(const std::vector<std::array<double, 2>>& pts,
                              const std::vector<double>& vals) {
    ClipResult r;
    for (size_t i = 1; i + 1 < pts.size(); ++i) {
        const double ax = pts[i][0] - pts[0][0], ay = pts[i][1] - pts[0][1];
        const double bx = pts[i + 1][0] - pts[0][0], by = pts[i + 1][1] - pts[0][1];
        const double a = 0.5 * (ax * by - ay * bx);
        r.area += a;
        r.integral += a * (vals[0] + vals[i] + vals[i + 1]) / 3.0;
    }
    return r;
}

std::array<double, 2> wrap_pos(double p, double q) {
    p -= std::floor(p);
    q -= std::floor(q);
    if (p >= 1.0)
        p = 0.0;
    if (q >= 1.0)
        q = 0.0;
    return {p, q};
}

int slot_of_dir(int di, int dj) {
    for (int k = 0; k < 6; ++k)
        if (TorusGrid::kLinkDirs[size_t(k)][0] == di &&
            TorusGrid::kLinkDirs[size_t(k)][1] == dj)
            return k;
    throw topology_error("slot_of_dir: not a link direction");
}

} // namespace

ClipResult clip_below(const std::array<std::array<double, 2>, 3>& xy,
                      const std::array<double, 3>& val, double t) {
    std::vector<std::array<double, 2>> pts;
    std::vector<double> vals;
    pts.reserve(4);
    vals.reserve(4);
    for (int k = 0; k < 3; ++k) {
        const int k1 = (k + 1) % 3;
        const bool in_k = val[size_t(k)] <= t;
        const bool in_k1 = val[size_t(k1)] <= t;
        if (in_k) {
            pts.push_back(xy[size_t(k)]);
            vals.push_back(val[size_t(k)]);
        }
        if (in_k != in_k1) {
            const double u =
                (t - val[size_t(k)]) / (val[size_t(k1)] - val[size_t(k)]);
            pts.push_back({xy[size_t(k)][0] + u * (xy[size_t(k1)][0] - xy[size_t(k)][0]),
                           xy[size_t(k)][1] + u * (xy[size_t(k1)][1] - xy[size_t(k)][1])});
            vals.push_back(t);
        }
    }
    if (pts.size() < 3)
        return {};
    return poly_area_integral(pts, vals);
}

std::vector<std::array<double, 2>> SubSurface::cut_polygon(const TorusGrid& grid,
                                                           const TriCut& cut) {
    const auto off = grid.tri_corner_offsets(cut.tri);
    std::vector<std::array<double, 2>> pts;
    pts.reserve(4);
    auto edge_point = [&](int k, double u) -> std::array<double, 2> {
        const int k1 = (k + 1) % 3;
        return {off[size_t(k)][0] + u * (off[size_t(k1)][0] - off[size_t(k)][0]),
                off[size_t(k)][1] + u * (off[size_t(k1)][1] - off[size_t(k)][1])};
    };
    for (int k = 0; k < 3; ++k) {
        if (cut.inside_mask & (1 << k))
            pts.push_back(off[size_t(k)]);
        const bool in_k = (cut.inside_mask >> k) & 1;
        const bool in_k1 = (cut.inside_mask >> ((k + 1) % 3)) & 1;
        if (in_k != in_k1) {
            const double u = (k == cut.src_edge) ? cut.src_param : cut.dst_param;
            pts.push_back(edge_point(k, u));
        }
    }
    return pts;
}

namespace {

// Shared construction for regions bounded by per-edge cuts: `in` flags the
// vertices on the region side; `cut_frac(a, b)` is the fractional position
// of the crossing along the directed edge a -> b.  Areas come from products
// of these fractions so slivers at machine precision stay positive.
template <typename CutFracFn>
SubSurface trace_cut_region(const TorusGrid& grid, const std::vector<char>& in,
                            CutFracFn&& cut_frac) {
    const int num_tris = grid.num_triangles();
    const double tri_area = grid.triangle_area();
    std::vector<uint8_t> tri_state(size_t(num_tris), 0);
    std::vector<TriCut> cuts;
    std::unordered_map<int, double> edge_param; // canonical edge -> param
    std::vector<int> cut_index(size_t(num_tris), -1);

    auto canonical_param = [&](int e) -> double {
        auto it = edge_param.find(e);
        if (it != edge_param.end())
            return it->second;
        const auto [a, b] = grid.edge_endpoints(e);
        const double s = cut_frac(a, b);
        if (!(s > 0.0 && s < 1.0))
            throw topology_error("trace_cut_region: cut parameter out of range");
        edge_param.emplace(e, s);
        return s;
    };

    for (int t = 0; t < num_tris; ++t) {
        const auto c = grid.tri_corners(t);
        uint8_t mask = 0;
        for (int k = 0; k < 3; ++k)
            if (in[size_t(c[size_t(k)])])
                mask |= uint8_t(1 << k);
        if (mask == 0)
            continue;
        if (mask == 7) {
            tri_state[size_t(t)] = 1;
            continue;
        }
        tri_state[size_t(t)] = 2;
        TriCut cut;
        cut.tri = t;
        cut.inside_mask = mask;
        const auto [src, dst] = chord_edges(mask);
        cut.src_edge = uint8_t(src);
        cut.dst_edge = uint8_t(dst);
        const auto [se, sf] = grid.tri_edge(t, src);
        const auto [de, df] = grid.tri_edge(t, dst);
        cut.src_param = sf ? canonical_param(se) : 1.0 - canonical_param(se);
        cut.dst_param = df ? canonical_param(de) : 1.0 - canonical_param(de);
        // Corner wedge legs measured from the lone corner; in this
        // triangulation the two legs always span a unit cross product.
        const bool single_in = mask == 1 || mask == 2 || mask == 4;
        const int lone = single_in ? (mask == 1 ? 0 : (mask == 2 ? 1 : 2))
                                   : (mask == 6 ? 0 : (mask == 5 ? 1 : 2));
        if (single_in) {
            const double leg1 =
                cut_frac(c[size_t(lone)], c[size_t((lone + 1) % 3)]);
            const double leg2 =
                cut_frac(c[size_t(lone)], c[size_t((lone + 2) % 3)]);
            if (!(leg1 > 0.0 && leg2 > 0.0))
                throw topology_error("trace_cut_region: degenerate region piece");
            cut.in_area = leg1 * leg2 * tri_area;
        } else {
            // Complementary fractions measured from the in corners keep the
            // quad area positive even when the out wedge nearly fills.
            const double a1 =
                cut_frac(c[size_t((lone + 1) % 3)], c[size_t(lone)]);
            const double a2 =
                cut_frac(c[size_t((lone + 2) % 3)], c[size_t(lone)]);
            if (!(a1 > 0.0 && a2 > 0.0))
                throw topology_error("trace_cut_region: degenerate region piece");
            cut.in_area = (a1 + a2 - a1 * a2) * tri_area;
        }
        cut_index[size_t(t)] = int(cuts.size());
        cuts.push_back(cut);
    }

    // Trace the level loops through the cut triangles.
    std::vector<BoundaryLoop> loops;
    std::vector<char> visited(cuts.size(), 0);
    const double inv_n = 1.0 / grid.n();
    for (size_t start = 0; start < cuts.size(); ++start) {
        if (visited[start])
            continue;
        BoundaryLoop loop;
        loop.atom_in = 2 * cuts[start].tri;
        loop.atom_out = 2 * cuts[start].tri + 1;
        double dp = 0.0, dq = 0.0;
        size_t cur = start;
        do {
            visited[cur] = 1;
            const TriCut& cut = cuts[cur];
            loop.cut_tris.push_back(cut.tri);
            const auto off = grid.tri_corner_offsets(cut.tri);
            auto pt = [&](int k, double u) -> std::array<double, 2> {
                const int k1 = (k + 1) % 3;
                return {off[size_t(k)][0] + u * (off[size_t(k1)][0] - off[size_t(k)][0]),
                        off[size_t(k)][1] + u * (off[size_t(k1)][1] - off[size_t(k)][1])};
            };
            const auto sp = pt(cut.src_edge, cut.src_param);
            const auto tp = pt(cut.dst_edge, cut.dst_param);
            dp += tp[0] - sp[0];
            dq += tp[1] - sp[1];
            const auto o = grid.tri_origin(cut.tri);
            loop.points.push_back(
                wrap_pos(o[0] + sp[0] * inv_n, o[1] + sp[1] * inv_n));
            // Cross the target edge into the neighbouring triangle.
            const auto [ce, cf] = grid.tri_edge(cut.tri, cut.dst_edge);
            const auto ts = grid.edge_tris(ce);
            const int next_tri =
                ts[0].first == cut.tri ? ts[1].first : ts[0].first;
            const int next = cut_index[size_t(next_tri)];
            if (next < 0)
                throw topology_error("trace_cut_region: level line leaves the cut set");
            const auto [ne, nf] = grid.tri_edge(next_tri, cuts[size_t(next)].src_edge);
            if (ne != ce)
                throw topology_error("trace_cut_region: inconsistent chord orientation");
            cur = size_t(next);
        } while (cur != start);
        // dp,dq are in cell units; the torus displacement is (dp,dq)/n.
        const double fp = dp / grid.n(), fq = dq / grid.n();
        loop.winding_p = int(std::lround(fp));
        loop.winding_q = int(std::lround(fq));
        if (std::abs(fp - loop.winding_p) > 1e-6 ||
            std::abs(fq - loop.winding_q) > 1e-6)
            throw topology_error("trace_cut_region: non-integral winding");
        loops.push_back(std::move(loop));
    }

    std::vector<std::pair<int, double>> edge_cuts(edge_param.begin(),
                                                  edge_param.end());
    std::sort(edge_cuts.begin(), edge_cuts.end());
    return SubSurface::assemble(grid, std::move(tri_state), std::move(cuts),
                                std::move(edge_cuts), std::move(loops));
}

} // namespace

SubSurface SubSurface::sublevel(const TorusField& field, double t) {
    const TorusGrid& grid = field.grid();
    if (field.is_vertex_value(t))
        throw std::invalid_argument(
            "sublevel: t equals a vertex value; re-sample to a regular value");
    std::vector<char> in(size_t(grid.num_vertices()));
    for (int v = 0; v < grid.num_vertices(); ++v)
        in[size_t(v)] = field.value(v) < t;
    return trace_cut_region(grid, in, [&](int a, int b) {
        return (t - field.value(a)) / (field.value(b) - field.value(a));
    });
}

SubSurface SubSurface::linear_annulus(const TorusGrid& grid, int k, int l,
                                      int offset_cells, int width_cells) {
    const int n = grid.n();
    if (k == 0 && l == 0)
        throw std::invalid_argument("linear_annulus: slope (0,0)");
    if (std::gcd(std::abs(k), std::abs(l)) != 1)
        throw std::invalid_argument("linear_annulus: slope must be coprime");
    if (width_cells < 2 || width_cells > n - 2)
        throw std::invalid_argument("linear_annulus: width out of range");

    // Transverse coordinate u = l*p - k*q, in cell units at vertices.
    auto ucell = [&](int i, int j) {
        const long long u = (long long)l * i - (long long)k * j;
        return int(((u % n) + n) % n);
    };
    const int m = ((offset_cells % n) + n) % n;
    const int w = width_cells;
    // Region: (u - m) mod n in (1/2, w + 1/2); vertices in iff 1 <= d <= w.
    std::vector<char> in(size_t(grid.num_vertices()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int d = (ucell(i, j) - m % n + n) % n;
            in[size_t(i) * n + j] = (d >= 1 && d <= w);
        }

    return trace_cut_region(grid, in, [&](int e) {
        const auto [a, b] = grid.edge_endpoints(e);
        const auto dir = TorusGrid::edge_dir(e);
        const int du = l * dir[0] - k * dir[1];
        const double d0 = double((ucell(grid.vertex_i(a), grid.vertex_j(a)) - m + n) % n);
        const double d1 = d0 + du;
        double param = -1.0;
        for (const double line : {0.5, double(w) + 0.5}) {
            for (const int shift : {-n, 0, n}) {
                const double c = line + shift;
                const double s = (c - d0) / double(du);
                if (s > 0.0 && s < 1.0 &&
                    ((d0 < c && c < d1) || (d1 < c && c < d0))) {
                    if (param >= 0.0)
                        throw topology_error(
                            "linear_annulus: edge crosses two band boundaries");
                    param = s;
                }
            }
        }
        if (param < 0.0)
            throw topology_error("linear_annulus: expected a band crossing");
        return param;
    });
}

SubSurface SubSurface::from_triangles(const TorusGrid& grid,
                                      const std::vector<int>& tris) {
    const int num_tris = grid.num_triangles();
    std::vector<uint8_t> tri_state(size_t(num_tris), 0);
    for (int t : tris) {
        if (t < 0 || t >= num_tris)
            throw std::invalid_argument("from_triangles: bad triangle id");
        tri_state[size_t(t)] = 1;
    }

    // Directed wall edges, region on the left: 0 none, 1 forward, 2 backward.
    std::vector<uint8_t> wall(size_t(grid.num_edges()), 0);
    for (int e = 0; e < grid.num_edges(); ++e) {
        const bool lt = tri_state[size_t(grid.edge_left_tri(e))] == 1;
        const bool rt = tri_state[size_t(grid.edge_right_tri(e))] == 1;
        if (lt != rt)
            wall[size_t(e)] = lt ? 1 : 2;
    }

    std::vector<BoundaryLoop> loops;
    std::vector<char> visited(size_t(grid.num_edges()), 0);
    for (int e0 = 0; e0 < grid.num_edges(); ++e0) {
        if (!wall[size_t(e0)] || visited[size_t(e0)])
            continue;
        BoundaryLoop loop;
        loop.is_wall = true;
        {
            const int lt = grid.edge_left_tri(e0);
            const int rt = grid.edge_right_tri(e0);
            const bool fwd = wall[size_t(e0)] == 1;
            loop.atom_in = 2 * (fwd ? lt : rt);
            loop.atom_out = 2 * (fwd ? rt : lt);
        }
        long long wp = 0, wq = 0;
        int e = e0;
        bool fwd = wall[size_t(e0)] == 1;
        do {
            visited[size_t(e)] = 1;
            loop.wall_edges.emplace_back(e, fwd);
            const auto [a, b] = grid.edge_endpoints(e);
            const int tail = fwd ? a : b;
            const int head = fwd ? b : a;
            const auto dir = TorusGrid::edge_dir(e);
            wp += fwd ? dir[0] : -dir[0];
            wq += fwd ? dir[1] : -dir[1];
            loop.points.push_back(
                {double(grid.vertex_i(tail)) / grid.n(),
                 double(grid.vertex_j(tail)) / grid.n()});
            // Rotate clockwise around the head through the region wedge to
            // the next wall edge.
            const int back = slot_of_dir(fwd ? -dir[0] : dir[0],
                                         fwd ? -dir[1] : dir[1]);
            int m = (back + 5) % 6;
            int guard = 0;
            for (;;) {
                const int T = grid.star_triangle(head, m);
                if (tri_state[size_t(T)] != 1)
                    throw topology_error("from_triangles: wall sweep left the region");
                const auto [ne, nf] = grid.star_edge(head, m);
                if (wall[size_t(ne)]) {
                    if ((wall[size_t(ne)] == 1) != nf)
                        throw topology_error("from_triangles: wall direction mismatch");
                    e = ne;
                    fwd = nf;
                    break;
                }
                m = (m + 5) % 6;
                if (++guard > 6)
                    throw topology_error("from_triangles: no outgoing wall at vertex");
            }
        } while (e != e0);
        if (wp % grid.n() != 0 || wq % grid.n() != 0)
            throw topology_error("from_triangles: non-integral winding");
        loop.winding_p = int(wp / grid.n());
        loop.winding_q = int(wq / grid.n());
        loops.push_back(std::move(loop));
    }

    return assemble(grid, std::move(tri_state), {}, {}, std::move(loops));
}

SubSurface SubSurface::complement() const {
    SubSurface r;
    r.grid_ = grid_;
    r.tri_state_ = tri_state_;
    for (auto& s : r.tri_state_)
        s = (s == 2) ? 2 : (s ? 0 : 1);
    r.cuts_ = cuts_;
    const double tri_area = grid_.triangle_area();
    for (auto& c : r.cuts_) {
        c.inside_mask = uint8_t(~c.inside_mask & 7u);
        std::swap(c.src_edge, c.dst_edge);
        std::swap(c.src_param, c.dst_param);
        c.in_area = tri_area - c.in_area;
    }
    r.edge_cuts_ = edge_cuts_;
    r.loops_ = loops_;
    for (auto& loop : r.loops_) {
        std::reverse(loop.points.begin(), loop.points.end());
        std::reverse(loop.cut_tris.begin(), loop.cut_tris.end());
        loop.winding_p = -loop.winding_p;
        loop.winding_q = -loop.winding_q;
        if (loop.is_wall) {
            std::reverse(loop.wall_edges.begin(), loop.wall_edges.end());
            for (auto& [e, f] : loop.wall_edges)
                f = !f;
            std::swap(loop.atom_in, loop.atom_out);
        }
        // Cut loops keep their atom ids: piece 0 tracks the region side.
    }
    r.compute_measure();
    return r;
}

SubSurface SubSurface::disjoint_union(const SubSurface& a, const SubSurface& b) {
    if (a.grid_ != b.grid_)
        throw std::invalid_argument("disjoint_union: grid mismatch");
    const TorusGrid& g = a.grid_;
    std::vector<char> atouch(size_t(g.num_vertices()), 0);
    for (int t = 0; t < g.num_triangles(); ++t)
        if (a.tri_state_[size_t(t)] != 0)
            for (int v : g.tri_corners(t))
                atouch[size_t(v)] = 1;
    for (int t = 0; t < g.num_triangles(); ++t)
        if (b.tri_state_[size_t(t)] != 0)
            for (int v : g.tri_corners(t))
                if (atouch[size_t(v)])
                    throw std::invalid_argument(
                        "disjoint_union: closures are not disjoint");
    SubSurface r;
    r.grid_ = g;
    r.tri_state_ = a.tri_state_;
    for (int t = 0; t < g.num_triangles(); ++t)
        if (b.tri_state_[size_t(t)] != 0)
            r.tri_state_[size_t(t)] = b.tri_state_[size_t(t)];
    r.cuts_ = a.cuts_;
    r.cuts_.insert(r.cuts_.end(), b.cuts_.begin(), b.cuts_.end());
    std::sort(r.cuts_.begin(), r.cuts_.end(),
              [](const TriCut& x, const TriCut& y) { return x.tri < y.tri; });
    r.edge_cuts_ = a.edge_cuts_;
    r.edge_cuts_.insert(r.edge_cuts_.end(), b.edge_cuts_.begin(),
                        b.edge_cuts_.end());
    std::sort(r.edge_cuts_.begin(), r.edge_cuts_.end());
    r.loops_ = a.loops_;
    r.loops_.insert(r.loops_.end(), b.loops_.begin(), b.loops_.end());
    r.compute_measure();
    return r;
}

SubSurface SubSurface::assemble(const TorusGrid& grid,
                                std::vector<uint8_t> tri_state,
                                std::vector<TriCut> cuts,
                                std::vector<std::pair<int, double>> edge_cuts,
                                std::vector<BoundaryLoop> loops) {
    SubSurface r;
    r.grid_ = grid;
    r.tri_state_ = std::move(tri_state);
    r.cuts_ = std::move(cuts);
    r.edge_cuts_ = std::move(edge_cuts);
    r.loops_ = std::move(loops);
    r.compute_measure();
    return r;
}

void SubSurface::compute_measure() {
    const double tri_area = grid_.triangle_area();
    double m = 0.0;
    long long full = 0;
    for (uint8_t s : tri_state_)
        if (s == 1)
            ++full;
    m = double(full) * tri_area;
    for (const TriCut& c : cuts_)
        m += c.in_area;
    measure_ = m;
}

std::vector<int> SubSurface::triangle_ids() const {
    std::vector<int> out;
    for (int t = 0; t < int(tri_state_.size()); ++t)
        if (tri_state_[size_t(t)] != 0)
            out.push_back(t);
    return out;
}

std::vector<int> SubSurface::region_components(int* count) const {
    const int num_tris = grid_.num_triangles();
    std::vector<int> parent(static_cast<size_t>(num_tris));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[size_t(x)] != x) {
            parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
            x = parent[size_t(x)];
        }
        return x;
    };

    std::vector<int> cut_of_tri(size_t(num_tris), -1);
    for (size_t i = 0; i < cuts_.size(); ++i)
        cut_of_tri[size_t(cuts_[i].tri)] = int(i);
    std::vector<char> edge_cut(size_t(grid_.num_edges()), 0);
    for (const auto& [e, s] : edge_cuts_)
        edge_cut[size_t(e)] = 1;
    std::vector<char> edge_wall(size_t(grid_.num_edges()), 0);
    for (const auto& loop : loops_)
        for (const auto& [e, fwd] : loop.wall_edges)
            edge_wall[size_t(e)] = 1;

    // The region touches an uncut edge of a cut triangle only when the
    // edge endpoints lie on the inside piece.
    auto touches = [&](int t, int va) {
        if (tri_state_[size_t(t)] == 1)
            return true;
        if (tri_state_[size_t(t)] == 0)
            return false;
        const auto corners = grid_.tri_corners(t);
        int k = 0;
        while (corners[size_t(k)] != va)
            ++k;
        return ((cuts_[size_t(cut_of_tri[size_t(t)])].inside_mask >> k) & 1) != 0;
    };

    for (int e = 0; e < grid_.num_edges(); ++e) {
        if (edge_wall[size_t(e)])
            continue;
        const auto ts = grid_.edge_tris(e);
        const int t1 = ts[0].first, t2 = ts[1].first;
        if (tri_state_[size_t(t1)] == 0 || tri_state_[size_t(t2)] == 0)
            continue;
        bool join = false;
        if (edge_cut[size_t(e)]) {
            join = true; // the region-side pieces meet along the edge
        } else {
            const auto [va, vb] = grid_.edge_endpoints(e);
            join = touches(t1, va) && touches(t2, va);
        }
        if (join) {
            const int a = find(t1), b = find(t2);
            if (a != b)
                parent[size_t(a)] = b;
        }
    }

    std::vector<int> label(size_t(num_tris), -1);
    int next = 0;
    for (int t = 0; t < num_tris; ++t) {
        if (tri_state_[size_t(t)] == 0)
            continue;
        const int r = find(t);
        if (label[size_t(r)] < 0)
            label[size_t(r)] = next++;
    }
    std::vector<int> out(size_t(num_tris), -1);
    for (int t = 0; t < num_tris; ++t)
        if (tri_state_[size_t(t)] != 0)
            out[size_t(t)] = label[size_t(find(t))];
    if (count)
        *count = next;
    return out;
}

SubSurface SubSurface::restrict_components(const std::vector<int>& labels,
                                           const std::vector<char>& keep) const {
    std::vector<uint8_t> tri_state = tri_state_;
    for (int t = 0; t < int(tri_state.size()); ++t)
        if (tri_state[size_t(t)] != 0 && !keep[size_t(labels[size_t(t)])])
            tri_state[size_t(t)] = 0;
    std::vector<TriCut> cuts;
    for (const TriCut& c : cuts_)
        if (tri_state[size_t(c.tri)] == 2)
            cuts.push_back(c);
    std::vector<std::pair<int, double>> edge_cuts;
    for (const auto& ec : edge_cuts_) {
        const auto ts = grid_.edge_tris(ec.first);
        if (tri_state[size_t(ts[0].first)] == 2 ||
            tri_state[size_t(ts[1].first)] == 2)
            edge_cuts.push_back(ec);
    }
    std::vector<BoundaryLoop> loops;
    for (const auto& loop : loops_) {
        int t = -1;
        if (!loop.cut_tris.empty())
            t = loop.cut_tris[0];
        else if (!loop.wall_edges.empty())
            t = loop.atom_in / 2;
        if (t >= 0 && labels[size_t(t)] >= 0 && keep[size_t(labels[size_t(t)])])
            loops.push_back(loop);
    }
    return assemble(grid_, std::move(tri_state), std::move(cuts),
                    std::move(edge_cuts), std::move(loops));
}

bool SubSurface::same_cells(const SubSurface& other) const {
    if (grid_ != other.grid_ || tri_state_ != other.tri_state_)
        return false;
    if (cuts_.size() != other.cuts_.size())
        return false;
    for (size_t i = 0; i < cuts_.size(); ++i) {
        const TriCut& a = cuts_[i];
        const TriCut& b = other.cuts_[i];
        if (a.tri != b.tri || a.inside_mask != b.inside_mask ||
            a.src_param != b.src_param || a.dst_param != b.dst_param)
            return false;
    }
    return true;
}

double SubSurface::integrate(const TorusField& field) const {
    if (field.grid() != grid_)
        throw std::invalid_argument("integrate: grid mismatch");
    const double tri_area = grid_.triangle_area();
    double sum = 0.0;
    for (int t = 0; t < int(tri_state_.size()); ++t)
        if (tri_state_[size_t(t)] == 1) {
            const auto c = grid_.tri_corners(t);
            sum += tri_area *
                   (field.value(c[0]) + field.value(c[1]) + field.value(c[2])) / 3.0;
        }
    const double inv_n2 = 1.0 / (double(grid_.n()) * double(grid_.n()));
    for (const TriCut& cut : cuts_) {
        const auto corners = grid_.tri_corners(cut.tri);
        const auto off = grid_.tri_corner_offsets(cut.tri);
        std::array<double, 3> cv = {field.value(corners[0]),
                                    field.value(corners[1]),
                                    field.value(corners[2])};
        std::vector<std::array<double, 2>> pts;
        std::vector<double> vals;
        for (int k = 0; k < 3; ++k) {
            const int k1 = (k + 1) % 3;
            if (cut.inside_mask & (1 << k)) {
                pts.push_back(off[size_t(k)]);
                vals.push_back(cv[size_t(k)]);
            }
            const bool in_k = (cut.inside_mask >> k) & 1;
            const bool in_k1 = (cut.inside_mask >> k1) & 1;
            if (in_k != in_k1) {
                const double u = (k == cut.src_edge) ? cut.src_param : cut.dst_param;
                pts.push_back({off[size_t(k)][0] + u * (off[size_t(k1)][0] - off[size_t(k)][0]),
                               off[size_t(k)][1] + u * (off[size_t(k1)][1] - off[size_t(k)][1])});
                vals.push_back(cv[size_t(k)] + u * (cv[size_t(k1)] - cv[size_t(k)]));
            }
        }
        sum += poly_area_integral(pts, vals).integral * inv_n2;
    }
    return sum;
}

} // namespace tqs
