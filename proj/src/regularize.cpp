#include "tqs/regularize.hpp"

#include <algorithm>
#include <numeric>

namespace tqs {

LoopClass classify_loop(const BoundaryLoop& loop) {
    return loop.contractible() ? LoopClass::contractible : LoopClass::essential;
}

namespace {

struct UnionFind {
    std::vector<int> parent;

    void reset(size_t n) {
        parent.resize(n);
        std::iota(parent.begin(), parent.end(), 0);
    }

    int find(int x) {
        while (parent[size_t(x)] != x) {
            parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
            x = parent[size_t(x)];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[size_t(a)] = b;
    }
};

// Face decomposition of the torus cut along all boundary loops of W.
// Atom id = 2*tri + piece, piece 0 being the region side of a cut triangle
// (or the whole triangle when uncut).
struct Analysis {
    const SubSurface* w = nullptr;
    int num_faces = 0;
    std::vector<int> atom_face;     // -1 for unused atom slots
    std::vector<int> cut_of_tri;    // index into w->cuts() or -1
    std::vector<char> edge_cut;
    std::vector<char> edge_wall;
    std::vector<double> face_measure;
    std::vector<int> face_chi;
    std::vector<char> face_in;
    std::vector<int> loop_face_in, loop_face_out;

    // Per contractible loop: the faces of its disk side, and its measure.
    std::vector<std::vector<char>> disk_faces;  // empty for essential loops
    std::vector<double> disk_measure;

    int atom_at(int tri, int corner_vertex, const TorusGrid& g) const {
        const int ci = cut_of_tri[size_t(tri)];
        if (ci < 0)
            return 2 * tri;
        const auto corners = g.tri_corners(tri);
        int k = 0;
        while (corners[size_t(k)] != corner_vertex)
            ++k;
        const bool in = (w->cuts()[size_t(ci)].inside_mask >> k) & 1;
        return 2 * tri + (in ? 0 : 1);
    }
};

UnionFind& scratch_uf() {
    thread_local UnionFind uf;
    return uf;
}

void build_analysis(const SubSurface& w, Analysis& a) {
    const TorusGrid& g = w.grid();
    const int num_tris = g.num_triangles();
    const int num_edges = g.num_edges();
    const int num_verts = g.num_vertices();
    const double tri_area = g.triangle_area();

    a.w = &w;
    a.cut_of_tri.assign(size_t(num_tris), -1);
    for (size_t i = 0; i < w.cuts().size(); ++i)
        a.cut_of_tri[size_t(w.cuts()[i].tri)] = int(i);
    a.edge_cut.assign(size_t(num_edges), 0);
    for (const auto& [e, s] : w.edge_cuts())
        a.edge_cut[size_t(e)] = 1;
    a.edge_wall.assign(size_t(num_edges), 0);
    for (const auto& loop : w.loops())
        for (const auto& [e, fwd] : loop.wall_edges)
            a.edge_wall[size_t(e)] = 1;

    UnionFind& uf = scratch_uf();
    uf.reset(size_t(2 * num_tris));

    for (int e = 0; e < num_edges; ++e) {
        if (a.edge_wall[size_t(e)])
            continue;
        const auto ts = g.edge_tris(e);
        const auto [va, vb] = g.edge_endpoints(e);
        if (a.edge_cut[size_t(e)]) {
            uf.unite(a.atom_at(ts[0].first, va, g), a.atom_at(ts[1].first, va, g));
            uf.unite(a.atom_at(ts[0].first, vb, g), a.atom_at(ts[1].first, vb, g));
        } else {
            uf.unite(a.atom_at(ts[0].first, va, g), a.atom_at(ts[1].first, va, g));
        }
    }

    // Compress face ids.
    a.atom_face.assign(size_t(2 * num_tris), -1);
    a.num_faces = 0;
    for (int t = 0; t < num_tris; ++t) {
        const int pieces = (a.cut_of_tri[size_t(t)] >= 0) ? 2 : 1;
        for (int p = 0; p < pieces; ++p) {
            const int root = uf.find(2 * t + p);
            if (a.atom_face[size_t(root)] < 0)
                a.atom_face[size_t(root)] = a.num_faces++;
        }
    }
    auto face_of = [&](int atom) {
        return a.atom_face[size_t(uf.find(atom))];
    };

    a.face_measure.assign(size_t(a.num_faces), 0.0);
    a.face_in.assign(size_t(a.num_faces), 0);
    std::vector<char> face_in_set(size_t(a.num_faces), 0);
    std::vector<int> chiV(size_t(a.num_faces), 0), chiE(size_t(a.num_faces), 0),
        chiF(size_t(a.num_faces), 0);

    for (int t = 0; t < num_tris; ++t) {
        const int ci = a.cut_of_tri[size_t(t)];
        if (ci < 0) {
            const int f = face_of(2 * t);
            a.face_measure[size_t(f)] += tri_area;
            chiF[size_t(f)] += 1;
            const char in = w.state(t) == 1;
            if (face_in_set[size_t(f)] && a.face_in[size_t(f)] != in)
                throw topology_error("face crosses the region boundary");
            a.face_in[size_t(f)] = in;
            face_in_set[size_t(f)] = 1;
        } else {
            const TriCut& cut = w.cuts()[size_t(ci)];
            const int f0 = face_of(2 * t), f1 = face_of(2 * t + 1);
            a.face_measure[size_t(f0)] += cut.in_area;
            a.face_measure[size_t(f1)] += tri_area - cut.in_area;
            chiF[size_t(f0)] += 1;
            chiF[size_t(f1)] += 1;
            for (const auto& [f, in] : {std::pair<int, char>{f0, 1},
                                        std::pair<int, char>{f1, 0}}) {
                if (face_in_set[size_t(f)] && a.face_in[size_t(f)] != in)
                    throw topology_error("face crosses the region boundary");
                a.face_in[size_t(f)] = in;
                face_in_set[size_t(f)] = 1;
            }
            // Chord object.
            chiE[size_t(f0)] += 1;
            if (f1 != f0)
                chiE[size_t(f1)] += 1;
        }
    }

    // Grid-edge objects (whole edges or two sub-segments at a cut point).
    for (int e = 0; e < num_edges; ++e) {
        const auto ts = g.edge_tris(e);
        const auto [va, vb] = g.edge_endpoints(e);
        if (a.edge_cut[size_t(e)]) {
            for (const int v : {va, vb}) {
                const int f1 = face_of(a.atom_at(ts[0].first, v, g));
                const int f2 = face_of(a.atom_at(ts[1].first, v, g));
                chiE[size_t(f1)] += 1;
                if (f2 != f1)
                    chiE[size_t(f2)] += 1;
            }
        } else {
            const int f1 = face_of(a.atom_at(ts[0].first, va, g));
            const int f2 = face_of(a.atom_at(ts[1].first, va, g));
            chiE[size_t(f1)] += 1;
            if (f2 != f1)
                chiE[size_t(f2)] += 1;
        }
    }

    // Grid-vertex objects.
    {
        std::array<int, 6> inc{};
        for (int v = 0; v < num_verts; ++v) {
            int cnt = 0;
            for (int k = 0; k < 6; ++k) {
                const int t = g.star_triangle(v, k);
                const int f = face_of(a.atom_at(t, v, g));
                bool seen = false;
                for (int s = 0; s < cnt; ++s)
                    if (inc[size_t(s)] == f)
                        seen = true;
                if (!seen)
                    inc[size_t(cnt++)] = f;
            }
            for (int s = 0; s < cnt; ++s)
                chiV[size_t(inc[size_t(s)])] += 1;
        }
    }
    // Cut-point objects.
    for (const auto& [e, s] : w.edge_cuts()) {
        const auto ts = g.edge_tris(e);
        std::array<int, 4> inc{};
        int cnt = 0;
        for (const int t : {ts[0].first, ts[1].first}) {
            if (a.cut_of_tri[size_t(t)] < 0)
                throw topology_error("cut edge without cut triangle");
            for (int p = 0; p < 2; ++p) {
                const int f = face_of(2 * t + p);
                bool seen = false;
                for (int q = 0; q < cnt; ++q)
                    if (inc[size_t(q)] == f)
                        seen = true;
                if (!seen)
                    inc[size_t(cnt++)] = f;
            }
        }
        for (int q = 0; q < cnt; ++q)
            chiV[size_t(inc[size_t(q)])] += 1;
    }

    a.face_chi.assign(size_t(a.num_faces), 0);
    int chi_total = 0;
    for (int f = 0; f < a.num_faces; ++f) {
        a.face_chi[size_t(f)] = chiV[size_t(f)] - chiE[size_t(f)] + chiF[size_t(f)];
        chi_total += a.face_chi[size_t(f)];
    }
    if (chi_total != 0)
        throw topology_error("face Euler characteristics do not sum to 0");

    // Loop incidences.
    const auto& loops = w.loops();
    a.loop_face_in.resize(loops.size());
    a.loop_face_out.resize(loops.size());
    for (size_t l = 0; l < loops.size(); ++l) {
        a.loop_face_in[l] = face_of(loops[l].atom_in);
        a.loop_face_out[l] = face_of(loops[l].atom_out);
        if (!a.face_in[size_t(a.loop_face_in[l])] ||
            a.face_in[size_t(a.loop_face_out[l])])
            throw topology_error("loop incidence disagrees with region sides");
    }

    // Disk sides of contractible loops: remove the loop's edge from the
    // face adjacency graph and flood from its region side.
    a.disk_faces.assign(loops.size(), {});
    a.disk_measure.assign(loops.size(), 0.0);
    for (size_t l = 0; l < loops.size(); ++l) {
        if (!loops[l].contractible())
            continue;
        std::vector<char> reach(size_t(a.num_faces), 0);
        std::vector<int> stack = {a.loop_face_in[l]};
        reach[size_t(a.loop_face_in[l])] = 1;
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            for (size_t m = 0; m < loops.size(); ++m) {
                if (m == l)
                    continue;
                int other = -1;
                if (a.loop_face_in[m] == f)
                    other = a.loop_face_out[m];
                else if (a.loop_face_out[m] == f)
                    other = a.loop_face_in[m];
                if (other >= 0 && !reach[size_t(other)]) {
                    reach[size_t(other)] = 1;
                    stack.push_back(other);
                }
            }
        }
        if (reach[size_t(a.loop_face_out[l])])
            throw topology_error("contractible boundary loop does not separate");
        int chi_in = 0, chi_out = 0;
        for (int f = 0; f < a.num_faces; ++f)
            (reach[size_t(f)] ? chi_in : chi_out) += a.face_chi[size_t(f)];
        if (chi_in == 1 && chi_out == 1)
            throw topology_error("both sides of a loop claim to be disks");
        std::vector<char> disk;
        if (chi_in == 1) {
            disk = std::move(reach);
        } else if (chi_out == 1) {
            disk.assign(size_t(a.num_faces), 0);
            for (int f = 0; f < a.num_faces; ++f)
                disk[size_t(f)] = !reach[size_t(f)];
        } else {
            throw topology_error("no disk side for a contractible loop");
        }
        double m = 0.0;
        for (int f = 0; f < a.num_faces; ++f)
            if (disk[size_t(f)])
                m += a.face_measure[size_t(f)];
        a.disk_faces[l] = std::move(disk);
        a.disk_measure[l] = m;
    }
}

// Region made of the selected faces, with boundary loops inherited from W.
SubSurface materialize(const SubSurface& w, const Analysis& a,
                       const std::vector<char>& face_sel, UnionFind& uf) {
    const TorusGrid& g = w.grid();
    const int num_tris = g.num_triangles();
    const double tri_area = g.triangle_area();
    auto face_of = [&](int atom) {
        return a.atom_face[size_t(uf.find(atom))];
    };

    std::vector<uint8_t> tri_state(size_t(num_tris), 0);
    std::vector<TriCut> cuts;
    std::vector<char> loop_flip(w.loops().size(), 0);
    std::vector<char> loop_keep(w.loops().size(), 0);
    for (size_t l = 0; l < w.loops().size(); ++l) {
        const bool in_side = face_sel[size_t(a.loop_face_in[l])];
        const bool out_side = face_sel[size_t(a.loop_face_out[l])];
        loop_keep[l] = in_side != out_side;
        loop_flip[l] = loop_keep[l] && !in_side;
    }

    for (int t = 0; t < num_tris; ++t) {
        const int ci = a.cut_of_tri[size_t(t)];
        if (ci < 0) {
            tri_state[size_t(t)] = face_sel[size_t(face_of(2 * t))] ? 1 : 0;
            continue;
        }
        const bool p0 = face_sel[size_t(face_of(2 * t))];
        const bool p1 = face_sel[size_t(face_of(2 * t + 1))];
        if (p0 && p1) {
            tri_state[size_t(t)] = 1;
        } else if (!p0 && !p1) {
            tri_state[size_t(t)] = 0;
        } else {
            tri_state[size_t(t)] = 2;
            TriCut cut = w.cuts()[size_t(ci)];
            if (p1 && !p0) {
                cut.inside_mask = uint8_t(~cut.inside_mask & 7u);
                std::swap(cut.src_edge, cut.dst_edge);
                std::swap(cut.src_param, cut.dst_param);
                cut.in_area = tri_area - cut.in_area;
            }
            cuts.push_back(cut);
        }
    }

    std::vector<std::pair<int, double>> edge_cuts;
    for (const auto& ec : w.edge_cuts()) {
        const auto ts = g.edge_tris(ec.first);
        if (tri_state[size_t(ts[0].first)] == 2 ||
            tri_state[size_t(ts[1].first)] == 2)
            edge_cuts.push_back(ec);
    }

    std::vector<BoundaryLoop> loops;
    for (size_t l = 0; l < w.loops().size(); ++l) {
        if (!loop_keep[l])
            continue;
        BoundaryLoop loop = w.loops()[l];
        if (loop_flip[l]) {
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
        }
        loops.push_back(std::move(loop));
    }

    return SubSurface::assemble(g, std::move(tri_state), std::move(cuts),
                                std::move(edge_cuts), std::move(loops));
}

size_t checked_loop_index(const SubSurface& w, size_t loop_index) {
    if (loop_index >= w.loops().size())
        throw std::invalid_argument("loop index out of range");
    return loop_index;
}

std::vector<size_t> contractible_loops(const SubSurface& w) {
    std::vector<size_t> out;
    for (size_t l = 0; l < w.loops().size(); ++l)
        if (w.loops()[l].contractible())
            out.push_back(l);
    return out;
}

// Disk containment is face-set inclusion; a loop is maximal when every
// other contractible loop's disk is nested inside or disjoint from its own.
bool disk_maximal(const Analysis& a, const std::vector<size_t>& contractible,
                  size_t l) {
    for (size_t m : contractible) {
        if (m == l)
            continue;
        bool subset = true, disjoint = true;
        for (int f = 0; f < a.num_faces; ++f) {
            if (a.disk_faces[m][size_t(f)] && !a.disk_faces[l][size_t(f)])
                subset = false;
            if (a.disk_faces[m][size_t(f)] && a.disk_faces[l][size_t(f)])
                disjoint = false;
        }
        if (!subset && !disjoint)
            return false;
    }
    return true;
}

} // namespace

SubSurface fill_disk(const SubSurface& w, size_t loop_index) {
    checked_loop_index(w, loop_index);
    if (!w.loops()[loop_index].contractible())
        throw std::invalid_argument("fill_disk: loop is essential");
    Analysis a;
    build_analysis(w, a);
    return materialize(w, a, a.disk_faces[loop_index], scratch_uf());
}

std::vector<size_t> maximal_loops(const SubSurface& w) {
    Analysis a;
    build_analysis(w, a);
    const std::vector<size_t> contractible = contractible_loops(w);
    std::vector<size_t> out;
    for (size_t l : contractible)
        if (disk_maximal(a, contractible, l))
            out.push_back(l);
    return out;
}

LoopSide classify_side(const SubSurface& w, size_t loop_index) {
    checked_loop_index(w, loop_index);
    if (!w.loops()[loop_index].contractible())
        throw std::invalid_argument("classify_side: loop is essential");
    Analysis a;
    build_analysis(w, a);
    const int f_w = a.loop_face_in[loop_index];
    return a.disk_faces[loop_index][size_t(f_w)] ? LoopSide::exterior
                                                 : LoopSide::interior;
}

namespace {

std::vector<char> regularized_faces(const SubSurface& w, const Analysis& a,
                                    std::vector<LoopAction>* provenance) {
    std::vector<char> sel(a.face_in.begin(), a.face_in.end());

    // Maximal contractible loops of the original W, classified by the
    // collar test, acted on in one batch.
    const std::vector<size_t> contractible = contractible_loops(w);
    for (size_t l : contractible) {
        if (!disk_maximal(a, contractible, l))
            continue;
        const bool exterior =
            a.disk_faces[l][size_t(a.loop_face_in[l])] != 0;
        for (int f = 0; f < a.num_faces; ++f)
            if (a.disk_faces[l][size_t(f)])
                sel[size_t(f)] = exterior ? 0 : 1;
    }

    if (provenance) {
        provenance->clear();
        for (size_t l = 0; l < w.loops().size(); ++l) {
            const bool in_side = sel[size_t(a.loop_face_in[l])];
            const bool out_side = sel[size_t(a.loop_face_out[l])];
            if (in_side != out_side)
                provenance->push_back(LoopAction::kept);
            else if (in_side)
                provenance->push_back(LoopAction::filled);
            else
                provenance->push_back(LoopAction::removed);
        }
    }
    return sel;
}

} // namespace

RegularizedSurface regularize(const SubSurface& w) {
    Analysis a;
    build_analysis(w, a);
    RegularizedSurface out;
    const std::vector<char> sel = regularized_faces(w, a, &out.provenance);
    out.region = materialize(w, a, sel, scratch_uf());
    for (const auto& loop : out.region.loops())
        if (loop.contractible())
            throw topology_error("regularize left a contractible boundary loop");
    return out;
}

double tau(const SubSurface& w) {
    Analysis a;
    build_analysis(w, a);
    const std::vector<char> sel = regularized_faces(w, a, nullptr);
    double m = 0.0;
    for (int f = 0; f < a.num_faces; ++f)
        if (sel[size_t(f)])
            m += a.face_measure[size_t(f)];
    return m;
}

} // namespace tqs
