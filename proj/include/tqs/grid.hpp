#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace tqs {

// Triangulated n x n flat torus of total area 1.  Vertex (i,j) sits at
// (p,q) = (i/n, j/n) and every unit cell is split along its (+1,+1)
// diagonal, so the complex has n^2 vertices, 3n^2 edges and 2n^2
// triangles (V - E + F = 0).
//
// Identifiers:
//   vertex    v = i*n + j
//   cell      c = i*n + j
//   triangle  2c (lower: (i,j),(i+1,j),(i+1,j+1)) and
//             2c+1 (upper: (i,j),(i+1,j+1),(i,j+1)), both CCW
//   edge      3v + k with k = 0: v -> v+(1,0)   ("P" edge)
//                          k = 1: v -> v+(0,1)   ("Q" edge)
//                          k = 2: v -> v+(1,1)   ("D" edge)
class TorusGrid {
public:
    TorusGrid() = default;

    explicit TorusGrid(int n) : n_(n) {
        if (n < 8)
            throw std::invalid_argument("TorusGrid: grid size must be >= 8");
    }

    int n() const { return n_; }
    int num_vertices() const { return n_ * n_; }
    int num_triangles() const { return 2 * n_ * n_; }
    int num_edges() const { return 3 * n_ * n_; }

    double triangle_area() const { return 0.5 / (double(n_) * double(n_)); }

    int wrap(int i) const {
        i %= n_;
        return i < 0 ? i + n_ : i;
    }

    int vertex(int i, int j) const { return wrap(i) * n_ + wrap(j); }
    int vertex_i(int v) const { return v / n_; }
    int vertex_j(int v) const { return v % n_; }

    // Cyclic link of a vertex; consecutive entries span a triangle.
    static constexpr std::array<std::array<int, 2>, 6> kLinkDirs = {{
        {{1, 0}}, {{1, 1}}, {{0, 1}}, {{-1, 0}}, {{-1, -1}}, {{0, -1}},
    }};

    int link_neighbor(int v, int k) const {
        return vertex(vertex_i(v) + kLinkDirs[size_t(k)][0],
                      vertex_j(v) + kLinkDirs[size_t(k)][1]);
    }

    // Corner vertex ids of a triangle, in CCW order.
    std::array<int, 3> tri_corners(int t) const {
        const int c = t / 2;
        const int i = c / n_, j = c % n_;
        if ((t & 1) == 0)
            return {vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1)};
        return {vertex(i, j), vertex(i + 1, j + 1), vertex(i, j + 1)};
    }

    // Corner offsets from the cell origin, in cell units (multiply by 1/n).
    std::array<std::array<double, 2>, 3> tri_corner_offsets(int t) const {
        if ((t & 1) == 0)
            return {{{0, 0}, {1, 0}, {1, 1}}};
        return {{{0, 0}, {1, 1}, {0, 1}}};
    }

    // Origin (p,q) of the triangle's cell, wrapped into [0,1).
    std::array<double, 2> tri_origin(int t) const {
        const int c = t / 2;
        return {double(c / n_) / n_, double(c % n_) / n_};
    }

    // Local edge k of triangle t joins corner k to corner (k+1)%3.
    // Returns the canonical edge id and whether the triangle traverses it
    // forward (base vertex -> offset vertex).
    std::pair<int, bool> tri_edge(int t, int k) const {
        const int c = t / 2;
        const int i = c / n_, j = c % n_;
        if ((t & 1) == 0) {
            switch (k) {
            case 0: return {3 * vertex(i, j) + 0, true};       // A->B
            case 1: return {3 * vertex(i + 1, j) + 1, true};   // B->C
            default: return {3 * vertex(i, j) + 2, false};     // C->A
            }
        }
        switch (k) {
        case 0: return {3 * vertex(i, j) + 2, true};           // A->B
        case 1: return {3 * vertex(i, j + 1) + 0, false};      // B->C
        default: return {3 * vertex(i, j) + 1, false};         // C->A
        }
    }

    std::pair<int, int> edge_endpoints(int e) const {
        const int v = e / 3, k = e % 3;
        const int i = vertex_i(v), j = vertex_j(v);
        switch (k) {
        case 0: return {v, vertex(i + 1, j)};
        case 1: return {v, vertex(i, j + 1)};
        default: return {v, vertex(i + 1, j + 1)};
        }
    }

    // The two triangles incident to an edge, each with the local edge index
    // under which they see it.
    std::array<std::pair<int, int>, 2> edge_tris(int e) const {
        const int v = e / 3, k = e % 3;
        const int i = vertex_i(v), j = vertex_j(v);
        switch (k) {
        case 0:
            return {{{tri_lower(i, j), 0}, {tri_upper(i, j - 1), 1}}};
        case 1:
            return {{{tri_lower(i - 1, j), 1}, {tri_upper(i, j), 2}}};
        default:
            return {{{tri_lower(i, j), 2}, {tri_upper(i, j), 0}}};
        }
    }

    int tri_lower(int i, int j) const { return 2 * (wrap(i) * n_ + wrap(j)); }
    int tri_upper(int i, int j) const { return 2 * (wrap(i) * n_ + wrap(j)) + 1; }

    // Triangle between link slots k and k+1 at vertex v.
    int star_triangle(int v, int k) const {
        const int i = vertex_i(v), j = vertex_j(v);
        switch (k) {
        case 0: return tri_lower(i, j);
        case 1: return tri_upper(i, j);
        case 2: return tri_lower(i - 1, j);
        case 3: return tri_upper(i - 1, j - 1);
        case 4: return tri_lower(i - 1, j - 1);
        default: return tri_upper(i, j - 1);
        }
    }

    // Canonical edge occupying link slot k at v, plus whether the direction
    // v -> link_neighbor(v,k) is the canonical (forward) one.
    std::pair<int, bool> star_edge(int v, int k) const {
        const int i = vertex_i(v), j = vertex_j(v);
        switch (k) {
        case 0: return {3 * v + 0, true};
        case 1: return {3 * v + 2, true};
        case 2: return {3 * v + 1, true};
        case 3: return {3 * vertex(i - 1, j) + 0, false};
        case 4: return {3 * vertex(i - 1, j - 1) + 2, false};
        default: return {3 * vertex(i, j - 1) + 1, false};
        }
    }

    // Triangles on the left/right of the canonical (forward) direction.
    int edge_left_tri(int e) const {
        const auto ts = edge_tris(e);
        return (e % 3 == 2) ? ts[1].first : ts[0].first;
    }
    int edge_right_tri(int e) const {
        const auto ts = edge_tris(e);
        return (e % 3 == 2) ? ts[0].first : ts[1].first;
    }

    // Displacement of the canonical edge direction in cell units.
    static std::array<int, 2> edge_dir(int e) {
        switch (e % 3) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        default: return {1, 1};
        }
    }

    bool operator==(const TorusGrid& o) const { return n_ == o.n_; }
    bool operator!=(const TorusGrid& o) const { return n_ != o.n_; }

private:
    int n_ = 0;
};

// Thrown when a structural invariant of the torus complex is violated
// (impossible Betti number, inconsistent curve tracing, ...).  The CLI
// maps it to its own exit code, distinct from bad-input errors.
class topology_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tqs
