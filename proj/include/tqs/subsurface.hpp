#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tqs/field.hpp"
#include "tqs/grid.hpp"

namespace tqs {

// Clip {value <= t} against a triangle with CCW corners `xy` (cell units)
// carrying linearly interpolated corner values.  Returns the clipped area
// and the integral of the interpolant over the clipped part, in cell
// units^2 (scale by 1/n^2 for torus units).
struct ClipResult {
    double area = 0.0;
    double integral = 0.0;
};
ClipResult clip_below(const std::array<std::array<double, 2>, 3>& xy,
                      const std::array<double, 3>& val, double t);

// Oriented simple closed PL curve on the grid torus, traced with its region
// on the left.  Level-set loops run through triangle interiors (cut
// chords); cell-region loops run along grid edges.
struct BoundaryLoop {
    std::vector<std::array<double, 2>> points; // wrapped positions
    int winding_p = 0;
    int winding_q = 0;
    bool is_wall = false;

    // Atom incidence (atom id = 2*tri + piece, piece 0 = region side).
    int atom_in = -1;
    int atom_out = -1;

    std::vector<int> cut_tris;                      // level loops
    std::vector<std::pair<int, bool>> wall_edges;   // wall loops

    bool contractible() const { return winding_p == 0 && winding_q == 0; }
};

// A triangle split by a single chord of the region boundary.
struct TriCut {
    int tri = -1;
    uint8_t inside_mask = 0;  // local corners on the region side (1 or 2 bits)
    uint8_t src_edge = 0;     // local edge carrying the chord source
    uint8_t dst_edge = 0;     // local edge carrying the chord target
    double src_param = 0.0;   // along the local edge direction
    double dst_param = 0.0;
    double in_area = 0.0;     // region-side area, torus units
};

// Closed cell-region of the torus: full triangles plus chord-clipped
// triangles, with traced boundary loops.  Triangle states: 0 out, 1 in,
// 2 cut.  At most one chord per triangle and one cut point per grid edge.
class SubSurface {
public:
    SubSurface() = default;

    static SubSurface from_triangles(const TorusGrid& grid,
                                     const std::vector<int>& tris);

    // {H <= t} for a regular value t (t must avoid all vertex values).
    static SubSurface sublevel(const TorusField& field, double t);

    // Band of transverse width `width_cells`/n about lines of slope (k,l),
    // bounded by lines at offset (offset_cells + 1/2)/n so no boundary
    // passes through a vertex.  gcd(|k|,|l|) must be 1.
    static SubSurface linear_annulus(const TorusGrid& grid, int k, int l,
                                     int offset_cells, int width_cells);

    // Closure of the complement.
    SubSurface complement() const;

    // Union of subsurfaces with disjoint closures (validated).
    static SubSurface disjoint_union(const SubSurface& a, const SubSurface& b);

    const TorusGrid& grid() const { return grid_; }
    double measure() const { return measure_; }
    const std::vector<BoundaryLoop>& loops() const { return loops_; }
    const std::vector<TriCut>& cuts() const { return cuts_; }
    const std::vector<std::pair<int, double>>& edge_cuts() const {
        return edge_cuts_;
    }

    uint8_t state(int tri) const { return tri_state_[size_t(tri)]; }
    const std::vector<uint8_t>& tri_states() const { return tri_state_; }
    bool cell_aligned() const { return cuts_.empty(); }
    bool is_empty() const { return measure_ == 0.0 && cuts_.empty(); }

    // Sorted ids of triangles meeting the region (full or cut).
    std::vector<int> triangle_ids() const;

    // Connected components of the region: per-triangle labels 0..count-1,
    // -1 outside.
    std::vector<int> region_components(int* count = nullptr) const;

    // Region restricted to the selected components (labels as returned by
    // region_components).
    SubSurface restrict_components(const std::vector<int>& labels,
                                   const std::vector<char>& keep) const;

    // Exact cell-set equality (states, cut masks and chord data).
    bool same_cells(const SubSurface& other) const;

    // Integral of the PL field over the region.
    double integrate(const TorusField& field) const;

    // Region-side polygon of a cut triangle, local cell-unit coords.
    static std::vector<std::array<double, 2>> cut_polygon(const TorusGrid& grid,
                                                          const TriCut& cut);

    // Internal: assemble from raw parts (used by the regularizer).
    static SubSurface assemble(const TorusGrid& grid,
                               std::vector<uint8_t> tri_state,
                               std::vector<TriCut> cuts,
                               std::vector<std::pair<int, double>> edge_cuts,
                               std::vector<BoundaryLoop> loops);

private:
    TorusGrid grid_;
    std::vector<uint8_t> tri_state_;
    std::vector<TriCut> cuts_;
    std::vector<std::pair<int, double>> edge_cuts_;
    std::vector<BoundaryLoop> loops_;
    double measure_ = 0.0;

    void compute_measure();
};

// Spec-level convenience: sublevel set of a field.
inline SubSurface sublevel(const TorusField& field, double t) {
    return SubSurface::sublevel(field, t);
}

} // namespace tqs
