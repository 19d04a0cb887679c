#pragma once

#include <array>
#include <string>
#include <vector>

#include "tqs/grid.hpp"

namespace tqs {

// Exact area-preserving map of the grid torus: an SL(2,Z) matrix acting on
// vertex indices plus a lattice translation (in units of 1/n).
struct LatticeSymplectomorphism {
    std::array<std::array<long long, 2>, 2> m = {{{1, 0}, {0, 1}}};
    std::array<long long, 2> t = {0, 0};

    long long det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

    static LatticeSymplectomorphism identity() { return {}; }
    static LatticeSymplectomorphism translation(long long a, long long b) {
        return {{{{1, 0}, {0, 1}}}, {a, b}};
    }
    // Order-6 rotation of the triangulated lattice; together with
    // translations and -I it generates the simplicial automorphisms.
    static LatticeSymplectomorphism rotation6() {
        return {{{{1, -1}, {1, 0}}}, {0, 0}};
    }

    LatticeSymplectomorphism compose(const LatticeSymplectomorphism& o) const;
    // True when the map sends triangles of the fixed (+1,+1) triangulation
    // to triangles, i.e. acts as a simplicial automorphism.
    bool preserves_triangulation() const;
};

// Piecewise-linear scalar field on the grid torus.  Vertex values carry the
// data; ties are broken symbolically by the lexicographic vertex index, so
// the perturbed comparison is a strict total order.
class TorusField {
public:
    TorusField(TorusGrid grid, std::vector<double> values);

    static TorusField from_values(int n, std::vector<double> values);
    static TorusField from_expression(int n, const std::string& expr);

    const TorusGrid& grid() const { return grid_; }
    int n() const { return grid_.n(); }
    const std::vector<double>& values() const { return values_; }
    double value(int v) const { return values_[size_t(v)]; }

    // Perturbed strict order: compare (value, vertex index).
    bool less(int a, int b) const {
        const double va = values_[size_t(a)], vb = values_[size_t(b)];
        if (va != vb)
            return va < vb;
        return a < b;
    }

    double min_value() const;
    double max_value() const;

    // Exact integral of the PL interpolant over the whole torus.
    double integrate() const;

    // H o phi^{-1} as a vertex permutation; rejects det != 1.
    TorusField apply_map(const LatticeSymplectomorphism& phi) const;

    // Vertex ids in increasing perturbed order.
    std::vector<int> sweep_order() const;

    // PL-critical vertices: lower/upper link component counts differ from
    // the regular (1,1) pattern under the perturbed order.
    bool is_critical_vertex(int v) const;
    std::vector<int> critical_vertices() const;
    // Values of critical vertices, sorted, duplicates removed.
    std::vector<double> critical_values() const;

    // Sorted distinct vertex values.
    std::vector<double> distinct_values() const;

    // A regular value close to t: midpoint of the value gap containing t.
    // Every vertex value is avoided, so sublevel extraction is safe.
    double regular_value_near(double t) const;

    bool is_vertex_value(double t) const;

    // Lower/upper link component counts of v under the perturbed order.
    std::pair<int, int> link_component_counts(int v) const;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

// Vertex-wise lift of a map over field values.
TorusField map_values(const TorusField& f, double (*fn)(double));

} // namespace tqs
