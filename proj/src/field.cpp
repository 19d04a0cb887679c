#include "tqs/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tqs/expr.hpp"

namespace tqs {

LatticeSymplectomorphism
LatticeSymplectomorphism::compose(const LatticeSymplectomorphism& o) const {
    // (this o o): x -> m*(o.m*x + o.t) + t
    LatticeSymplectomorphism r;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            r.m[a][b] = m[a][0] * o.m[0][b] + m[a][1] * o.m[1][b];
    for (int a = 0; a < 2; ++a)
        r.t[a] = m[a][0] * o.t[0] + m[a][1] * o.t[1] + t[a];
    return r;
}

bool LatticeSymplectomorphism::preserves_triangulation() const {
    // The edge directions of the complex are +-(1,0), +-(0,1), +-(1,1);
    // the map is simplicial iff all three direction classes land back in
    // the set and faces map to faces.  For det-1 integer maps it is enough
    // to check the three directions.
    const auto in_dirs = [](long long x, long long y) {
        return (x == 1 && y == 0) || (x == -1 && y == 0) ||
               (x == 0 && y == 1) || (x == 0 && y == -1) ||
               (x == 1 && y == 1) || (x == -1 && y == -1);
    };
    const long long e1x = m[0][0], e1y = m[1][0];
    const long long e2x = m[0][1], e2y = m[1][1];
    return in_dirs(e1x, e1y) && in_dirs(e2x, e2y) &&
           in_dirs(e1x + e2x, e1y + e2y);
}

TorusField::TorusField(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (int(values_.size()) != grid_.num_vertices())
        throw std::invalid_argument("TorusField: value count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("TorusField: non-finite vertex value");
}

TorusField TorusField::from_values(int n, std::vector<double> values) {
    return TorusField(TorusGrid(n), std::move(values));
}

TorusField TorusField::from_expression(int n, const std::string& expr) {
    const Expression e = Expression::parse(expr);
    TorusGrid grid(n);
    std::vector<double> vals(size_t(grid.num_vertices()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            vals[size_t(i) * n + j] = e.eval(double(i) / n, double(j) / n);
    return TorusField(grid, std::move(vals));
}

double TorusField::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double TorusField::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double TorusField::integrate() const {
    // Per-triangle average of the three corner values times the triangle
    // area.  Every vertex touches six triangles, so this telescopes to the
    // plain vertex average; keep the per-triangle form as the reference
    // quadrature.
    const double area = grid_.triangle_area();
    double sum = 0.0;
    for (int t = 0; t < grid_.num_triangles(); ++t) {
        const auto c = grid_.tri_corners(t);
        sum += (values_[size_t(c[0])] + values_[size_t(c[1])] +
                values_[size_t(c[2])]) / 3.0 * area;
    }
    return sum;
}

TorusField TorusField::apply_map(const LatticeSymplectomorphism& phi) const {
    if (phi.det() != 1)
        throw std::invalid_argument("apply_map: matrix is not in SL(2,Z)");
    const int n = grid_.n();
    // values'(phi(v)) = values(v)
    std::vector<double> out(values_.size());
    std::vector<char> seen(values_.size(), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const long long ii = phi.m[0][0] * i + phi.m[0][1] * j + phi.t[0];
            const long long jj = phi.m[1][0] * i + phi.m[1][1] * j + phi.t[1];
            const int w = grid_.vertex(int(ii % n), int(jj % n));
            out[size_t(w)] = values_[size_t(i) * n + j];
            seen[size_t(w)] = 1;
        }
    }
    for (char s : seen)
        if (!s)
            throw topology_error("apply_map: lattice map is not a bijection");
    return TorusField(grid_, std::move(out));
}

std::vector<int> TorusField::sweep_order() const {
    std::vector<int> order(values_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        return less(a, b);
    });
    return order;
}

std::pair<int, int> TorusField::link_component_counts(int v) const {
    // Walk the 6-cycle link and count maximal runs of below/above vertices.
    std::array<bool, 6> below;
    for (int k = 0; k < 6; ++k)
        below[size_t(k)] = less(grid_.link_neighbor(v, k), v);
    int lower = 0, upper = 0;
    for (int k = 0; k < 6; ++k) {
        const bool b = below[size_t(k)], prev = below[size_t((k + 5) % 6)];
        if (b && !prev)
            ++lower;
        if (!b && prev)
            ++upper;
    }
    if (lower == 0 && upper == 0) {
        // Uniform link: local extremum.
        if (below[0])
            lower = 1;
        else
            upper = 1;
    }
    return {lower, upper};
}

bool TorusField::is_critical_vertex(int v) const {
    const auto [lo, up] = link_component_counts(v);
    return !(lo == 1 && up == 1);
}

std::vector<int> TorusField::critical_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < grid_.num_vertices(); ++v)
        if (is_critical_vertex(v))
            out.push_back(v);
    return out;
}

std::vector<double> TorusField::critical_values() const {
    std::vector<double> vals;
    for (int v : critical_vertices())
        vals.push_back(values_[size_t(v)]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

std::vector<double> TorusField::distinct_values() const {
    std::vector<double> vals = values_;
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

bool TorusField::is_vertex_value(double t) const {
    for (double v : values_)
        if (v == t)
            return true;
    return false;
}

double TorusField::regular_value_near(double t) const {
    const std::vector<double> vals = distinct_values();
    if (t < vals.front())
        return vals.front() - 1.0;
    if (t > vals.back())
        return vals.back() + 1.0;
    // Midpoint of the gap containing t; if t hits a vertex value exactly,
    // use the gap above it (or below at the top).
    auto it = std::upper_bound(vals.begin(), vals.end(), t);
    if (it == vals.begin())
        return vals.front() - 1.0;
    if (it == vals.end())
        return vals.back() + 1.0;
    const double lo = *(it - 1), hi = *it;
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi || is_vertex_value(mid))
        throw topology_error("regular_value_near: value gap too tight for doubles");
    return mid;
}

TorusField map_values(const TorusField& f, double (*fn)(double)) {
    std::vector<double> vals = f.values();
    for (double& v : vals)
        v = fn(v);
    return TorusField(f.grid(), std::move(vals));
}

} // namespace tqs
