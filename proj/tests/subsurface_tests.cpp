#include <doctest.h>

#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include "tqs/subsurface.hpp"

using namespace tqs;

namespace {

double u01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

TorusField random_field(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> vals(size_t(n) * size_t(n));
    for (auto& v : vals)
        v = 2.0 * u01(rng) - 1.0;
    return TorusField::from_values(n, std::move(vals));
}

// Independent oracle: connected components of the below-threshold vertex
// set under grid adjacency.
int below_vertex_components(const TorusField& f, double t) {
    const TorusGrid& g = f.grid();
    std::vector<char> below(size_t(g.num_vertices()));
    for (int v = 0; v < g.num_vertices(); ++v)
        below[size_t(v)] = f.value(v) < t;
    std::vector<char> seen(size_t(g.num_vertices()), 0);
    int comps = 0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (!below[size_t(v)] || seen[size_t(v)])
            continue;
        ++comps;
        std::queue<int> q;
        q.push(v);
        seen[size_t(v)] = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int k = 0; k < 6; ++k) {
                const int w = g.link_neighbor(u, k);
                if (below[size_t(w)] && !seen[size_t(w)]) {
                    seen[size_t(w)] = 1;
                    q.push(w);
                }
            }
        }
    }
    return comps;
}

std::vector<int> rect_tris(const TorusGrid& g, int i0, int j0, int w, int h) {
    std::vector<int> tris;
    for (int i = i0; i < i0 + w; ++i)
        for (int j = j0; j < j0 + h; ++j) {
            tris.push_back(g.tri_lower(i, j));
            tris.push_back(g.tri_upper(i, j));
        }
    return tris;
}

} // namespace

TEST_CASE("clip_below: closed-form check on a unit triangle") {
    const std::array<std::array<double, 2>, 3> xy = {{{0, 0}, {1, 0}, {1, 1}}};
    const std::array<double, 3> val = {0.0, 1.0, 2.0};
    const ClipResult full = clip_below(xy, val, 5.0);
    CHECK(full.area == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(full.integral == doctest::Approx(0.5).epsilon(1e-15));
    const ClipResult none = clip_below(xy, val, -1.0);
    CHECK(none.area == 0.0);
    // H(x,y) = x + y on this triangle; {x+y <= 1/2} clips a corner wedge.
    const ClipResult half = clip_below(xy, val, 0.5);
    CHECK(half.area == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(half.integral == doctest::Approx(0.0625 / 3.0).epsilon(1e-12));
    // Complement consistency.
    for (double t : {0.3, 0.9, 1.4, 1.9}) {
        const ClipResult below = clip_below(xy, val, t);
        const std::array<double, 3> neg = {-val[0], -val[1], -val[2]};
        const ClipResult above = clip_below(xy, neg, -t);
        CHECK(below.area + above.area == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(below.integral - above.integral ==
              doctest::Approx(full.integral).epsilon(1e-12));
    }
}

TEST_CASE("sublevel above the maximum is the whole torus") {
    const TorusField f = random_field(16, 3);
    const SubSurface s = sublevel(f, f.max_value() + 1.0);
    CHECK(s.measure() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.loops().empty());
    CHECK(s.cell_aligned());
}

TEST_CASE("sublevel of sin(2piq) at 0 is an essential annulus of half area") {
    const int n = 64;
    const TorusField f = TorusField::from_expression(n, "sin(2*pi*q)");
    const double t = f.regular_value_near(0.0);
    const SubSurface s = sublevel(f, t);
    CHECK(s.measure() == doctest::Approx(0.5).epsilon(0.05));
    REQUIRE(s.loops().size() == 2);
    for (const auto& loop : s.loops()) {
        CHECK(std::abs(loop.winding_p) == 1);
        CHECK(loop.winding_q == 0);
        CHECK(!loop.contractible());
    }
}

TEST_CASE("sublevel rejects vertex values") {
    const TorusField f = TorusField::from_expression(16, "sin(2*pi*q)");
    CHECK_THROWS_AS(sublevel(f, 0.0), std::invalid_argument);
}

TEST_CASE("sublevel of cos(2piq)+0.5cos(2pip) at -1.0 is one disk at the minimum") {
    const int n = 64;
    const TorusField f =
        TorusField::from_expression(n, "cos(2*pi*q)+0.5*cos(2*pi*p)");
    const double t = f.regular_value_near(-1.0);
    const SubSurface s = sublevel(f, t);
    CHECK(below_vertex_components(f, t) == 1);
    REQUIRE(s.loops().size() == 1);
    CHECK(s.loops()[0].contractible());
    // The disk sits around (1/2, 1/2).
    bool covers_min = false;
    for (int tdx : s.triangle_ids())
        for (int v : f.grid().tri_corners(tdx))
            if (v == f.grid().vertex(n / 2, n / 2))
                covers_min = true;
    CHECK(covers_min);
}

TEST_CASE("sublevel measures partition the torus and grow with t") {
    for (uint64_t seed : {7ull, 8ull}) {
        const TorusField f = random_field(12, seed);
        std::vector<double> neg(f.values());
        for (auto& v : neg)
            v = -v;
        const TorusField fneg = TorusField::from_values(12, std::move(neg));
        std::mt19937_64 rng(seed * 17 + 1);
        double prev_t = -2.0, prev_m = -1.0;
        for (int k = 0; k < 12; ++k) {
            const double raw = -1.2 + 2.4 * u01(rng);
            const double t = f.regular_value_near(raw);
            const SubSurface s = sublevel(f, t);
            const SubSurface sc = sublevel(fneg, -t);
            CHECK(s.measure() + sc.measure() == doctest::Approx(1.0).epsilon(1e-12));
            if (prev_m >= 0.0 && t >= prev_t)
                CHECK(s.measure() >= prev_m - 1e-12);
            if (t >= prev_t) {
                prev_t = t;
                prev_m = s.measure();
            }
        }
    }
}

TEST_CASE("linear annuli have exact grid-aligned measure and coprime winding") {
    const int n = 64;
    const TorusGrid g(n);
    const struct { int k, l; } slopes[] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}};
    for (const auto& sl : slopes) {
        for (int w : {n / 8, n / 4, n / 2}) {
            const SubSurface a = SubSurface::linear_annulus(g, sl.k, sl.l, 5, w);
            CHECK(a.measure() == doctest::Approx(double(w) / n).epsilon(1e-14));
            REQUIRE(a.loops().size() == 2);
            for (const auto& loop : a.loops()) {
                CHECK(std::abs(loop.winding_p) == std::abs(sl.k));
                CHECK(std::abs(loop.winding_q) == std::abs(sl.l));
                const int gg = std::gcd(std::abs(loop.winding_p),
                                        std::abs(loop.winding_q));
                CHECK(gg == 1);
            }
        }
    }
}

TEST_CASE("from_triangles: a single cell is a contractible square") {
    const int n = 8;
    const TorusGrid g(n);
    const SubSurface s = SubSurface::from_triangles(g, rect_tris(g, 2, 3, 1, 1));
    CHECK(s.measure() == doctest::Approx(1.0 / (n * n)).epsilon(1e-15));
    REQUIRE(s.loops().size() == 1);
    CHECK(s.loops()[0].contractible());
    CHECK(s.loops()[0].points.size() == 4);
}

TEST_CASE("from_triangles: a full row band is essential with winding (1,0)") {
    const int n = 8;
    const TorusGrid g(n);
    std::vector<int> tris;
    for (int i = 0; i < n; ++i)
        for (int j = 2; j < 4; ++j) {
            tris.push_back(g.tri_lower(i, j));
            tris.push_back(g.tri_upper(i, j));
        }
    const SubSurface s = SubSurface::from_triangles(g, tris);
    CHECK(s.measure() == doctest::Approx(2.0 / n).epsilon(1e-15));
    REQUIRE(s.loops().size() == 2);
    for (const auto& loop : s.loops()) {
        CHECK(std::abs(loop.winding_p) == 1);
        CHECK(loop.winding_q == 0);
    }
}

TEST_CASE("complement flips orientation and preserves the partition") {
    const int n = 16;
    const TorusField f = random_field(n, 21);
    const double t = f.regular_value_near(0.1);
    const SubSurface s = sublevel(f, t);
    const SubSurface c = s.complement();
    CHECK(s.measure() + c.measure() == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(c.loops().size() == s.loops().size());
    for (size_t i = 0; i < s.loops().size(); ++i) {
        CHECK(c.loops()[i].winding_p == -s.loops()[i].winding_p);
        CHECK(c.loops()[i].winding_q == -s.loops()[i].winding_q);
    }
    const SubSurface cc = c.complement();
    CHECK(cc.same_cells(s));
}

TEST_CASE("disjoint_union validates separation") {
    const int n = 16;
    const TorusGrid g(n);
    const SubSurface a = SubSurface::from_triangles(g, rect_tris(g, 0, 0, 2, 2));
    const SubSurface b = SubSurface::from_triangles(g, rect_tris(g, 5, 5, 2, 2));
    const SubSurface u = SubSurface::disjoint_union(a, b);
    CHECK(u.measure() == doctest::Approx(a.measure() + b.measure()).epsilon(1e-15));
    CHECK(u.loops().size() == 2);
    const SubSurface touching =
        SubSurface::from_triangles(g, rect_tris(g, 2, 0, 2, 2));
    CHECK_THROWS_AS(SubSurface::disjoint_union(a, touching),
                    std::invalid_argument);
}

TEST_CASE("integrate over a sublevel region matches the half-torus symmetry") {
    const int n = 64;
    const TorusField f = TorusField::from_expression(n, "sin(2*pi*q)");
    const double t = f.regular_value_near(0.0);
    const SubSurface s = sublevel(f, t);
    const SubSurface c = s.complement();
    // sin is odd: the two half-integrals cancel.
    CHECK(s.integrate(f) + c.integrate(f) ==
          doctest::Approx(f.integrate()).epsilon(1e-12));
    CHECK(s.integrate(f) < 0.0);
}
