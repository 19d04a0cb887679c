#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tqs/reeb.hpp"
#include "tqs/regularize.hpp"

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

// Independent oracle: level components at a regular value are the
// boundary loops of the sublevel region.
int level_components(const TorusField& f, double t) {
    return int(SubSurface::sublevel(f, t).loops().size());
}

std::vector<int> sorted_degrees(const ReebGraph& g) {
    std::vector<int> d;
    for (const auto& n : g.nodes)
        d.push_back(n.degree);
    std::sort(d.begin(), d.end());
    return d;
}

} // namespace

TEST_CASE("Reeb graph of cos(2piq)+0.5cos(2pip): theta-like with two pendants") {
    const int n = 64;
    const TorusField f =
        TorusField::from_expression(n, "cos(2*pi*q)+0.5*cos(2*pi*p)");
    const ReebGraph g = build_reeb(f);
    CHECK(g.betti == 1);
    REQUIRE(g.nodes.size() == 4);
    CHECK(sorted_degrees(g) == std::vector<int>{1, 1, 3, 3});
    REQUIRE(g.arcs.size() == 4);

    const CycleTreeDecomposition d = decompose(g);
    CHECK(d.cycle_arcs.size() == 2);
    REQUIRE(d.trees.size() == 2);
    std::vector<double> alphas = {d.trees[0].alpha, d.trees[1].alpha};
    std::sort(alphas.begin(), alphas.end());
    CHECK(alphas[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(alphas[1] == doctest::Approx(0.5).epsilon(1e-12));
    // The (p,q) -> (p+1/2, q+1/2) symmetry sends H to -H: equal tree areas.
    CHECK(d.trees[0].measure == doctest::Approx(d.trees[1].measure).epsilon(1e-9));
    CHECK(d.cycle_measure + d.trees[0].measure + d.trees[1].measure ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.trees[0].side + d.trees[1].side == 0);

    // Brute-force component counts between the critical values.
    for (double mid : {-1.0, 0.0, 1.0}) {
        const double t = f.regular_value_near(mid);
        CHECK(level_components(f, t) == arcs_spanning(g, t));
    }
    CHECK(arcs_spanning(g, f.regular_value_near(0.0)) == 2);
    CHECK(arcs_spanning(g, f.regular_value_near(-1.0)) == 1);
    CHECK(arcs_spanning(g, f.regular_value_near(1.0)) == 1);
}

TEST_CASE("Reeb graph of sin(2piq): the cycle carries everything") {
    const int n = 64;
    const TorusField f = TorusField::from_expression(n, "sin(2*pi*q)");
    const ReebGraph g = build_reeb(f);
    CHECK(g.betti == 1);
    const CycleTreeDecomposition d = decompose(g);
    double tree_total = 0.0;
    for (const auto& t : d.trees)
        tree_total += t.measure;
    CHECK(tree_total <= 10.0 / n);
    CHECK(d.cycle_measure >= 1.0 - 10.0 / n);
}

TEST_CASE("Reeb graph of a constant field is a degenerate but valid cycle") {
    const int n = 16;
    const TorusField f = TorusField::from_values(n, std::vector<double>(256, 0.25));
    const ReebGraph g = build_reeb(f);
    CHECK(g.betti == 1);
    double total = 0.0;
    for (const auto& a : g.arcs)
        total += a.measure;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    const CycleTreeDecomposition d = decompose(g);
    double tree_total = 0.0;
    for (const auto& t : d.trees)
        tree_total += t.measure;
    CHECK(tree_total <= 5.0 / n);
}

TEST_CASE("random rasters: Betti 1, tiling, and the component-count oracle") {
    for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        const int n = 12;
        const TorusField f = random_field(n, seed);
        const ReebGraph g = build_reeb(f);
        CHECK(g.betti == 1);
        double total = 0.0;
        for (const auto& a : g.arcs)
            total += a.measure;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

        std::mt19937_64 rng(seed + 100);
        for (int k = 0; k < 8; ++k) {
            const double t = f.regular_value_near(2.0 * u01(rng) - 1.0);
            CHECK(level_components(f, t) == arcs_spanning(g, t));
        }

        const CycleTreeDecomposition d = decompose(g);
        double sum = d.cycle_measure;
        for (const auto& t : d.trees)
            sum += t.measure;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("decomposition is invariant under lattice automorphisms") {
    const int n = 32;
    const TorusField f = TorusField::from_expression(
        n, "cos(2*pi*q)+0.5*cos(2*pi*p)+0.25*sin(2*pi*(p+q))");
    const CycleTreeDecomposition d0 = decompose(build_reeb(f));

    std::vector<LatticeSymplectomorphism> maps = {
        LatticeSymplectomorphism::translation(5, 11),
        LatticeSymplectomorphism::rotation6(),
        LatticeSymplectomorphism::rotation6().compose(
            LatticeSymplectomorphism::translation(3, 7)),
    };
    for (const auto& phi : maps) {
        REQUIRE(phi.preserves_triangulation());
        const CycleTreeDecomposition d1 = decompose(build_reeb(f.apply_map(phi)));
        REQUIRE(d1.trees.size() == d0.trees.size());
        auto key = [](const CycleTreeDecomposition& d) {
            std::vector<std::pair<double, double>> k;
            for (const auto& t : d.trees)
                k.emplace_back(t.alpha, t.measure);
            std::sort(k.begin(), k.end());
            return k;
        };
        const auto k0 = key(d0), k1 = key(d1);
        for (size_t i = 0; i < k0.size(); ++i) {
            CHECK(k1[i].first == doctest::Approx(k0[i].first).epsilon(1e-12));
            CHECK(k1[i].second == doctest::Approx(k0[i].second).epsilon(1e-9));
        }
    }
}

TEST_CASE("tree regions retract to disks of vanishing tau") {
    const int n = 64;
    const TorusField f =
        TorusField::from_expression(n, "cos(2*pi*q)+0.5*cos(2*pi*p)");
    const ReebGraph g = build_reeb(f);
    const CycleTreeDecomposition d = decompose(g);
    REQUIRE(d.trees.size() == 2);
    for (size_t j = 0; j < d.trees.size(); ++j) {
        const SubSurface r = tree_region_retract(f, g, d, j);
        CHECK(r.measure() > 0.0);
        CHECK(r.measure() <= d.trees[j].measure + 1e-12);
        CHECK(r.measure() >= d.trees[j].measure - 0.02);
        REQUIRE(r.loops().size() == 1);
        CHECK(r.loops()[0].contractible());
        CHECK(tau(r) == 0.0);
    }
}
