#include <doctest.h>

#include <cmath>
#include <random>

#include "tqs/field.hpp"

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

} // namespace

TEST_CASE("expression fields evaluate at vertices") {
    const int n = 64;
    const TorusField f = TorusField::from_expression(n, "cos(2*pi*q)");
    for (int j = 0; j < n; ++j)
        CHECK(f.value(f.grid().vertex(7, j)) ==
              doctest::Approx(std::cos(2.0 * M_PI * j / n)).epsilon(1e-15));
}

TEST_CASE("constant raster gets a strict perturbed order") {
    const int n = 8;
    const TorusField f = TorusField::from_values(n, std::vector<double>(64, 0.0));
    for (int v = 0; v + 1 < f.grid().num_vertices(); ++v) {
        CHECK(f.less(v, v + 1));
        CHECK(!f.less(v + 1, v));
    }
}

TEST_CASE("field construction rejects bad input") {
    CHECK_THROWS_AS(TorusField::from_values(4, std::vector<double>(16, 0.0)),
                    std::invalid_argument);
    std::vector<double> bad(64, 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(TorusField::from_values(8, std::move(bad)),
                    std::invalid_argument);
    CHECK_THROWS_AS(TorusField::from_expression(16, "cos(2*pi*x)"),
                    std::invalid_argument);
}

TEST_CASE("PL critical vertices of cos(2piq)+0.5cos(2pip) sit at the four centers") {
    const int n = 128;
    const TorusField f =
        TorusField::from_expression(n, "cos(2*pi*q)+0.5*cos(2*pi*p)");
    const auto crit = f.critical_vertices();
    REQUIRE(crit.size() == 4);
    // (0,0) max, (0,n/2) and (n/2,0) saddles, (n/2,n/2) min.
    const auto& g = f.grid();
    CHECK(crit[0] == g.vertex(0, 0));
    CHECK(crit[1] == g.vertex(0, n / 2));
    CHECK(crit[2] == g.vertex(n / 2, 0));
    CHECK(crit[3] == g.vertex(n / 2, n / 2));
    CHECK(f.value(crit[0]) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(f.value(crit[3]) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("integrate: normalization and symmetry") {
    CHECK(TorusField::from_expression(32, "0.25").integrate() ==
          doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(TorusField::from_expression(64, "sin(2*pi*q)").integrate()) <=
          1e-12);
    CHECK(std::abs(TorusField::from_expression(
                       64, "cos(2*pi*q)+0.5*cos(2*pi*p)").integrate()) <= 1e-12);
}

TEST_CASE("integrate is linear") {
    const int n = 16;
    const TorusField f = random_field(n, 11);
    const TorusField g = random_field(n, 12);
    const double a = 1.75, b = -0.4;
    std::vector<double> comb(f.values());
    for (size_t i = 0; i < comb.size(); ++i)
        comb[i] = a * f.values()[i] + b * g.values()[i];
    const TorusField h = TorusField::from_values(n, std::move(comb));
    CHECK(h.integrate() ==
          doctest::Approx(a * f.integrate() + b * g.integrate()).epsilon(1e-12));
}

TEST_CASE("apply_map: identity, shear on a q-only field, half-period translation") {
    const int n = 32;
    const TorusField f = TorusField::from_expression(n, "cos(2*pi*q)");
    const TorusField id = f.apply_map(LatticeSymplectomorphism::identity());
    CHECK(id.values() == f.values());

    LatticeSymplectomorphism shear;
    shear.m = {{{1, 1}, {0, 1}}};
    const TorusField sheared = f.apply_map(shear);
    CHECK(sheared.values() == f.values());

    const TorusField fp = TorusField::from_expression(n, "cos(2*pi*p)");
    const TorusField shifted =
        fp.apply_map(LatticeSymplectomorphism::translation(n / 2, 0));
    for (int v = 0; v < fp.grid().num_vertices(); ++v)
        CHECK(shifted.value(v) == doctest::Approx(-fp.value(v)).epsilon(1e-12));
}

TEST_CASE("apply_map rejects non-unimodular matrices and preserves integrals") {
    LatticeSymplectomorphism bad;
    bad.m = {{{2, 0}, {0, 1}}};
    const TorusField f = random_field(16, 5);
    CHECK_THROWS_AS(f.apply_map(bad), std::invalid_argument);

    LatticeSymplectomorphism rot = LatticeSymplectomorphism::rotation6();
    CHECK(rot.det() == 1);
    CHECK(rot.preserves_triangulation());
    LatticeSymplectomorphism shear;
    shear.m = {{{1, 1}, {0, 1}}};
    CHECK(!shear.preserves_triangulation());
    const TorusField g = f.apply_map(rot);
    CHECK(g.integrate() == doctest::Approx(f.integrate()).epsilon(1e-12));
}

TEST_CASE("regular_value_near avoids vertex values") {
    const TorusField f = random_field(12, 99);
    const double t = f.regular_value_near(0.0);
    CHECK(!f.is_vertex_value(t));
    const double above = f.regular_value_near(f.max_value() + 2.0);
    CHECK(above > f.max_value());
}
