#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "pdico/grid.hpp"

using namespace pdico;

namespace {

GridSpec unit_spec(double step, int n = 1) {
    return GridSpec::make(1, 1, 1, step, step, step, n);
}

Field sampled(const GridSpec& g, double (*fn)(double, double, double)) {
    Field f(g);
    for (int it = 0; it < g.nt; ++it)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                f.at(ix, iy, it)[0] = fn(g.x(ix), g.y(iy), g.t(it));
    return f;
}

Field random_field(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    Field f(g);
    for (double& v : f.raw())
        v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    return f;
}

} // namespace

TEST_CASE("grid spec derives point counts and theta") {
    GridSpec g = GridSpec::make(1.0, 2.0, 0.5, 0.1, 0.2, 0.05, 2);
    CHECK(g.nx == 11);
    CHECK(g.ny == 11);
    CHECK(g.nt == 11);
    CHECK(g.theta == 0.1 / 0.2);
    CHECK(g.points() == 11 * 11 * 11);
    CHECK(g.values() == 11 * 11 * 11 * 2);
}

TEST_CASE("grid spec rejects bad construction") {
    CHECK_THROWS_AS(GridSpec::make(-1, 1, 1, 0.1, 0.1, 0.1, 1), error);
    CHECK_THROWS_AS(GridSpec::make(1, 1, 1, 0, 0.1, 0.1, 1), error);
    CHECK_THROWS_AS(GridSpec::make(1, 1, 1, 0.1, 0.1, 0.1, 0), error);
    // step does not divide the extent
    CHECK_THROWS_AS(GridSpec::make(1, 1, 1, 0.3, 0.1, 0.1, 1), error);
    // fewer than 3 points on an axis
    CHECK_THROWS_AS(GridSpec::make(1, 1, 1, 1.0, 0.1, 0.1, 1), error);
}

TEST_CASE("field indexing is bijective and t-major") {
    GridSpec g = GridSpec::make(1, 1, 1, 0.5, 0.5, 0.25, 2);
    Field f(g);
    REQUIRE(f.raw().size() == static_cast<size_t>(g.values()));
    int counter = 0;
    for (int it = 0; it < g.nt; ++it)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                CHECK(f.index(ix, iy, it) == static_cast<size_t>(2 * counter));
                ++counter;
            }
    CHECK_THROWS_AS(f.at(g.nx, 0, 0), index_error);
    CHECK_THROWS_AS(f.at(0, -1, 0), index_error);
}

TEST_CASE("a1 is exact on quadratics and zero on constants") {
    GridSpec g = unit_spec(0.1);
    Field sq = sampled(g, [](double x, double, double) { return x * x; });
    Field cst = sampled(g, [](double, double, double) { return 3.5; });
    for (int ix = 1; ix <= g.nx - 2; ++ix) {
        GridPoint p{ix, 2, 3};
        CHECK(a1_apply(sq, p)[0] == Catch::Approx(2.0).margin(1e-11));
        CHECK(a1_apply(cst, p)[0] == Catch::Approx(0.0).margin(1e-12));
    }
    CHECK_THROWS_AS(a1_apply(sq, GridPoint{0, 1, 1}), index_error);
    CHECK_THROWS_AS(a1_apply(sq, GridPoint{g.nx - 1, 1, 1}), index_error);
}

TEST_CASE("a1 matches the second derivative of sin within the Taylor bound") {
    const double delta = 0.05;
    GridSpec g = GridSpec::make(1, 1, 1, delta, 0.25, 0.25, 1);
    Field f = sampled(g, [](double x, double, double) { return std::sin(M_PI * x); });
    const double pi = M_PI;
    GridPoint p{10, 1, 1};  // x = 0.5
    REQUIRE(g.x(p.ix) == Catch::Approx(0.5));
    const double exact = -pi * pi * std::sin(pi * 0.5);
    const double bound = std::pow(pi, 4) * delta * delta / 12.0 * 1.5;
    CHECK(std::abs(a1_apply(f, p)[0] - exact) <= bound);
}

TEST_CASE("a2 examples: quadratic exact, cubic second difference exact") {
    GridSpec g = GridSpec::make(1, 1, 1, 0.25, 0.1, 0.25, 1);
    Field ysq = sampled(g, [](double, double y, double) { return y * y; });
    Field ycu = sampled(g, [](double, double y, double) { return y * y * y; });
    GridPoint p{1, 5, 1};  // y = 0.5
    CHECK(a2_apply(ysq, p)[0] == Catch::Approx(2.0).margin(1e-11));
    // (y+s)^3 - 2y^3 + (y-s)^3 = 6 y s^2, so the stencil returns 6y = 3 at y=0.5
    CHECK(a2_apply(ycu, p)[0] == Catch::Approx(3.0).margin(1e-10));
}

TEST_CASE("b examples: linear and quadratic in t") {
    GridSpec g = GridSpec::make(1, 1, 1, 0.25, 0.25, 0.1, 1);
    Field lin = sampled(g, [](double, double, double t) { return t; });
    Field sq = sampled(g, [](double, double, double t) { return t * t; });
    Field cst = sampled(g, [](double, double, double) { return -2.0; });
    GridPoint p{1, 1, 3};  // t = 0.3
    CHECK(b_apply(lin, p)[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(b_apply(cst, p)[0] == Catch::Approx(0.0).margin(1e-12));
    // forward difference of t^2 is 2t + h
    CHECK(b_apply(sq, p)[0] == Catch::Approx(0.7).margin(1e-10));
    CHECK_THROWS_AS(b_apply(lin, GridPoint{1, 1, g.nt - 1}), index_error);
}

TEST_CASE("laplacian5 on harmonic and radial quadratics") {
    GridSpec g = unit_spec(0.1);
    Field r2 = sampled(g, [](double x, double y, double) { return x * x + y * y; });
    Field harm = sampled(g, [](double x, double y, double) { return x * x - y * y; });
    Field cst = sampled(g, [](double, double, double) { return 1.0; });
    GridPoint p{4, 6, 2};
    CHECK(laplacian5(r2, p)[0] == Catch::Approx(4.0).margin(1e-10));
    CHECK(laplacian5(harm, p)[0] == Catch::Approx(0.0).margin(1e-10));
    CHECK(laplacian5(cst, p)[0] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("operators are linear in the field") {
    GridSpec g = unit_spec(0.2);
    Field f1 = random_field(g, 11);
    Field f2 = random_field(g, 12);
    Field comb(g);
    const double a = 0.7, b = -1.3;
    for (size_t i = 0; i < comb.raw().size(); ++i)
        comb.raw()[i] = a * f1.raw()[i] + b * f2.raw()[i];
    for (int it = 0; it < g.nt - 1; ++it)
        for (int iy = 1; iy <= g.ny - 2; ++iy)
            for (int ix = 1; ix <= g.nx - 2; ++ix) {
                GridPoint p{ix, iy, it};
                CHECK(std::abs(a1_apply(comb, p)[0] -
                               (a * a1_apply(f1, p)[0] + b * a1_apply(f2, p)[0])) < 1e-12 * 50);
                CHECK(std::abs(a2_apply(comb, p)[0] -
                               (a * a2_apply(f1, p)[0] + b * a2_apply(f2, p)[0])) < 1e-12 * 50);
                CHECK(std::abs(b_apply(comb, p)[0] -
                               (a * b_apply(f1, p)[0] + b * b_apply(f2, p)[0])) < 1e-12 * 50);
            }
}

TEST_CASE("operator value depends only on the stencil values") {
    GridSpec g = unit_spec(0.25);
    Field f = random_field(g, 21);
    GridPoint p{2, 2, 1};
    const double before = a1_apply(f, p)[0];
    Field f2 = f;
    // Touch everything outside the three-point x-stencil of p.
    for (int it = 0; it < g.nt; ++it)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                const bool stencil = it == p.it && iy == p.iy &&
                                     std::abs(ix - p.ix) <= 1;
                if (!stencil) f2.at(ix, iy, it)[0] += 100.0;
            }
    CHECK(a1_apply(f2, p)[0] == before);
}

TEST_CASE("apply_boundary overwrites the five faces only") {
    GridSpec g = unit_spec(0.25);
    BoundaryData zero = BoundaryData::zero(g);
    Field f(g, 0.0);

    SECTION("zero on zero is zero") {
        Field out = apply_boundary(f, zero);
        for (double v : out.raw()) CHECK(v == 0.0);
    }

    SECTION("constant alpha fills the t=0 slab, interior untouched") {
        BoundaryData b = BoundaryData::zero(g);
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) b.alpha(ix, iy)[0] = 1.0;
        // keep edges compatible where alpha meets the lateral faces
        for (int ix = 0; ix < g.nx; ++ix) {
            b.beta0(ix, 0)[0] = 1.0;
            b.betaS(ix, 0)[0] = 1.0;
        }
        for (int iy = 0; iy < g.ny; ++iy) {
            b.gamma0(iy, 0)[0] = 1.0;
            b.gammaL(iy, 0)[0] = 1.0;
        }
        b.validate_edges();
        Field out = apply_boundary(f, b);
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                CHECK(out.at(ix, iy, 0)[0] == 1.0);
        CHECK(out.at(1, 1, 1)[0] == 0.0);
        CHECK(out.at(2, 2, g.nt - 1)[0] == 0.0);
    }

    SECTION("idempotent") {
        Field noisy = random_field(g, 5);
        Field once = apply_boundary(noisy, zero);
        Field twice = apply_boundary(once, zero);
        CHECK(once.raw() == twice.raw());
    }
}

TEST_CASE("boundary edge compatibility is enforced") {
    GridSpec g = unit_spec(0.5);
    BoundaryData b = BoundaryData::zero(g);
    b.alpha(1, 0)[0] = 0.5;  // disagrees with beta0(1, 0) = 0
    CHECK_THROWS_AS(b.validate_edges(), error);
}

TEST_CASE("field csv round trip preserves values exactly") {
    GridSpec g = GridSpec::make(1, 1, 1, 0.5, 0.5, 0.5, 2);
    Field f = random_field(g, 99);
    std::ostringstream os;
    write_field_csv(f, os);
    std::istringstream is(os.str());
    Field back = read_field_csv(g, is);
    CHECK(back.raw() == f.raw());

    SECTION("header is the documented one") {
        std::istringstream is2(os.str());
        std::string header;
        std::getline(is2, header);
        CHECK(header == "x,y,t,u_1,u_2");
    }
}

TEST_CASE("field csv reader rejects malformed input") {
    GridSpec g = GridSpec::make(1, 1, 1, 0.5, 0.5, 0.5, 1);
    std::istringstream bad_header("a,b,c\n");
    CHECK_THROWS_AS(read_field_csv(g, bad_header), parse_error);
    std::istringstream truncated("x,y,t,u_1\n0,0,0,1\n");
    CHECK_THROWS_AS(read_field_csv(g, truncated), parse_error);
}
