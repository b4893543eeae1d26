#include <catch2/catch_amalgamated.hpp>

#include "swmc/geometry.hpp"
#include "swmc/grid.hpp"
#include "swmc/rng.hpp"

using namespace swmc;

TEST_CASE("circle wrapping is canonical and symmetric", "[geometry]") {
    const Topology topo = Topology::circle(20.0);
    CHECK(topo.wrap(0.0) == 0.0);
    CHECK(topo.wrap(10.0) == Catch::Approx(-10.0));
    CHECK(topo.wrap(25.0) == Catch::Approx(5.0));
    CHECK(topo.wrap(-10.0) == Catch::Approx(-10.0));

    RandomStream rng(7);
    for (int k = 0; k < 1000; ++k) {
        const double x = rng.uniform(-50.0, 50.0), y = rng.uniform(-50.0, 50.0);
        CHECK(topo.dist1(x, y) == topo.dist1(y, x));
        CHECK(topo.dist1(x, y) <= 10.0 + 1e-12);
        CHECK(topo.wrap(x) >= -10.0);
        CHECK(topo.wrap(x) < 10.0);
    }
}

TEST_CASE("arc containment wraps through the seam", "[geometry]") {
    const Topology topo = Topology::circle(20.0);
    const ConvexRegion arc = Arc{5.0, 10.0};  // [5, 15) == [5,10) u [-10,-5)
    CHECK(region_contains(arc, point1(5.0), topo));
    CHECK(region_contains(arc, point1(9.9), topo));
    CHECK(region_contains(arc, point1(-9.0), topo));
    CHECK(!region_contains(arc, point1(-5.0), topo));
    CHECK(!region_contains(arc, point1(0.0), topo));
    CHECK(region_measure(arc) == 10.0);
}

TEST_CASE("region measures and containment", "[geometry]") {
    CHECK(region_measure(Interval{-3.0, 5.0}) == 8.0);
    CHECK(region_measure(Box{point2(0, 0), point2(2, 3)}) == 6.0);
    CHECK(region_measure(BallRegion{point2(0, 0), 2.0}) ==
          Catch::Approx(4.0 * std::numbers::pi));
    CHECK(ball_volume(1, 2.0) == Catch::Approx(4.0));

    const Topology flat = Topology::flat();
    CHECK(region_contains(Interval{-1, 1}, point1(1.0), flat));
    CHECK(!region_contains(Interval{-1, 1}, point1(1.0 + 1e-9), flat));
    CHECK(region_contains(BallRegion{point2(0, 0), 1.0}, point2(0.6, 0.6), flat));
    CHECK(!region_contains(BallRegion{point2(0, 0), 1.0}, point2(0.8, 0.8), flat));
}

TEST_CASE("streams are deterministic and splittable", "[geometry]") {
    RandomStream a(42), b(42);
    for (int k = 0; k < 100; ++k) CHECK(a.bits() == b.bits());

    RandomStream s1 = RandomStream::split(42, 0);
    RandomStream s2 = RandomStream::split(42, 1);
    RandomStream s1_again = RandomStream::split(42, 0);
    bool all_equal = true;
    for (int k = 0; k < 100; ++k) {
        const auto x = s1.bits();
        if (x != s1_again.bits()) FAIL("split stream not reproducible");
        if (x != s2.bits()) continue;
        all_equal = false;
    }
    CHECK(all_equal);
}

TEST_CASE("uniform01 stays inside the open unit interval", "[geometry]") {
    RandomStream rng(1);
    double mn = 1.0, mx = 0.0, sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const double u = rng.uniform01();
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
    }
    CHECK(mn > 0.0);
    CHECK(mx < 1.0);
    CHECK(sum / n == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("normal and cauchy draws have the right spread", "[geometry]") {
    RandomStream rng(3);
    const int n = 100000;
    double m2 = 0.0;
    int cauchy_within = 0;
    for (int k = 0; k < n; ++k) {
        const double z = rng.normal();
        m2 += z * z;
        if (std::abs(rng.cauchy()) <= 1.0) ++cauchy_within;
    }
    CHECK(m2 / n == Catch::Approx(1.0).margin(0.02));
    // Half the mass of a unit Cauchy lies within one half width.
    CHECK(static_cast<double>(cauchy_within) / n == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("1-D grids locate points and cover intervals", "[geometry]") {
    const GridSpec g = GridSpec::uniform_1d(-2.0, 3.0, 10);
    REQUIRE(g.size() == 10);
    CHECK(g.width(0) == Catch::Approx(0.5));
    CHECK(g.center(0)[0] == Catch::Approx(-1.75));
    CHECK(g.locate(point1(-2.0)) == 0);
    CHECK(g.locate(point1(3.0)) == 9);  // upper boundary belongs to the last cell
    CHECK(g.locate(point1(0.1)) == 4);
    CHECK(g.locate(point1(3.5)) == -1);

    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) total += g.measure(i);
    CHECK(total == Catch::Approx(5.0));
}

TEST_CASE("segmented grids handle gaps", "[geometry]") {
    const GridSpec g = GridSpec::from_segments_1d({{-4.0, -2.0}, {1.0, 3.0}}, {4, 8});
    REQUIRE(g.size() == 12);
    CHECK(g.locate(point1(-3.9)) == 0);
    CHECK(g.locate(point1(0.0)) == -1);  // in the gap
    CHECK(g.locate(point1(1.1)) == 4);
    CHECK_THROWS_AS(GridSpec::from_segments_1d({{0.0, 2.0}, {1.0, 3.0}}, {2, 2}),
                    std::invalid_argument);
}

TEST_CASE("circle grids wrap the locate query", "[geometry]") {
    const GridSpec g = GridSpec::circle_1d(20.0, 8);
    REQUIRE(g.size() == 8);
    CHECK(g.locate(point1(12.0)) == g.locate(point1(-8.0)));
    CHECK(g.locate(point1(0.0)) == 4);
    CHECK(g.topology().is_circle());
}

TEST_CASE("tensor grids are row-major with boundary handling", "[geometry]") {
    const GridSpec g = GridSpec::tensor_2d(0.0, 4.0, 4, 0.0, 2.0, 2);
    REQUIRE(g.size() == 8);
    CHECK(g.locate(point2(0.5, 0.5)) == 0);
    CHECK(g.locate(point2(3.5, 0.5)) == 3);
    CHECK(g.locate(point2(0.5, 1.5)) == 4);
    CHECK(g.locate(point2(4.0, 2.0)) == 7);
    CHECK(g.measure(0) == Catch::Approx(1.0));
    CHECK(g.locate(point2(-0.1, 0.5)) == -1);
}

TEST_CASE("grid subsets keep cell geometry", "[geometry]") {
    const GridSpec g = GridSpec::uniform_1d(0.0, 1.0, 10);
    const GridSpec sub = g.subset({2, 3, 7});
    REQUIRE(sub.size() == 3);
    CHECK(sub.center(0)[0] == Catch::Approx(0.25));
    CHECK(sub.locate(point1(0.35)) == 1);
    CHECK(sub.locate(point1(0.55)) == -1);
}
