#include <cmath>

#include "doctest.h"
#include "tubeinc/geom.hpp"
#include "tubeinc/rng.hpp"

using namespace tubeinc;

namespace {

Tube horizontal_tube(double delta) {
    Tube t;
    t.anchor = {0, 0, 0};
    t.direction = {1, 0, 0};
    t.length = 1;
    t.radius = 0.5 * delta;
    t.dim = 2;
    return t;
}

LatticeBall ball_at(int64_t k0, int64_t k1, double delta) {
    return LatticeBall{{k0, k1, 0}, delta, 2};
}

}  // namespace

TEST_CASE("tube/ball incidence predicate") {
    double delta = 0.1;
    Tube t = horizontal_tube(delta);
    CHECK(tube_ball_intersects(t, ball_at(5, 0, delta)));       // center on the axis
    CHECK_FALSE(tube_ball_intersects(t, ball_at(5, 3, delta))); // 0.3 > 0.1

    Tube diag = t;
    diag.direction = Vec{1, 1, 0}.normalized();
    // center (0.1, 0): distance to the diagonal segment is 0.1/sqrt(2)
    CHECK(point_tube_axis_distance({0.1, 0, 0}, diag) == doctest::Approx(0.1 / std::sqrt(2.0)));
    CHECK(tube_ball_intersects(diag, ball_at(1, 0, delta)));
}

TEST_CASE("dimension mismatch rejected") {
    Tube t = horizontal_tube(0.1);
    LatticeBall b{{1, 0, 0}, 0.1, 3};
    CHECK_THROWS_AS(tube_ball_intersects(t, b), std::invalid_argument);
}

TEST_CASE("incidence distance is rigid-motion invariant") {
    Rng rng(7);
    Tube t = horizontal_tube(0.05);
    t.anchor = {0.2, 0.4, 0};
    Vec p{0.3, 0.42, 0};
    double d0 = point_tube_axis_distance(p, t);
    for (int i = 0; i < 100; ++i) {
        double a = rng.uniform(0, 2 * 3.14159265358979);
        Vec shift{rng.uniform(-1, 1), rng.uniform(-1, 1), 0};
        auto rot = [&](const Vec& v) {
            return Vec{v.x * std::cos(a) - v.y * std::sin(a),
                       v.x * std::sin(a) + v.y * std::cos(a), 0} + shift;
        };
        Tube m = t;
        m.anchor = rot(t.anchor);
        Vec e = rot(t.end());
        m.direction = (e - m.anchor) / t.length;
        CHECK(point_tube_axis_distance(rot(p), m) == doctest::Approx(d0).epsilon(1e-9));
    }
}

TEST_CASE("overlap fraction") {
    double delta = 0.05;
    Tube t1 = horizontal_tube(delta);

    SUBCASE("identical tubes") { CHECK(overlap_fraction(t1, t1) == doctest::Approx(1.0).epsilon(0.05)); }

    SUBCASE("distant parallel tubes") {
        Tube t2 = t1;
        t2.anchor = {0, 10 * delta, 0};
        CHECK(overlap_fraction(t1, t2) == 0.0);
    }

    SUBCASE("perpendicular crossing is ~delta") {
        Tube t2 = t1;
        t2.anchor = {0.5, -0.5, 0};
        t2.direction = {0, 1, 0};
        double f = overlap_fraction(t1, t2);
        CHECK(f > delta / 2);
        CHECK(f < delta * 2);
    }

    SUBCASE("mass symmetry at equal lengths") {
        Tube t2 = t1;
        t2.anchor = {0.3, 0.01, 0};
        t2.direction = Vec{1, 0.2, 0}.normalized();
        double f12 = overlap_fraction(t1, t2);
        double f21 = overlap_fraction(t2, t1);
        CHECK(std::abs(f12 - f21) < 0.05);  // |T1| = |T2|
    }
}

TEST_CASE("essential distinctness") {
    double delta = 0.05;
    Tube t1 = horizontal_tube(delta);
    CHECK_FALSE(essentially_distinct(t1, t1));

    Tube perp = t1;
    perp.anchor = {0.5, -0.5, 0};
    perp.direction = {0, 1, 0};
    CHECK(essentially_distinct(t1, perp));

    // parallel at delta/4: shared strip is 3/4 of the width
    Tube close = t1;
    close.anchor = {0, delta / 4, 0};
    CHECK(overlap_fraction(t1, close) == doctest::Approx(0.75).epsilon(0.08));
    CHECK_FALSE(essentially_distinct(t1, close));
}
