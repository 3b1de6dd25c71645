#include <cmath>
#include <set>

#include "doctest.h"
#include "tubeinc/families.hpp"

using namespace tubeinc;

TEST_CASE("well-spaced family counts") {
    CHECK(gen_well_spaced(1.0 / 16, 1, 2, 0).size() == 1);
    CHECK(gen_well_spaced(1.0 / 256, 16, 2, 0).size() == 256);   // W^2
    CHECK(gen_well_spaced(1.0 / 64, 4, 3, 0).size() == 256);     // W^4
    CHECK_THROWS_AS(gen_well_spaced(1.0 / 16, 32, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(gen_well_spaced(1.0 / 20, 4, 2, 0), std::invalid_argument);
}

TEST_CASE("well-spaced spacing report") {
    TubeFamily f = gen_well_spaced(1.0 / 256, 16, 2, 3);
    SpacingReport r = verify_spacing(f);
    CHECK(r.ok);
    CHECK(r.worst_cell_load == 1);

    TubeFamily f3 = gen_well_spaced(1.0 / 32, 4, 3, 3);
    SpacingReport r3 = verify_spacing(f3);
    CHECK(r3.ok);
    CHECK(r3.worst_cell_load == 1);
}

TEST_CASE("generators are deterministic") {
    TubeFamily a = gen_well_spaced(1.0 / 128, 8, 2, 42);
    TubeFamily b = gen_well_spaced(1.0 / 128, 8, 2, 42);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a.tubes[i].anchor.x == b.tubes[i].anchor.x);
        CHECK(a.tubes[i].anchor.y == b.tubes[i].anchor.y);
        CHECK(a.tubes[i].direction.x == b.tubes[i].direction.x);
    }
    CHECK(family_to_json(a) == family_to_json(b));
    CHECK(gen_well_spaced(1.0 / 128, 8, 2, 43).tubes[0].anchor.x != a.tubes[0].anchor.x);
}

TEST_CASE("well-spaced tubes are pairwise essentially distinct") {
    // W <= 1/(2 delta): inner-half jitter guarantees angle or offset gaps; a
    // cheap geometric filter keeps the exhaustive check fast
    TubeFamily f = gen_well_spaced(1.0 / 64, 8, 2, 7);
    double delta = f.delta;
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = i + 1; j < f.size(); ++j) {
            const Tube &a = f.tubes[i], &b = f.tubes[j];
            double cross = a.direction.cross(b.direction).norm();
            double d = point_segment_distance(a.midpoint(), b.anchor, b.end());
            if (cross >= 8 * delta || d >= 2 * delta) continue;  // cannot overlap half
            CHECK(essentially_distinct(a, b));
        }
}

TEST_CASE("tube axes stay inside the padded cube") {
    for (auto& f : {gen_well_spaced(1.0 / 64, 8, 2, 1), gen_well_spaced(1.0 / 32, 4, 3, 1),
                    gen_heavy_ball_example(1.0 / 128, 4, 4.0, 1)}) {
        for (const Tube& t : f.tubes) {
            for (const Vec& p : {t.anchor, t.end()}) {
                CHECK(p.x >= -0.5);
                CHECK(p.x <= 1.5);
                CHECK(p.y >= -0.5);
                CHECK(p.y <= 1.5);
                CHECK(p.z >= -0.5);
                CHECK(p.z <= 1.5);
            }
            CHECK(t.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("direction-spaced family") {
    CHECK(gen_direction_spaced(1.0 / 64, 4, 1, 0).size() == 804);   // round(64 pi) * 4
    CHECK(gen_direction_spaced(1.0 / 64, 4, 0, 0).size() == 0);
    CHECK(gen_direction_spaced(1.0 / 32, 32, 1, 0).size() == 3232); // full delta-grid
    CHECK_THROWS_AS(gen_direction_spaced(1.0 / 16, 8, 4, 0), std::invalid_argument);
    SpacingReport r = verify_spacing(gen_direction_spaced(1.0 / 64, 4, 2, 5));
    CHECK(r.ok);
    CHECK(r.worst_cell_load <= 4);  // 2 * N1
}

TEST_CASE("heavy-ball example") {
    // W=1, A=1 degenerates to a bush through one ball
    TubeFamily b = gen_heavy_ball_example(1.0 / 64, 1, 1.0, 0);
    CHECK(b.size() == gen_bush(1.0 / 64).size());
    CHECK(b.skip_angle == 0.0);
    CHECK_THROWS_AS(gen_heavy_ball_example(1.0 / 16, 8, 4.0, 0), std::invalid_argument);

    TubeFamily f = gen_heavy_ball_example(1.0 / 128, 4, 4.0, 1);
    CHECK(f.skip_angle == doctest::Approx(4.0 * 4 * 4 / 128.0));
    // one tube per kept arc per anchor
    CHECK(f.size() % 4 == 0);
}

TEST_CASE("grid example") {
    CHECK(gen_grid_example(1.0 / 64, 1, 2).size() == 4);
    CHECK(gen_grid_example(1.0 / 64, 4, 2).size() == 25);      // (W+1)^2
    CHECK(gen_grid_example(1.0 / 16, 2, 3).size() == 81);      // (W+1)^4
    CHECK_THROWS_AS(gen_grid_example(1.0 / 2, 4, 2), std::invalid_argument);

    // pairwise 1/W separation in angle or distance, c >= 1/4 (exhaustive, W <= 8)
    for (int W : {2, 4, 8}) {
        TubeFamily f = gen_grid_example(1.0 / 64, W, 2);
        SpacingReport r = verify_spacing(f);
        CHECK(r.ok);
        CHECK(r.pairwise_separation >= 0.25);
    }
}

TEST_CASE("bush family") {
    CHECK(gen_bush(0.5).size() == 6);  // round(pi / delta) arcs
    TubeFamily f = gen_bush(1.0 / 128);
    CHECK(f.size() == 402);
    // declared well-spaced with W = 1/delta it must fail the spacing check
    f.W = 128;
    f.spacing_class = SpacingClass::WellSpaced;
    CHECK_FALSE(verify_spacing(f).ok);
}

TEST_CASE("fat rectangle family") {
    CHECK(gen_fat_rectangle(1.0 / 256, 1, 0).size() == 1);
    TubeFamily f = gen_fat_rectangle(1.0 / 256, 8, 0);
    CHECK(f.size() == 80);  // r angle classes x ~1.25r offsets
    // all pairs essentially distinct (exhaustive at r <= 8)
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = i + 1; j < f.size(); ++j) {
            const Tube &a = f.tubes[i], &b = f.tubes[j];
            double cross = a.direction.cross(b.direction).norm();
            double d = point_segment_distance(a.midpoint(), b.anchor, b.end());
            if (cross >= 8 * f.delta || d >= 2 * f.delta) continue;
            CHECK(essentially_distinct(a, b));
        }
}

TEST_CASE("spread ball set") {
    CHECK_THROWS_AS(gen_spread_ballset(1.0 / 64, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(gen_spread_ballset(1.0 / 64, 2.0, 0), std::invalid_argument);

    BallSet e = gen_spread_ballset(1.0 / 64, 1.5, 0);
    CHECK(e.w_requested == doctest::Approx(std::pow(64.0, 0.75)));
    CHECK(e.w_effective == 16);  // nearest power of two to 22.6
    CHECK(e.size() == 256);
    for (const Vec& c : e.centers) {
        CHECK(c.x >= 0.0);
        CHECK(c.x <= 1.0);
        CHECK(c.y >= 0.0);
        CHECK(c.y <= 1.0);
    }

    // occupancy of delta^{s/2}-balls, measured over seeds 0..9 (cells are
    // wider than the ball radius but narrower than its diameter)
    int worst = 0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        BallSet es = gen_spread_ballset(1.0 / 64, 1.5, seed);
        double R = std::pow(1.0 / 64, 0.75);
        for (const Vec& c : es.centers) {
            int cnt = 0;
            for (const Vec& d : es.centers)
                if (dist(c, d) <= R) ++cnt;
            worst = std::max(worst, cnt);
        }
    }
    CHECK(worst <= 4);
}

TEST_CASE("family json round trip") {
    TubeFamily f = gen_heavy_ball_example(1.0 / 128, 4, 4.0, 9);
    TubeFamily g = family_from_json(family_to_json(f));
    REQUIRE(g.size() == f.size());
    CHECK(g.delta == f.delta);
    CHECK(g.W == f.W);
    CHECK(g.spacing_class == f.spacing_class);
    CHECK(g.class_param == f.class_param);
    for (size_t i = 0; i < f.size(); ++i) {
        CHECK(g.tubes[i].anchor.x == f.tubes[i].anchor.x);
        CHECK(g.tubes[i].direction.y == f.tubes[i].direction.y);
        CHECK(g.tubes[i].length == f.tubes[i].length);
        CHECK(g.tubes[i].radius == f.tubes[i].radius);
    }
}

TEST_CASE("nearest power of two") {
    CHECK(nearest_pow2(1.0) == 1);
    CHECK(nearest_pow2(22.63) == 16);
    CHECK(nearest_pow2(24.0) == 16);  // ties round down
    CHECK(nearest_pow2(24.1) == 32);
    CHECK(nearest_pow2(0.3) == 1);
}
