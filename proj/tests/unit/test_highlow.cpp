#include <cmath>

#include "doctest.h"
#include "tubeinc/highlow.hpp"
#include "tubeinc/rng.hpp"

using namespace tubeinc;

namespace {

Tube unit_tube(Vec anchor, Vec dir, double length) {
    Tube t;
    t.anchor = anchor;
    t.direction = dir;
    t.length = length;
    t.radius = 0.5;
    t.dim = 2;
    return t;
}

}  // namespace

TEST_CASE("field masses") {
    GridField f, g;
    std::vector<Vec> P{{16, 16, 0}};
    std::vector<Tube> T{unit_tube({0, 16, 0}, {1, 0, 0}, 32)};
    build_fields(P, T, 32, 128, 2, f, g);
    CHECK(f.integral() == doctest::Approx(3.14159265 / 4).epsilon(0.05));
    CHECK(g.integral() == doctest::Approx(32.0).epsilon(0.10));

    GridField f0, g0;
    build_fields({}, T, 32, 128, 2, f0, g0);
    CHECK(f0.integral() == 0.0);

    // 3D: ball volume pi/6, tube cross-section pi/4 per unit length
    GridField f3, g3;
    Tube t3 = unit_tube({0, 8, 8}, {1, 0, 0}, 16);
    t3.dim = 3;
    build_fields({{8, 8, 8}}, {t3}, 16, 64, 3, f3, g3);
    CHECK(f3.integral() == doctest::Approx(3.14159265 / 6).epsilon(0.05));
    CHECK(g3.integral() / 16 == doctest::Approx(3.14159265 / 4).epsilon(0.10));

    CHECK_THROWS_AS(build_fields(P, T, 32, 100, 2, f, g), std::invalid_argument);  // not pow2
    CHECK_THROWS_AS(build_fields(P, T, 32, 64, 2, f, g), std::invalid_argument);   // < 4D
}

TEST_CASE("split of zero field") {
    GridField f = make_field(2, 64, 16);
    GridField g = make_field(2, 64, 16);
    std::vector<Vec> P{{8, 8, 0}};
    for (const Vec& c : P) add_ball_bump(f, c);
    auto [lo, hi] = highlow_split(f, g, 4.0);
    CHECK(lo == 0.0);
    CHECK(hi == 0.0);
    CHECK_THROWS_AS(highlow_split(f, g, 1.0), std::invalid_argument);
}

TEST_CASE("constant fields put everything below the cutoff") {
    GridField f = make_field(2, 64, 16);
    GridField g = make_field(2, 64, 16);
    for (auto& v : f.values) v = 0.7;
    for (auto& v : g.values) v = 1.3;
    double direct = 0.7 * 1.3 * 16 * 16;
    for (double S : {2.0, 4.0, 64.0}) {
        auto [lo, hi] = highlow_split(f, g, S);
        CHECK(lo == doctest::Approx(direct).epsilon(1e-9));
        CHECK(std::abs(hi) < 1e-9 * direct);
    }
}

TEST_CASE("Plancherel identity on random fields") {
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        GridField f = make_field(2, 32, 8);
        GridField g = make_field(2, 32, 8);
        for (auto& v : f.values) v = rng.uniform(0, 2);
        for (auto& v : g.values) v = rng.uniform(-1, 3);
        double direct = 0;
        for (size_t i = 0; i < f.values.size(); ++i) direct += f.values[i] * g.values[i];
        direct *= f.cell_volume();
        auto [lo, hi] = highlow_split(f, g, 2.0 + trial % 7);
        CHECK(lo + hi == doctest::Approx(direct).epsilon(1e-6));
    }
}

TEST_CASE("nonnegative split terms when f equals g") {
    // eta and 1-eta are nonnegative, so both terms are nonnegative spectral
    // energies for f = g
    GridField f = make_field(2, 128, 32);
    add_ball_bump(f, {16, 16, 0});
    GridField g = f;
    auto [lo, hi] = highlow_split(f, g, 4.0);
    double direct = 0;
    for (size_t i = 0; i < f.values.size(); ++i) direct += f.values[i] * f.values[i];
    direct *= f.cell_volume();
    CHECK(lo >= -1e-6 * direct);
    CHECK(hi >= -1e-6 * direct);
    CHECK(lo + hi == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("joint integer translation leaves the split unchanged") {
    auto build = [](double shift) {
        GridField f = make_field(2, 128, 32);
        GridField g = make_field(2, 128, 32);
        add_ball_bump(f, {10 + shift, 12, 0});
        add_ball_bump(f, {14 + shift, 15, 0});
        Tube t = unit_tube({4 + shift, 11.5, 0}, {1, 0, 0}, 12);
        add_tube_bump(g, t);
        return std::make_pair(f, g);
    };
    auto [f0, g0] = build(0);
    auto [f1, g1] = build(3.0);
    auto [lo0, hi0] = highlow_split(f0, g0, 4.0);
    auto [lo1, hi1] = highlow_split(f1, g1, 4.0);
    CHECK(lo1 == doctest::Approx(lo0).epsilon(1e-6));
    CHECK(hi1 == doctest::Approx(hi0).epsilon(1e-6));
}

TEST_CASE("classify rejects a ball outside its richness class") {
    std::vector<Vec> P{{8, 8, 0}, {2, 2, 0}};  // second ball meets no tube
    std::vector<Tube> T{unit_tube({0, 8, 0}, {1, 0, 0}, 16)};
    bool threw = false;
    try {
        classify(P, T, 1, 4.0, 16, 2);
    } catch (const std::invalid_argument& e) {
        threw = true;
        CHECK(std::string(e.what()).find("ball 1") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("degenerate single cluster") {
    // P = one ball, T = E tubes through it, S = D. Both conclusions of the
    // dichotomy hold trivially; the unit-size cluster's correlation is
    // high-frequency, so the measured verdict is Thin with a tiny constant.
    double D = 4;
    std::vector<Vec> P{{D / 2, D / 2, 0}};
    std::vector<Tube> T;
    int E = 8;
    for (int i = 0; i < E; ++i) {
        double th = (i + 0.5) * 3.14159265 / E;
        Vec dir{std::cos(th), std::sin(th), 0};
        T.push_back(unit_tube(P[0] - dir * (D / 2), dir, D));
    }
    HeavyBallVerdict v = classify(P, T, E, D, D, 2);
    CHECK(v.kind == VerdictKind::Thin);
    CHECK(v.low_term + v.high_term == doctest::Approx(v.bilinear).epsilon(1e-6));
    // |P| = 1 against the thin bound S^n E^-2 |T| D^{n-1}
    CHECK(v.thin_c <= 1.0);
}

TEST_CASE("classify runs in three dimensions") {
    // a bundle of tubes through one cluster; exercises the 3D field and
    // extraction paths
    double D = 8;
    std::vector<Vec> P;
    for (double dx : {-0.5, 0.5})
        for (double dy : {-0.5, 0.5}) P.push_back({D / 2 + dx, D / 2 + dy, D / 2});
    std::vector<Tube> T;
    for (int i = 0; i < 6; ++i) {
        double th = (i + 0.5) * 3.14159265 / 6;
        Vec dir = Vec{std::cos(th), std::sin(th), 0.3}.normalized();
        Tube t;
        t.direction = dir;
        t.anchor = Vec{D / 2, D / 2, D / 2} - dir * (D / 2);
        t.length = D;
        t.radius = 0.5;
        t.dim = 3;
        T.push_back(t);
    }
    // all four centers meet all six tubes
    HeavyBallVerdict v = classify(P, T, 6, 2.0, D, 3);
    CHECK(v.low_term + v.high_term == doctest::Approx(v.bilinear).epsilon(1e-6));
    if (v.kind == VerdictKind::Thick) {
        for (size_t i = 0; i < v.heavy_balls.size(); ++i)
            for (size_t j = i + 1; j < v.heavy_balls.size(); ++j)
                CHECK(dist(v.heavy_balls[i].center, v.heavy_balls[j].center) >= 4.0);
    }
}

TEST_CASE("thick extraction returns disjoint balls") {
    TubeFamily f = gen_heavy_ball_example(1.0 / 128, 4, 4.0, 2);
    RichMap m = richness_map_fast(f);
    uint32_t E = 32;  // designed richness 1/(A delta)
    RescaledInputs in = rescale_for_classify(f, m, E);
    REQUIRE(!in.P.empty());
    HeavyBallVerdict v = classify(in.P, in.T, E, 4.0, in.D, 2);
    CHECK(v.kind == VerdictKind::Thick);
    REQUIRE(!v.heavy_balls.empty());
    for (size_t i = 0; i < v.heavy_balls.size(); ++i)
        for (size_t j = i + 1; j < v.heavy_balls.size(); ++j)
            CHECK(dist(v.heavy_balls[i].center, v.heavy_balls[j].center) >= 2 * 4.0);
    std::string json = verdict_to_json(v);
    CHECK(json.find("\"kind\": \"Thick\"") != std::string::npos);
    CHECK(json == verdict_to_json(v));
}
