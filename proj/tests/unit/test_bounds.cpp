#include <cmath>

#include "doctest.h"
#include "tubeinc/bounds.hpp"

using namespace tubeinc;

TEST_CASE("bound formulas") {
    BoundSpec st;
    st.name = BoundName::ST;
    st.tube_count = 1000;
    CHECK(bound_value(st, 10) == doctest::Approx(1100.0));  // r^-3 L^2 + r^-1 L

    BoundSpec kak;
    kak.name = BoundName::KakMax;
    kak.tube_count = 64;
    CHECK(bound_value(kak, 8) == doctest::Approx(64.0));  // T^2 / r^2

    BoundSpec main3;
    main3.name = BoundName::Main;
    main3.dim = 3;
    main3.tube_count = 256;
    main3.delta = 1.0 / 64;
    main3.epsilon = 0.2;
    // |T|^{3/2} / r^2 = 16, times the delta^-eps slack
    CHECK(bound_value(main3, 16) == doctest::Approx(16.0 * bound_eps_factor(main3)));
    CHECK(bound_eps_factor(main3) == doctest::Approx(std::pow(64.0, 0.2)));
    CHECK(bound_eps_factor(kak) == 1.0);

    BoundSpec t12;
    t12.name = BoundName::Thm1_2;
    t12.delta = 1.0 / 256;
    t12.W = 8;
    t12.tube_count = 6432;
    t12.epsilon = 0.2;
    CHECK(bound_value(t12, 64) ==
          doctest::Approx(std::pow(256.0, 0.2) * 6432.0 * 6432.0 / (8 * 64 * 64)));

    CHECK_THROWS_AS(bound_value(st, 0.5), std::invalid_argument);
}

TEST_CASE("bound values strictly decrease in r") {
    for (BoundName name : {BoundName::ST, BoundName::Thm1_1, BoundName::Thm1_2,
                           BoundName::Thm1_3, BoundName::Main, BoundName::KakMax}) {
        BoundSpec spec;
        spec.name = name;
        spec.delta = 1.0 / 128;
        spec.W = 8;
        spec.tube_count = 500;
        spec.dim = name == BoundName::Thm1_3 ? 3 : 2;
        spec.epsilon = 0.2;
        double prev = bound_value(spec, 2);
        for (double r : {4.0, 8.0, 16.0, 32.0}) {
            double cur = bound_value(spec, r);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("richness thresholds") {
    BoundSpec t11;
    t11.name = BoundName::Thm1_1;
    t11.delta = 1.0 / 256;
    t11.tube_count = 256;
    t11.epsilon = 0.1;
    CHECK(r_threshold(t11) == doctest::Approx(std::pow(256.0, 0.1)));  // ~1.7411

    t11.tube_count = 0;
    CHECK(r_threshold(t11) == 1.0);

    BoundSpec t13;
    t13.name = BoundName::Thm1_3;
    t13.delta = 1.0 / 64;
    t13.tube_count = 256;
    t13.epsilon = 0.2;
    t13.dim = 3;
    CHECK(r_threshold(t13) == 1.0);  // 64^-1.8 * 256 < 1
}

TEST_CASE("verify_family rows come from the shared map") {
    TubeFamily f = gen_bush(1.0 / 64);
    RichMap m = richness_map_fast(f);
    BoundSpec spec;
    spec.name = BoundName::KakMax;
    spec.delta = f.delta;
    spec.W = 1;
    spec.tube_count = double(f.size());
    VerifyReport rep = verify_family(f, spec, &m);
    REQUIRE(!rep.rows.empty());
    for (const VerifyRow& row : rep.rows) {
        CHECK(row.measured == rich_count(m, row.r));
        CHECK(row.bound == doctest::Approx(bound_value(spec, double(row.r))));
    }
    // bush saturates the Kakeya maximal bound at dyadic 4 <= r <= 64
    for (const VerifyRow& row : rep.rows)
        if (row.r >= 4 && row.r <= 64) {
            CHECK(row.ratio >= 1.0 / 8.0);
            CHECK(row.ratio <= 8.0);
        }

    TubeFamily empty;
    empty.delta = 1.0 / 64;
    empty.dim = 2;
    VerifyReport er = verify_family(empty, spec);
    CHECK(er.rows.empty());
}

TEST_CASE("verify_family warns on spacing failure") {
    TubeFamily f = gen_bush(1.0 / 64);
    f.W = 64;
    f.spacing_class = SpacingClass::WellSpaced;
    BoundSpec spec;
    spec.name = BoundName::Thm1_1;
    spec.delta = f.delta;
    spec.W = 64;
    spec.tube_count = double(f.size());
    spec.epsilon = 0.2;
    VerifyReport rep = verify_family(f, spec);
    CHECK(!rep.warning.empty());
}

TEST_CASE("grid rich-point formula") {
    // W=2: a=0, b=1/2, p=1, q=2 -> x = (1/4, 1/2)
    double a = 0.0, b = 0.5;
    int p = 1, q = 2;
    double x1 = double(q - p) / q * a + double(p) / q * b;
    CHECK(x1 == doctest::Approx(0.25));
    // a = b collapses to the vertical through a
    CHECK(double(q - p) / q * 0.3 + double(p) / q * 0.3 == doctest::Approx(0.3));

    GridLowerReport rep = grid_lower_bound_check(1.0 / 64, 2, 2, 2);
    CHECK(rep.points.size() == 3);  // (a+b)/2 in {1/4, 1/2, 3/4}
    CHECK(rep.min_richness >= 2);
    CHECK(rep.min_separation == doctest::Approx(0.25));  // exactly 1/(2W)
    CHECK(rep.ok);

    // predicted points hold at least their pair multiplicity
    for (const GridLowerPoint& pt : rep.points) CHECK(pt.richness >= uint32_t(pt.pair_count));
}

TEST_CASE("report serialization is deterministic") {
    TubeFamily f = gen_bush(1.0 / 32);
    BoundSpec spec;
    spec.name = BoundName::KakMax;
    spec.delta = f.delta;
    spec.W = 1;
    spec.tube_count = double(f.size());
    VerifyReport rep = verify_family(f, spec);
    CHECK(verify_report_csv(rep, 7) == verify_report_csv(rep, 7));
    CHECK(verify_report_json(rep, spec) == verify_report_json(rep, spec));
    std::string svg = verify_report_svg(rep);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg == verify_report_svg(rep));
}
