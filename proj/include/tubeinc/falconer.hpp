#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tubeinc/families.hpp"
#include "tubeinc/richness.hpp"

namespace tubeinc {

// Line of rigid motions carrying x to y, parametrized (c1, c2, cot(theta/2)).
struct ESLine {
    Vec base;  // (c1, c2, 0)
    Vec dir;   // (k1, k2, 1), third coordinate exactly 1
};

ESLine es_line(const Vec& x, const Vec& y);
std::pair<Vec, Vec> invert_line(const ESLine& l);

// delta-tube around es_line(center p, center q) with the parameter clipped so
// the rotation center stays in [0,1]^2 and cot(theta/2) in [0,1]. Returns
// nothing when the clipped axis is shorter than 1/4.
std::optional<Tube> es_tube(const Vec& p, const Vec& q, double delta);

// Ordered quadruples (p1,p2,q1,q2) with |dist(p1,q1) - dist(p2,q2)| < delta,
// by sort + two-pointer window; equals the O(n^4) brute force.
uint64_t quadruple_count(const BallSet& E1, const BallSet& E2, double delta);
uint64_t quadruple_count_bruteforce(const BallSet& E1, const BallSet& E2, double delta);

// Number of occupied bins of the distance multiset on the grid delta*Z.
int64_t distance_interval_count(const BallSet& E1, const BallSet& E2, double delta);

struct NotSplittable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First candidate pair of 1/10-balls (fixed 1/16 center lattice, mutual
// distance in [1/4, 1/2]) that each capture >= 1/200 of E.
std::pair<BallSet, BallSet> split_ballset(const BallSet& E);

struct FalconerReport {
    double delta = 0.0;
    double s = 0.0;
    int W = 0;
    size_t size_E = 0, size_E1 = 0, size_E2 = 0;
    uint64_t pair_count = 0;
    uint64_t Q = 0;
    int64_t delta_intervals = 0;
    double cs_slack = 0.0;     // (#Delta * #Q) / pairCount^2, >= 1 exactly
    bool cs_exact_ok = false;  // pairCount^2 <= #Delta * #Q
    bool spacing_ok = false;
    int tubes_built = 0;
    int pairs_skipped = 0;     // pairs closer than 1/3
    int tubes_discarded = 0;   // clipped axis shorter than 1/4
    double profile_sum = 0.0;  // sum over dyadic r of (2r)^2 |P_r|
    double profile_ratio = 0.0;  // Q / profile_sum
    bool profile_ok = false;     // Q <= 4 * profile_sum
    double prop54_ratio = 0.0;   // Q / (W^8 delta^{1-eps})
    double thm51_ratio = 0.0;    // #Delta / delta^{-1+eps}
    std::vector<std::pair<uint64_t, int64_t>> dyadic;
};

FalconerReport falconer_pipeline(const BallSet& E, double delta, double epsilon);

std::string falconer_report_json(const FalconerReport& r);

}  // namespace tubeinc
