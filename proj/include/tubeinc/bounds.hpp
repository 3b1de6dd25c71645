#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tubeinc/richness.hpp"

namespace tubeinc {

enum class BoundName { ST, Thm1_1, Thm1_2, Thm1_3, Main, KakMax, GridLower };

std::string to_string(BoundName b);
std::optional<BoundName> bound_from_string(const std::string& s);

struct BoundSpec {
    BoundName name = BoundName::KakMax;
    double epsilon = 0.2;
    double delta = 0.0;
    double W = 1.0;
    double tube_count = 0.0;
    int dim = 2;
    double N1 = 1.0;
};

// The named rich-ball bound evaluated at r, implicit constant 1; the delta^-eps
// factor is folded in where the statement carries one.
double bound_value(const BoundSpec& spec, double r);
// delta^-epsilon slack factor of the spec (1 for ST/KakMax/GridLower).
double bound_eps_factor(const BoundSpec& spec);
// Theorem-specific richness threshold below which the bound is not asserted.
double r_threshold(const BoundSpec& spec);

struct VerifyRow {
    uint64_t r = 0;
    int64_t measured = 0;
    double bound = 0.0;
    double ratio = 0.0;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    double max_ratio = 0.0;
    double r_min = 0.0, r_max = 0.0;
    std::string warning;
};

VerifyReport verify_family(const TubeFamily& family, const BoundSpec& spec,
                           const RichMap* precomputed = nullptr);

struct GridLowerPoint {
    Vec x;
    int pair_count = 0;      // (a,b) pairs mapping to this point
    uint32_t richness = 0;   // measured at the point's lattice cell
};

struct GridLowerReport {
    bool ok = false;
    std::string reason;
    int q_lo = 0, q_hi = 0;
    std::vector<GridLowerPoint> points;
    uint32_t min_richness = 0;
    double min_separation = 0.0;
    int64_t rich_count = 0;   // measured |P_r|
    double lower_bound = 0.0; // |T|^{n/(n-1)} / r^{(n+1)/(n-1)}
    double c_measured = 0.0;  // rich_count / lower_bound
};

// Builds gen_grid_example(delta, W, dim), enumerates the coprime rich-point
// family with q within a factor 2 of W * r^{-1/(n-1)}, verifies richness and
// 1/(2W) separation, and measures |P_r| against the lower-bound formula.
GridLowerReport grid_lower_bound_check(double delta, int W, int dim, uint64_t r);

std::string verify_report_csv(const VerifyReport& rep, uint64_t seed);
std::string verify_report_json(const VerifyReport& rep, const BoundSpec& spec);
std::string grid_lower_report_json(const GridLowerReport& rep);
// log-log measured-vs-bound polyline plot; presentation only.
std::string verify_report_svg(const VerifyReport& rep);

}  // namespace tubeinc
