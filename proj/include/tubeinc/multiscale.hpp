#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tubeinc/richness.hpp"

namespace tubeinc {

// Cover of [0,1]^n by D*delta-cubes; lattice cell k belongs to cube
// floor(k/D) (margin cells clamp into the boundary cubes).
struct CubeCover {
    int D = 1;
    double delta = 0.0;
    int dim = 2;

    Index3 cube_of(const Index3& k) const {
        auto f = [&](int64_t v) { return int64_t(std::floor(double(v) / D)); };
        return {f(k.k0), f(k.k1), dim == 3 ? f(k.k2) : 0};
    }
};

struct SegmentBucket {
    int64_t segment_key = 0;  // (cube, direction cap, delta-offset) id
    int multiplicity = 0;     // number of parent tubes
    std::vector<int> parents;
};

struct PigeonholeResult {
    uint64_t M = 1;   // dyadic segment multiplicity class
    uint64_t E = 1;   // dyadic per-cell segment richness class
    uint64_t total_incidences = 0;
    uint64_t retained_incidences = 0;  // M * I(P_{Q,E}, T_{Q,M}) summed over Q
    double retained_fraction = 0.0;
    double log_budget = 0.0;  // 4 * log2(1/delta)^2
    bool retained_ok = false;  // retained >= total / log_budget
    bool product_ok = false;   // M * E >= r_min / log_budget
    uint64_t r_min = 0;
    std::vector<SegmentBucket> buckets;  // buckets of the chosen M class
};

PigeonholeResult pigeonhole_MQ(const TubeFamily& family, const RichMap& rich, int D);

// Partition of the family into ~D^{2(n-1)} direction-arc x offset cells.
struct RectanglePartition {
    int D = 1;
    // cell id -> tube indices; cell id = cap * offsets_per_cap + offset
    std::map<int64_t, std::vector<int>> cells;
};

RectanglePartition partition_rectangles(const TubeFamily& family, int D);

// Affine frame of a partition cell: rotates the cell axis to e1 and scales
// the perpendicular directions by D.
struct CellFrame {
    Vec axis;      // cell direction u
    Vec w1, w2;    // perpendicular frame
    Vec pivot;     // point on the cell's central axis
    int D = 1;
    int dim = 2;
    bool identity = false;

    Vec to_unit(const Vec& x) const;
    Vec from_unit(const Vec& y) const;
};

CellFrame cell_frame(const TubeFamily& family, int D, int64_t cell_id);

TubeFamily rescale_cell(const TubeFamily& sub, const CellFrame& frame);
Tube unrescale_tube(const Tube& t, const CellFrame& frame);

struct ThickenResult {
    TubeFamily thick_family;
    uint64_t N = 1;
    std::vector<int> parent_count;       // per thick tube of the chosen class
    double size_ratio = 0.0;             // |thick| * N / |T|
    uint64_t retained_weight = 0;
};

// Snap tubes to a canonical grid of rho-width tubes (resolution rho/2 in
// angle and offset), dedupe, pick the dyadic multiplicity class N that
// retains the most incidence weight against P (or tube count when P absent).
ThickenResult thicken(const TubeFamily& family, double rho, const RichMap* P = nullptr);

std::string pigeonhole_report_json(const PigeonholeResult& r);
std::string partition_report_json(const RectanglePartition& p);
std::string thicken_report_json(const ThickenResult& r);

}  // namespace tubeinc
