#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tubeinc/geom.hpp"

namespace tubeinc {

enum class SpacingClass {
    WellSpaced,
    DirectionSpaced,
    GridExample,
    HeavyBallExample,
    Bush,
    FatRectangle,
    Unstructured,
};

std::string to_string(SpacingClass c);
SpacingClass spacing_class_from_string(const std::string& s);

struct TubeFamily {
    std::vector<Tube> tubes;
    double delta = 0.0;
    double W = 1.0;
    int dim = 2;
    SpacingClass spacing_class = SpacingClass::Unstructured;
    double class_param = 0.0;  // N1 / A / r for the classes that carry one
    double skip_angle = 0.0;   // heavy-ball horizontal exclusion, metadata

    size_t size() const { return tubes.size(); }
};

// Point set E for the distance-set pipeline: delta-balls in [0,1]^2.
struct BallSet {
    std::vector<Vec> centers;
    double delta = 0.0;
    double s = 0.0;
    double w_requested = 0.0;  // delta^{-s/2} before rounding
    int w_effective = 0;       // power of two actually used

    size_t size() const { return centers.size(); }
};

// Cover of direction space by caps of angular radius ~1/W crossed with
// translation cells of size ~1/W; one cell per 1/W-tube. 2D: n_caps arcs of
// pi/n_caps over the half-circle, offsets along the cap's normal through the
// cube center. 3D: latitude bands with largest-remainder quotas summing to
// exactly caps_target, offsets on a 2D grid in the cap's normal plane.
class CellCover {
public:
    CellCover(int W, int dim);

    int dim() const { return dim_; }
    int cap_count() const { return cap_count_; }
    int offsets_per_cap() const { return offsets_per_cap_; }
    int64_t cell_count() const { return int64_t(cap_count_) * offsets_per_cap_; }

    int cap_of(const Vec& direction) const;
    Vec cap_direction(int cap) const;
    // Orthonormal frame spanning the cap's normal plane (w2 unused in 2D).
    void cap_frame(int cap, Vec& w1, Vec& w2) const;

    int offset_cell_of(int cap, const Vec& axis_midpoint) const;
    // Cell boundaries in the frame coordinate(s), [off_lo, off_hi] split into
    // n_off cells per axis.
    double off_lo() const { return off_lo_; }
    double off_hi() const { return off_hi_; }
    int n_off() const { return n_off_; }

    int64_t cell_key(int cap, int offset) const { return int64_t(cap) * offsets_per_cap_ + offset; }

private:
    int W_;
    int dim_;
    int cap_count_;
    int offsets_per_cap_;
    int n_off_;
    double off_lo_, off_hi_;
    // 3D band structure
    int n_lat_ = 0;
    std::vector<int> band_lon_;
    std::vector<int> band_start_;
    int band_of(double alpha) const;
};

TubeFamily gen_well_spaced(double delta, int W, int dim, uint64_t seed);
TubeFamily gen_direction_spaced(double delta, int W, int N1, uint64_t seed);
TubeFamily gen_heavy_ball_example(double delta, int W, double A, uint64_t seed);
TubeFamily gen_grid_example(double delta, int W, int dim);
TubeFamily gen_bush(double delta);
TubeFamily gen_fat_rectangle(double delta, int r, uint64_t seed);
BallSet gen_spread_ballset(double delta, double s, uint64_t seed);

struct SpacingReport {
    bool ok = false;
    int worst_cell_load = 0;
    // min over tube pairs of W * max(angle, axis distance); large when pairs
    // are 1/W-separated. +inf for families with < 2 tubes.
    double pairwise_separation = 0.0;
    bool count_consistent = true;
    std::string note;
};

SpacingReport verify_spacing(const TubeFamily& family);

// Nearest power of two in linear distance (ties round down).
int nearest_pow2(double x);

std::string family_to_json(const TubeFamily& f);
TubeFamily family_from_json(const std::string& text);
std::string ballset_to_json(const BallSet& e);

}  // namespace tubeinc
