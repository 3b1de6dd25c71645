#pragma once

#include <stdexcept>
#include <vector>

#include "tubeinc/vec.hpp"

namespace tubeinc {

// delta-neighborhood of a segment: width = 2*radius = delta, axis from anchor
// to anchor + length*direction. dim is 2 or 3; 2D tubes keep z == 0.
struct Tube {
    Vec anchor;
    Vec direction;  // unit
    double length = 1.0;
    double radius = 0.0;  // = delta/2
    int dim = 2;

    Vec end() const { return anchor + direction * length; }
    Vec midpoint() const { return anchor + direction * (0.5 * length); }
    double width() const { return 2.0 * radius; }
};

// Ball of radius delta/2 centered on the lattice delta*Z^n.
struct LatticeBall {
    Index3 index;
    double delta = 0.0;
    int dim = 2;

    Vec center() const {
        return {delta * double(index.k0), delta * double(index.k1),
                dim == 3 ? delta * double(index.k2) : 0.0};
    }
    double radius() const { return 0.5 * delta; }
};

double point_segment_distance(const Vec& p, const Vec& a, const Vec& b);
double point_tube_axis_distance(const Vec& p, const Tube& t);

// True iff dist(ball center, axis segment) <= t.radius + b.radius.
bool tube_ball_intersects(const Tube& t, const LatticeBall& b);
bool tube_point_incident(const Tube& t, const Vec& center, double ball_radius);

// |T1 ∩ T2| / |T1| measured on the global delta/8 raster (deterministic).
double overlap_fraction(const Tube& t1, const Tube& t2);

// overlap_fraction <= 1/2; equality counts as distinct.
bool essentially_distinct(const Tube& t1, const Tube& t2);

// Cells of the spacing-g global grid whose centers lie within t.radius of the
// axis segment. Exposed for the overlap raster and tests.
std::vector<int64_t> raster_cells(const Tube& t, double g);

inline void check_same_dim(int a, int b) {
    if (a != b) throw std::invalid_argument("dimension mismatch");
}

}  // namespace tubeinc
