#include "tubeinc/geom.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace tubeinc {

double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
    Vec ab = b - a;
    double len2 = ab.norm2();
    if (len2 == 0.0) return dist(p, a);
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, a + ab * t);
}

double point_tube_axis_distance(const Vec& p, const Tube& t) {
    return point_segment_distance(p, t.anchor, t.end());
}

bool tube_point_incident(const Tube& t, const Vec& center, double ball_radius) {
    return point_tube_axis_distance(center, t) <= t.radius + ball_radius;
}

bool tube_ball_intersects(const Tube& t, const LatticeBall& b) {
    check_same_dim(t.dim, b.dim);
    return tube_point_incident(t, b.center(), b.radius());
}

std::vector<int64_t> raster_cells(const Tube& t, double g) {
    // Walk axis samples at step g; candidate cells within Chebyshev radius
    // ceil(r/g)+1 of each sample cover every cell center within r of the
    // segment; each candidate is then filtered by the exact predicate.
    std::unordered_set<int64_t> cells;
    const Vec a = t.anchor, b = t.end();
    const int64_t reach = int64_t(std::ceil(t.radius / g)) + 1;
    const int steps = std::max(1, int(std::ceil(t.length / g)));
    const bool threed = t.dim == 3;
    for (int s = 0; s <= steps; ++s) {
        Vec p = a + (b - a) * (double(s) / steps);
        int64_t i0 = int64_t(std::floor(p.x / g));
        int64_t i1 = int64_t(std::floor(p.y / g));
        int64_t i2 = threed ? int64_t(std::floor(p.z / g)) : 0;
        for (int64_t d0 = -reach; d0 <= reach; ++d0)
            for (int64_t d1 = -reach; d1 <= reach; ++d1) {
                int64_t lo2 = threed ? -reach : 0, hi2 = threed ? reach : 0;
                for (int64_t d2 = lo2; d2 <= hi2; ++d2) {
                    int64_t k0 = i0 + d0, k1 = i1 + d1, k2 = i2 + d2;
                    Vec c{(k0 + 0.5) * g, (k1 + 0.5) * g, threed ? (k2 + 0.5) * g : 0.0};
                    if (point_segment_distance(c, a, b) <= t.radius)
                        cells.insert(pack_index(k0, k1, k2));
                }
            }
    }
    std::vector<int64_t> out(cells.begin(), cells.end());
    std::sort(out.begin(), out.end());
    return out;
}

double overlap_fraction(const Tube& t1, const Tube& t2) {
    check_same_dim(t1.dim, t2.dim);
    const double g = t1.width() / 8.0;
    std::vector<int64_t> c1 = raster_cells(t1, g);
    if (c1.empty()) return 0.0;
    std::vector<int64_t> c2 = raster_cells(t2, g);
    size_t shared = 0;
    size_t i = 0, j = 0;
    while (i < c1.size() && j < c2.size()) {
        if (c1[i] == c2[j]) { ++shared; ++i; ++j; }
        else if (c1[i] < c2[j]) ++i;
        else ++j;
    }
    return double(shared) / double(c1.size());
}

bool essentially_distinct(const Tube& t1, const Tube& t2) {
    return overlap_fraction(t1, t2) <= 0.5;
}

}  // namespace tubeinc
