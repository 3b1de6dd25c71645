#include "tubeinc/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "json.hpp"
#include "tubeinc/rng.hpp"

namespace tubeinc {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(double x) {
    if (x <= 0) return false;
    int e;
    double m = std::frexp(x, &e);
    return m == 0.5;
}

// Canonical representative of a direction mod +-1: last nonzero coordinate
// made positive (z first, then y, then x).
Vec canonical_dir(Vec u) {
    if (u.z < 0 || (u.z == 0 && (u.y < 0 || (u.y == 0 && u.x < 0)))) return u * -1.0;
    return u;
}

Vec dir_from_angle(double theta) { return {std::cos(theta), std::sin(theta), 0.0}; }

int arc_count(double delta) { return std::max<int>(1, int(std::llround(kPi / delta))); }

}  // namespace

std::string to_string(SpacingClass c) {
    switch (c) {
        case SpacingClass::WellSpaced: return "WellSpaced";
        case SpacingClass::DirectionSpaced: return "DirectionSpaced";
        case SpacingClass::GridExample: return "GridExample";
        case SpacingClass::HeavyBallExample: return "HeavyBallExample";
        case SpacingClass::Bush: return "Bush";
        case SpacingClass::FatRectangle: return "FatRectangle";
        case SpacingClass::Unstructured: return "Unstructured";
    }
    return "Unstructured";
}

SpacingClass spacing_class_from_string(const std::string& s) {
    if (s == "WellSpaced") return SpacingClass::WellSpaced;
    if (s == "DirectionSpaced") return SpacingClass::DirectionSpaced;
    if (s == "GridExample") return SpacingClass::GridExample;
    if (s == "HeavyBallExample") return SpacingClass::HeavyBallExample;
    if (s == "Bush") return SpacingClass::Bush;
    if (s == "FatRectangle") return SpacingClass::FatRectangle;
    return SpacingClass::Unstructured;
}

int nearest_pow2(double x) {
    if (x <= 1.0) return 1;
    int lo = 1 << int(std::floor(std::log2(x)));
    int hi = lo * 2;
    return (x - lo <= hi - x) ? lo : hi;
}

CellCover::CellCover(int W, int dim) : W_(W), dim_(dim) {
    if (W < 1) throw std::invalid_argument("CellCover: W must be >= 1");
    if (dim == 2) {
        cap_count_ = W;
        n_off_ = W;
        off_lo_ = -0.5;
        off_hi_ = 0.5;
        offsets_per_cap_ = n_off_;
    } else if (dim == 3) {
        // Bands over polar angle [0, pi/2]; per-band cap quotas by largest
        // remainder so that the total is exactly W^2.
        n_lat_ = std::max(1, int(std::llround(kPi * W / 4.0)));
        int target = W * W;
        if (n_lat_ > target) n_lat_ = target;
        std::vector<double> weight(n_lat_);
        double h = (kPi / 2) / n_lat_;
        double wsum = 0;
        for (int b = 0; b < n_lat_; ++b) {
            weight[b] = std::sin((b + 0.5) * h);
            wsum += weight[b];
        }
        band_lon_.assign(n_lat_, 1);
        int assigned = n_lat_;
        std::vector<std::pair<double, int>> rem(n_lat_);
        for (int b = 0; b < n_lat_; ++b) {
            double ideal = weight[b] / wsum * target;
            int extra = std::max(0, int(std::floor(ideal)) - 1);
            band_lon_[b] += extra;
            assigned += extra;
            rem[b] = {ideal - std::floor(ideal), b};
        }
        std::sort(rem.begin(), rem.end(), [](auto& a, auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (int i = 0; assigned < target; ++i, ++assigned) band_lon_[rem[i % n_lat_].second] += 1;
        while (assigned > target) {
            // only possible when floor sums overshoot; trim largest bands
            int bmax = int(std::max_element(band_lon_.begin(), band_lon_.end()) - band_lon_.begin());
            if (band_lon_[bmax] <= 1) break;
            band_lon_[bmax] -= 1;
            --assigned;
        }
        band_start_.assign(n_lat_ + 1, 0);
        for (int b = 0; b < n_lat_; ++b) band_start_[b + 1] = band_start_[b] + band_lon_[b];
        cap_count_ = band_start_[n_lat_];
        n_off_ = W;
        off_lo_ = -0.35;
        off_hi_ = 0.35;
        offsets_per_cap_ = n_off_ * n_off_;
    } else {
        throw std::invalid_argument("CellCover: dim must be 2 or 3");
    }
}

int CellCover::band_of(double alpha) const {
    double h = (kPi / 2) / n_lat_;
    int b = int(std::floor(alpha / h));
    return std::clamp(b, 0, n_lat_ - 1);
}

int CellCover::cap_of(const Vec& direction) const {
    Vec u = canonical_dir(direction.normalized());
    if (dim_ == 2) {
        double theta = std::atan2(u.y, u.x);
        if (theta < 0) theta += kPi;
        if (theta >= kPi) theta -= kPi;
        int i = int(std::floor(theta / kPi * cap_count_));
        return std::clamp(i, 0, cap_count_ - 1);
    }
    double alpha = std::acos(std::clamp(u.z, -1.0, 1.0));
    int b = band_of(alpha);
    double phi = std::atan2(u.y, u.x);
    if (phi < 0) phi += 2 * kPi;
    int lon = int(std::floor(phi / (2 * kPi) * band_lon_[b]));
    lon = std::clamp(lon, 0, band_lon_[b] - 1);
    return band_start_[b] + lon;
}

Vec CellCover::cap_direction(int cap) const {
    if (dim_ == 2) {
        double theta = (cap + 0.5) * kPi / cap_count_;
        return dir_from_angle(theta);
    }
    int b = int(std::upper_bound(band_start_.begin(), band_start_.end(), cap) - band_start_.begin()) - 1;
    b = std::clamp(b, 0, n_lat_ - 1);
    int lon = cap - band_start_[b];
    double h = (kPi / 2) / n_lat_;
    double alpha = (b + 0.5) * h;
    double phi = (lon + 0.5) * 2 * kPi / band_lon_[b];
    return {std::sin(alpha) * std::cos(phi), std::sin(alpha) * std::sin(phi), std::cos(alpha)};
}

void CellCover::cap_frame(int cap, Vec& w1, Vec& w2) const {
    Vec u = cap_direction(cap);
    if (dim_ == 2) {
        w1 = {-u.y, u.x, 0.0};
        w2 = {0, 0, 0};
        return;
    }
    Vec ref = std::abs(u.z) < 0.9 ? Vec{0, 0, 1} : Vec{1, 0, 0};
    w1 = u.cross(ref).normalized();
    w2 = u.cross(w1);
}

int CellCover::offset_cell_of(int cap, const Vec& mid) const {
    Vec w1, w2;
    cap_frame(cap, w1, w2);
    const Vec c{0.5, 0.5, dim_ == 3 ? 0.5 : 0.0};
    double cell = (off_hi_ - off_lo_) / n_off_;
    double t1 = (mid - c).dot(w1);
    int j1 = std::clamp(int(std::floor((t1 - off_lo_) / cell)), 0, n_off_ - 1);
    if (dim_ == 2) return j1;
    double t2 = (mid - c).dot(w2);
    int j2 = std::clamp(int(std::floor((t2 - off_lo_) / cell)), 0, n_off_ - 1);
    return j1 * n_off_ + j2;
}

namespace {

// Jitter from the inner half of [lo, hi); keeps neighbouring cells' tubes
// essentially distinct.
double inner_jitter(Rng& rng, double lo, double hi) {
    double q = (hi - lo) / 4;
    return rng.uniform(lo + q, hi - q);
}

Tube tube_through(const Vec& mid, const Vec& dir, double delta, int dim, double length = 1.0) {
    // Segment through mid, slid along its axis just enough to stay inside
    // [-0.5, 1.5]^n (jittered anchors near the boundary would otherwise poke
    // out).
    double lo = -0.5 * length, hi = 0.5 * length;
    for (int i = 0; i < dim; ++i) {
        double u = dir[i];
        if (u == 0.0) continue;
        double a = (-0.5 - mid[i]) / u, b = (1.5 - mid[i]) / u;
        if (a > b) std::swap(a, b);
        if (lo < a) { hi += a - lo; lo = a; }
        if (hi > b) { lo -= hi - b; hi = b; }
    }
    Tube t;
    t.direction = dir;
    t.anchor = mid + dir * lo;
    t.length = length;
    t.radius = 0.5 * delta;
    t.dim = dim;
    return t;
}

}  // namespace

TubeFamily gen_well_spaced(double delta, int W, int dim, uint64_t seed) {
    if (W < 1 || double(W) > 1.0 / delta + 1e-9)
        throw std::invalid_argument("gen_well_spaced: need 1 <= W <= 1/delta");
    if (!is_pow2(delta) || !is_pow2(double(W)))
        throw std::invalid_argument("gen_well_spaced: W and 1/delta must be powers of 2");
    CellCover cover(W, dim);
    const Vec c{0.5, 0.5, dim == 3 ? 0.5 : 0.0};
    double cell = (cover.off_hi() - cover.off_lo()) / cover.n_off();

    TubeFamily fam;
    fam.delta = delta;
    fam.W = W;
    fam.dim = dim;
    fam.spacing_class = SpacingClass::WellSpaced;
    fam.tubes.reserve(size_t(cover.cell_count()));
    for (int cap = 0; cap < cover.cap_count(); ++cap) {
        Vec w1, w2;
        cover.cap_frame(cap, w1, w2);
        for (int off = 0; off < cover.offsets_per_cap(); ++off) {
            Rng rng = Rng::for_cell(seed, uint64_t(cap), uint64_t(off));
            Vec dir;
            if (dim == 2) {
                double arc = kPi / cover.cap_count();
                double theta = cap * arc + inner_jitter(rng, 0.0, arc);
                dir = dir_from_angle(theta);
            } else {
                // jitter within the cap by rotating around the frame axes
                Vec u = cover.cap_direction(cap);
                double half = 0.5 / W;
                double a1 = inner_jitter(rng, -half, half);
                double a2 = inner_jitter(rng, -half, half);
                dir = (u + w1 * a1 + w2 * a2).normalized();
            }
            int j1 = dim == 2 ? off : off / cover.n_off();
            int j2 = dim == 2 ? 0 : off % cover.n_off();
            double t1 = cover.off_lo() + (j1 + 0.25 + 0.5 * rng.next_double()) * cell;
            Vec mid = c + w1 * t1;
            if (dim == 3) {
                double t2 = cover.off_lo() + (j2 + 0.25 + 0.5 * rng.next_double()) * cell;
                mid += w2 * t2;
            }
            fam.tubes.push_back(tube_through(mid, dir, delta, dim));
        }
    }
    return fam;
}

TubeFamily gen_direction_spaced(double delta, int W, int N1, uint64_t seed) {
    if (W < 1 || double(W) > 1.0 / delta + 1e-9)
        throw std::invalid_argument("gen_direction_spaced: need 1 <= W <= 1/delta");
    if (N1 < 0 || double(N1) * W * delta > 1.0 + 1e-9)
        throw std::invalid_argument("gen_direction_spaced: infeasible packing N1*W*delta > 1");
    TubeFamily fam;
    fam.delta = delta;
    fam.W = W;
    fam.dim = 2;
    fam.spacing_class = SpacingClass::DirectionSpaced;
    fam.class_param = N1;
    const Vec c{0.5, 0.5, 0.0};
    int arcs = arc_count(delta);
    double arc = kPi / arcs;
    double cell = 1.0 / W;
    for (int a = 0; a < arcs; ++a) {
        for (int j = 0; j < W; ++j) {
            for (int n = 0; n < N1; ++n) {
                Rng rng = Rng::for_cell(seed, uint64_t(a), uint64_t(j), uint64_t(n));
                double theta = a * arc + inner_jitter(rng, 0.0, arc);
                Vec dir = dir_from_angle(theta);
                Vec w1{-dir.y, dir.x, 0.0};
                double t = -0.5 + (j + rng.next_double()) * cell;
                fam.tubes.push_back(tube_through(c + w1 * t, dir, delta, 2));
            }
        }
    }
    return fam;
}

TubeFamily gen_heavy_ball_example(double delta, int W, double A, uint64_t seed) {
    if (A < 1.0) throw std::invalid_argument("gen_heavy_ball_example: A must be >= 1");
    if (A * delta * W > 1.0 + 1e-9)
        throw std::invalid_argument("gen_heavy_ball_example: A*delta*W must be <= 1");
    TubeFamily fam;
    fam.delta = delta;
    fam.W = W;
    fam.dim = 2;
    fam.spacing_class = SpacingClass::HeavyBallExample;
    fam.class_param = A;
    fam.skip_angle = W > 1 ? std::min(4.0 * A * delta * W, kPi / 2 * 0.9) : 0.0;
    int arcs = arc_count(delta);
    double arc = kPi / arcs;
    for (int a = 0; a < arcs; ++a) {
        double theta = (a + 0.5) * arc;
        double from_horizontal = std::min(theta, kPi - theta);
        if (from_horizontal < fam.skip_angle) continue;
        Vec dir = dir_from_angle(theta);
        for (int i = 0; i < W; ++i) {
            Rng rng = Rng::for_cell(seed, uint64_t(a), uint64_t(i));
            Vec anchor_center{(i + 0.5) / W, 0.0, 0.0};
            Vec jitter{(rng.next_double() - 0.5) * A * delta,
                       (rng.next_double() - 0.5) * A * delta, 0.0};
            fam.tubes.push_back(tube_through(anchor_center + jitter, dir, delta, 2));
        }
    }
    return fam;
}

TubeFamily gen_grid_example(double delta, int W, int dim) {
    if (delta > 1.0 / W + 1e-12)
        throw std::invalid_argument("gen_grid_example: need delta <= 1/W");
    TubeFamily fam;
    fam.delta = delta;
    fam.W = W;
    fam.dim = dim;
    fam.spacing_class = SpacingClass::GridExample;
    int g = W + 1;  // G = (Z/W)^{n-1} cap [0,1]^{n-1} has W+1 points per axis
    auto coord = [&](int i) { return double(i) / W; };
    if (dim == 2) {
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) {
                Vec p{coord(a), 0.0, 0.0}, q{coord(b), 1.0, 0.0};
                Vec d = q - p;
                double len = d.norm();
                Tube t;
                t.anchor = p;
                t.direction = d / len;
                t.length = len;
                t.radius = 0.5 * delta;
                t.dim = 2;
                fam.tubes.push_back(t);
            }
    } else {
        for (int a1 = 0; a1 < g; ++a1)
            for (int a2 = 0; a2 < g; ++a2)
                for (int b1 = 0; b1 < g; ++b1)
                    for (int b2 = 0; b2 < g; ++b2) {
                        Vec p{coord(a1), coord(a2), 0.0}, q{coord(b1), coord(b2), 1.0};
                        Vec d = q - p;
                        double len = d.norm();
                        Tube t;
                        t.anchor = p;
                        t.direction = d / len;
                        t.length = len;
                        t.radius = 0.5 * delta;
                        t.dim = 3;
                        fam.tubes.push_back(t);
                    }
    }
    return fam;
}

TubeFamily gen_bush(double delta) {
    TubeFamily fam;
    fam.delta = delta;
    fam.W = 1;
    fam.dim = 2;
    fam.spacing_class = SpacingClass::Bush;
    const Vec c{0.5, 0.5, 0.0};
    int arcs = arc_count(delta);
    for (int a = 0; a < arcs; ++a) {
        double theta = (a + 0.5) * kPi / arcs;
        fam.tubes.push_back(tube_through(c, dir_from_angle(theta), delta, 2));
    }
    return fam;
}

TubeFamily gen_fat_rectangle(double delta, int r, uint64_t seed) {
    if (r < 1) throw std::invalid_argument("gen_fat_rectangle: r must be >= 1");
    TubeFamily fam;
    fam.delta = delta;
    fam.W = 1;
    fam.dim = 2;
    fam.spacing_class = SpacingClass::FatRectangle;
    fam.class_param = r;
    // r slope classes 3*delta apart and ~1.25r offsets 2*delta apart; the
    // margins keep every pair essentially distinct while the bundle still
    // fills an O(r*delta) x 1 rectangle.
    int n_off = std::max(1, int(std::llround(1.25 * r)));
    for (int i = 0; i < r; ++i) {
        double slope = 3.0 * delta * (i - 0.5 * (r - 1));
        for (int j = 0; j < n_off; ++j) {
            Rng rng = Rng::for_cell(seed, uint64_t(i), uint64_t(j));
            double y = 0.5 + 2.0 * delta * (j - 0.5 * (n_off - 1)) +
                       (rng.next_double() - 0.5) * 0.5 * delta;
            Vec p{0.0, y - 0.5 * slope, 0.0};
            Vec d{1.0, slope, 0.0};
            double len = d.norm();
            Tube t;
            t.anchor = p;
            t.direction = d / len;
            t.length = len;
            t.radius = 0.5 * delta;
            t.dim = 2;
            fam.tubes.push_back(t);
        }
    }
    return fam;
}

BallSet gen_spread_ballset(double delta, double s, uint64_t seed) {
    if (!(s > 1.0 && s < 2.0))
        throw std::invalid_argument("gen_spread_ballset: s must lie strictly in (1, 2)");
    BallSet e;
    e.delta = delta;
    e.s = s;
    e.w_requested = std::pow(delta, -s / 2.0);
    e.w_effective = nearest_pow2(e.w_requested);
    int W = e.w_effective;
    double cell = 1.0 / W;
    for (int i = 0; i < W; ++i)
        for (int j = 0; j < W; ++j) {
            Rng rng = Rng::for_cell(seed, uint64_t(i), uint64_t(j));
            double margin = 0.5 * delta;
            double span = cell - delta;
            double x = i * cell + margin + (span > 0 ? rng.next_double() * span : 0.0);
            double y = j * cell + margin + (span > 0 ? rng.next_double() * span : 0.0);
            e.centers.push_back({x, y, 0.0});
        }
    return e;
}

SpacingReport verify_spacing(const TubeFamily& family) {
    SpacingReport rep;
    int W = std::max(1, int(std::llround(family.W)));
    if (family.tubes.empty()) {
        rep.ok = true;
        rep.worst_cell_load = 0;
        rep.pairwise_separation = std::numeric_limits<double>::infinity();
        return rep;
    }

    // Cell binning. DirectionSpaced families are binned per delta-arc.
    std::unordered_map<int64_t, int> load;
    if (family.spacing_class == SpacingClass::DirectionSpaced) {
        int arcs = arc_count(family.delta);
        CellCover off_cover(W, family.dim);
        for (const Tube& t : family.tubes) {
            Vec u = canonical_dir(t.direction);
            double theta = std::atan2(u.y, u.x);
            if (theta < 0) theta += kPi;
            if (theta >= kPi) theta -= kPi;
            int arc = std::clamp(int(std::floor(theta / kPi * arcs)), 0, arcs - 1);
            int cap = off_cover.cap_of(t.direction);
            int off = off_cover.offset_cell_of(cap, t.midpoint());
            load[(int64_t(arc) << 20) | off] += 1;
        }
    } else {
        CellCover cover(W, family.dim);
        for (const Tube& t : family.tubes) {
            int cap = cover.cap_of(t.direction);
            int off = cover.offset_cell_of(cap, t.midpoint());
            load[cover.cell_key(cap, off)] += 1;
        }
    }
    for (auto& [k, v] : load) rep.worst_cell_load = std::max(rep.worst_cell_load, v);

    int load_limit = 1;
    if (family.spacing_class == SpacingClass::DirectionSpaced)
        load_limit = std::max(1, 2 * int(std::llround(family.class_param)));

    // Pairwise 1/W-separation (paper's phrasing of the hypothesis), only
    // affordable for moderate families.
    rep.pairwise_separation = std::numeric_limits<double>::infinity();
    const size_t n = family.tubes.size();
    if (n >= 2 && n <= 5000) {
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) {
                const Tube &a = family.tubes[i], &b = family.tubes[j];
                Vec ua = canonical_dir(a.direction), ub = canonical_dir(b.direction);
                double cross = ua.cross(ub).norm();
                double angle = std::asin(std::clamp(cross, 0.0, 1.0));
                double d = point_segment_distance(a.midpoint(), b.anchor, b.end());
                rep.pairwise_separation =
                    std::min(rep.pairwise_separation, W * std::max(angle, d));
            }
    }

    double expected = std::pow(double(W), 2.0 * (family.dim - 1));
    rep.count_consistent =
        double(n) >= expected / 4.0 && double(n) <= expected * 4.0;

    bool load_ok = rep.worst_cell_load <= load_limit;
    bool pairwise_ok = rep.pairwise_separation >= 0.25 && rep.count_consistent;
    rep.ok = load_ok || pairwise_ok;
    if (!rep.ok) {
        rep.note = "worst cell load " + std::to_string(rep.worst_cell_load) +
                   " exceeds " + std::to_string(load_limit);
        if (!rep.count_consistent) rep.note += "; tube count inconsistent with W";
    }
    return rep;
}

namespace {

nlohmann::ordered_json vec_json(const Vec& v, int dim) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    a.push_back(v.x);
    a.push_back(v.y);
    if (dim == 3) a.push_back(v.z);
    return a;
}

Vec vec_from(const nlohmann::json& a) {
    Vec v;
    v.x = a.at(0).get<double>();
    v.y = a.at(1).get<double>();
    if (a.size() > 2) v.z = a.at(2).get<double>();
    return v;
}

}  // namespace

std::string family_to_json(const TubeFamily& f) {
    nlohmann::ordered_json j;
    j["dim"] = f.dim;
    j["delta"] = f.delta;
    j["W"] = f.W;
    j["spacingClass"] = to_string(f.spacing_class);
    if (f.class_param != 0.0) j["classParam"] = f.class_param;
    if (f.skip_angle != 0.0) j["skipAngle"] = f.skip_angle;
    nlohmann::ordered_json tubes = nlohmann::ordered_json::array();
    for (const Tube& t : f.tubes) {
        nlohmann::ordered_json tj;
        tj["anchor"] = vec_json(t.anchor, f.dim);
        tj["direction"] = vec_json(t.direction, f.dim);
        tj["length"] = t.length;
        tj["radius"] = t.radius;
        tubes.push_back(tj);
    }
    j["tubes"] = tubes;
    return j.dump(2) + "\n";
}

TubeFamily family_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TubeFamily f;
    f.dim = j.at("dim").get<int>();
    f.delta = j.at("delta").get<double>();
    f.W = j.at("W").get<double>();
    f.spacing_class = spacing_class_from_string(j.at("spacingClass").get<std::string>());
    if (j.contains("classParam")) f.class_param = j["classParam"].get<double>();
    if (j.contains("skipAngle")) f.skip_angle = j["skipAngle"].get<double>();
    for (const auto& tj : j.at("tubes")) {
        Tube t;
        t.anchor = vec_from(tj.at("anchor"));
        t.direction = vec_from(tj.at("direction"));
        t.length = tj.at("length").get<double>();
        t.radius = tj.at("radius").get<double>();
        t.dim = f.dim;
        f.tubes.push_back(t);
    }
    return f;
}

std::string ballset_to_json(const BallSet& e) {
    nlohmann::ordered_json j;
    j["delta"] = e.delta;
    j["s"] = e.s;
    j["wRequested"] = e.w_requested;
    j["wEffective"] = e.w_effective;
    nlohmann::ordered_json centers = nlohmann::ordered_json::array();
    for (const Vec& c : e.centers) centers.push_back(vec_json(c, 2));
    j["centers"] = centers;
    return j.dump(2) + "\n";
}

}  // namespace tubeinc
