#include "tubeinc/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace tubeinc {

namespace {

constexpr double kPi = 3.14159265358979323846;

uint64_t dyadic_class(uint64_t v) {
    uint64_t c = 1;
    while (c * 2 <= v) c *= 2;
    return c;
}

}  // namespace

PigeonholeResult pigeonhole_MQ(const TubeFamily& family, const RichMap& rich, int D) {
    if (rich.counts.empty()) throw std::invalid_argument("pigeonhole_MQ: empty rich map");
    if (D < 1) throw std::invalid_argument("pigeonhole_MQ: D must be >= 1");
    const double delta = family.delta;
    const int dim = family.dim;
    CubeCover cover{D, delta, dim};
    CellCover caps(std::max(1, D), dim);
    const Vec cube_half{0.5 * D * delta, 0.5 * D * delta, dim == 3 ? 0.5 * D * delta : 0.0};

    // Segment id: (cube, direction cap at resolution 1/D, axis offset snapped
    // to the delta grid at the cube center).
    struct SegKey {
        int64_t cube;
        int cap;
        int64_t o1, o2;
        bool operator==(const SegKey& o) const {
            return cube == o.cube && cap == o.cap && o1 == o.o1 && o2 == o.o2;
        }
    };
    struct SegKeyHash {
        size_t operator()(const SegKey& k) const {
            uint64_t h = uint64_t(k.cube) * 0x9e3779b97f4a7c15ull;
            h ^= (uint64_t(k.cap) + 0x517cc1b727220a95ull) * 0xbf58476d1ce4e5b9ull;
            h ^= (uint64_t(k.o1) + 0x2545f4914f6cdd1dull) * 0x94d049bb133111ebull;
            h ^= uint64_t(k.o2) * 0xd6e8feb86659fd93ull;
            h ^= h >> 29;
            return size_t(h);
        }
    };

    auto seg_of = [&](int tube_idx, const Index3& cube) {
        const Tube& t = family.tubes[tube_idx];
        int cap = caps.cap_of(t.direction);
        Vec w1, w2;
        caps.cap_frame(cap, w1, w2);
        Vec cube_center{(cube.k0 * double(D)) * delta + cube_half.x,
                        (cube.k1 * double(D)) * delta + cube_half.y,
                        dim == 3 ? (cube.k2 * double(D)) * delta + cube_half.z : 0.0};
        // axis point closest to the cube center
        Vec u = t.direction;
        double tt = std::clamp((cube_center - t.anchor).dot(u), 0.0, t.length);
        Vec p = t.anchor + u * tt;
        int64_t o1 = int64_t(std::floor((p - cube_center).dot(w1) / delta));
        int64_t o2 = dim == 3 ? int64_t(std::floor((p - cube_center).dot(w2) / delta)) : 0;
        return SegKey{pack_index(cube.k0, cube.k1, cube.k2), cap, o1, o2};
    };

    // Enumerate (segment, P-cell) incidences, one entry per true incidence.
    std::unordered_map<SegKey, int, SegKeyHash> seg_ids;
    std::vector<std::vector<int>> seg_parents;
    std::vector<std::pair<int, int64_t>> incid;  // (seg id, cell key)
    for (int ti = 0; ti < int(family.tubes.size()); ++ti) {
        std::vector<int64_t> cells = tube_cell_keys(family.tubes[ti], delta);
        std::unordered_set<int64_t> cubes_seen;
        for (int64_t key : cells) {
            Index3 k = unpack_index(key);
            Index3 q = cover.cube_of(k);
            int64_t qkey = pack_index(q.k0, q.k1, q.k2);
            if (cubes_seen.insert(qkey).second) {
                SegKey sk = seg_of(ti, q);
                auto [it, fresh] = seg_ids.try_emplace(sk, int(seg_ids.size()));
                if (fresh) seg_parents.emplace_back();
                seg_parents[it->second].push_back(ti);
            }
        }
        for (int64_t key : cells) {
            if (!rich.counts.count(key)) continue;
            Index3 k = unpack_index(key);
            SegKey sk = seg_of(ti, cover.cube_of(k));
            incid.emplace_back(seg_ids.at(sk), key);
        }
    }

    PigeonholeResult res;
    res.total_incidences = 0;
    uint64_t r_min = UINT64_MAX;
    for (auto& [key, c] : rich.counts) {
        res.total_incidences += c;
        r_min = std::min<uint64_t>(r_min, c);
    }
    res.r_min = r_min == UINT64_MAX ? 0 : r_min;
    double log2inv = std::log2(1.0 / delta);
    res.log_budget = 16.0 * log2inv * log2inv;

    if (incid.empty()) {
        res.retained_fraction = 0;
        return res;
    }

    // choose M: dyadic class of segment multiplicity retaining most incidences
    std::unordered_map<uint64_t, uint64_t> m_weight;
    for (auto& [sid, cell] : incid) m_weight[dyadic_class(seg_parents[sid].size())] += 1;
    uint64_t bestM = 1, bestW = 0;
    for (auto& [m, w] : m_weight)
        if (w > bestW || (w == bestW && m < bestM)) { bestM = m; bestW = w; }
    res.M = bestM;

    // choose E: dyadic class of per-cell segment richness within class M
    std::unordered_map<int64_t, std::pair<uint64_t, std::unordered_set<int>>> per_cell;
    for (auto& [sid, cell] : incid) {
        if (dyadic_class(seg_parents[sid].size()) != bestM) continue;
        auto& pc = per_cell[cell];
        pc.first += 1;  // true incidences via class-M segments
        pc.second.insert(sid);
    }
    std::unordered_map<uint64_t, uint64_t> e_weight;
    for (auto& [cell, pc] : per_cell) e_weight[dyadic_class(pc.second.size())] += pc.first;
    uint64_t bestE = 1;
    bestW = 0;
    for (auto& [e, w] : e_weight)
        if (w > bestW || (w == bestW && e < bestE)) { bestE = e; bestW = w; }
    res.E = bestE;
    res.retained_incidences = bestW;
    res.retained_fraction = double(bestW) / double(res.total_incidences);
    res.retained_ok = double(res.retained_incidences) * res.log_budget >=
                      double(res.total_incidences);
    res.product_ok = double(res.M) * double(res.E) * res.log_budget >= double(res.r_min);

    // buckets of the chosen class
    std::vector<std::pair<SegKey, int>> keyed(seg_ids.begin(), seg_ids.end());
    std::sort(keyed.begin(), keyed.end(), [](auto& a, auto& b) { return a.second < b.second; });
    for (auto& [sk, sid] : keyed) {
        if (dyadic_class(seg_parents[sid].size()) != bestM) continue;
        SegmentBucket b;
        b.segment_key = sk.cube ^ (int64_t(sk.cap) << 3) ^ (sk.o1 << 13) ^ (sk.o2 << 23);
        b.multiplicity = int(seg_parents[sid].size());
        b.parents = seg_parents[sid];
        res.buckets.push_back(b);
    }
    return res;
}

RectanglePartition partition_rectangles(const TubeFamily& family, int D) {
    if (D < 1) throw std::invalid_argument("partition_rectangles: D must be >= 1");
    if (double(D) > family.W + 1e-9)
        throw std::invalid_argument("partition_rectangles: D > W violates rescaled spacing");
    CellCover cover(D, family.dim);
    RectanglePartition part;
    part.D = D;
    for (int i = 0; i < int(family.tubes.size()); ++i) {
        const Tube& t = family.tubes[i];
        int cap = cover.cap_of(t.direction);
        int off = cover.offset_cell_of(cap, t.midpoint());
        part.cells[cover.cell_key(cap, off)].push_back(i);
    }
    return part;
}

Vec CellFrame::to_unit(const Vec& x) const {
    if (identity) return x;
    Vec y = x - pivot;
    double par = y.dot(axis);
    double p1 = y.dot(w1);
    if (dim == 2) return {par + 0.5, D * p1 + 0.5, 0.0};
    double p2 = y.dot(w2);
    return {par + 0.5, D * p1 + 0.5, D * p2 + 0.5};
}

Vec CellFrame::from_unit(const Vec& y) const {
    if (identity) return y;
    Vec x = pivot + axis * (y.x - 0.5) + w1 * ((y.y - 0.5) / D);
    if (dim == 3) x += w2 * ((y.z - 0.5) / D);
    return x;
}

CellFrame cell_frame(const TubeFamily& family, int D, int64_t cell_id) {
    CellFrame fr;
    fr.D = D;
    fr.dim = family.dim;
    if (D == 1) {
        fr.identity = true;
        fr.axis = {1, 0, 0};
        fr.w1 = {0, 1, 0};
        fr.w2 = {0, 0, 1};
        return fr;
    }
    CellCover cover(D, family.dim);
    int cap = int(cell_id / cover.offsets_per_cap());
    int off = int(cell_id % cover.offsets_per_cap());
    fr.axis = cover.cap_direction(cap);
    cover.cap_frame(cap, fr.w1, fr.w2);
    double cell = (cover.off_hi() - cover.off_lo()) / cover.n_off();
    const Vec c{0.5, 0.5, family.dim == 3 ? 0.5 : 0.0};
    if (family.dim == 2) {
        double t1 = cover.off_lo() + (off + 0.5) * cell;
        fr.pivot = c + fr.w1 * t1;
    } else {
        int j1 = off / cover.n_off(), j2 = off % cover.n_off();
        double t1 = cover.off_lo() + (j1 + 0.5) * cell;
        double t2 = cover.off_lo() + (j2 + 0.5) * cell;
        fr.pivot = c + fr.w1 * t1 + fr.w2 * t2;
    }
    return fr;
}

TubeFamily rescale_cell(const TubeFamily& sub, const CellFrame& frame) {
    TubeFamily out;
    out.dim = sub.dim;
    out.spacing_class = sub.spacing_class;
    out.class_param = sub.class_param;
    if (frame.identity) {
        out.delta = sub.delta;
        out.W = sub.W;
        out.tubes = sub.tubes;
        return out;
    }
    out.delta = frame.D * sub.delta;
    out.W = sub.W / frame.D;
    for (const Tube& t : sub.tubes) {
        Vec a = frame.to_unit(t.anchor);
        Vec e = frame.to_unit(t.end());
        Vec d = e - a;
        double len = d.norm();
        Tube r;
        r.anchor = a;
        r.direction = d / len;
        r.length = len;
        r.radius = frame.D * t.radius;
        r.dim = t.dim;
        out.tubes.push_back(r);
    }
    return out;
}

Tube unrescale_tube(const Tube& t, const CellFrame& frame) {
    if (frame.identity) return t;
    Vec a = frame.from_unit(t.anchor);
    Vec e = frame.from_unit(t.end());
    Vec d = e - a;
    double len = d.norm();
    Tube r;
    r.anchor = a;
    r.direction = d / len;
    r.length = len;
    r.radius = t.radius / frame.D;
    r.dim = t.dim;
    return r;
}

ThickenResult thicken(const TubeFamily& family, double rho, const RichMap* P) {
    if (rho < family.delta - 1e-15)
        throw std::invalid_argument("thicken: rho must be >= family delta");
    const int dim = family.dim;
    // canonical rho-tube grid: direction arcs of angular size rho, offset
    // cells of size rho/2 (the finer offsets keep the factor-2 containment)
    const int n_arcs = std::max(1, int(std::llround(kPi / rho)));
    const double off_lo = -0.8, off_hi = 0.8;
    const int n_off = std::max(1, int(std::ceil((off_hi - off_lo) / (rho / 2))));
    const double off_cell = (off_hi - off_lo) / n_off;
    const Vec c{0.5, 0.5, dim == 3 ? 0.5 : 0.0};

    // 3D reuses the quota band cover at resolution ~1/rho for arcs.
    std::unique_ptr<CellCover> caps3;
    if (dim == 3) caps3 = std::make_unique<CellCover>(std::max(1, int(std::llround(1.0 / rho))), 3);

    auto arc_of = [&](const Vec& dir) {
        if (dim == 3) return caps3->cap_of(dir);
        Vec u = dir;
        if (u.y < 0 || (u.y == 0 && u.x < 0)) u = u * -1.0;
        double theta = std::atan2(u.y, u.x);
        if (theta < 0) theta += kPi;
        if (theta >= kPi) theta -= kPi;
        return std::clamp(int(std::floor(theta / kPi * n_arcs)), 0, n_arcs - 1);
    };
    auto arc_dir = [&](int arc) {
        if (dim == 3) return caps3->cap_direction(arc);
        double theta = (arc + 0.5) * kPi / n_arcs;
        return Vec{std::cos(theta), std::sin(theta), 0.0};
    };
    auto arc_frame = [&](int arc, Vec& w1, Vec& w2) {
        if (dim == 3) { caps3->cap_frame(arc, w1, w2); return; }
        Vec u = arc_dir(arc);
        w1 = {-u.y, u.x, 0.0};
        w2 = {0, 0, 0};
    };

    struct CellId {
        int arc;
        int64_t o1, o2;
        bool operator==(const CellId& o) const { return arc == o.arc && o1 == o.o1 && o2 == o.o2; }
    };
    struct CellIdHash {
        size_t operator()(const CellId& k) const {
            uint64_t h = uint64_t(k.arc) * 0x9e3779b97f4a7c15ull;
            h ^= (uint64_t(k.o1) + 0x2545f4914f6cdd1dull) * 0xbf58476d1ce4e5b9ull;
            h ^= uint64_t(k.o2) * 0x94d049bb133111ebull;
            return size_t(h ^ (h >> 31));
        }
    };
    std::unordered_map<CellId, std::vector<int>, CellIdHash> cells;
    for (int i = 0; i < int(family.tubes.size()); ++i) {
        const Tube& t = family.tubes[i];
        int arc = arc_of(t.direction);
        Vec w1, w2;
        arc_frame(arc, w1, w2);
        Vec m = t.midpoint() - c;
        int64_t o1 = int64_t(std::floor((m.dot(w1) - off_lo) / off_cell));
        int64_t o2 = dim == 3 ? int64_t(std::floor((m.dot(w2) - off_lo) / off_cell)) : 0;
        cells[{arc, o1, o2}].push_back(i);
    }

    // incidence weight of each parent tube against P
    std::vector<uint64_t> w(family.tubes.size(), 1);
    if (P) {
        for (size_t i = 0; i < family.tubes.size(); ++i) {
            uint64_t n = 0;
            for (int64_t key : tube_cell_keys(family.tubes[i], family.delta))
                if (P->counts.count(key)) ++n;
            w[i] = n;
        }
    }

    std::unordered_map<uint64_t, uint64_t> class_weight;
    for (auto& [id, parents] : cells) {
        uint64_t cls = dyadic_class(parents.size());
        uint64_t cw = 0;
        for (int p : parents) cw += w[p];
        class_weight[cls] += cw;
    }
    uint64_t bestN = 1, bestW = 0;
    for (auto& [n, cw] : class_weight)
        if (cw > bestW || (cw == bestW && n < bestN)) { bestN = n; bestW = cw; }

    ThickenResult res;
    res.N = bestN;
    res.retained_weight = bestW;
    res.thick_family.delta = rho;
    res.thick_family.W = family.W;
    res.thick_family.dim = dim;
    res.thick_family.spacing_class = SpacingClass::Unstructured;

    std::vector<std::pair<CellId, std::vector<int>>> ordered(cells.begin(), cells.end());
    std::sort(ordered.begin(), ordered.end(), [](auto& a, auto& b) {
        if (a.first.arc != b.first.arc) return a.first.arc < b.first.arc;
        if (a.first.o1 != b.first.o1) return a.first.o1 < b.first.o1;
        return a.first.o2 < b.first.o2;
    });
    for (auto& [id, parents] : ordered) {
        if (dyadic_class(parents.size()) != bestN) continue;
        Vec w1, w2;
        arc_frame(id.arc, w1, w2);
        Vec u = arc_dir(id.arc);
        Vec mid = c + w1 * (off_lo + (id.o1 + 0.5) * off_cell);
        if (dim == 3) mid += w2 * (off_lo + (id.o2 + 0.5) * off_cell);
        // axial extent from the parents' endpoint projections, so tubes whose
        // midpoints sit off the offset plane stay covered
        double lo = -0.5, hi = 0.5;
        for (int p : parents) {
            const Tube& pt = family.tubes[p];
            lo = std::min(lo, (pt.anchor - mid).dot(u));
            hi = std::max(hi, (pt.anchor - mid).dot(u));
            lo = std::min(lo, (pt.end() - mid).dot(u));
            hi = std::max(hi, (pt.end() - mid).dot(u));
        }
        Tube t;
        t.direction = u;
        t.anchor = mid + u * lo;
        t.length = hi - lo;
        t.radius = 0.5 * rho;
        t.dim = dim;
        res.thick_family.tubes.push_back(t);
        res.parent_count.push_back(int(parents.size()));
    }
    res.size_ratio = family.tubes.empty()
                         ? 0.0
                         : double(res.thick_family.size()) * double(bestN) / double(family.size());
    return res;
}

std::string pigeonhole_report_json(const PigeonholeResult& r) {
    nlohmann::ordered_json j;
    j["M"] = r.M;
    j["E"] = r.E;
    j["totalIncidences"] = r.total_incidences;
    j["retainedIncidences"] = r.retained_incidences;
    j["retainedFraction"] = r.retained_fraction;
    j["logBudget"] = r.log_budget;
    j["retainedOk"] = r.retained_ok;
    j["productOk"] = r.product_ok;
    j["rMin"] = r.r_min;
    j["buckets"] = r.buckets.size();
    return j.dump(2) + "\n";
}

std::string partition_report_json(const RectanglePartition& p) {
    nlohmann::ordered_json j;
    j["D"] = p.D;
    j["occupiedCells"] = p.cells.size();
    std::map<size_t, int> hist;
    size_t total = 0;
    for (auto& [key, tubes] : p.cells) {
        hist[tubes.size()] += 1;
        total += tubes.size();
    }
    j["tubes"] = total;
    nlohmann::ordered_json h = nlohmann::ordered_json::array();
    for (auto& [load, cells] : hist) {
        nlohmann::ordered_json row;
        row["load"] = load;
        row["cells"] = cells;
        h.push_back(row);
    }
    j["loadHistogram"] = h;
    return j.dump(2) + "\n";
}

std::string thicken_report_json(const ThickenResult& r) {
    nlohmann::ordered_json j;
    j["N"] = r.N;
    j["thickTubes"] = r.thick_family.size();
    j["rho"] = r.thick_family.delta;
    j["sizeRatio"] = r.size_ratio;
    j["retainedWeight"] = r.retained_weight;
    return j.dump(2) + "\n";
}

}  // namespace tubeinc
