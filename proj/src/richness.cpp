#include "tubeinc/richness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace tubeinc {

uint64_t RichMap::total_incidences() const {
    uint64_t t = 0;
    for (auto& [k, c] : counts) t += c;
    return t;
}

uint32_t RichMap::max_count() const {
    uint32_t m = 0;
    for (auto& [k, c] : counts) m = std::max(m, c);
    return m;
}

int64_t lattice_max_index(double delta) { return int64_t(std::llround(1.0 / delta)); }

RichMap richness_map_oracle(const TubeFamily& family) {
    if (family.dim == 2 && family.delta < std::ldexp(1.0, -12))
        throw std::invalid_argument("richness_map_oracle: delta < 2^-12 refused in 2D");
    if (family.dim == 3 && family.delta < std::ldexp(1.0, -7))
        throw std::invalid_argument("richness_map_oracle: delta < 2^-7 refused in 3D");

    RichMap map;
    map.delta = family.delta;
    map.dim = family.dim;
    const int64_t K = lattice_max_index(family.delta);
    const bool threed = family.dim == 3;
    const double d = family.delta;
    for (int64_t k0 = -1; k0 <= K + 1; ++k0)
        for (int64_t k1 = -1; k1 <= K + 1; ++k1) {
            int64_t lo2 = threed ? -1 : 0, hi2 = threed ? K + 1 : 0;
            for (int64_t k2 = lo2; k2 <= hi2; ++k2) {
                Vec c{d * k0, d * k1, threed ? d * k2 : 0.0};
                uint32_t n = 0;
                for (const Tube& t : family.tubes)
                    if (tube_point_incident(t, c, 0.5 * d)) ++n;
                if (n) map.counts.emplace(pack_index(k0, k1, k2), n);
            }
        }
    return map;
}

namespace {

// Cells within distance tube.radius + delta/2 of the axis segment, restricted
// to the lattice domain. Dominant-axis column walk: each cell is tested once,
// with the same exact predicate as the oracle.
void tube_cells(const Tube& t, double delta, int64_t K, std::vector<int64_t>& out) {
    out.clear();
    const Vec a = t.anchor;
    const Vec u = t.direction;
    const bool threed = t.dim == 3;
    const double reach_dist = t.radius + 0.5 * delta;
    int dom = 0;
    double best = std::abs(u.x);
    if (std::abs(u.y) > best) { dom = 1; best = std::abs(u.y); }
    if (threed && std::abs(u.z) > best) { dom = 2; best = std::abs(u.z); }
    const double udom = u[dom];
    const double margin = (reach_dist + 2 * delta) / best;
    double t_lo = -margin, t_hi = t.length + margin;
    double x_lo = a[dom] + (udom > 0 ? t_lo : t_hi) * udom;
    double x_hi = a[dom] + (udom > 0 ? t_hi : t_lo) * udom;
    int64_t i_lo = std::max<int64_t>(-1, int64_t(std::ceil(x_lo / delta)));
    int64_t i_hi = std::min<int64_t>(K + 1, int64_t(std::floor(x_hi / delta)));
    const double half = reach_dist / best + 2 * delta;

    for (int64_t i = i_lo; i <= i_hi; ++i) {
        double x = i * delta;
        double tt = std::clamp((x - a[dom]) / udom, 0.0, t.length);
        Vec p = a + u * tt;
        int o1 = dom == 0 ? 1 : 0;
        int o2 = dom == 2 ? 1 : 2;
        int64_t j_lo = std::max<int64_t>(-1, int64_t(std::ceil((p[o1] - half) / delta)));
        int64_t j_hi = std::min<int64_t>(K + 1, int64_t(std::floor((p[o1] + half) / delta)));
        for (int64_t j = j_lo; j <= j_hi; ++j) {
            if (!threed) {
                int64_t k0 = dom == 0 ? i : j;
                int64_t k1 = dom == 0 ? j : i;
                Vec c{delta * k0, delta * k1, 0.0};
                if (tube_point_incident(t, c, 0.5 * delta)) out.push_back(pack_index(k0, k1, 0));
            } else {
                int64_t l_lo = std::max<int64_t>(-1, int64_t(std::ceil((p[o2] - half) / delta)));
                int64_t l_hi = std::min<int64_t>(K + 1, int64_t(std::floor((p[o2] + half) / delta)));
                for (int64_t l = l_lo; l <= l_hi; ++l) {
                    int64_t k[3];
                    k[dom] = i;
                    k[o1] = j;
                    k[o2] = l;
                    Vec c{delta * k[0], delta * k[1], delta * k[2]};
                    if (tube_point_incident(t, c, 0.5 * delta))
                        out.push_back(pack_index(k[0], k[1], k[2]));
                }
            }
        }
    }
}

}  // namespace

std::vector<int64_t> tube_cell_keys(const Tube& t, double delta) {
    std::vector<int64_t> out;
    tube_cells(t, delta, lattice_max_index(delta), out);
    std::sort(out.begin(), out.end());
    return out;
}

RichMap richness_map_fast(const TubeFamily& family) {
    RichMap map;
    map.delta = family.delta;
    map.dim = family.dim;
    const int64_t K = lattice_max_index(family.delta);
    std::vector<int64_t> cells;
    for (const Tube& t : family.tubes) {
        tube_cells(t, family.delta, K, cells);
        for (int64_t key : cells) map.counts[key] += 1;
    }
    return map;
}

int64_t rich_count(const RichMap& map, uint64_t r) {
    int64_t n = 0;
    for (auto& [k, c] : map.counts)
        if (c >= r) ++n;
    return n;
}

std::vector<std::pair<uint64_t, int64_t>> dyadic_profile(const RichMap& map) {
    std::vector<std::pair<uint64_t, int64_t>> profile;
    uint32_t m = map.max_count();
    if (m == 0) return profile;
    for (uint64_t r = 1; r <= m; r <<= 1) profile.emplace_back(r, rich_count(map, r));
    return profile;
}

uint64_t incidence_count(const RichMap& map, uint64_t r_lo, uint64_t r_hi) {
    uint64_t total = 0;
    for (auto& [k, c] : map.counts)
        if (c >= r_lo && c < r_hi) total += c;
    return total;
}

std::string richmap_to_csv(const RichMap& map) {
    std::vector<int64_t> keys;
    keys.reserve(map.counts.size());
    for (auto& [k, c] : map.counts) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::string out = map.dim == 3 ? "k0,k1,k2,count\n" : "k0,k1,count\n";
    char buf[96];
    for (int64_t key : keys) {
        Index3 k = unpack_index(key);
        uint32_t c = map.counts.at(key);
        if (map.dim == 3)
            std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%u\n", (long long)k.k0,
                          (long long)k.k1, (long long)k.k2, c);
        else
            std::snprintf(buf, sizeof buf, "%lld,%lld,%u\n", (long long)k.k0,
                          (long long)k.k1, c);
        out += buf;
    }
    return out;
}

std::string richmap_summary_json(const RichMap& map) {
    nlohmann::ordered_json j;
    j["delta"] = map.delta;
    j["dim"] = map.dim;
    j["totalIncidences"] = map.total_incidences();
    nlohmann::ordered_json prof = nlohmann::ordered_json::array();
    for (auto& [r, n] : dyadic_profile(map)) {
        nlohmann::ordered_json row;
        row["r"] = r;
        row["richCount"] = n;
        prof.push_back(row);
    }
    j["dyadicProfile"] = prof;
    return j.dump(2) + "\n";
}

}  // namespace tubeinc
