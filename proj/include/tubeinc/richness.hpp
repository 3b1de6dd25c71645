#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tubeinc/families.hpp"

namespace tubeinc {

// Sparse lattice-ball richness map. Keys pack the lattice index k (center at
// delta*k); the domain is [-delta, 1+delta]^n, one cell of margin around the
// unit cube.
struct RichMap {
    double delta = 0.0;
    int dim = 2;
    std::unordered_map<int64_t, uint32_t> counts;

    uint32_t at(const Index3& k) const {
        auto it = counts.find(pack_index(k.k0, k.k1, k.k2));
        return it == counts.end() ? 0u : it->second;
    }
    int64_t support_size() const { return int64_t(counts.size()); }
    uint64_t total_incidences() const;
    uint32_t max_count() const;
    bool operator==(const RichMap& o) const {
        return delta == o.delta && dim == o.dim && counts == o.counts;
    }
};

// Lattice index range per axis: k in [-1, K+1], K = 1/delta.
int64_t lattice_max_index(double delta);

// Reference implementation: all lattice balls x all tubes, exact predicate.
// Refuses delta < 2^-12 (2D) or 2^-7 (3D).
RichMap richness_map_oracle(const TubeFamily& family);

// Axis-walk rasterization; equals the oracle exactly.
RichMap richness_map_fast(const TubeFamily& family);

// Lattice cells (packed keys) incident to one tube, same predicate and domain
// as the maps above.
std::vector<int64_t> tube_cell_keys(const Tube& t, double delta);

// |{k : counts[k] >= r}|
int64_t rich_count(const RichMap& map, uint64_t r);

// [(r = 2^j, rich_count(r))] for j = 0 .. ceil(log2(max count))
std::vector<std::pair<uint64_t, int64_t>> dyadic_profile(const RichMap& map);

// Sum of counts over cells with r_lo <= count < r_hi.
uint64_t incidence_count(const RichMap& map, uint64_t r_lo, uint64_t r_hi);

// CSV: k0,k1[,k2],count with rows sorted by key.
std::string richmap_to_csv(const RichMap& map);
// {delta, dim, totalIncidences, dyadicProfile}
std::string richmap_summary_json(const RichMap& map);

}  // namespace tubeinc
