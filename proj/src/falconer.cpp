#include "tubeinc/falconer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "json.hpp"

namespace tubeinc {

ESLine es_line(const Vec& x, const Vec& y) {
    ESLine l;
    l.base = {(x.x + y.x) / 2.0, (x.y + y.y) / 2.0, 0.0};
    l.dir = {-(y.y - x.y) / 2.0, (y.x - x.x) / 2.0, 1.0};
    return l;
}

std::pair<Vec, Vec> invert_line(const ESLine& l) {
    // x1+y1 = 2c1, x2+y2 = 2c2, y2-x2 = -2k1, y1-x1 = 2k2
    double c1 = l.base.x, c2 = l.base.y, k1 = l.dir.x, k2 = l.dir.y;
    Vec x{c1 - k2, c2 + k1, 0.0};
    Vec y{c1 + k2, c2 - k1, 0.0};
    return {x, y};
}

std::optional<Tube> es_tube(const Vec& p, const Vec& q, double delta) {
    double d = dist(p, q);
    if (d < 1.0 / 3.0 - 1e-12)
        throw std::invalid_argument("es_tube: dist(p, q) < 1/3");
    ESLine l = es_line(p, q);
    // t range: cot(theta/2) in [0,1] intersected with center in [0,1]^2
    double t_lo = 0.0, t_hi = 1.0;
    for (int axis = 0; axis < 2; ++axis) {
        double b = axis == 0 ? l.base.x : l.base.y;
        double k = axis == 0 ? l.dir.x : l.dir.y;
        if (k == 0.0) {
            if (b < 0.0 || b > 1.0) return std::nullopt;
            continue;
        }
        double a0 = (0.0 - b) / k, a1 = (1.0 - b) / k;
        if (a0 > a1) std::swap(a0, a1);
        t_lo = std::max(t_lo, a0);
        t_hi = std::min(t_hi, a1);
    }
    if (t_hi <= t_lo) return std::nullopt;
    double dn = l.dir.norm();
    double len = (t_hi - t_lo) * dn;
    if (len < 0.25) return std::nullopt;
    Tube t;
    t.anchor = l.base + l.dir * t_lo;
    t.direction = l.dir / dn;
    t.length = len;
    t.radius = 0.5 * delta;
    t.dim = 3;
    return t;
}

namespace {

std::vector<double> pair_distances(const BallSet& E1, const BallSet& E2) {
    std::vector<double> d;
    d.reserve(E1.size() * E2.size());
    for (const Vec& p : E1.centers)
        for (const Vec& q : E2.centers) d.push_back(dist(p, q));
    return d;
}

}  // namespace

uint64_t quadruple_count(const BallSet& E1, const BallSet& E2, double delta) {
    if (E1.size() * E2.size() > 10'000'000)
        throw std::invalid_argument("quadruple_count: |E1|*|E2| exceeds 1e7");
    std::vector<double> d = pair_distances(E1, E2);
    std::sort(d.begin(), d.end());
    uint64_t total = 0;
    size_t lo = 0, hi = 0;
    for (size_t i = 0; i < d.size(); ++i) {
        while (d[i] - d[lo] >= delta) ++lo;
        if (hi < i + 1) hi = i + 1;
        while (hi < d.size() && d[hi] - d[i] < delta) ++hi;
        total += hi - lo;
    }
    return total;
}

uint64_t quadruple_count_bruteforce(const BallSet& E1, const BallSet& E2, double delta) {
    uint64_t total = 0;
    for (const Vec& p1 : E1.centers)
        for (const Vec& p2 : E1.centers)
            for (const Vec& q1 : E2.centers)
                for (const Vec& q2 : E2.centers)
                    if (std::abs(dist(p1, q1) - dist(p2, q2)) < delta) ++total;
    return total;
}

int64_t distance_interval_count(const BallSet& E1, const BallSet& E2, double delta) {
    std::vector<int64_t> bins;
    for (const Vec& p : E1.centers)
        for (const Vec& q : E2.centers) bins.push_back(int64_t(std::floor(dist(p, q) / delta)));
    std::sort(bins.begin(), bins.end());
    bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
    return int64_t(bins.size());
}

std::pair<BallSet, BallSet> split_ballset(const BallSet& E) {
    const double radius = 0.1;
    const double need = std::max(1.0, double(E.size()) / 200.0);
    std::vector<Vec> grid;
    for (int i = 2; i <= 14; ++i)
        for (int j = 2; j <= 14; ++j) grid.push_back({i / 16.0, j / 16.0, 0.0});
    // candidate pairs at mutual distance in [1/4, 1/2], scanned closest to the
    // target separation 1/3 first (then lexicographically)
    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t i = 0; i < grid.size(); ++i)
        for (size_t j = i + 1; j < grid.size(); ++j) {
            double d = dist(grid[i], grid[j]);
            if (d >= 0.25 && d <= 0.5) pairs.emplace_back(i, j);
        }
    std::stable_sort(pairs.begin(), pairs.end(), [&](auto& p, auto& q) {
        double dp = std::abs(dist(grid[p.first], grid[p.second]) - 1.0 / 3.0);
        double dq = std::abs(dist(grid[q.first], grid[q.second]) - 1.0 / 3.0);
        return dp < dq;
    });
    for (auto& [i, j] : pairs) {
        BallSet a, b;
        a.delta = b.delta = E.delta;
        a.s = b.s = E.s;
        a.w_requested = b.w_requested = E.w_requested;
        a.w_effective = b.w_effective = E.w_effective;
        for (const Vec& c : E.centers) {
            if (dist(c, grid[i]) <= radius) a.centers.push_back(c);
            if (dist(c, grid[j]) <= radius) b.centers.push_back(c);
        }
        if (double(a.size()) >= need && double(b.size()) >= need) return {a, b};
    }
    throw NotSplittable("split_ballset: no candidate pair captures 1/200 of E twice");
}

FalconerReport falconer_pipeline(const BallSet& E, double delta, double epsilon) {
    FalconerReport rep;
    rep.delta = delta;
    rep.s = E.s;
    rep.W = E.w_effective > 0 ? E.w_effective : nearest_pow2(std::pow(delta, -E.s / 2.0));
    rep.size_E = E.size();

    auto [E1, E2] = split_ballset(E);
    rep.size_E1 = E1.size();
    rep.size_E2 = E2.size();
    rep.pair_count = uint64_t(E1.size()) * uint64_t(E2.size());

    rep.Q = quadruple_count(E1, E2, delta);
    rep.delta_intervals = distance_interval_count(E1, E2, delta);
    double pc2 = double(rep.pair_count) * double(rep.pair_count);
    rep.cs_exact_ok = pc2 <= double(rep.delta_intervals) * double(rep.Q);
    rep.cs_slack = pc2 > 0 ? double(rep.delta_intervals) * double(rep.Q) / pc2 : 0.0;

    // ES tube family: l_{p,q} and l_{q,p} for every admissible pair.
    TubeFamily fam;
    fam.delta = delta;
    fam.W = rep.W;
    fam.dim = 3;
    fam.spacing_class = SpacingClass::Unstructured;
    // 1/W-tube load via the pair-of-1/W-squares correspondence
    std::unordered_map<uint64_t, int> load;
    auto cell_of = [&](const Vec& v) {
        int W = rep.W;
        int64_t i = std::clamp<int64_t>(int64_t(std::floor(v.x * W)), 0, W - 1);
        int64_t j = std::clamp<int64_t>(int64_t(std::floor(v.y * W)), 0, W - 1);
        return uint64_t(i) * W + uint64_t(j);
    };
    int max_load = 0;
    for (const Vec& p : E1.centers)
        for (const Vec& q : E2.centers) {
            if (dist(p, q) < 1.0 / 3.0) {
                rep.pairs_skipped += 1;
                continue;
            }
            for (int order = 0; order < 2; ++order) {
                const Vec& a = order == 0 ? p : q;
                const Vec& b = order == 0 ? q : p;
                std::optional<Tube> t = es_tube(a, b, delta);
                if (!t) {
                    rep.tubes_discarded += 1;
                    continue;
                }
                fam.tubes.push_back(*t);
                uint64_t key = (uint64_t(order) << 62) | (cell_of(a) << 31) | cell_of(b);
                max_load = std::max(max_load, ++load[key]);
            }
        }
    rep.tubes_built = int(fam.tubes.size());
    rep.spacing_ok = max_load <= 1;

    RichMap map = richness_map_fast(fam);
    rep.dyadic = dyadic_profile(map);
    rep.profile_sum = 0;
    for (auto& [r, n] : rep.dyadic) rep.profile_sum += 4.0 * double(r) * double(r) * double(n);
    rep.profile_ratio = rep.profile_sum > 0 ? double(rep.Q) / rep.profile_sum : 0.0;
    rep.profile_ok = double(rep.Q) <= 4.0 * rep.profile_sum;

    rep.prop54_ratio =
        double(rep.Q) / (std::pow(double(rep.W), 8.0) * std::pow(delta, 1.0 - epsilon));
    rep.thm51_ratio = double(rep.delta_intervals) / std::pow(delta, -1.0 + epsilon);
    return rep;
}

std::string falconer_report_json(const FalconerReport& r) {
    nlohmann::ordered_json j;
    j["delta"] = r.delta;
    j["s"] = r.s;
    j["W"] = r.W;
    j["sizes"] = {{"E", r.size_E}, {"E1", r.size_E1}, {"E2", r.size_E2}};
    j["pairCount"] = r.pair_count;
    j["Q"] = r.Q;
    j["deltaIntervals"] = r.delta_intervals;
    j["csSlack"] = r.cs_slack;
    j["csExactOk"] = r.cs_exact_ok;
    j["spacingOk"] = r.spacing_ok;
    j["tubesBuilt"] = r.tubes_built;
    j["pairsSkipped"] = r.pairs_skipped;
    j["tubesDiscarded"] = r.tubes_discarded;
    j["profileSum"] = r.profile_sum;
    j["profileRatio"] = r.profile_ratio;
    j["profileOk"] = r.profile_ok;
    j["prop54Ratio"] = r.prop54_ratio;
    j["thm51Ratio"] = r.thm51_ratio;
    return j.dump(2) + "\n";
}

}  // namespace tubeinc
