#include "tubeinc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "json.hpp"

namespace tubeinc {

std::string to_string(BoundName b) {
    switch (b) {
        case BoundName::ST: return "st";
        case BoundName::Thm1_1: return "thm1_1";
        case BoundName::Thm1_2: return "thm1_2";
        case BoundName::Thm1_3: return "thm1_3";
        case BoundName::Main: return "main";
        case BoundName::KakMax: return "kakmax";
        case BoundName::GridLower: return "gridlower";
    }
    return "kakmax";
}

std::optional<BoundName> bound_from_string(const std::string& s) {
    if (s == "st") return BoundName::ST;
    if (s == "thm1_1") return BoundName::Thm1_1;
    if (s == "thm1_2") return BoundName::Thm1_2;
    if (s == "thm1_3") return BoundName::Thm1_3;
    if (s == "main") return BoundName::Main;
    if (s == "kakmax") return BoundName::KakMax;
    if (s == "gridlower") return BoundName::GridLower;
    return std::nullopt;
}

double bound_eps_factor(const BoundSpec& spec) {
    switch (spec.name) {
        case BoundName::ST:
        case BoundName::KakMax:
        case BoundName::GridLower:
            return 1.0;
        default:
            return std::pow(spec.delta, -spec.epsilon);
    }
}

double bound_value(const BoundSpec& spec, double r) {
    if (r < 1.0) throw std::invalid_argument("bound_value: r must be >= 1");
    const double T = spec.tube_count;
    const double n = spec.dim;
    switch (spec.name) {
        case BoundName::ST:
            return T * T / (r * r * r) + T / r;
        case BoundName::Thm1_1:
            return bound_eps_factor(spec) * T * T / (r * r * r);
        case BoundName::Thm1_2:
            return bound_eps_factor(spec) * T * T / (spec.W * r * r);
        case BoundName::Thm1_3:
            return bound_eps_factor(spec) * std::pow(T, 1.5) / (r * r);
        case BoundName::Main:
            return bound_eps_factor(spec) * std::pow(T, n / (n - 1)) /
                   std::pow(r, (n + 1) / (n - 1));
        case BoundName::KakMax:
            return T * T / (r * r);
        case BoundName::GridLower:
            return std::pow(T, n / (n - 1)) / std::pow(r, (n + 1) / (n - 1));
    }
    return 0.0;
}

double r_threshold(const BoundSpec& spec) {
    const double T = spec.tube_count;
    const double d = spec.delta;
    const double e = spec.epsilon;
    switch (spec.name) {
        case BoundName::Thm1_1:
            return std::max(std::pow(d, 1.0 - e) * T, 1.0);
        case BoundName::Thm1_2:
            return std::max(std::pow(d, 1.0 - e) * T, 1.0);  // C1(eps) measured as 1
        case BoundName::Thm1_3:
            return std::max(std::pow(d, 2.0 - e) * T, 1.0);
        case BoundName::Main:
            return std::max(std::pow(d, spec.dim - 1 - e / 4.0) * T, 1.0);
        default:
            return 1.0;
    }
}

VerifyReport verify_family(const TubeFamily& family, const BoundSpec& spec,
                           const RichMap* precomputed) {
    VerifyReport rep;
    SpacingReport spacing = verify_spacing(family);
    if (!spacing.ok) rep.warning = "spacing hypothesis check failed: " + spacing.note;
    if (family.tubes.empty()) return rep;

    RichMap local;
    const RichMap* map = precomputed;
    if (!map) {
        local = richness_map_fast(family);
        map = &local;
    }
    double thr = r_threshold(spec);
    uint64_t r = 1;
    while (double(r) < thr) r <<= 1;
    r = std::max<uint64_t>(r, 2);
    uint32_t maxc = map->max_count();
    rep.r_min = double(r);
    rep.r_max = double(maxc);
    for (; r <= maxc; r <<= 1) {
        VerifyRow row;
        row.r = r;
        row.measured = rich_count(*map, r);
        row.bound = bound_value(spec, double(r));
        row.ratio = row.bound > 0 ? double(row.measured) / row.bound : 0.0;
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        rep.rows.push_back(row);
    }
    return rep;
}

namespace {

int64_t gcd64(int64_t a, int64_t b) { return b == 0 ? a : gcd64(b, a % b); }

}  // namespace

GridLowerReport grid_lower_bound_check(double delta, int W, int dim, uint64_t r) {
    GridLowerReport rep;
    TubeFamily fam = gen_grid_example(delta, W, dim);
    const double n = dim;
    double q0 = W * std::pow(double(r), -1.0 / (n - 1));
    int q_lo = std::max(2, int(std::ceil(q0 / 2.0)));
    int q_hi = std::max(q_lo, int(std::floor(q0 * 2.0)));
    rep.q_lo = q_lo;
    rep.q_hi = q_hi;

    RichMap map = richness_map_fast(fam);

    // Predicted rich points x = ((q-p)/q a + p/q b, p/q), deduplicated.
    struct VecKey {
        int64_t a, b, c;
        bool operator<(const VecKey& o) const {
            if (a != o.a) return a < o.a;
            if (b != o.b) return b < o.b;
            return c < o.c;
        }
    };
    std::map<VecKey, GridLowerPoint> pts;
    auto key_of = [](const Vec& v) {
        auto q = [](double x) { return int64_t(std::llround(x * (1 << 26))); };
        return VecKey{q(v.x), q(v.y), q(v.z)};
    };
    int g = W + 1;
    for (int q = q_lo; q <= q_hi; ++q) {
        for (int p = (q + 9) / 10; p < q; ++p) {
            if (gcd64(p, q) != 1) continue;
            double fp = double(p) / q, fq = double(q - p) / q;
            auto emit = [&](const Vec& a, const Vec& b) {
                Vec x = a * fq + b * fp;
                bool in_band = x.x >= 0.25 && x.x <= 0.75 &&
                               (dim == 2 || (x.y >= 0.25 && x.y <= 0.75));
                if (!in_band) return;
                Vec pt = dim == 2 ? Vec{x.x, fp, 0.0} : Vec{x.x, x.y, fp};
                auto& slot = pts[key_of(pt)];
                slot.x = pt;
                slot.pair_count += 1;
            };
            if (dim == 2) {
                for (int a = 0; a < g; ++a)
                    for (int b = 0; b < g; ++b)
                        emit({double(a) / W, 0, 0}, {double(b) / W, 0, 0});
            } else {
                for (int a1 = 0; a1 < g; ++a1)
                    for (int a2 = 0; a2 < g; ++a2)
                        for (int b1 = 0; b1 < g; ++b1)
                            for (int b2 = 0; b2 < g; ++b2)
                                emit({double(a1) / W, double(a2) / W, 0},
                                     {double(b1) / W, double(b2) / W, 0});
            }
        }
    }
    if (pts.empty()) {
        rep.reason = "no admissible coprime (p, q) in [" + std::to_string(q_lo) + ", " +
                     std::to_string(q_hi) + "]";
        return rep;
    }

    rep.min_richness = UINT32_MAX;
    for (auto& [k, pt] : pts) {
        Index3 idx{int64_t(std::llround(pt.x.x / delta)), int64_t(std::llround(pt.x.y / delta)),
                   dim == 3 ? int64_t(std::llround(pt.x.z / delta)) : 0};
        GridLowerPoint out = pt;
        out.richness = map.at(idx);
        rep.min_richness = std::min(rep.min_richness, out.richness);
        rep.points.push_back(out);
    }
    rep.min_separation = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rep.points.size(); ++i)
        for (size_t j = i + 1; j < rep.points.size(); ++j)
            rep.min_separation =
                std::min(rep.min_separation, dist(rep.points[i].x, rep.points[j].x));

    rep.rich_count = rich_count(map, r);
    BoundSpec lower;
    lower.name = BoundName::GridLower;
    lower.delta = delta;
    lower.dim = dim;
    lower.tube_count = double(fam.size());
    rep.lower_bound = bound_value(lower, double(r));
    rep.c_measured = rep.lower_bound > 0 ? double(rep.rich_count) / rep.lower_bound : 0.0;
    rep.ok = rep.min_richness * 8 >= r && rep.min_separation >= 1.0 / (2.0 * W) &&
             rep.c_measured >= 1.0 / 64.0;
    if (!rep.ok) rep.reason = "richness/separation/count check failed";
    return rep;
}

std::string verify_report_csv(const VerifyReport& rep, uint64_t seed) {
    std::string out;
    char buf[160];
    for (const VerifyRow& row : rep.rows) {
        std::snprintf(buf, sizeof buf, "%llu,%llu,%lld,%.17g,%.17g\n",
                      (unsigned long long)seed, (unsigned long long)row.r,
                      (long long)row.measured, row.bound, row.ratio);
        out += buf;
    }
    return out;
}

std::string verify_report_json(const VerifyReport& rep, const BoundSpec& spec) {
    nlohmann::ordered_json j;
    j["theorem"] = to_string(spec.name);
    j["delta"] = spec.delta;
    j["W"] = spec.W;
    j["tubeCount"] = spec.tube_count;
    j["epsilon"] = spec.epsilon;
    j["epsFactor"] = bound_eps_factor(spec);
    j["rThreshold"] = r_threshold(spec);
    j["maxRatio"] = rep.max_ratio;
    j["validRange"] = {rep.r_min, rep.r_max};
    if (!rep.warning.empty()) j["warning"] = rep.warning;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const VerifyRow& row : rep.rows) {
        nlohmann::ordered_json rj;
        rj["r"] = row.r;
        rj["measured"] = row.measured;
        rj["bound"] = row.bound;
        rj["ratio"] = row.ratio;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string grid_lower_report_json(const GridLowerReport& rep) {
    nlohmann::ordered_json j;
    j["ok"] = rep.ok;
    if (!rep.reason.empty()) j["reason"] = rep.reason;
    j["qRange"] = {rep.q_lo, rep.q_hi};
    j["predictedPoints"] = rep.points.size();
    j["minRichness"] = rep.min_richness;
    j["minSeparation"] = rep.min_separation;
    j["richCount"] = rep.rich_count;
    j["lowerBound"] = rep.lower_bound;
    j["cMeasured"] = rep.c_measured;
    return j.dump(2) + "\n";
}

std::string verify_report_svg(const VerifyReport& rep) {
    // minimal log-log scatter: measured (circles) vs bound (line)
    const int Wpx = 480, Hpx = 360, Mpx = 40;
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"360\">\n"
        "<rect width=\"480\" height=\"360\" fill=\"white\"/>\n";
    if (rep.rows.empty()) return svg + "</svg>\n";
    double xmin = std::log2(double(rep.rows.front().r));
    double xmax = std::log2(double(rep.rows.back().r));
    if (xmax <= xmin) xmax = xmin + 1;
    double ymin = 1e300, ymax = -1e300;
    for (const VerifyRow& row : rep.rows) {
        double m = std::log2(std::max(1.0, double(row.measured)));
        double b = std::log2(std::max(1.0, row.bound));
        ymin = std::min({ymin, m, b});
        ymax = std::max({ymax, m, b});
    }
    if (ymax <= ymin) ymax = ymin + 1;
    auto px = [&](double x) { return Mpx + (x - xmin) / (xmax - xmin) * (Wpx - 2 * Mpx); };
    auto py = [&](double y) { return Hpx - Mpx - (y - ymin) / (ymax - ymin) * (Hpx - 2 * Mpx); };
    std::string line = "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
    char buf[96];
    for (const VerifyRow& row : rep.rows) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(std::log2(double(row.r))),
                      py(std::log2(std::max(1.0, row.bound))));
        line += buf;
    }
    svg += line + "\"/>\n";
    for (const VerifyRow& row : rep.rows) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"crimson\"/>\n",
                      px(std::log2(double(row.r))),
                      py(std::log2(std::max(1.0, double(row.measured)))));
        svg += buf;
    }
    return svg + "</svg>\n";
}

}  // namespace tubeinc
