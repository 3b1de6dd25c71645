#include "tubeinc/highlow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace tubeinc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double eta_profile(double xi, double rho) {
    if (xi <= rho) return 1.0;
    if (xi >= 2 * rho) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (xi - rho) / rho));
}

}  // namespace

std::pair<double, double> highlow_split(const GridField& f, const GridField& g, double S) {
    if (S < 2.0) throw std::invalid_argument("highlow_split: S must be >= 2");
    if (f.dim != g.dim || f.side_cells != g.side_cells || f.domain != g.domain)
        throw std::invalid_argument("highlow_split: mismatched fields");
    const int G = f.side_cells;
    const int dim = f.dim;
    const size_t n = f.values.size();
    std::vector<std::complex<double>> F(n), Gc(n);
    for (size_t i = 0; i < n; ++i) {
        F[i] = f.values[i];
        Gc[i] = g.values[i];
    }
    fft_nd(F, dim, G, false);
    fft_nd(Gc, dim, G, false);

    // Cutoff in angular frequency (e^{i omega x}): rho = 1/S, eta supported in
    // |omega| <= 2 rho. Unit-scale bumps then live mostly above the cutoff
    // while S-scale envelopes fall below it, which is what drives the
    // dichotomy.
    const double rho = 1.0 / S;
    const double norm = f.cell_volume() / double(n);
    auto signed_freq = [&](int64_t k) {
        int64_t s = k <= G / 2 ? k : k - G;
        return 2.0 * kPi * double(s) / f.domain;  // radians per unit length
    };
    double low = 0, high = 0;
    if (dim == 2) {
        for (int64_t ky = 0; ky < G; ++ky) {
            double fy = signed_freq(ky);
            for (int64_t kx = 0; kx < G; ++kx) {
                double fx = signed_freq(kx);
                double xi = std::sqrt(fx * fx + fy * fy);
                double cross = (F[size_t(ky) * G + kx] * std::conj(Gc[size_t(ky) * G + kx])).real();
                double e = eta_profile(xi, rho);
                low += e * cross;
                high += (1.0 - e) * cross;
            }
        }
    } else {
        for (int64_t kz = 0; kz < G; ++kz) {
            double fz = signed_freq(kz);
            for (int64_t ky = 0; ky < G; ++ky) {
                double fy = signed_freq(ky);
                for (int64_t kx = 0; kx < G; ++kx) {
                    double fx = signed_freq(kx);
                    double xi = std::sqrt(fx * fx + fy * fy + fz * fz);
                    size_t idx = (size_t(kz) * G + ky) * G + kx;
                    double cross = (F[idx] * std::conj(Gc[idx])).real();
                    double e = eta_profile(xi, rho);
                    low += e * cross;
                    high += (1.0 - e) * cross;
                }
            }
        }
    }
    return {low * norm, high * norm};
}

HeavyBallVerdict classify(const std::vector<Vec>& P, const std::vector<Tube>& T,
                          double E_local, double S, double D, int dim) {
    if (S < 2.0) throw std::invalid_argument("classify: S must be >= 2");
    // precondition: local richness of each center lies in [E, 2E]
    for (size_t i = 0; i < P.size(); ++i) {
        int64_t hits = 0;
        for (const Tube& t : T)
            if (tube_point_incident(t, P[i], 0.5)) ++hits;
        if (hits < E_local || hits > 2 * E_local)
            throw std::invalid_argument("classify: ball " + std::to_string(i) +
                                        " has local richness " + std::to_string(hits) +
                                        " outside [E, 2E] = [" + std::to_string(E_local) + ", " +
                                        std::to_string(2 * E_local) + "]");
    }

    int G = 1;
    while (G < 4 * D) G <<= 1;
    GridField f, g;
    build_fields(P, T, D, G, dim, f, g);
    auto [low, high] = highlow_split(f, g, S);

    HeavyBallVerdict v;
    v.low_term = low;
    v.high_term = high;
    v.S = S;
    v.D = D;
    v.E_local = E_local;
    double direct = 0;
    for (size_t i = 0; i < f.values.size(); ++i) direct += f.values[i] * g.values[i];
    v.bilinear = direct * f.cell_volume();

    if (high >= low) {
        v.kind = VerdictKind::Thin;
        double bound = std::pow(S, dim) / (E_local * E_local) * double(T.size()) *
                       std::pow(D, dim - 1);
        v.thin_c = bound > 0 ? double(P.size()) / bound : 0.0;
        return v;
    }

    v.kind = VerdictKind::Thick;
    // Greedy extraction: S-spaced candidate grid, descending f-mass in the
    // radius-S ball, disjointness enforced, until half of the f-mass is
    // covered.
    double h = f.cell_size();
    int nc = std::max(1, int(std::floor(D / S)));
    struct Cand {
        Vec c;
        double mass;
        int64_t i0, i1, i2;
    };
    std::vector<Cand> cands;
    int64_t reach = int64_t(std::ceil(S / h)) + 1;
    for (int64_t a = 0; a < nc; ++a)
        for (int64_t b = 0; b < nc; ++b) {
            int64_t lo2 = dim == 3 ? 0 : -1, hi2 = dim == 3 ? nc - 1 : -1;
            for (int64_t c2 = lo2; c2 <= hi2; ++c2) {
                Vec c{(a + 0.5) * S, (b + 0.5) * S, dim == 3 ? (c2 + 0.5) * S : 0.0};
                int64_t i0 = int64_t(std::floor(c.x / h));
                int64_t i1 = int64_t(std::floor(c.y / h));
                int64_t i2 = dim == 3 ? int64_t(std::floor(c.z / h)) : 0;
                double mass = 0;
                for (int64_t d0 = std::max<int64_t>(0, i0 - reach);
                     d0 <= std::min<int64_t>(G - 1, i0 + reach); ++d0)
                    for (int64_t d1 = std::max<int64_t>(0, i1 - reach);
                         d1 <= std::min<int64_t>(G - 1, i1 + reach); ++d1) {
                        if (dim == 3) {
                            for (int64_t d2 = std::max<int64_t>(0, i2 - reach);
                                 d2 <= std::min<int64_t>(G - 1, i2 + reach); ++d2)
                                if (dist(f.cell_center(d0, d1, d2), c) <= S)
                                    mass += f.values[f.flat(d0, d1, d2)];
                        } else {
                            if (dist(f.cell_center(d0, d1, 0), c) <= S)
                                mass += f.values[f.flat(d0, d1, 0)];
                        }
                    }
                if (mass > 0) cands.push_back({c, mass * f.cell_volume(), a, b, c2});
            }
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.mass != y.mass) return x.mass > y.mass;
        if (x.i0 != y.i0) return x.i0 < y.i0;
        if (x.i1 != y.i1) return x.i1 < y.i1;
        return x.i2 < y.i2;
    });
    // Stop once half of the f-mass and half of the P-centers are covered
    // (the proposition asserts existence; any extraction meeting the
    // postconditions conforms).
    double total_mass = f.integral();
    double covered = 0;
    std::vector<char> center_covered(P.size(), 0);
    size_t centers_in = 0;
    for (const Cand& cand : cands) {
        if (covered >= 0.5 * total_mass && 2 * centers_in >= P.size()) break;
        bool clash = false;
        for (const HeavyBall& picked : v.heavy_balls)
            if (dist(picked.center, cand.c) < 2 * S) { clash = true; break; }
        if (clash) continue;
        HeavyBall hb;
        hb.center = cand.c;
        hb.mass = cand.mass;
        for (const Tube& t : T)
            if (point_tube_axis_distance(cand.c, t) <= S + t.radius) ++hb.tube_hits;
        v.heavy_balls.push_back(hb);
        covered += cand.mass;
        for (size_t i = 0; i < P.size(); ++i)
            if (!center_covered[i] && dist(P[i], cand.c) <= S) {
                center_covered[i] = 1;
                ++centers_in;
            }
    }
    return v;
}

RescaledInputs rescale_for_classify(const TubeFamily& family, const RichMap& map,
                                    uint32_t E_local) {
    RescaledInputs out;
    const double inv = 1.0 / family.delta;
    out.D = inv;
    for (auto& [key, c] : map.counts) {
        if (c >= E_local && c <= 2 * E_local) {
            Index3 k = unpack_index(key);
            out.P.push_back({double(k.k0), double(k.k1),
                             family.dim == 3 ? double(k.k2) : 0.0});
        }
    }
    std::sort(out.P.begin(), out.P.end(), [](const Vec& a, const Vec& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    });
    for (const Tube& t : family.tubes) {
        Tube r = t;
        r.anchor = t.anchor * inv;
        r.length = t.length * inv;
        r.radius = t.radius * inv;
        out.T.push_back(r);
    }
    return out;
}

std::string verdict_to_json(const HeavyBallVerdict& v) {
    nlohmann::ordered_json j;
    j["kind"] = v.kind == VerdictKind::Thin ? "Thin" : "Thick";
    j["highTerm"] = v.high_term;
    j["lowTerm"] = v.low_term;
    j["S"] = v.S;
    j["D"] = v.D;
    j["E"] = v.E_local;
    j["bilinear"] = v.bilinear;
    if (v.kind == VerdictKind::Thin) j["thinC"] = v.thin_c;
    nlohmann::ordered_json balls = nlohmann::ordered_json::array();
    for (const HeavyBall& b : v.heavy_balls) {
        nlohmann::ordered_json bj;
        bj["center"] = {b.center.x, b.center.y, b.center.z};
        bj["hits"] = b.tube_hits;
        bj["mass"] = b.mass;
        balls.push_back(bj);
    }
    j["heavyBalls"] = balls;
    return j.dump(2) + "\n";
}

}  // namespace tubeinc
