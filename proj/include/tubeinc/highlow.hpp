#pragma once

#include <string>
#include <vector>

#include "tubeinc/grid_field.hpp"
#include "tubeinc/richness.hpp"

namespace tubeinc {

enum class VerdictKind { Thin, Thick };

struct HeavyBall {
    Vec center;
    int64_t tube_hits = 0;
    double mass = 0.0;
};

struct HeavyBallVerdict {
    VerdictKind kind = VerdictKind::Thin;
    double high_term = 0.0;
    double low_term = 0.0;
    double S = 0.0;
    double D = 0.0;
    double E_local = 0.0;
    double bilinear = 0.0;           // direct sum of f*g*cellVolume
    double thin_c = 0.0;             // |P| / (S^n E^-2 |T| D^{n-1}), Thin only
    std::vector<HeavyBall> heavy_balls;  // Thick only
};

// Frequency split of the bilinear form at cutoff rho = 1/S cycles per unit:
// eta = 1 inside rho, 0 outside 2*rho, raised cosine between. Returns
// (I_low, I_high); their sum equals sum f*g*cellVolume up to roundoff.
std::pair<double, double> highlow_split(const GridField& f, const GridField& g, double S);

// Executable form of the heavy-ball dichotomy. P: unit-ball centers, T: unit
// tubes, both already rescaled to [0, D]^n; every center of P must meet
// between E_local and 2*E_local tubes (inclusive).
HeavyBallVerdict classify(const std::vector<Vec>& P, const std::vector<Tube>& T,
                          double E_local, double S, double D, int dim);

// Rescales a delta-family and an [E, 2E] richness class to classify() inputs.
struct RescaledInputs {
    std::vector<Vec> P;
    std::vector<Tube> T;
    double D = 0.0;
};
RescaledInputs rescale_for_classify(const TubeFamily& family, const RichMap& map,
                                    uint32_t E_local);

std::string verdict_to_json(const HeavyBallVerdict& v);

}  // namespace tubeinc
