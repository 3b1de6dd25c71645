#pragma once

#include <complex>
#include <vector>

#include "tubeinc/geom.hpp"

namespace tubeinc {

// Scalar field sampled on a uniform G^n grid over [0, D]^n (rescaled units:
// delta-objects scaled by 1/delta, so balls have unit diameter and tubes unit
// width).
struct GridField {
    int dim = 2;
    int side_cells = 0;  // G
    double domain = 0.0;  // D
    std::vector<double> values;  // G^n, x fastest

    double cell_size() const { return domain / side_cells; }
    double cell_volume() const {
        double h = cell_size();
        return dim == 3 ? h * h * h : h * h;
    }
    size_t total_cells() const {
        size_t g = size_t(side_cells);
        return dim == 3 ? g * g * g : g * g;
    }
    double integral() const;
    size_t flat(int64_t i0, int64_t i1, int64_t i2) const {
        size_t g = size_t(side_cells);
        return dim == 3 ? (size_t(i2) * g + size_t(i1)) * g + size_t(i0)
                        : size_t(i1) * g + size_t(i0);
    }
    Vec cell_center(int64_t i0, int64_t i1, int64_t i2) const {
        double h = cell_size();
        return {(i0 + 0.5) * h, (i1 + 0.5) * h, dim == 3 ? (i2 + 0.5) * h : 0.0};
    }
};

GridField make_field(int dim, int G, double D);

// f = sum of mollified unit-ball indicators, g = sum of mollified unit-width
// tube indicators. Mollifier: radial raised-cosine kernel of unit mass and
// support diameter 1, applied by exact radial convolution tables, so masses
// come out at |P| * vol(unit ball) and |T| * length * cross-section.
void build_fields(const std::vector<Vec>& ball_centers, const std::vector<Tube>& tubes,
                  double D, int G, int dim, GridField& f, GridField& g);

void add_ball_bump(GridField& f, const Vec& center);
void add_tube_bump(GridField& g, const Tube& t);

// In-place unnormalized DFT along every axis of a G^n complex array.
void fft_nd(std::vector<std::complex<double>>& data, int dim, int G, bool inverse);

}  // namespace tubeinc
