#include "tubeinc/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tubeinc {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2_int(int x) { return x > 0 && (x & (x - 1)) == 0; }

// Radial raised-cosine kernel, support |x| <= 1/2, unit mass in n dims:
// K(x) = c_n (1 + cos(2 pi |x|)).
double kernel_profile(double rho) { return rho <= 0.5 ? 1.0 + std::cos(2 * kPi * rho) : 0.0; }

double kernel_norm(int dim) {
    // integral of (1+cos 2 pi rho) over the n-ball of radius 1/2
    int N = 4096;
    double sum = 0;
    for (int i = 0; i < N; ++i) {
        double rho = (i + 0.5) * 0.5 / N;
        double shell = dim == 3 ? 4 * kPi * rho * rho : 2 * kPi * rho;
        sum += kernel_profile(rho) * shell * (0.5 / N);
    }
    return 1.0 / sum;
}

// Angle of the circular arc {phi : |(d,0) - rho*(cos phi, sin phi)| <= R}.
double arc_angle(double d, double rho, double R) {
    if (d + rho <= R) return 2 * kPi;
    if (std::abs(d - rho) >= R) return 0.0;
    double c = (d * d + rho * rho - R * R) / (2 * d * rho);
    return 2 * std::acos(std::clamp(c, -1.0, 1.0));
}

// Solid angle of the spherical cap {omega : |(d,0,0) - rho*omega| <= R}.
double cap_solid_angle(double d, double rho, double R) {
    if (d + rho <= R) return 4 * kPi;
    if (std::abs(d - rho) >= R) return 0.0;
    double c = (d * d + rho * rho - R * R) / (2 * d * rho);
    return 2 * kPi * (1.0 - std::clamp(c, -1.0, 1.0));
}

struct RadialTable {
    double max_d = 0;
    std::vector<double> vals;
    double operator()(double d) const {
        if (d >= max_d) return 0.0;
        double x = d / max_d * (vals.size() - 1);
        size_t i = size_t(x);
        if (i + 1 >= vals.size()) return vals.back();
        double f = x - i;
        return vals[i] * (1 - f) + vals[i + 1] * f;
    }
};

// (chi_{ball R} * K_n)(d) tabulated; exact unit-kernel convolution, so the
// mass of each bump equals the ball volume.
RadialTable conv_ball_table(int dim, double R) {
    RadialTable t;
    t.max_d = R + 0.5;
    const int M = 1024, NR = 2048;
    t.vals.resize(M + 1);
    double cn = kernel_norm(dim);
    for (int m = 0; m <= M; ++m) {
        double d = t.max_d * m / M;
        double sum = 0;
        for (int i = 0; i < NR; ++i) {
            double rho = (i + 0.5) * 0.5 / NR;
            double meas = dim == 3 ? rho * rho * cap_solid_angle(d, rho, R)
                                   : rho * arc_angle(d, rho, R);
            if (d == 0) meas = (rho <= R) ? (dim == 3 ? 4 * kPi * rho * rho : 2 * kPi * rho) : 0.0;
            sum += cn * kernel_profile(rho) * meas * (0.5 / NR);
        }
        t.vals[m] = sum;
    }
    return t;
}

// Perpendicular tube profile: in 2D, slab [-R, R] convolved with the 1D
// marginal of K_2; in 3D, disk of radius R convolved with the 2D (axis-)
// marginal of K_3. Mass per unit length = 2R (2D) or pi R^2 (3D).
RadialTable conv_tube_table(int dim, double R) {
    RadialTable t;
    t.max_d = R + 0.5;
    const int M = 1024;
    t.vals.resize(M + 1);
    double cn = kernel_norm(dim);
    if (dim == 2) {
        // marginal m(u) = int K2(sqrt(u^2+s^2)) ds, then slab convolution
        const int NU = 2048;
        auto marginal = [&](double u) {
            double su = 0;
            for (int i = 0; i < NU; ++i) {
                double s = -0.5 + (i + 0.5) / NU;
                su += cn * kernel_profile(std::sqrt(u * u + s * s)) / NU;
            }
            return su;
        };
        std::vector<double> marg(NU + 1);
        for (int i = 0; i <= NU; ++i) marg[i] = marginal(-0.5 + double(i) / NU);
        auto marg_at = [&](double u) {
            if (u <= -0.5 || u >= 0.5) return 0.0;
            double x = (u + 0.5) * NU;
            size_t i = size_t(x);
            double f = x - i;
            return marg[i] * (1 - f) + marg[std::min<size_t>(i + 1, NU)] * f;
        };
        for (int m = 0; m <= M; ++m) {
            double d = t.max_d * m / M;
            double sum = 0;
            const int NS = 1024;
            for (int i = 0; i < NS; ++i) {
                double u = -0.5 + (i + 0.5) / NS;
                if (std::abs(d + u) <= R) sum += marg_at(u) / NS;
            }
            t.vals[m] = sum;
        }
    } else {
        // 2D marginal kappa(rho) = int K3(sqrt(rho^2+w^2)) dw, then disk conv
        const int NR = 1024;
        std::vector<double> kap(NR + 1);
        for (int i = 0; i <= NR; ++i) {
            double rho = 0.5 * i / NR;
            double su = 0;
            const int NW = 512;
            for (int w = 0; w < NW; ++w) {
                double ww = -0.5 + (w + 0.5) / NW;
                su += cn * kernel_profile(std::sqrt(rho * rho + ww * ww)) / NW;
            }
            kap[i] = su;
        }
        auto kap_at = [&](double rho) {
            if (rho >= 0.5) return 0.0;
            double x = rho / 0.5 * NR;
            size_t i = size_t(x);
            double f = x - i;
            return kap[i] * (1 - f) + kap[std::min<size_t>(i + 1, NR)] * f;
        };
        for (int m = 0; m <= M; ++m) {
            double d = t.max_d * m / M;
            double sum = 0;
            const int NS = 1024;
            for (int i = 0; i < NS; ++i) {
                double rho = (i + 0.5) * 0.5 / NS;
                sum += kap_at(rho) * rho * arc_angle(d, rho, R) * (0.5 / NS);
            }
            if (d == 0) {
                sum = 0;
                for (int i = 0; i < NS; ++i) {
                    double rho = (i + 0.5) * 0.5 / NS;
                    sum += kap_at(rho) * rho * (rho <= R ? 2 * kPi : 0.0) * (0.5 / NS);
                }
            }
            t.vals[m] = sum;
        }
    }
    return t;
}

// End taper along the axis: unit CDF ramp over [-1/2, 1/2] from the kernel's
// 1D marginal. Any unit-mass ramp keeps the tube mass at profile * length.
double end_ramp(double u) {
    if (u <= -0.5) return 0.0;
    if (u >= 0.5) return 1.0;
    return 0.5 + u + std::sin(2 * kPi * u) / (2 * kPi);
}

const RadialTable& ball_table(int dim) {
    static RadialTable t2 = conv_ball_table(2, 0.5);
    static RadialTable t3 = conv_ball_table(3, 0.5);
    return dim == 3 ? t3 : t2;
}

const RadialTable& tube_table(int dim) {
    static RadialTable t2 = conv_tube_table(2, 0.5);
    static RadialTable t3 = conv_tube_table(3, 0.5);
    return dim == 3 ? t3 : t2;
}

}  // namespace

double GridField::integral() const {
    double s = 0;
    for (double v : values) s += v;
    return s * cell_volume();
}

GridField make_field(int dim, int G, double D) {
    if (!is_pow2_int(G)) throw std::invalid_argument("GridField: G must be a power of 2");
    GridField f;
    f.dim = dim;
    f.side_cells = G;
    f.domain = D;
    f.values.assign(f.total_cells(), 0.0);
    return f;
}

void add_ball_bump(GridField& f, const Vec& center) {
    const RadialTable& table = ball_table(f.dim);
    double h = f.cell_size();
    int64_t reach = int64_t(std::ceil(table.max_d / h)) + 1;
    int64_t c0 = int64_t(std::floor(center.x / h));
    int64_t c1 = int64_t(std::floor(center.y / h));
    int64_t c2 = f.dim == 3 ? int64_t(std::floor(center.z / h)) : 0;
    int64_t G = f.side_cells;
    for (int64_t i0 = std::max<int64_t>(0, c0 - reach); i0 <= std::min(G - 1, c0 + reach); ++i0)
        for (int64_t i1 = std::max<int64_t>(0, c1 - reach); i1 <= std::min(G - 1, c1 + reach); ++i1) {
            if (f.dim == 3) {
                for (int64_t i2 = std::max<int64_t>(0, c2 - reach); i2 <= std::min(G - 1, c2 + reach); ++i2) {
                    double d = dist(f.cell_center(i0, i1, i2), center);
                    if (d < table.max_d) f.values[f.flat(i0, i1, i2)] += table(d);
                }
            } else {
                double d = dist(f.cell_center(i0, i1, 0), center);
                if (d < table.max_d) f.values[f.flat(i0, i1, 0)] += table(d);
            }
        }
}

void add_tube_bump(GridField& g, const Tube& t) {
    // Dominant-axis column walk: every cell of the support is visited exactly
    // once, so no dedup structure is needed even for long tubes.
    const RadialTable& table = tube_table(g.dim);
    double h = g.cell_size();
    int64_t G = g.side_cells;
    const Vec a = t.anchor;
    const Vec u = t.direction;
    int dom = 0;
    double best = std::abs(u.x);
    if (std::abs(u.y) > best) { dom = 1; best = std::abs(u.y); }
    if (g.dim == 3 && std::abs(u.z) > best) { dom = 2; best = std::abs(u.z); }
    const double udom = u[dom];
    const double margin = (table.max_d + 2 * h) / best;
    double t_lo = std::min(0.0, t.length) - 0.5 - margin;
    double t_hi = std::max(0.0, t.length) + 0.5 + margin;
    double x_lo = a[dom] + (udom > 0 ? t_lo : t_hi) * udom;
    double x_hi = a[dom] + (udom > 0 ? t_hi : t_lo) * udom;
    int64_t i_lo = std::max<int64_t>(0, int64_t(std::floor(x_lo / h)));
    int64_t i_hi = std::min<int64_t>(G - 1, int64_t(std::floor(x_hi / h)));
    const double half = table.max_d / best + 2 * h;

    auto eval = [&](const Vec& c) {
        double ax = (c - a).dot(u);
        Vec perp = (c - a) - u * ax;
        double dperp = perp.norm();
        if (dperp >= table.max_d) return 0.0;
        return table(dperp) * end_ramp(ax) * end_ramp(t.length - ax);
    };

    for (int64_t i = i_lo; i <= i_hi; ++i) {
        double x = (i + 0.5) * h;
        double tt = std::clamp((x - a[dom]) / udom, 0.0, t.length);
        Vec p = a + u * tt;
        if (g.dim == 2) {
            int o = dom == 0 ? 1 : 0;
            int64_t j_lo = std::max<int64_t>(0, int64_t(std::floor((p[o] - half) / h)));
            int64_t j_hi = std::min<int64_t>(G - 1, int64_t(std::floor((p[o] + half) / h)));
            for (int64_t j = j_lo; j <= j_hi; ++j) {
                int64_t k0 = dom == 0 ? i : j;
                int64_t k1 = dom == 0 ? j : i;
                Vec c = g.cell_center(k0, k1, 0);
                double v = eval(c);
                if (v > 0) g.values[g.flat(k0, k1, 0)] += v;
            }
        } else {
            int o1 = dom == 0 ? 1 : 0;
            int o2 = dom == 2 ? 1 : 2;
            int64_t j_lo = std::max<int64_t>(0, int64_t(std::floor((p[o1] - half) / h)));
            int64_t j_hi = std::min<int64_t>(G - 1, int64_t(std::floor((p[o1] + half) / h)));
            int64_t l_lo = std::max<int64_t>(0, int64_t(std::floor((p[o2] - half) / h)));
            int64_t l_hi = std::min<int64_t>(G - 1, int64_t(std::floor((p[o2] + half) / h)));
            for (int64_t j = j_lo; j <= j_hi; ++j)
                for (int64_t l = l_lo; l <= l_hi; ++l) {
                    int64_t k[3];
                    k[dom] = i;
                    k[o1] = j;
                    k[o2] = l;
                    Vec c = g.cell_center(k[0], k[1], k[2]);
                    double v = eval(c);
                    if (v > 0) g.values[g.flat(k[0], k[1], k[2])] += v;
                }
        }
    }
}

void build_fields(const std::vector<Vec>& ball_centers, const std::vector<Tube>& tubes,
                  double D, int G, int dim, GridField& f, GridField& g) {
    if (!is_pow2_int(G)) throw std::invalid_argument("build_fields: G must be a power of 2");
    if (G < 4 * D - 1e-9) throw std::invalid_argument("build_fields: need G >= 4*D");
    f = make_field(dim, G, D);
    g = make_field(dim, G, D);
    for (const Vec& c : ball_centers) add_ball_bump(f, c);
    for (const Tube& t : tubes) add_tube_bump(g, t);
}

namespace {

void fft_1d(std::complex<double>* x, int n, int stride, bool inverse,
            std::vector<std::complex<double>>& scratch) {
    scratch.resize(n);
    for (int i = 0; i < n; ++i) scratch[i] = x[size_t(i) * stride];
    // bit reversal
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(scratch[i], scratch[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        double ang = 2 * kPi / len * (inverse ? 1 : -1);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                std::complex<double> a = scratch[i + k];
                std::complex<double> b = scratch[i + k + len / 2] * w;
                scratch[i + k] = a + b;
                scratch[i + k + len / 2] = a - b;
                w *= wl;
            }
        }
    }
    for (int i = 0; i < n; ++i) x[size_t(i) * stride] = scratch[i];
}

}  // namespace

void fft_nd(std::vector<std::complex<double>>& data, int dim, int G, bool inverse) {
    std::vector<std::complex<double>> scratch;
    size_t g = size_t(G);
    if (dim == 2) {
        for (size_t row = 0; row < g; ++row) fft_1d(&data[row * g], G, 1, inverse, scratch);
        for (size_t col = 0; col < g; ++col) fft_1d(&data[col], G, int(g), inverse, scratch);
    } else {
        for (size_t z = 0; z < g; ++z)
            for (size_t y = 0; y < g; ++y)
                fft_1d(&data[(z * g + y) * g], G, 1, inverse, scratch);
        for (size_t z = 0; z < g; ++z)
            for (size_t x = 0; x < g; ++x)
                fft_1d(&data[z * g * g + x], G, int(g), inverse, scratch);
        for (size_t y = 0; y < g; ++y)
            for (size_t x = 0; x < g; ++x)
                fft_1d(&data[y * g + x], G, int(g * g), inverse, scratch);
    }
    if (inverse) {
        double scale = 1.0 / double(data.size());
        for (auto& v : data) v *= scale;
    }
}

}  // namespace tubeinc
