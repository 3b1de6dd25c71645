#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tubeinc {

// Points/vectors live in R^3; 2D objects keep z == 0 and carry dim as metadata.
struct Vec {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec() = default;
    constexpr Vec(double x_, double y_, double z_ = 0.0) : x(x_), y(y_), z(z_) {}

    Vec operator+(const Vec& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec operator-(const Vec& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec& operator+=(const Vec& o) {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }

    double dot(const Vec& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec cross(const Vec& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

inline double dist(const Vec& a, const Vec& b) { return (a - b).norm(); }

// Integer lattice index, third component 0 in 2D.
struct Index3 {
    int64_t k0 = 0, k1 = 0, k2 = 0;
    bool operator==(const Index3& o) const { return k0 == o.k0 && k1 == o.k1 && k2 == o.k2; }
};

// Packs lattice indices in (-2^20, 2^20) per axis into one key.
inline int64_t pack_index(int64_t k0, int64_t k1, int64_t k2) {
    const int64_t off = 1ll << 20;
    return ((k0 + off) << 42) | ((k1 + off) << 21) | (k2 + off);
}
inline Index3 unpack_index(int64_t key) {
    const int64_t off = 1ll << 20, mask = (1ll << 21) - 1;
    return {(key >> 42) - off, ((key >> 21) & mask) - off, (key & mask) - off};
}

}  // namespace tubeinc
