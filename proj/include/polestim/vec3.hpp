#pragma once

#include <cmath>
#include <numbers>

namespace polestim {

inline constexpr double pi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / pi; }

/// Reduce an angle to [0, 2*pi).
inline double wrap_angle(double rad) {
    double a = std::fmod(rad, 2.0 * pi);
    if (a < 0.0) a += 2.0 * pi;
    return a;
}

struct vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr vec3 operator+(const vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr vec3 operator-(const vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr vec3 operator-() const { return {-x, -y, -z}; }
    constexpr vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr vec3& operator+=(const vec3& o) {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }
};

constexpr vec3 operator*(double s, const vec3& v) { return v * s; }

constexpr double dot(const vec3& a, const vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr vec3 cross(const vec3& a, const vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const vec3& v) { return std::sqrt(dot(v, v)); }

inline vec3 normalized(const vec3& v) { return v / norm(v); }

inline bool is_finite(const vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Row-major 3x3 matrix; enough linear algebra for frames and rotations.
struct mat3 {
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    static constexpr mat3 identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

    /// Rows are the given vectors.
    static constexpr mat3 from_rows(const vec3& r0, const vec3& r1, const vec3& r2) {
        return {{{r0.x, r0.y, r0.z}, {r1.x, r1.y, r1.z}, {r2.x, r2.y, r2.z}}};
    }

    /// Rotation by angle about the +z axis.
    static mat3 rot_z(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
    }

    vec3 row(int r) const { return {m[r][0], m[r][1], m[r][2]}; }

    vec3 operator*(const vec3& v) const {
        return {dot(row(0), v), dot(row(1), v), dot(row(2), v)};
    }

    mat3 operator*(const mat3& o) const {
        mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j] + m[i][2] * o.m[2][j];
        return r;
    }

    mat3 transposed() const {
        mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

}  // namespace polestim
