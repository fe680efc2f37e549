#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "polestim/errors.hpp"
#include "polestim/geometry.hpp"
#include "polestim/image.hpp"
#include "polestim/mesh.hpp"

namespace polestim {

/// Collimated sunlight; direction points from the body toward the sun.
struct sun_state {
    vec3 direction{0, 0, 1};

    void validate() const {
        if (std::abs(norm(direction) - 1.0) > 1e-9)
            throw config_error("sun_state: direction must be unit length");
    }
};

inline sun_state make_sun(const vec3& toward_sun) {
    const double n = norm(toward_sun);
    if (n < 1e-12) throw config_error("make_sun: zero direction");
    return sun_state{toward_sun / n};
}

/// Angle between the body->sun and body->camera directions, in [0, pi].
inline double sun_phase_angle(const camera_view& view, const sun_state& sun) {
    const vec3 c = normalized(view.camera_position());
    return std::acos(std::clamp(dot(c, sun.direction), -1.0, 1.0));
}

/// Sun direction at a given phase angle relative to the camera direction.
/// Azimuth 0 tilts the sun toward the image-u axis; the sun stays fixed in
/// the hovering frame so the phase is constant across a rotation batch.
inline sun_state sun_from_phase(const camera_view& view, double phase, double azimuth = 0.0) {
    if (!(phase >= 0.0 && phase <= pi)) throw config_error("sun_from_phase: phase out of [0, pi]");
    const vec3 c = normalized(view.camera_position());
    vec3 a = view.frame.i_axis - c * dot(view.frame.i_axis, c);
    const double an = norm(a);
    if (an < 1e-9) throw degenerate_error("sun_from_phase: image axis parallel to camera direction");
    a = a / an;
    const vec3 b = cross(c, a);
    return sun_state{normalized(c * std::cos(phase) +
                                (a * std::cos(azimuth) + b * std::sin(azimuth)) * std::sin(phase))};
}

enum class centroid_weighting { binary, lambertian };

struct render_config {
    int resolution = 1024;
    double shadow_epsilon = 1e-4;  // ray offset, body-radius units
    int supersample = 1;           // samples per pixel axis
    centroid_weighting weighting = centroid_weighting::binary;

    void validate() const {
        if (resolution < 8) throw config_error("render_config: resolution must be >= 8");
        if (!(shadow_epsilon > 0.0 && shadow_epsilon <= 1e-2))
            throw config_error("render_config: shadow_epsilon out of (0, 1e-2]");
        if (supersample < 1) throw config_error("render_config: supersample must be >= 1");
    }
};

enum class silhouette_mode { observable, perfect };

/// Boolean occupancy grid with the viewing metadata needed downstream.
/// Row m runs down the image (v), column n runs right (u).
struct silhouette_image {
    bool_image pixels{0};
    double longitude = 0;  // view longitude phi, radians
    double latitude = 0;   // view latitude lambda, radians
    double range = 0;      // camera distance, body radii
    double sun_phase = 0;  // radians
    double center_u = 0;   // projected body center of mass, pixels
    double center_v = 0;

    int resolution() const { return pixels.n; }
};

namespace detail {

constexpr double ray_tmin = 1e-9;

/// Moller-Trumbore with a small barycentric tolerance so rays crossing
/// shared edges hit at least one of the adjacent triangles.
inline bool ray_triangle(const vec3& o, const vec3& d, const vec3& a, const vec3& b, const vec3& c,
                         double& t_out) {
    const vec3 e1 = b - a, e2 = c - a;
    const vec3 pv = cross(d, e2);
    const double det = dot(e1, pv);
    if (std::abs(det) < 1e-14) return false;
    const double inv = 1.0 / det;
    const vec3 tv = o - a;
    const double u = dot(tv, pv) * inv;
    if (u < -1e-9 || u > 1.0 + 1e-9) return false;
    const vec3 qv = cross(tv, e1);
    const double v = dot(d, qv) * inv;
    if (v < -1e-9 || u + v > 1.0 + 1e-9) return false;
    const double t = dot(e2, qv) * inv;
    if (t <= ray_tmin) return false;
    t_out = t;
    return true;
}

/// Uniform 2D bucket grid of triangle indices, keyed by a planar coordinate.
/// Flat acceleration only: candidate lists per cell, no hierarchy.
struct bucket_grid {
    double u0 = 0, v0 = 0, cell = 1;
    int nu = 0, nv = 0;
    std::vector<std::vector<int>> cells;

    void init(double u_lo, double v_lo, double u_hi, double v_hi, int target_cells_per_axis) {
        u0 = u_lo;
        v0 = v_lo;
        const double span = std::max({u_hi - u_lo, v_hi - v_lo, 1e-9});
        cell = span / target_cells_per_axis;
        nu = static_cast<int>((u_hi - u_lo) / cell) + 1;
        nv = static_cast<int>((v_hi - v_lo) / cell) + 1;
        cells.assign(static_cast<size_t>(nu) * nv, {});
    }

    void insert(int tri, double u_lo, double v_lo, double u_hi, double v_hi) {
        const int iu0 = std::clamp(static_cast<int>((u_lo - u0) / cell), 0, nu - 1);
        const int iu1 = std::clamp(static_cast<int>((u_hi - u0) / cell), 0, nu - 1);
        const int iv0 = std::clamp(static_cast<int>((v_lo - v0) / cell), 0, nv - 1);
        const int iv1 = std::clamp(static_cast<int>((v_hi - v0) / cell), 0, nv - 1);
        for (int iv = iv0; iv <= iv1; ++iv)
            for (int iu = iu0; iu <= iu1; ++iu)
                cells[static_cast<size_t>(iv) * nu + iu].push_back(tri);
    }

    const std::vector<int>* lookup(double u, double v) const {
        const int iu = static_cast<int>(std::floor((u - u0) / cell));
        const int iv = static_cast<int>(std::floor((v - v0) / cell));
        if (iu < 0 || iu >= nu || iv < 0 || iv >= nv) return nullptr;
        return &cells[static_cast<size_t>(iv) * nu + iu];
    }
};

/// Shadow tester for collimated light: triangles bucketed on the plane
/// perpendicular to the sun direction, so each parallel shadow ray reads
/// one cell.
struct shadow_tester {
    const triangle_mesh* mesh = nullptr;
    vec3 light{};  // unit, toward the sun
    vec3 s1{}, s2{};
    bucket_grid grid;

    void build(const triangle_mesh& m, const vec3& toward_sun) {
        mesh = &m;
        light = toward_sun;
        s1 = std::abs(light.x) < 0.9 ? normalized(cross(light, vec3{1, 0, 0}))
                                     : normalized(cross(light, vec3{0, 1, 0}));
        s2 = cross(light, s1);
        double lo1 = 1e30, lo2 = 1e30, hi1 = -1e30, hi2 = -1e30;
        std::vector<std::array<double, 4>> boxes(m.faces.size());
        for (size_t f = 0; f < m.faces.size(); ++f) {
            double a1 = 1e30, a2 = 1e30, b1 = -1e30, b2 = -1e30;
            for (int idx : m.faces[f]) {
                const vec3& p = m.vertices[idx];
                const double c1 = dot(p, s1), c2 = dot(p, s2);
                a1 = std::min(a1, c1);
                a2 = std::min(a2, c2);
                b1 = std::max(b1, c1);
                b2 = std::max(b2, c2);
            }
            boxes[f] = {a1, a2, b1, b2};
            lo1 = std::min(lo1, a1);
            lo2 = std::min(lo2, a2);
            hi1 = std::max(hi1, b1);
            hi2 = std::max(hi2, b2);
        }
        const int per_axis =
            std::clamp(static_cast<int>(std::sqrt(static_cast<double>(m.faces.size()))), 8, 64);
        grid.init(lo1, lo2, hi1 + 1e-9, hi2 + 1e-9, per_axis);
        for (size_t f = 0; f < m.faces.size(); ++f)
            grid.insert(static_cast<int>(f), boxes[f][0], boxes[f][1], boxes[f][2], boxes[f][3]);
    }

    bool occluded(const vec3& origin) const {
        const auto* cand = grid.lookup(dot(origin, s1), dot(origin, s2));
        if (!cand) return false;
        double t;
        for (int f : *cand) {
            const auto& face = mesh->faces[f];
            if (ray_triangle(origin, light, mesh->vertices[face[0]], mesh->vertices[face[1]],
                             mesh->vertices[face[2]], t))
                return true;
        }
        return false;
    }
};

/// Per-pixel sample offsets in [-0.5, 0.5): stratified k x k cell centers
/// with the pixel center always first, so the supersampled silhouette is a
/// superset of the center-sample one by construction.
inline std::vector<std::pair<double, double>> sample_offsets(int k) {
    std::vector<std::pair<double, double>> out;
    out.emplace_back(0.0, 0.0);
    if (k <= 1) return out;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double du = (j + 0.5) / k - 0.5;
            const double dv = (i + 0.5) / k - 0.5;
            if (std::abs(du) < 1e-12 && std::abs(dv) < 1e-12) continue;  // center already first
            out.emplace_back(du, dv);
        }
    return out;
}

}  // namespace detail

/// Render the silhouette seen by `view` under `sun`.
///
/// A pixel is set when at least one sample ray hits the body and, in
/// observable mode, the front-most hit point escapes toward the sun: a ray
/// from p + shadow_epsilon * n (n the camera-facing geometric normal) hits
/// nothing. On a closed mesh this classifies sun-averted points as occluded
/// through their own surface, matching the visible-and-illuminated set.
///
/// If `weights` is non-null it receives per-pixel centroid weights: 1 for
/// set pixels (binary) or max(0, n.l) of the front-most hit of the first
/// passing sample (lambertian).
inline silhouette_image render_silhouette(const triangle_mesh& mesh, const camera_view& view,
                                          const sun_state& sun, const render_config& cfg,
                                          silhouette_mode mode, real_image* weights = nullptr) {
    cfg.validate();
    view.validate();
    sun.validate();
    mesh.validate();
    if (cfg.resolution != view.resolution)
        throw config_error("render_silhouette: config and view resolution disagree");
    const int n = cfg.resolution;

    const camera_matrix_t cm = camera_matrix(view);
    const vec3 cam_pos = view.camera_position();
    const bool ortho = cm.orthographic;

    // Screen-space buckets of triangle indices from projected vertex boxes.
    detail::bucket_grid screen;
    screen.init(0.0, 0.0, static_cast<double>(n), static_cast<double>(n),
                std::max(8, n / 8));
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        double ulo = 1e30, vlo = 1e30, uhi = -1e30, vhi = -1e30;
        for (int idx : mesh.faces[f]) {
            const image_point ip = project_point(cm, mesh.vertices[idx]);
            ulo = std::min(ulo, ip.u);
            vlo = std::min(vlo, ip.v);
            uhi = std::max(uhi, ip.u);
            vhi = std::max(vhi, ip.v);
        }
        if (uhi < -0.5 || vhi < -0.5 || ulo > n - 0.5 || vlo > n - 0.5) continue;
        screen.insert(static_cast<int>(f), ulo - 1e-6, vlo - 1e-6, uhi + 1e-6, vhi + 1e-6);
    }

    detail::shadow_tester shadow;
    if (mode == silhouette_mode::observable) shadow.build(mesh, sun.direction);

    const auto offsets = detail::sample_offsets(cfg.supersample);

    silhouette_image out;
    out.pixels = bool_image(n);
    out.longitude = view.position.longitude;
    out.latitude = view.position.latitude;
    out.range = view.position.r;
    out.sun_phase = sun_phase_angle(view, sun);
    const image_point body_center = project_point(cm, {0, 0, 0});  // mesh centered on centroid
    out.center_u = body_center.u;
    out.center_v = body_center.v;
    if (weights) *weights = real_image(n);

    double fu = 0, fv = 0, scale = 0, cu = 0, cv = 0;
    if (const auto* pin = std::get_if<pinhole_model>(&view.intrinsics)) {
        fu = pin->f_u;
        fv = pin->f_v;
        cu = pin->c_u;
        cv = pin->c_v;
    } else {
        const auto& og = std::get<orthographic_model>(view.intrinsics);
        scale = og.scale;
        cu = og.c_u;
        cv = og.c_v;
    }

#pragma omp parallel for schedule(static)
    for (int m = 0; m < n; ++m) {
        for (int col = 0; col < n; ++col) {
            bool filled = false;
            double weight = 0.0;
            for (const auto& [du, dv] : offsets) {
                const double u = col + du, v = m + dv;
                vec3 ro, rd;
                if (ortho) {
                    ro = cam_pos + view.frame.i_axis * ((u - cu) / scale) +
                         view.frame.j_axis * ((v - cv) / scale);
                    rd = view.frame.k_axis;
                } else {
                    ro = cam_pos;
                    rd = normalized(view.frame.i_axis * ((u - cu) / fu) +
                                    view.frame.j_axis * ((v - cv) / fv) + view.frame.k_axis);
                }
                const auto* cand = screen.lookup(u, v);
                if (!cand || cand->empty()) continue;
                double best_t = 1e30;
                int best_f = -1;
                for (int f : *cand) {
                    const auto& face = mesh.faces[f];
                    double t;
                    if (detail::ray_triangle(ro, rd, mesh.vertices[face[0]],
                                             mesh.vertices[face[1]], mesh.vertices[face[2]], t) &&
                        t < best_t) {
                        best_t = t;
                        best_f = f;
                    }
                }
                if (best_f < 0) continue;

                const auto& face = mesh.faces[best_f];
                const vec3& a = mesh.vertices[face[0]];
                vec3 ngeo = normalized(cross(mesh.vertices[face[1]] - a, mesh.vertices[face[2]] - a));
                if (dot(ngeo, rd) > 0.0) ngeo = -ngeo;

                if (mode == silhouette_mode::observable) {
                    // Illuminated = the visible side faces the sun and the
                    // offset ray escapes. The orientation term decides
                    // sun-averted points exactly where the grazing ray
                    // test loses to float cancellation.
                    if (dot(ngeo, sun.direction) <= 0.0) continue;
                    const vec3 p = ro + rd * best_t;
                    if (shadow.occluded(p + ngeo * cfg.shadow_epsilon)) continue;
                }
                filled = true;
                weight = cfg.weighting == centroid_weighting::binary
                             ? 1.0
                             : std::max(0.0, dot(ngeo, sun.direction));
                break;
            }
            if (filled) {
                out.pixels(m, col) = 1;
                if (weights) (*weights)(m, col) = weight;
            }
        }
    }

    for (int i = 0; i < n; ++i)
        if (out.pixels(0, i) || out.pixels(n - 1, i) || out.pixels(i, 0) || out.pixels(i, n - 1))
            throw fov_error("render_silhouette: silhouette touches image border");

    return out;
}

/// Intensity-weighted mean of pixel-center coordinates (u = column, v = row).
inline image_point brightness_centroid(const real_image& weights) {
    double sw = 0, su = 0, sv = 0;
    for (int m = 0; m < weights.n; ++m)
        for (int col = 0; col < weights.n; ++col) {
            const double w = weights(m, col);
            if (w < 0.0) throw config_error("brightness_centroid: negative weight");
            sw += w;
            su += w * col;
            sv += w * m;
        }
    if (sw <= 0.0) throw degenerate_error("brightness_centroid: empty image");
    return {su / sw, sv / sw};
}

inline image_point brightness_centroid(const bool_image& pixels) {
    double sw = 0, su = 0, sv = 0;
    for (int m = 0; m < pixels.n; ++m)
        for (int col = 0; col < pixels.n; ++col)
            if (pixels(m, col)) {
                sw += 1.0;
                su += col;
                sv += m;
            }
    if (sw <= 0.0) throw degenerate_error("brightness_centroid: empty image");
    return {su / sw, sv / sw};
}

inline image_point brightness_centroid(const silhouette_image& img) {
    return brightness_centroid(img.pixels);
}

}  // namespace polestim
