#pragma once

#include <array>
#include <cmath>
#include <variant>

#include "polestim/errors.hpp"
#include "polestim/vec3.hpp"

namespace polestim {

/// Camera position in body-centered spherical coordinates.
/// Distances are in body-radius units, angles in radians.
struct spherical_position {
    double r = 1.0;        // > 0
    double latitude = 0.0;  // [-pi/2, pi/2]
    double longitude = 0.0; // [0, 2*pi)

    void validate() const {
        if (!(r > 0.0)) throw config_error("spherical_position: r must be > 0");
        if (!(latitude >= -pi / 2 && latitude <= pi / 2))
            throw config_error("spherical_position: latitude out of [-pi/2, pi/2]");
        if (!(longitude >= 0.0 && longitude < 2.0 * pi))
            throw config_error("spherical_position: longitude out of [0, 2*pi)");
    }
};

inline vec3 spherical_to_cartesian(const spherical_position& pos) {
    pos.validate();
    const double cl = std::cos(pos.latitude);
    return {pos.r * cl * std::cos(pos.longitude),
            pos.r * cl * std::sin(pos.longitude),
            pos.r * std::sin(pos.latitude)};
}

/// Orthonormal, right-handed camera triad:
/// i points along image columns (left to right), j along image rows
/// (top to bottom), k along the boresight into the scene.
struct camera_frame {
    vec3 i_axis{1, 0, 0};
    vec3 j_axis{0, 1, 0};
    vec3 k_axis{0, 0, 1};

    bool orthonormal(double tol = 1e-9) const {
        const vec3 handed = cross(i_axis, j_axis) - k_axis;
        return std::abs(norm(i_axis) - 1.0) < tol && std::abs(norm(j_axis) - 1.0) < tol &&
               std::abs(norm(k_axis) - 1.0) < tol && std::abs(dot(i_axis, j_axis)) < tol &&
               std::abs(dot(j_axis, k_axis)) < tol && std::abs(dot(k_axis, i_axis)) < tol &&
               norm(handed) < tol;
    }

    /// World-to-camera rotation with rows (i, j, k).
    mat3 world_to_camera() const { return mat3::from_rows(i_axis, j_axis, k_axis); }
};

/// Boresight toward the target; the up hint projects to image-up, so
/// i = normalize(k x up_hint) and j = k x i (right-handed by construction).
inline camera_frame look_at_frame(const vec3& camera_pos, const vec3& target, const vec3& up_hint) {
    const vec3 delta = target - camera_pos;
    const double d = norm(delta);
    if (d < 1e-12) throw degenerate_error("look_at_frame: camera position equals target");
    const vec3 k = delta / d;
    const vec3 side = cross(k, up_hint);
    const double s = norm(side);
    if (s < 1e-9)
        throw degenerate_error("look_at_frame: up hint parallel to boresight, supply another hint");
    camera_frame f;
    f.k_axis = k;
    f.i_axis = side / s;
    f.j_axis = cross(k, f.i_axis);
    return f;
}

struct pinhole_model {
    double f_u = 1000.0, f_v = 1000.0;  // focal lengths, pixels
    double c_u = 0.0, c_v = 0.0;        // principal point, pixels
};

struct orthographic_model {
    double scale = 100.0;         // pixels per body-radius unit
    double c_u = 0.0, c_v = 0.0;  // principal point, pixels
};

using camera_intrinsics = std::variant<pinhole_model, orthographic_model>;

inline void validate_intrinsics(const camera_intrinsics& in, int resolution) {
    const auto check_pp = [&](double cu, double cv) {
        if (!(cu >= 0.0 && cu < resolution && cv >= 0.0 && cv < resolution))
            throw config_error("camera_intrinsics: principal point outside [0, N)");
    };
    if (const auto* p = std::get_if<pinhole_model>(&in)) {
        if (!(p->f_u > 0.0 && p->f_v > 0.0)) throw config_error("camera_intrinsics: focal length must be > 0");
        check_pp(p->c_u, p->c_v);
    } else {
        const auto& o = std::get<orthographic_model>(in);
        if (!(o.scale > 0.0)) throw config_error("camera_intrinsics: scale must be > 0");
        check_pp(o.c_u, o.c_v);
    }
}

/// A hovering-camera view: spherical position, orientation, intrinsics,
/// and the square image resolution.
struct camera_view {
    spherical_position position;
    camera_frame frame;
    camera_intrinsics intrinsics = orthographic_model{};
    int resolution = 256;  // >= 8

    void validate() const {
        position.validate();
        if (resolution < 8) throw config_error("camera_view: resolution must be >= 8");
        if (!frame.orthonormal()) throw config_error("camera_view: frame not orthonormal right-handed");
        validate_intrinsics(intrinsics, resolution);
    }

    vec3 camera_position() const { return spherical_to_cartesian(position); }
};

/// 3x4 projection. Pinhole: x_cam = R p + t with t = -R r_cam, then
/// K-projection with perspective divide. Orthographic: depth dropped,
/// pixel offsets scale linearly with in-plane camera coordinates.
struct camera_matrix_t {
    std::array<std::array<double, 4>, 3> p{};
    bool orthographic = false;
};

inline camera_matrix_t camera_matrix(const camera_frame& frame, const vec3& camera_pos,
                                     const camera_intrinsics& intrinsics) {
    const mat3 rot = frame.world_to_camera();
    const vec3 t = -(rot * camera_pos);
    camera_matrix_t cm;
    if (const auto* ph = std::get_if<pinhole_model>(&intrinsics)) {
        // Rows of K [R | t] for K = [[f_u, 0, c_u], [0, f_v, c_v], [0, 0, 1]].
        for (int col = 0; col < 3; ++col) {
            cm.p[0][col] = ph->f_u * rot.m[0][col] + ph->c_u * rot.m[2][col];
            cm.p[1][col] = ph->f_v * rot.m[1][col] + ph->c_v * rot.m[2][col];
            cm.p[2][col] = rot.m[2][col];
        }
        cm.p[0][3] = ph->f_u * t.x + ph->c_u * t.z;
        cm.p[1][3] = ph->f_v * t.y + ph->c_v * t.z;
        cm.p[2][3] = t.z;
        cm.orthographic = false;
    } else {
        const auto& om = std::get<orthographic_model>(intrinsics);
        for (int col = 0; col < 3; ++col) {
            cm.p[0][col] = om.scale * rot.m[0][col];
            cm.p[1][col] = om.scale * rot.m[1][col];
            cm.p[2][col] = 0.0;
        }
        cm.p[0][3] = om.scale * t.x + om.c_u;
        cm.p[1][3] = om.scale * t.y + om.c_v;
        cm.p[2][3] = 1.0;
        cm.orthographic = true;
    }
    return cm;
}

inline camera_matrix_t camera_matrix(const camera_view& view) {
    view.validate();
    return camera_matrix(view.frame, view.camera_position(), view.intrinsics);
}

struct image_point {
    double u = 0.0, v = 0.0;  // pixels; u along columns, v along rows
};

inline image_point project_point(const camera_matrix_t& cm, const vec3& p) {
    const auto apply = [&](int r) {
        return cm.p[r][0] * p.x + cm.p[r][1] * p.y + cm.p[r][2] * p.z + cm.p[r][3];
    };
    if (cm.orthographic) return {apply(0), apply(1)};
    const double w = apply(2);
    if (!(w > 0.0)) throw degenerate_error("project_point: non-positive depth under pinhole projection");
    return {apply(0) / w, apply(1) / w};
}

/// In-plane angle of the projected pole, measured from image-up (the -v
/// direction) toward +u, in [0, 2*pi). This is the ground-truth convention
/// every other module is calibrated against.
inline double true_pole_projection_angle(const vec3& omega, const camera_frame& frame) {
    const double wu = dot(omega, frame.i_axis);
    const double wv = dot(omega, frame.j_axis);
    if (std::hypot(wu, wv) < 1e-9)
        throw degenerate_error("true_pole_projection_angle: pole along boresight, angle undefined");
    return wrap_angle(std::atan2(wu, -wv));
}

}  // namespace polestim
