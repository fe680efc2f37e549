#pragma once

#include "polestim/geometry.hpp"
#include "polestim/image.hpp"

namespace polestim::testing {

/// Orthographic camera at spherical (r, lat, lon) looking at the origin,
/// principal point at the image center, z as the up hint.
inline camera_view make_ortho_view(double r, double lat_deg, double lon_deg, int n, double scale) {
    camera_view view;
    view.position = {r, deg2rad(lat_deg), wrap_angle(deg2rad(lon_deg))};
    const vec3 pos = spherical_to_cartesian(view.position);
    view.frame = look_at_frame(pos, {0, 0, 0}, {0, 0, 1});
    view.resolution = n;
    view.intrinsics = orthographic_model{scale, static_cast<double>(center_index(n)),
                                         static_cast<double>(center_index(n))};
    return view;
}

inline camera_view make_pinhole_view(double r, double lat_deg, double lon_deg, int n, double focal) {
    camera_view view = make_ortho_view(r, lat_deg, lon_deg, n, 1.0);
    view.intrinsics = pinhole_model{focal, focal, static_cast<double>(center_index(n)),
                                    static_cast<double>(center_index(n))};
    return view;
}

inline long count_filled(const bool_image& img) {
    long c = 0;
    for (const auto& p : img.data) c += p ? 1 : 0;
    return c;
}

/// True when every set pixel of `a` is also set in `b`.
inline bool subset_of(const bool_image& a, const bool_image& b) {
    if (a.n != b.n) return false;
    for (size_t i = 0; i < a.data.size(); ++i)
        if (a.data[i] && !b.data[i]) return false;
    return true;
}

}  // namespace polestim::testing
