#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "polestim/config.hpp"
#include "polestim/estimator.hpp"
#include "polestim/mesh.hpp"
#include "polestim/render.hpp"
#include "polestim/stack.hpp"

// Scene-to-estimate orchestration: build the hovering camera a config
// describes, render a body-rotation sweep, co-add the frames, and run the
// spectral in-plane estimator.

namespace polestim {

inline double max_vertex_radius(const triangle_mesh& mesh) {
    double r = 0.0;
    for (const auto& v : mesh.vertices) r = std::max(r, norm(v));
    if (!(r > 0.0)) throw degenerate_error("max_vertex_radius: empty or degenerate mesh");
    return r;
}

/// Roll the camera about its boresight; positive roll turns i toward j.
inline camera_frame roll_frame(const camera_frame& f, double roll) {
    if (roll == 0.0) return f;
    const double c = std::cos(roll), s = std::sin(roll);
    camera_frame out;
    out.i_axis = f.i_axis * c + f.j_axis * s;
    out.j_axis = f.j_axis * c - f.i_axis * s;
    out.k_axis = f.k_axis;
    return out;
}

/// The sweep camera: fixed at (r, lambda, longitude 0) looking at the origin
/// with z as the up hint, then rolled. The body rotates under it, so one
/// view serves every frame. Range and the orthographic auto-scale are in
/// units of the largest vertex radius. The auto-scale 0.3 N / r_max leaves
/// headroom beyond the silhouette itself: centroid registration shifts a
/// high-phase frame by up to ~0.5 of its radius, and shifted content must
/// not wrap across the circular image border.
inline camera_view view_from_config(const pipeline_config& c, const triangle_mesh& mesh) {
    const double r_max = max_vertex_radius(mesh);
    camera_view view;
    view.position = {c.range_radii * r_max, deg2rad(c.latitude_deg), 0.0};
    view.frame = roll_frame(look_at_frame(spherical_to_cartesian(view.position), {0, 0, 0}, {0, 0, 1}),
                            deg2rad(c.roll_deg));
    view.resolution = c.resolution;
    const double cc = center_index(c.resolution);
    const double scale = c.pixels_per_radius.value_or(0.3 * c.resolution / r_max);
    if (c.projection == "pinhole") {
        const double focal = c.focal_px.value_or(scale * view.position.r);
        view.intrinsics = pinhole_model{focal, focal, cc, cc};
    } else {
        view.intrinsics = orthographic_model{scale, cc, cc};
    }
    view.validate();
    return view;
}

/// Full-circle pole-projection angle the sweep camera should recover.
inline double pipeline_alpha_true(const pipeline_config& c, const triangle_mesh& mesh) {
    return true_pole_projection_angle({0, 0, 1}, view_from_config(c, mesh).frame);
}

/// Sun placement for the sweep. Anchored to the unrolled hover geometry:
/// the sun is a physical actor, so camera roll must rotate terminator and
/// outline together in the image rather than dragging the sun along.
inline sun_state sun_for_config(const pipeline_config& c, const triangle_mesh& mesh) {
    pipeline_config canonical = c;
    canonical.roll_deg = 0.0;
    return sun_from_phase(view_from_config(canonical, mesh), deg2rad(c.phase_deg),
                          deg2rad(c.sun_azimuth_deg));
}

/// Render the sweep: frame k sees the body rotated by phi_k = lon_start +
/// k step about +z; camera and sun stay fixed. Frame longitude records the
/// body phase phi_k.
inline std::vector<silhouette_image> render_sweep(const pipeline_config& c,
                                                  const triangle_mesh& mesh) {
    const camera_view view = view_from_config(c, mesh);
    const sun_state sun = sun_for_config(c, mesh);
    render_config rcfg;
    rcfg.resolution = c.resolution;
    const silhouette_mode mode =
        c.silhouette == "perfect" ? silhouette_mode::perfect : silhouette_mode::observable;
    const int m = c.frame_count();
    std::vector<silhouette_image> frames;
    frames.reserve(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        const double phi = deg2rad(c.lon_start_deg + k * c.lon_step_deg);
        try {
            frames.push_back(render_silhouette(rotate_body(mesh, phi), view, sun, rcfg, mode));
        } catch (const fov_error& e) {
            std::ostringstream os;
            os << "frame " << k << " (phi " << rad2deg(phi) << " deg): " << e.what();
            throw fov_error(os.str());
        }
        frames.back().longitude = wrap_angle(phi);
    }
    return frames;
}

/// One in-plane estimation run over a rendered (or re-read) frame set.
struct in_plane_run {
    stack_image stack;
    in_plane_estimate estimate;
    std::array<double, 4> hypotheses{};  // full-circle candidates, radians
    std::optional<double> disambiguated;  // set when the config carries a hint
};

inline in_plane_run estimate_from_frames(const std::vector<silhouette_image>& frames,
                                         const pipeline_config& c) {
    in_plane_run run;
    run.stack = co_add(frames, c.registration_enum());
    run.estimate = estimate_in_plane_angle(run.stack, c.resolved_cutoff(),
                                           uniform_query_grid(deg2rad(c.grid_step_deg)));
    run.hypotheses = expand_pole_hypotheses(run.estimate.alpha_hat);
    if (c.hint_deg) run.disambiguated = disambiguate(run.hypotheses, deg2rad(*c.hint_deg));
    return run;
}

inline in_plane_run run_pipeline(const pipeline_config& c) {
    const triangle_mesh mesh = make_shape(c.shape);
    return estimate_from_frames(render_sweep(c, mesh), c);
}

}  // namespace polestim
