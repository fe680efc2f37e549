#pragma once

// Experiment configuration: strict, versioned JSON. Unknown keys are
// rejected so typos fail loudly instead of silently running defaults, and
// parse -> serialize -> parse reproduces the config exactly (degree-valued
// fields stay in degrees here; conversion to radians happens at use).

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "polestim/errors.hpp"
#include "polestim/estimator.hpp"
#include "polestim/image.hpp"
#include "polestim/mesh.hpp"
#include "polestim/montecarlo.hpp"
#include "polestim/stack.hpp"

namespace polestim {

constexpr int config_schema_version = 1;

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
    if (!j.is_object()) throw config_error("config: " + where + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw config_error("config: unknown key '" + key + "' in " + where);
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw config_error("config: bad value for '" + key + "'");
    }
}

inline void check_schema_version(const nlohmann::json& j) {
    if (!j.contains("schema_version")) throw config_error("config: missing schema_version");
    if (get_or<int>(j, "schema_version", 0) != config_schema_version)
        throw config_error("config: unsupported schema_version");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shape selection: procedural stand-ins or an OBJ file.

struct shape_spec {
    std::string kind = "diamond";  // diamond | ellipsoid | bilobed | perturbed_sphere | obj
    int subdivisions = 4;
    ellipsoid_params ellipsoid{1.0, 0.7, 0.55};
    bilobed_params bilobed{};
    perturbed_sphere_params perturbed{};
    std::string obj_path;

    bool operator==(const shape_spec&) const = default;
};

inline shape_spec parse_shape_spec(const nlohmann::json& j) {
    shape_spec s;
    s.kind = detail::get_or<std::string>(j, "kind", s.kind);
    if (s.kind == "diamond") {
        detail::reject_unknown_keys(j, {"kind", "subdivisions"}, "shape");
    } else if (s.kind == "ellipsoid") {
        detail::reject_unknown_keys(j, {"kind", "subdivisions", "a", "b", "c"}, "shape");
        s.ellipsoid.a = detail::get_or(j, "a", s.ellipsoid.a);
        s.ellipsoid.b = detail::get_or(j, "b", s.ellipsoid.b);
        s.ellipsoid.c = detail::get_or(j, "c", s.ellipsoid.c);
    } else if (s.kind == "bilobed") {
        detail::reject_unknown_keys(j, {"kind", "subdivisions", "r1", "r2", "separation"}, "shape");
        s.bilobed.r1 = detail::get_or(j, "r1", s.bilobed.r1);
        s.bilobed.r2 = detail::get_or(j, "r2", s.bilobed.r2);
        s.bilobed.separation = detail::get_or(j, "separation", s.bilobed.separation);
    } else if (s.kind == "perturbed_sphere") {
        detail::reject_unknown_keys(j, {"kind", "subdivisions", "seed", "amplitude"}, "shape");
        s.perturbed.seed = detail::get_or<std::uint64_t>(j, "seed", s.perturbed.seed);
        s.perturbed.amplitude = detail::get_or(j, "amplitude", s.perturbed.amplitude);
    } else if (s.kind == "obj") {
        detail::reject_unknown_keys(j, {"kind", "path"}, "shape");
        if (!j.contains("path")) throw config_error("config: shape kind 'obj' needs 'path'");
        s.obj_path = j.at("path").get<std::string>();
    } else {
        throw config_error("config: unknown shape kind '" + s.kind + "'");
    }
    s.subdivisions = detail::get_or(j, "subdivisions", s.subdivisions);
    if (s.subdivisions < 0 || s.subdivisions > 8)
        throw config_error("config: shape subdivisions out of [0, 8]");
    return s;
}

inline nlohmann::json shape_spec_to_json(const shape_spec& s) {
    nlohmann::json j{{"kind", s.kind}};
    if (s.kind != "obj") j["subdivisions"] = s.subdivisions;
    if (s.kind == "ellipsoid") {
        j["a"] = s.ellipsoid.a;
        j["b"] = s.ellipsoid.b;
        j["c"] = s.ellipsoid.c;
    } else if (s.kind == "bilobed") {
        j["r1"] = s.bilobed.r1;
        j["r2"] = s.bilobed.r2;
        j["separation"] = s.bilobed.separation;
    } else if (s.kind == "perturbed_sphere") {
        j["seed"] = s.perturbed.seed;
        j["amplitude"] = s.perturbed.amplitude;
    } else if (s.kind == "obj") {
        j["path"] = s.obj_path;
    }
    return j;
}

inline triangle_mesh make_shape(const shape_spec& s) {
    if (s.kind == "diamond") return make_diamond(s.subdivisions);
    if (s.kind == "ellipsoid") return make_ellipsoid(s.ellipsoid, s.subdivisions);
    if (s.kind == "bilobed") return make_bilobed(s.bilobed, s.subdivisions);
    if (s.kind == "perturbed_sphere") return make_perturbed_sphere(s.perturbed, s.subdivisions);
    if (s.kind == "obj") return load_obj(s.obj_path);
    throw config_error("config: unknown shape kind '" + s.kind + "'");
}

// ---------------------------------------------------------------------------
// Full pipeline configuration (render -> stack -> estimate).

struct pipeline_config {
    shape_spec shape;
    // camera sweep: hovering at (range, latitude), body rotation phi0..phif
    double range_radii = 10.0;
    double latitude_deg = 14.0;
    double lon_start_deg = 0.0;
    double lon_end_deg = 360.0;
    double lon_step_deg = 1.0;
    double roll_deg = 0.0;  // camera roll about the boresight; sets where the pole projects
    std::string projection = "orthographic";  // orthographic | pinhole
    int resolution = 1024;
    std::optional<double> pixels_per_radius;  // orthographic scale; derived from the mesh if unset
    std::optional<double> focal_px;           // pinhole focal length; derived if unset
    // illumination
    double phase_deg = 90.0;
    double sun_azimuth_deg = 0.0;
    std::string silhouette = "observable";  // observable | perfect
    // processing
    std::string registration = "brightness_centroid";  // none | known_center | brightness_centroid
    std::optional<double> cutoff;  // cycles; unset -> 100 * N / 1024
    bool cutoff_full = false;      // "full": everything below the inscribed-disc radius
    double grid_step_deg = 1.0;
    std::optional<double> hint_deg;
    std::string out_dir = "out";
    std::uint64_t seed = 0;

    bool operator==(const pipeline_config&) const = default;

    int frame_count() const {
        return static_cast<int>(std::floor((lon_end_deg - lon_start_deg) / lon_step_deg + 1e-9));
    }

    double resolved_cutoff() const {
        if (cutoff_full) return full_cutoff(resolution);
        if (cutoff) return *cutoff;
        return default_cutoff(resolution);
    }

    registration_mode registration_enum() const {
        if (registration == "none") return registration_mode::none;
        if (registration == "known_center") return registration_mode::known_center;
        if (registration == "brightness_centroid") return registration_mode::brightness_centroid;
        throw config_error("config: unknown registration mode '" + registration + "'");
    }

    void validate() const {
        if (!(lon_step_deg > 0.0)) throw config_error("config: lon_step_deg must be > 0");
        if (!(lon_end_deg > lon_start_deg))
            throw config_error("config: lon_end_deg must exceed lon_start_deg");
        if (resolution < 8) throw config_error("config: resolution must be >= 8");
        if (!(range_radii > 0.0)) throw config_error("config: range_radii must be > 0");
        if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0))
            throw config_error("config: latitude_deg out of [-90, 90]");
        if (projection != "orthographic" && projection != "pinhole")
            throw config_error("config: unknown projection '" + projection + "'");
        if (!(phase_deg >= 0.0 && phase_deg <= 180.0))
            throw config_error("config: phase_deg out of [0, 180]");
        if (silhouette != "observable" && silhouette != "perfect")
            throw config_error("config: unknown silhouette mode '" + silhouette + "'");
        registration_enum();
        if (cutoff && !(*cutoff > 0.0)) throw config_error("config: cutoff must be > 0");
        if (!(grid_step_deg > 0.0 && grid_step_deg <= 90.0))
            throw config_error("config: grid_step_deg out of (0, 90]");
        if (pixels_per_radius && !(*pixels_per_radius > 0.0))
            throw config_error("config: pixels_per_radius must be > 0");
        if (focal_px && !(*focal_px > 0.0)) throw config_error("config: focal_px must be > 0");
        if (frame_count() < 1) throw config_error("config: longitude sweep produces no frames");
    }
};

inline pipeline_config parse_pipeline_config(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"schema_version", "shape", "camera", "sun", "silhouette",
                                 "registration", "cutoff", "grid_step_deg", "hint_deg", "out_dir",
                                 "seed"},
                                "config");
    detail::check_schema_version(j);
    pipeline_config c;
    if (j.contains("shape")) c.shape = parse_shape_spec(j.at("shape"));
    if (j.contains("camera")) {
        const auto& cam = j.at("camera");
        detail::reject_unknown_keys(cam,
                                    {"range_radii", "latitude_deg", "lon_start_deg", "lon_end_deg",
                                     "lon_step_deg", "roll_deg", "projection", "resolution",
                                     "pixels_per_radius", "focal_px"},
                                    "camera");
        c.range_radii = detail::get_or(cam, "range_radii", c.range_radii);
        c.latitude_deg = detail::get_or(cam, "latitude_deg", c.latitude_deg);
        c.lon_start_deg = detail::get_or(cam, "lon_start_deg", c.lon_start_deg);
        c.lon_end_deg = detail::get_or(cam, "lon_end_deg", c.lon_end_deg);
        c.lon_step_deg = detail::get_or(cam, "lon_step_deg", c.lon_step_deg);
        c.roll_deg = detail::get_or(cam, "roll_deg", c.roll_deg);
        c.projection = detail::get_or(cam, "projection", c.projection);
        c.resolution = detail::get_or(cam, "resolution", c.resolution);
        if (cam.contains("pixels_per_radius"))
            c.pixels_per_radius = cam.at("pixels_per_radius").get<double>();
        if (cam.contains("focal_px")) c.focal_px = cam.at("focal_px").get<double>();
    }
    if (j.contains("sun")) {
        const auto& sun = j.at("sun");
        detail::reject_unknown_keys(sun, {"phase_deg", "azimuth_deg"}, "sun");
        c.phase_deg = detail::get_or(sun, "phase_deg", c.phase_deg);
        c.sun_azimuth_deg = detail::get_or(sun, "azimuth_deg", c.sun_azimuth_deg);
    }
    c.silhouette = detail::get_or(j, "silhouette", c.silhouette);
    c.registration = detail::get_or(j, "registration", c.registration);
    if (j.contains("cutoff")) {
        const auto& tau = j.at("cutoff");
        if (tau.is_string()) {
            if (tau.get<std::string>() != "full")
                throw config_error("config: cutoff must be a number or \"full\"");
            c.cutoff_full = true;
        } else if (tau.is_number()) {
            c.cutoff = tau.get<double>();
        } else {
            throw config_error("config: cutoff must be a number or \"full\"");
        }
    }
    c.grid_step_deg = detail::get_or(j, "grid_step_deg", c.grid_step_deg);
    if (j.contains("hint_deg")) c.hint_deg = j.at("hint_deg").get<double>();
    c.out_dir = detail::get_or(j, "out_dir", c.out_dir);
    c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
    c.validate();
    return c;
}

inline nlohmann::json pipeline_config_to_json(const pipeline_config& c) {
    nlohmann::json cam{{"range_radii", c.range_radii},   {"latitude_deg", c.latitude_deg},
                       {"lon_start_deg", c.lon_start_deg}, {"lon_end_deg", c.lon_end_deg},
                       {"lon_step_deg", c.lon_step_deg},   {"roll_deg", c.roll_deg},
                       {"projection", c.projection},       {"resolution", c.resolution}};
    if (c.pixels_per_radius) cam["pixels_per_radius"] = *c.pixels_per_radius;
    if (c.focal_px) cam["focal_px"] = *c.focal_px;
    nlohmann::json j{{"schema_version", config_schema_version},
                     {"shape", shape_spec_to_json(c.shape)},
                     {"camera", std::move(cam)},
                     {"sun", {{"phase_deg", c.phase_deg}, {"azimuth_deg", c.sun_azimuth_deg}}},
                     {"silhouette", c.silhouette},
                     {"registration", c.registration},
                     {"grid_step_deg", c.grid_step_deg},
                     {"out_dir", c.out_dir},
                     {"seed", c.seed}};
    if (c.cutoff_full)
        j["cutoff"] = "full";
    else if (c.cutoff)
        j["cutoff"] = *c.cutoff;
    if (c.hint_deg) j["hint_deg"] = *c.hint_deg;
    return j;
}

// ---------------------------------------------------------------------------
// Monte Carlo configuration.

inline monte_carlo_config parse_monte_carlo_config(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j, {"schema_version", "trials", "sigma_alpha_deg", "n_views", "seed", "bin_width_deg",
            "solver"},
        "montecarlo config");
    detail::check_schema_version(j);
    monte_carlo_config c;
    c.trials = detail::get_or(j, "trials", c.trials);
    c.sigma_alpha = deg2rad(detail::get_or(j, "sigma_alpha_deg", rad2deg(c.sigma_alpha)));
    c.n_views = detail::get_or(j, "n_views", c.n_views);
    c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
    c.bin_width = deg2rad(detail::get_or(j, "bin_width_deg", rad2deg(c.bin_width)));
    const std::string solver = detail::get_or<std::string>(j, "solver", "homogeneous");
    if (solver == "homogeneous")
        c.solver = triangulation_solver::homogeneous;
    else if (solver == "inhomogeneous")
        c.solver = triangulation_solver::inhomogeneous;
    else
        throw config_error("config: unknown solver '" + solver + "'");
    c.validate();
    return c;
}

inline nlohmann::json monte_carlo_config_to_json(const monte_carlo_config& c) {
    return {{"schema_version", config_schema_version},
            {"trials", c.trials},
            {"sigma_alpha_deg", rad2deg(c.sigma_alpha)},
            {"n_views", c.n_views},
            {"seed", c.seed},
            {"bin_width_deg", rad2deg(c.bin_width)},
            {"solver",
             c.solver == triangulation_solver::homogeneous ? "homogeneous" : "inhomogeneous"}};
}

}  // namespace polestim
