#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <vector>

#include "polestim/errors.hpp"
#include "polestim/image.hpp"
#include "polestim/spectral.hpp"
#include "polestim/stack.hpp"
#include "polestim/vec3.hpp"

namespace polestim {

enum class estimator_domain { frequency, space };

struct in_plane_estimate {
    double alpha_hat = 0;  // pole projection angle modulo pi/2, radians
    symmetry_curve curve;
};

/// Circular distance between angles that live modulo pi/2, in [0, pi/4].
inline double quarter_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), pi / 2);
    if (d > pi / 4) d = pi / 2 - d;
    return d;
}

namespace detail {

/// Map the best query rotation to the pole-projection convention. The
/// stack's mirror axis direction is (sin a, -cos a) in (u, v); rotating the
/// content by theta moves it to angle a + theta, and the vertical-symmetry
/// score peaks when a + theta = 0 mod pi/2. Hence alpha = -theta mod pi/2.
/// Pinned by the synthetic-ellipse calibration test.
inline double angle_from_best_rotation(double theta_star) {
    double a = std::fmod(-theta_star, pi / 2);
    if (a < 0.0) a += pi / 2;
    if (a >= pi / 2) a = 0.0;
    return a;
}

}  // namespace detail

/// Score vertical symmetry of `field` under each query rotation and return
/// the maximizing angle (ties to the smallest) plus the full curve.
inline in_plane_estimate scan_symmetry(const real_image& field, const query_grid& grid) {
    grid.validate();
    const bool constant =
        std::all_of(field.data.begin(), field.data.end(),
                    [&](double p) { return p == field.data.front(); });
    if (constant) throw degenerate_error("scan_symmetry: constant field");
    const int count = static_cast<int>(grid.angles.size());
    std::vector<double> psi(count);
    std::exception_ptr failure;  // exceptions must not unwind out of the omp region

#pragma omp parallel for schedule(static)
    for (int k = 0; k < count; ++k) {
        try {
            const real_image rotated = rotate_image_nn(field, grid.angles[k]);
            psi[k] = symmetry_score(rotated);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    int best = 0;
    for (int k = 1; k < count; ++k)
        if (psi[k] > psi[best]) best = k;

    in_plane_estimate est;
    est.alpha_hat = detail::angle_from_best_rotation(grid.angles[best]);
    est.curve.points.reserve(count);
    for (int k = 0; k < count; ++k) est.curve.points.emplace_back(grid.angles[k], psi[k]);
    return est;
}

/// In-plane pole-projection angle from a co-added stack.
///
/// frequency domain (default): DFT amplitude spectrum -> low-pass crop at
/// radius tau -> log(1 + A^2) -> rotate/score scan. space domain scores the
/// stack itself, a diagnostic that assumes centered frames.
inline in_plane_estimate estimate_in_plane_angle(const stack_image& stack, double tau,
                                                 const query_grid& grid,
                                                 estimator_domain domain = estimator_domain::frequency) {
    const real_image field = convert_image<std::int32_t, double>(stack.pixels);
    try {
        if (domain == estimator_domain::space) return scan_symmetry(field, grid);
        const real_image spectrum = amplitude_spectrum(field);
        const real_image cropped = low_pass_crop(spectrum, tau);
        return scan_symmetry(log_compress(cropped), grid);
    } catch (const degenerate_error&) {
        throw degenerate_error("estimate_in_plane_angle: degenerate stack after processing");
    }
}

/// Convenience path from registered frames.
inline in_plane_estimate estimate_in_plane_angle(const std::vector<silhouette_image>& frames,
                                                 double tau, const query_grid& grid,
                                                 estimator_domain domain = estimator_domain::frequency) {
    if (frames.size() < 2) throw config_error("estimate_in_plane_angle: need at least 2 frames");
    return estimate_in_plane_angle(co_add(frames), tau, grid, domain);
}

/// Default low-pass cutoff: 100 px at N = 1024, scaled proportionally.
inline double default_cutoff(int resolution) { return 100.0 * resolution / 1024.0; }

/// "Full spectrum" cutoff: the inscribed-disc radius about DC. Radii past
/// floor(N/2) leave the rotation window and would clip under the scan,
/// planting a spurious 45-degree symmetry axis.
inline double full_cutoff(int resolution) { return center_index(resolution); }

}  // namespace polestim
