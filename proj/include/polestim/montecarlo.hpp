#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "polestim/errors.hpp"
#include "polestim/geometry.hpp"
#include "polestim/rng.hpp"
#include "polestim/triangulation.hpp"

namespace polestim {

struct monte_carlo_config {
    int trials = 100000;
    double sigma_alpha = deg2rad(1.0);
    int n_views = 2;
    std::uint64_t seed = 0;
    double bin_width = deg2rad(2.0);
    triangulation_solver solver = triangulation_solver::homogeneous;

    void validate() const {
        if (trials < 1) throw config_error("monte_carlo: trials must be >= 1");
        if (!(sigma_alpha >= 0.0)) throw config_error("monte_carlo: sigma_alpha must be >= 0");
        if (n_views < 2) throw config_error("monte_carlo: need at least 2 views");
        if (!(bin_width > 0.0 && bin_width <= pi)) throw config_error("monte_carlo: bad bin width");
    }
};

/// One trial: beta is the boresight displacement (minimum pairwise value
/// when more than two views are drawn), epsilon the unfolded pole error in
/// [0, pi], so solver sign flips register in full.
struct monte_carlo_sample {
    double beta = 0.0;
    double epsilon = 0.0;
    int trial = 0;
};

struct beta_bin {
    double beta_center = 0.0;
    double mean_epsilon = 0.0;
    int count = 0;
};

struct monte_carlo_result {
    std::vector<monte_carlo_sample> samples;
    std::vector<beta_bin> binned;
    int outliers_over_5deg = 0;
    int resample_count = 0;
};

/// Triangulation-error statistics over random viewing geometries.
///
/// Each trial draws a true pole and n_views random camera frames, synthesizes
/// the projection angles with truncated normal noise, triangulates, and
/// records (beta, epsilon). Trials use counter-based substreams keyed by
/// (seed, trial index), so results are bit-identical for any thread count.
/// Degenerate draws (pole along a boresight, unobservable geometry) are
/// redrawn within the trial's own stream and counted.
inline monte_carlo_result run_monte_carlo(const monte_carlo_config& cfg) {
    cfg.validate();
    monte_carlo_result result;
    result.samples.resize(static_cast<size_t>(cfg.trials));
    int resamples = 0;

#pragma omp parallel for schedule(static) reduction(+ : resamples)
    for (int trial = 0; trial < cfg.trials; ++trial) {
        rng_stream rng(cfg.seed, static_cast<std::uint64_t>(trial));
        while (true) {
            const vec3 omega = rng.unit_sphere();
            std::vector<camera_frame> frames(static_cast<size_t>(cfg.n_views));
            for (auto& f : frames) f = sample_random_frame(rng);
            try {
                std::vector<in_plane_measurement> ms;
                ms.reserve(frames.size());
                for (const auto& f : frames) {
                    const double alpha = wrap_angle(true_pole_projection_angle(omega, f) +
                                                    sample_angle_noise(rng, cfg.sigma_alpha));
                    ms.push_back({alpha, f, 1.0});
                }
                const pole_estimate est = triangulate(ms, cfg.solver);
                double beta = pi;
                for (size_t a = 0; a < frames.size(); ++a)
                    for (size_t b = a + 1; b < frames.size(); ++b)
                        beta = std::min(beta, boresight_displacement(frames[a], frames[b]));
                // Unfolded error: the solver's sign disambiguation is part of
                // what the statistics characterize, so flips count in full.
                result.samples[static_cast<size_t>(trial)] = {
                    beta, pole_error(est.omega_hat, omega, false), trial};
                break;
            } catch (const degenerate_error&) {
                ++resamples;  // pole on a boresight or unobservable frames; redraw
            }
        }
    }
    result.resample_count = resamples;

    const int bins = static_cast<int>(std::ceil(pi / cfg.bin_width));
    std::vector<double> sum(static_cast<size_t>(bins), 0.0);
    std::vector<int> count(static_cast<size_t>(bins), 0);
    for (const auto& s : result.samples) {
        const int idx = std::min(bins - 1, static_cast<int>(s.beta / cfg.bin_width));
        sum[static_cast<size_t>(idx)] += s.epsilon;
        ++count[static_cast<size_t>(idx)];
        if (s.epsilon > deg2rad(5.0)) ++result.outliers_over_5deg;
    }
    for (int k = 0; k < bins; ++k)
        if (count[static_cast<size_t>(k)] > 0)
            result.binned.push_back({(k + 0.5) * cfg.bin_width,
                                     sum[static_cast<size_t>(k)] / count[static_cast<size_t>(k)],
                                     count[static_cast<size_t>(k)]});
    return result;
}

}  // namespace polestim
