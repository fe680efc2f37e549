#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "polestim/errors.hpp"
#include "polestim/geometry.hpp"
#include "polestim/rng.hpp"
#include "polestim/vec3.hpp"

namespace polestim {

/// One in-plane pole-projection angle tied to the camera frame it was
/// measured in. alpha follows the projection-angle convention of
/// true_pole_projection_angle: atan2(w.i, -w.j).
struct in_plane_measurement {
    double alpha = 0.0;
    camera_frame frame;
    double weight = 1.0;
};

struct pole_estimate {
    vec3 omega_hat{0, 0, 1};
    double residual_rms = 0.0;
    int n_measurements = 0;
    /// set when the design matrix had rank 2 under the inhomogeneous solver
    /// and the minimum-norm solution was taken
    bool minimum_norm = false;
};

enum class triangulation_solver { homogeneous, inhomogeneous };

/// Angle between two camera boresights.
inline double boresight_displacement(const camera_frame& f1, const camera_frame& f2) {
    return std::acos(std::clamp(dot(f1.k_axis, f2.k_axis), -1.0, 1.0));
}

/// Angle between estimated and true pole. With fold_ambiguity the inherent
/// global sign ambiguity is credited: min(eps, pi - eps).
inline double pole_error(const vec3& omega_hat, const vec3& omega_true,
                         bool fold_ambiguity = false) {
    if (std::abs(norm(omega_hat) - 1.0) > 1e-6 || std::abs(norm(omega_true) - 1.0) > 1e-6)
        throw config_error("pole_error: inputs must be unit vectors");
    const double eps = std::acos(std::clamp(dot(omega_hat, omega_true), -1.0, 1.0));
    return fold_ambiguity ? std::min(eps, pi - eps) : eps;
}

namespace detail {

/// Unit in-plane direction the measurement claims for the projected pole,
/// expressed in world coordinates.
inline vec3 implied_projection(const in_plane_measurement& m) {
    return m.frame.i_axis * std::sin(m.alpha) - m.frame.j_axis * std::cos(m.alpha);
}

inline void validate_measurements(const std::vector<in_plane_measurement>& ms) {
    if (ms.size() < 2) throw config_error("triangulate: need at least 2 measurements");
    for (const auto& m : ms) {
        if (!m.frame.orthonormal()) throw config_error("triangulate: non-orthonormal camera frame");
        if (!(m.weight > 0.0) || !std::isfinite(m.weight))
            throw config_error("triangulate: weight must be finite and positive");
        if (!std::isfinite(m.alpha)) throw config_error("triangulate: non-finite angle");
    }
}

}  // namespace detail

/// Least-squares pole direction from >= 2 projection-angle measurements.
///
/// The default solver stacks the homogeneous rows
///   sqrt(w_j) * (cos(a_j) i_j + sin(a_j) j_j)^T
/// which the true pole annihilates exactly for any out-of-plane component,
/// and takes the null-space direction (smallest eigenvector of M^T M). The
/// inhomogeneous variant solves [i^T; j^T] w = [sin a; -cos a], which
/// implicitly treats every in-plane projection as unit length and is biased
/// whenever the pole leaves the image planes (see ledger); it is kept as a
/// cross-check.
inline pole_estimate triangulate(const std::vector<in_plane_measurement>& measurements,
                                 triangulation_solver solver = triangulation_solver::homogeneous) {
    detail::validate_measurements(measurements);
    const int rows = static_cast<int>(2 * measurements.size());
    constexpr double rank_tol = 1e-10;

    Eigen::Vector3d w;
    bool minimum_norm = false;
    if (solver == triangulation_solver::homogeneous) {
        // one scalar constraint per measurement: the pole is orthogonal to
        // the in-plane direction perpendicular to the projected pole
        Eigen::MatrixXd m(static_cast<int>(measurements.size()), 3);
        int r = 0;
        for (const auto& meas : measurements) {
            const double sw = std::sqrt(meas.weight);
            const double c = std::cos(meas.alpha), s = std::sin(meas.alpha);
            const vec3 row = (meas.frame.i_axis * c + meas.frame.j_axis * s) * sw;
            m.row(r++) << row.x, row.y, row.z;
        }
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv(1) <= rank_tol * sv(0))
            throw degenerate_error("triangulate: unobservable geometry (rank < 2)");
        w = svd.matrixV().col(2);
    } else {
        Eigen::MatrixXd a(rows, 3);
        Eigen::VectorXd b(rows);
        int r = 0;
        for (const auto& meas : measurements) {
            const double sw = std::sqrt(meas.weight);
            a.row(r) << meas.frame.i_axis.x, meas.frame.i_axis.y, meas.frame.i_axis.z;
            a.row(r) *= sw;
            b(r++) = sw * std::sin(meas.alpha);
            a.row(r) << meas.frame.j_axis.x, meas.frame.j_axis.y, meas.frame.j_axis.z;
            a.row(r) *= sw;
            b(r++) = -sw * std::cos(meas.alpha);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv(1) <= rank_tol * sv(0))
            throw degenerate_error("triangulate: unobservable geometry (rank < 2)");
        if (sv(2) <= rank_tol * sv(0)) {
            minimum_norm = true;  // rank-2: SVD solve below returns the minimum-norm solution
            svd.setThreshold(rank_tol);
        }
        w = svd.solve(b);
    }

    const double nw = w.norm();
    if (!(nw > 0.0)) throw degenerate_error("triangulate: zero-norm solution");
    vec3 omega{w(0) / nw, w(1) / nw, w(2) / nw};
    if (dot(omega, detail::implied_projection(measurements.front())) < 0.0) omega = -omega;

    double ss = 0.0;
    for (const auto& meas : measurements) {
        const double ri = std::sin(meas.alpha) - dot(omega, meas.frame.i_axis);
        const double rj = -std::cos(meas.alpha) - dot(omega, meas.frame.j_axis);
        ss += ri * ri + rj * rj;
    }

    pole_estimate est;
    est.omega_hat = omega;
    est.residual_rms = std::sqrt(ss / rows);
    est.n_measurements = static_cast<int>(measurements.size());
    est.minimum_norm = minimum_norm;
    return est;
}

/// Camera frame with boresight uniform on the sphere and uniform in-plane
/// roll. Draw order: boresight (2 uniforms), then roll (1 uniform).
inline camera_frame sample_random_frame(rng_stream& rng) {
    const vec3 k = rng.unit_sphere();
    vec3 h{1, 0, 0};
    const double ax = std::abs(k.x), ay = std::abs(k.y), az = std::abs(k.z);
    if (ay <= ax && ay <= az) h = {0, 1, 0};
    if (az <= ax && az < ay) h = {0, 0, 1};
    const vec3 i0 = normalized(cross(h, k));
    const vec3 j0 = cross(k, i0);
    const double roll = 2.0 * pi * rng.uniform();
    camera_frame f;
    f.k_axis = k;
    f.i_axis = i0 * std::cos(roll) + j0 * std::sin(roll);
    f.j_axis = cross(k, f.i_axis);
    return f;
}

/// Zero-mean normal truncated at +/- 3 sigma. sigma = 0 returns exactly 0.
inline double sample_angle_noise(rng_stream& rng, double sigma) {
    if (!(sigma >= 0.0)) throw config_error("sample_angle_noise: sigma must be >= 0");
    return rng.truncated_normal(sigma);
}

}  // namespace polestim
