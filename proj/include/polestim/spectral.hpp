#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "polestim/errors.hpp"
#include "polestim/image.hpp"
#include "polestim/vec3.hpp"

namespace polestim {

namespace detail {

/// FFTW plan creation is not thread-safe; execution of a created plan is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Round-half-down nearest-neighbor index: 0.5 -> 0, 1.5 -> 1. Keeps the
/// zero rotation a bitwise identity and the 90 degree rotation an exact
/// grid permutation on odd sizes.
inline int nn_index(double x) { return static_cast<int>(std::ceil(x - 0.5)); }

}  // namespace detail

/// Unnormalized forward DFT of a real image, DC-centered: quadrants swapped
/// so zero frequency sits at the center pixel (floor(N/2), floor(N/2)).
/// Returns (real part, imaginary part).
inline std::pair<real_image, real_image> dft_centered(const real_image& img) {
    const int n = img.n;
    if (n <= 0) throw config_error("dft_centered: empty image");
    for (const double p : img.data)
        if (!std::isfinite(p)) throw config_error("dft_centered: non-finite input");

    fftw_complex* in;
    fftw_complex* out;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        in = fftw_alloc_complex(static_cast<size_t>(n) * n);
        out = fftw_alloc_complex(static_cast<size_t>(n) * n);
        plan = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (size_t i = 0; i < static_cast<size_t>(n) * n; ++i) {
        in[i][0] = img.data[i];
        in[i][1] = 0.0;
    }
    fftw_execute(plan);

    const int c = center_index(n);
    std::pair<real_image, real_image> f{real_image(n), real_image(n)};
    for (int m = 0; m < n; ++m)
        for (int col = 0; col < n; ++col) {
            const int src_m = (m - c + n) % n;
            const int src_n = (col - c + n) % n;
            const fftw_complex& v = out[static_cast<size_t>(src_m) * n + src_n];
            f.first(m, col) = v[0];
            f.second(m, col) = v[1];
        }
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    return f;
}

/// DFT amplitude spectrum |F|, DC-centered.
inline real_image amplitude_spectrum(const real_image& img) {
    const auto [re, im] = dft_centered(img);
    real_image amp(img.n);
    for (size_t i = 0; i < amp.data.size(); ++i) amp.data[i] = std::hypot(re.data[i], im.data[i]);
    return amp;
}

/// Keep pixels with radial frequency distance strictly below tau, zero the
/// rest. Distances are measured from the DC center pixel.
inline real_image low_pass_crop(const real_image& spectrum, double tau) {
    if (!(tau >= 0.0)) throw config_error("low_pass_crop: tau must be >= 0");
    const int n = spectrum.n;
    const int c = center_index(n);
    real_image out(n);
    for (int m = 0; m < n; ++m)
        for (int col = 0; col < n; ++col) {
            const double r = std::hypot(static_cast<double>(m - c), static_cast<double>(col - c));
            out(m, col) = r < tau ? spectrum(m, col) : 0.0;
        }
    return out;
}

/// E = log(1 + A^2), natural log; strictly monotone in A >= 0.
inline real_image log_compress(const real_image& amplitude) {
    real_image out(amplitude.n);
    for (size_t i = 0; i < amplitude.data.size(); ++i) {
        const double a = amplitude.data[i];
        if (a < 0.0) throw config_error("log_compress: negative amplitude");
        out.data[i] = std::log1p(a * a);
    }
    return out;
}

enum class interpolation { nearest, bilinear };

/// Rotate the image content by theta about the DC center pixel. Output
/// pixel (m,n) samples the input at the inverse-rotated coordinate;
/// out-of-bounds samples are zero. Angle is reduced mod 2 pi first.
template <typename T>
image<T> rotate_image_nn(const image<T>& img, double theta,
                         interpolation interp = interpolation::nearest) {
    const int n = img.n;
    const int c = center_index(n);
    const double a = wrap_angle(theta);
    if (a == 0.0) return img;
    const double ca = std::cos(a), sa = std::sin(a);
    image<T> out(n);
    for (int m = 0; m < n; ++m)
        for (int col = 0; col < n; ++col) {
            const double u = col - c, v = m - c;
            const double su = ca * u + sa * v;  // inverse rotation R_{-theta}
            const double sv = -sa * u + ca * v;
            if (interp == interpolation::nearest) {
                const int sn = detail::nn_index(su) + c;
                const int sm = detail::nn_index(sv) + c;
                out(m, col) = img.in_bounds(sm, sn) ? img(sm, sn) : T{};
            } else {
                const double x = su + c, y = sv + c;
                const int x0 = static_cast<int>(std::floor(x));
                const int y0 = static_cast<int>(std::floor(y));
                const double fx = x - x0, fy = y - y0;
                auto at = [&](int mm, int nn) -> double {
                    return img.in_bounds(mm, nn) ? static_cast<double>(img(mm, nn)) : 0.0;
                };
                const double val = (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) +
                                   fy * ((1 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1));
                out(m, col) = static_cast<T>(val);
            }
        }
    return out;
}

/// Reflection about the vertical axis: column reversal, I(m, N-1-n).
template <typename T>
image<T> reflect_vertical(const image<T>& img) {
    image<T> out(img.n);
    for (int m = 0; m < img.n; ++m)
        for (int col = 0; col < img.n; ++col) out(m, col) = img(m, img.n - 1 - col);
    return out;
}

/// Pearson correlation over all pixels, means removed.
template <typename T>
double correlation_coefficient(const image<T>& a, const image<T>& b) {
    if (a.n != b.n || a.n == 0) throw config_error("correlation_coefficient: size mismatch");
    const size_t total = a.data.size();
    double ma = 0, mb = 0;
    for (size_t i = 0; i < total; ++i) {
        ma += static_cast<double>(a.data[i]);
        mb += static_cast<double>(b.data[i]);
    }
    ma /= static_cast<double>(total);
    mb /= static_cast<double>(total);
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < total; ++i) {
        const double da = static_cast<double>(a.data[i]) - ma;
        const double db = static_cast<double>(b.data[i]) - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        throw degenerate_error("correlation_coefficient: constant image");
    return sab / std::sqrt(saa * sbb);
}

/// Vertical-symmetry score psi(I) = correlation of the image with its
/// vertical reflection.
template <typename T>
double symmetry_score(const image<T>& img) {
    return correlation_coefficient(img, reflect_vertical(img));
}

/// Sorted query angles in [0, pi/2); the spectrum's mirror symmetry has
/// period pi/2, so a quarter turn covers all hypotheses.
struct query_grid {
    std::vector<double> angles;

    void validate() const {
        if (angles.empty()) throw config_error("query_grid: empty");
        double prev = -1.0;
        for (const double a : angles) {
            if (!(a >= 0.0 && a < pi / 2)) throw config_error("query_grid: angle out of [0, pi/2)");
            if (a <= prev) throw config_error("query_grid: angles must be strictly increasing");
            prev = a;
        }
    }
};

inline query_grid uniform_query_grid(double step) {
    if (!(step > 0.0 && step <= pi / 2)) throw config_error("uniform_query_grid: bad step");
    query_grid g;
    for (double a = 0.0; a < pi / 2 - 1e-12; a += step) g.angles.push_back(a);
    return g;
}

struct symmetry_curve {
    std::vector<std::pair<double, double>> points;  // (theta, psi)
};

/// Four-fold pole-projection hypotheses {alpha + k pi/2} in [0, 2 pi).
inline std::array<double, 4> expand_pole_hypotheses(double alpha_mod_quarter) {
    std::array<double, 4> out;
    for (int k = 0; k < 4; ++k) out[k] = wrap_angle(alpha_mod_quarter + k * pi / 2);
    return out;
}

/// Hypothesis with minimal circular distance to the hint; distance ties go
/// to the smallest angle value.
inline double disambiguate(const std::array<double, 4>& hypotheses, double hint) {
    if (!std::isfinite(hint)) throw config_error("disambiguate: non-finite hint");
    double best = hypotheses[0], best_d = 1e30;
    std::array<double, 4> sorted = hypotheses;
    std::sort(sorted.begin(), sorted.end());
    for (const double h : sorted) {
        double d = std::abs(wrap_angle(h) - wrap_angle(hint));
        d = std::min(d, 2 * pi - d);
        if (d < best_d - 1e-12) {
            best_d = d;
            best = h;
        }
    }
    return best;
}

}  // namespace polestim
