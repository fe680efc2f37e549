#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "polestim/errors.hpp"
#include "polestim/image.hpp"
#include "polestim/render.hpp"
#include "polestim/spectral.hpp"

namespace polestim {

enum class registration_mode { none, known_center, brightness_centroid };

inline std::string to_string(registration_mode mode) {
    switch (mode) {
        case registration_mode::none: return "none";
        case registration_mode::known_center: return "known_center";
        default: return "brightness_centroid";
    }
}

/// Co-added silhouette stack: per-pixel count of contributing frames.
struct stack_image {
    int_image pixels{0};
    int frame_count = 0;
    registration_mode mode = registration_mode::none;
    std::vector<double> longitudes;  // per-frame view longitude, radians
    double latitude = 0;
    double sun_phase = 0;

    void validate() const {
        for (const auto p : pixels.data)
            if (p < 0 || p > frame_count)
                throw degenerate_error("stack_image: pixel count outside [0, M]");
    }
};

/// Circular translation: out(m,n) = in((m - t_v) mod N, (n - t_u) mod N).
template <typename T>
image<T> circular_shift(const image<T>& img, int t_u, int t_v) {
    const int n = img.n;
    image<T> out(n);
    const auto wrap = [n](int i) { return ((i % n) + n) % n; };
    for (int m = 0; m < n; ++m)
        for (int col = 0; col < n; ++col) out(m, col) = img(wrap(m - t_v), wrap(col - t_u));
    return out;
}

/// Register frames to the image center pixel by integer circular shifts.
/// known_center uses the projected body center carried in the frame
/// metadata; brightness_centroid recomputes the centroid per frame.
inline std::vector<silhouette_image> register_frames(const std::vector<silhouette_image>& frames,
                                                     registration_mode mode) {
    if (frames.empty()) throw config_error("register_frames: no frames");
    const int n = frames.front().resolution();
    for (const auto& f : frames)
        if (f.resolution() != n) throw config_error("register_frames: frame size mismatch");
    if (mode == registration_mode::none) return frames;

    const double target = static_cast<double>(center_index(n));
    std::vector<silhouette_image> out;
    out.reserve(frames.size());
    for (size_t k = 0; k < frames.size(); ++k) {
        const auto& f = frames[k];
        double cu, cv;
        if (mode == registration_mode::known_center) {
            cu = f.center_u;
            cv = f.center_v;
        } else {
            try {
                const image_point c = brightness_centroid(f.pixels);
                cu = c.u;
                cv = c.v;
            } catch (const degenerate_error&) {
                throw degenerate_error("register_frames: empty silhouette in frame " +
                                       std::to_string(k));
            }
        }
        const int t_u = static_cast<int>(std::lround(target - cu));
        const int t_v = static_cast<int>(std::lround(target - cv));
        silhouette_image shifted = f;
        shifted.pixels = circular_shift(f.pixels, t_u, t_v);
        shifted.center_u = cu + t_u;
        shifted.center_v = cv + t_v;
        out.push_back(std::move(shifted));
    }
    return out;
}

/// Pixelwise integer sum of boolean frames. A mode other than none first
/// registers the frames, so the recorded mode always reflects the pixels.
inline stack_image co_add(const std::vector<silhouette_image>& frames,
                          registration_mode mode = registration_mode::none) {
    if (frames.empty()) throw config_error("co_add: no frames");
    const std::vector<silhouette_image>& input =
        mode == registration_mode::none ? frames : register_frames(frames, mode);
    const int n = input.front().resolution();
    stack_image stack;
    stack.pixels = int_image(n);
    stack.frame_count = static_cast<int>(input.size());
    stack.mode = mode;
    stack.latitude = input.front().latitude;
    stack.sun_phase = input.front().sun_phase;
    for (const auto& f : input) {
        if (f.resolution() != n) throw config_error("co_add: frame size mismatch");
        stack.longitudes.push_back(f.longitude);
        for (size_t i = 0; i < f.pixels.data.size(); ++i)
            stack.pixels.data[i] += f.pixels.data[i] ? 1 : 0;
    }
    return stack;
}

/// Diagnostic split about a mirror axis through the image center at
/// `axis_angle`: rotate the axis to vertical, take the pixelwise min with
/// the vertical reflection as the symmetric part, rotate both parts back.
/// The residual is original minus the rotated-back symmetric part, so
/// recomposition is bitwise; nearest-neighbor aliasing can leave isolated
/// negative residual pixels for non-grid axis angles.
inline std::pair<int_image, int_image> symmetric_decomposition(const int_image& stack,
                                                               double axis_angle) {
    const int_image rotated = rotate_image_nn(stack, axis_angle);
    const int_image mirrored = reflect_vertical(rotated);
    int_image symmetric(stack.n);
    for (size_t i = 0; i < rotated.data.size(); ++i)
        symmetric.data[i] = std::min(rotated.data[i], mirrored.data[i]);
    int_image sym_back = rotate_image_nn(symmetric, -axis_angle);
    int_image residual(stack.n);
    for (size_t i = 0; i < residual.data.size(); ++i)
        residual.data[i] = stack.data[i] - sym_back.data[i];
    return {std::move(sym_back), std::move(residual)};
}

}  // namespace polestim
