#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "polestim/estimator.hpp"
#include "polestim/rng.hpp"
#include "polestim/spectral.hpp"
#include "polestim/stack.hpp"

using namespace polestim;

namespace {

real_image random_image(int n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    rng_stream g(seed, 1);
    real_image img(n);
    for (auto& p : img.data) p = lo + (hi - lo) * g.uniform();
    return img;
}

/// Naive O(N^4) double-sum DFT, DC-centered, independent of the FFT path.
void naive_dft(const real_image& img, real_image& re, real_image& im) {
    const int n = img.n;
    const int c = center_index(n);
    re = real_image(n);
    im = real_image(n);
    for (int m = 0; m < n; ++m)
        for (int col = 0; col < n; ++col) {
            const int x = (m - c + n) % n;   // row frequency
            const int y = (col - c + n) % n; // column frequency
            std::complex<double> acc(0, 0);
            for (int mm = 0; mm < n; ++mm)
                for (int nn = 0; nn < n; ++nn) {
                    const double phase =
                        -2.0 * pi * (static_cast<double>(x) * mm / n + static_cast<double>(y) * nn / n);
                    acc += img(mm, nn) * std::complex<double>(std::cos(phase), std::sin(phase));
                }
            re(m, col) = acc.real();
            im(m, col) = acc.imag();
        }
}

silhouette_image frame_from(const bool_image& px) {
    silhouette_image f;
    f.pixels = px;
    f.center_u = center_index(px.n);
    f.center_v = center_index(px.n);
    return f;
}

/// Filled ellipse, semi-axes (a, b) in pixels, major axis along the pole
/// projection direction (sin gamma, -cos gamma), centered on the center pixel.
bool_image ellipse_image(int n, double gamma, double a, double b) {
    bool_image img(n);
    const int c = center_index(n);
    const double du = std::sin(gamma), dv = -std::cos(gamma);
    for (int m = 0; m < n; ++m)
        for (int col = 0; col < n; ++col) {
            const double u = col - c, v = m - c;
            const double s = u * du + v * dv;
            const double t = u * -dv + v * du;
            if ((s / a) * (s / a) + (t / b) * (t / b) <= 1.0) img(m, col) = 1;
        }
    return img;
}

}  // namespace

TEST(Dft, MatchesNaiveOracle) {
    for (const int n : {4, 5, 8}) {
        const real_image img = random_image(n, 100 + n);
        real_image ore, oim;
        naive_dft(img, ore, oim);
        const auto [re, im] = dft_centered(img);
        const real_image amp = amplitude_spectrum(img);
        for (int m = 0; m < n; ++m)
            for (int col = 0; col < n; ++col) {
                EXPECT_NEAR(re(m, col), ore(m, col), 1e-9) << n << " " << m << " " << col;
                EXPECT_NEAR(im(m, col), oim(m, col), 1e-9);
                EXPECT_NEAR(amp(m, col), std::hypot(ore(m, col), oim(m, col)), 1e-9);
            }
    }
}

TEST(Dft, ConstantImageIsDcOnly) {
    const int n = 8;
    real_image img(n, 3.7);
    const real_image amp = amplitude_spectrum(img);
    const int c = center_index(n);
    EXPECT_NEAR(amp(c, c), 3.7 * n * n, 1e-9);
    for (int m = 0; m < n; ++m)
        for (int col = 0; col < n; ++col)
            if (m != c || col != c) {
                EXPECT_LT(amp(m, col), 1e-9);
            }
}

TEST(Dft, ImpulseHasFlatSpectrum) {
    real_image img(8);
    img(2, 5) = 1.0;
    const real_image amp = amplitude_spectrum(img);
    for (const double a : amp.data) EXPECT_NEAR(a, 1.0, 1e-9);
}

TEST(Dft, ParsevalEnergy) {
    const real_image img = random_image(16, 7, -1.0, 2.0);
    const real_image amp = amplitude_spectrum(img);
    double spatial = 0, spectral = 0;
    for (const double p : img.data) spatial += p * p;
    for (const double a : amp.data) spectral += a * a;
    EXPECT_NEAR(spectral, 16.0 * 16.0 * spatial, 1e-6 * spectral);
}

TEST(Dft, AmplitudeInvariantUnderCircularShift) {
    const real_image img = random_image(16, 8);
    const real_image base = amplitude_spectrum(img);
    const int shifts[][2] = {{3, -2}, {16, 16}, {-5, 7}, {1, 0}, {9, 9}};
    double max_amp = 0;
    for (const double a : base.data) max_amp = std::max(max_amp, a);
    for (const auto& s : shifts) {
        const real_image shifted = circular_shift(img, s[0], s[1]);
        const real_image amp = amplitude_spectrum(shifted);
        for (size_t i = 0; i < amp.data.size(); ++i)
            EXPECT_NEAR(amp.data[i], base.data[i], 1e-9 * max_amp);
    }
}

TEST(Dft, LinearityOnComplexSpectrum) {
    const int n = 8;
    const real_image i1 = random_image(n, 21), i2 = random_image(n, 22);
    const double a = 2.5, b = -1.25;
    real_image combo(n);
    for (size_t i = 0; i < combo.data.size(); ++i) combo.data[i] = a * i1.data[i] + b * i2.data[i];
    const auto [r1, m1] = dft_centered(i1);
    const auto [r2, m2] = dft_centered(i2);
    const auto [rc, mc] = dft_centered(combo);
    for (size_t i = 0; i < rc.data.size(); ++i) {
        EXPECT_NEAR(rc.data[i], a * r1.data[i] + b * r2.data[i], 1e-9);
        EXPECT_NEAR(mc.data[i], a * m1.data[i] + b * m2.data[i], 1e-9);
    }
}

TEST(Dft, ConjugateAndCentralSymmetry) {
    for (const int n : {9, 8}) {
        const real_image img = random_image(n, 31 + n);
        const auto [re, im] = dft_centered(img);
        const real_image amp = amplitude_spectrum(img);
        const int c = center_index(n);
        double max_amp = 0;
        for (const double a : amp.data) max_amp = std::max(max_amp, a);
        for (int m = 0; m < n; ++m)
            for (int col = 0; col < n; ++col) {
                const int mm = 2 * c - m, mc = 2 * c - col;
                if (mm < 0 || mm >= n || mc < 0 || mc >= n) continue;  // Nyquist row/col, even N
                EXPECT_NEAR(re(m, col), re(mm, mc), 1e-9 * std::max(1.0, max_amp));
                EXPECT_NEAR(im(m, col), -im(mm, mc), 1e-9 * std::max(1.0, max_amp));
                EXPECT_NEAR(amp(m, col), amp(mm, mc), 1e-6 * std::max(1.0, max_amp));
            }
    }
}

TEST(LowPass, CropExamples) {
    const int n = 8;
    real_image spec(n, 7.0);

    const real_image zero = low_pass_crop(spec, 0.0);
    for (const double p : zero.data) EXPECT_EQ(p, 0.0);

    const real_image full = low_pass_crop(spec, static_cast<double>(n));
    EXPECT_EQ(full, spec);

    // Euclidean strict <: tau=1.5 keeps center, 4 edge neighbors, and the 4
    // diagonals at sqrt(2) ~ 1.414; tau=1.2 keeps only center + 4; tau=1.0
    // excludes the distance-1 neighbors (strictness).
    auto survivors = [](const real_image& img) {
        int c = 0;
        for (const double p : img.data) c += p != 0.0 ? 1 : 0;
        return c;
    };
    EXPECT_EQ(survivors(low_pass_crop(spec, 1.5)), 9);
    EXPECT_EQ(survivors(low_pass_crop(spec, 1.2)), 5);
    EXPECT_EQ(survivors(low_pass_crop(spec, 1.0)), 1);
}

TEST(LogCompress, AnchorsAndMonotonicity) {
    real_image a(2);
    a.data = {0.0, std::sqrt(std::exp(1.0) - 1.0), 2.0, 0.5};
    const real_image e = log_compress(a);
    EXPECT_EQ(e.data[0], 0.0);
    EXPECT_NEAR(e.data[1], 1.0, 1e-12);
    rng_stream g(4, 0);
    for (int i = 0; i < 100; ++i) {
        const double x = 10.0 * g.uniform(), y = 10.0 * g.uniform();
        if (x == y) continue;
        real_image p(1), q(1);
        p.data = {std::min(x, y)};
        q.data = {std::max(x, y)};
        EXPECT_LT(log_compress(p).data[0], log_compress(q).data[0]);
    }
}

TEST(Rotate, IdentityAndFullTurnAreBitwise) {
    const real_image img = random_image(16, 55);
    EXPECT_EQ(rotate_image_nn(img, 0.0), img);
    EXPECT_EQ(rotate_image_nn(img, 2.0 * pi), img);
}

TEST(Rotate, QuarterTurnMatchesPermutationOracleOddN) {
    const int n = 9;
    const real_image img = random_image(n, 56);
    const real_image rot = rotate_image_nn(img, pi / 2);
    for (int m = 0; m < n; ++m)
        for (int col = 0; col < n; ++col) EXPECT_EQ(rot(m, col), img(n - 1 - col, m));
}

TEST(Rotate, BilinearKeepsConstantInterior) {
    real_image img(33, 2.5);
    const real_image rot = rotate_image_nn(img, 0.3, interpolation::bilinear);
    const int c = center_index(33);
    for (int m = c - 5; m <= c + 5; ++m)
        for (int col = c - 5; col <= c + 5; ++col) EXPECT_NEAR(rot(m, col), 2.5, 1e-12);
}

TEST(Reflect, ExamplesAndInvolution) {
    const real_image img = random_image(8, 57);
    EXPECT_EQ(reflect_vertical(reflect_vertical(img)), img);

    real_image single(8);
    single(3, 1) = 1.0;  // column 2 one-based
    const real_image refl = reflect_vertical(single);
    EXPECT_EQ(refl(3, 6), 1.0);  // column 7 one-based
    EXPECT_EQ(refl(3, 1), 0.0);

    real_image sym(8);
    for (int m = 0; m < 8; ++m)
        for (int col = 0; col < 8; ++col) sym(m, col) = (m + 1) * std::min(col, 7 - col);
    EXPECT_EQ(reflect_vertical(sym), sym);
}

TEST(Correlation, AnchorsAndHandCase) {
    const real_image a = random_image(6, 58);
    EXPECT_NEAR(correlation_coefficient(a, a), 1.0, 1e-12);
    real_image neg(6);
    for (size_t i = 0; i < neg.data.size(); ++i) neg.data[i] = -a.data[i];
    EXPECT_NEAR(correlation_coefficient(a, neg), -1.0, 1e-12);

    real_image p(2), q(2);
    p.data = {0, 1, 2, 3};
    q.data = {3, 2, 1, 0};
    EXPECT_NEAR(correlation_coefficient(p, q), -1.0, 1e-12);

    real_image flat(4, 1.0);
    EXPECT_THROW(correlation_coefficient(flat, random_image(4, 59)), degenerate_error);
}

TEST(SymmetryScore, AnchorsAndHandCase) {
    real_image sym(8);
    for (int m = 0; m < 8; ++m)
        for (int col = 0; col < 8; ++col) sym(m, col) = m + std::min(col, 7 - col);
    EXPECT_NEAR(symmetry_score(sym), 1.0, 1e-12);

    // Hand evaluation: I and its reflection share the multiset
    // {0,0,0,0,1,1,1,2,3}; sum I*R = 11, mean 8/9, so
    // chi = (11 - 64/9) / (16 - 64/9) = 35/80.
    real_image hand(3);
    hand.data = {1, 2, 0, 0, 1, 0, 3, 0, 1};
    EXPECT_NEAR(symmetry_score(hand), 35.0 / 80.0, 1e-12);

    real_image scaled(3);
    for (size_t i = 0; i < hand.data.size(); ++i) scaled.data[i] = 3.25 * hand.data[i];
    EXPECT_NEAR(symmetry_score(scaled), symmetry_score(hand), 1e-9);
}

TEST(SymmetryScore, AmplitudeInheritsVerticalSymmetry) {
    // Mirror a random half image so I(m, n) = I(m, N-1-n), then check the
    // spectrum. Odd N: the amplitude's mirror axis (the DC column) coincides
    // with the reflection axis (N-1)/2, so psi(A) = 1 exactly.
    const int n = 17;
    real_image img(n);
    rng_stream g(61, 0);
    for (int m = 0; m < n; ++m)
        for (int col = 0; col <= n / 2; ++col) {
            const double val = g.uniform();
            img(m, col) = val;
            img(m, n - 1 - col) = val;
        }
    EXPECT_NEAR(symmetry_score(img), 1.0, 1e-12);
    const real_image amp = amplitude_spectrum(img);
    EXPECT_NEAR(symmetry_score(amp), 1.0, 1e-6);

    // Even N: the DC column (N/2) sits half a pixel off the reflection axis,
    // so the reflected amplitude is the true mirror shifted by one bin. For
    // rough spectra this destroys the score outright; for smooth spectra
    // (the operating regime) the penalty is small. Both are documented here.
    const int ne = 16;
    real_image rough(ne);
    rng_stream gr(62, 0);
    for (int m = 0; m < ne; ++m)
        for (int col = 0; col < ne / 2; ++col) {
            const double val = gr.uniform();
            rough(m, col) = val;
            rough(m, ne - 1 - col) = val;
        }
    EXPECT_NEAR(symmetry_score(rough), 1.0, 1e-12);
    EXPECT_LT(symmetry_score(amplitude_spectrum(rough)), 0.5);

    const int ns = 64;
    real_image smooth(ns);
    const double c = center_index(ns);
    for (int m = 0; m < ns; ++m)
        for (int col = 0; col < ns; ++col) {
            const double du = col - (ns - 1) / 2.0, dv = m - c;
            smooth(m, col) = std::exp(-(du * du + dv * dv) / 4.0);
        }
    EXPECT_NEAR(symmetry_score(smooth), 1.0, 1e-12);
    EXPECT_GT(symmetry_score(amplitude_spectrum(smooth)), 0.99);
}

TEST(SymmetryScore, FourFoldOnLogPowerSpectrum) {
    const int n = 17;
    real_image img(n);
    rng_stream g(62, 0);
    for (int m = 0; m < n; ++m)
        for (int col = 0; col <= n / 2; ++col) {
            const double val = g.uniform();
            img(m, col) = val;
            img(m, n - 1 - col) = val;
        }
    const real_image e = log_compress(amplitude_spectrum(img));
    const double psi0 = symmetry_score(e);
    const double psi90 = symmetry_score(rotate_image_nn(e, pi / 2));
    EXPECT_NEAR(psi0, psi90, 1e-3);
}

TEST(Hypotheses, ExpandAndSpacing) {
    const auto h = expand_pole_hypotheses(deg2rad(20));
    EXPECT_NEAR(rad2deg(h[0]), 20, 1e-12);
    EXPECT_NEAR(rad2deg(h[1]), 110, 1e-12);
    EXPECT_NEAR(rad2deg(h[2]), 200, 1e-12);
    EXPECT_NEAR(rad2deg(h[3]), 290, 1e-12);

    const auto z = expand_pole_hypotheses(0.0);
    EXPECT_NEAR(rad2deg(z[0]), 0, 1e-12);
    EXPECT_NEAR(rad2deg(z[1]), 90, 1e-12);
    EXPECT_NEAR(rad2deg(z[2]), 180, 1e-12);
    EXPECT_NEAR(rad2deg(z[3]), 270, 1e-12);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(h[k + 1] - h[k], pi / 2, 1e-12);
}

TEST(Hypotheses, DisambiguateByHint) {
    const auto h = expand_pole_hypotheses(deg2rad(20));
    EXPECT_NEAR(rad2deg(disambiguate(h, deg2rad(95))), 110, 1e-9);
    EXPECT_NEAR(rad2deg(disambiguate(h, deg2rad(65))), 20, 1e-9);  // tie -> smallest
    EXPECT_NEAR(rad2deg(disambiguate(h, deg2rad(20))), 20, 1e-9);
    EXPECT_NEAR(rad2deg(disambiguate(h, deg2rad(350))), 20, 1e-9);  // wraparound distance
}

TEST(QueryGrid, UniformGridAndValidation) {
    const query_grid g = uniform_query_grid(deg2rad(1.0));
    EXPECT_EQ(g.angles.size(), 90u);
    EXPECT_EQ(g.angles.front(), 0.0);
    EXPECT_LT(g.angles.back(), pi / 2);
    g.validate();

    query_grid bad;
    EXPECT_THROW(bad.validate(), config_error);
    bad.angles = {0.1, 0.1};
    EXPECT_THROW(bad.validate(), config_error);
    bad.angles = {-0.1};
    EXPECT_THROW(bad.validate(), config_error);
    bad.angles = {pi / 2};
    EXPECT_THROW(bad.validate(), config_error);
}

TEST(Estimator, EllipseCalibrationPinsConvention) {
    // Ground truth built from the geometry path: a camera rolled by gamma
    // sees the +z pole project at angle gamma; an ellipse elongated along
    // that projection is the ideal symmetric stack. The frequency path needs
    // operating resolution (flat psi plateaus at coarse N), hence N=256.
    const query_grid grid = uniform_query_grid(deg2rad(1.0));
    for (const double gamma_deg : {0.0, 20.0, 50.0, 75.0}) {
        camera_frame frame;
        const double gamma = deg2rad(gamma_deg);
        frame.k_axis = {-1, 0, 0};
        frame.i_axis = vec3{0, 1, 0} * std::cos(gamma) + vec3{0, 0, 1} * std::sin(gamma);
        frame.j_axis = cross(frame.k_axis, frame.i_axis);
        const double alpha_true = true_pole_projection_angle({0, 0, 1}, frame);
        ASSERT_NEAR(std::fmod(rad2deg(alpha_true), 90.0), std::fmod(gamma_deg, 90.0), 1e-9);

        auto check = [&](int n, double a, double b, double tau, estimator_domain domain) {
            const bool_image px = ellipse_image(n, alpha_true, a, b);
            const std::vector<silhouette_image> frames = {frame_from(px), frame_from(px)};
            const in_plane_estimate est = estimate_in_plane_angle(frames, tau, grid, domain);
            double diff = std::abs(rad2deg(est.alpha_hat) - std::fmod(gamma_deg, 90.0));
            diff = std::min(diff, 90.0 - diff);
            EXPECT_LE(diff, 1.0 + 1e-9)
                << "gamma=" << gamma_deg << " domain="
                << (domain == estimator_domain::frequency ? "freq" : "space");
        };
        check(256, 80, 40, 64.0, estimator_domain::frequency);
        check(64, 20, 10, 16.0, estimator_domain::space);
    }
}

TEST(Estimator, TranslationInvarianceCommonAndPerFrame) {
    // Common shifts cancel exactly in the amplitude spectrum (shift theorem).
    // Per-frame shifts are undone by centroid registration: interior content
    // moves its centroid by exactly the shift, so the stack is bitwise
    // restored. Unregistered per-frame shifts modulate the stack spectrum
    // with an interference pattern and do move the argmax (see ledger).
    const int n = 128;
    const query_grid grid = uniform_query_grid(deg2rad(1.0));
    std::vector<silhouette_image> frames;
    for (int k = 0; k < 24; ++k)
        frames.push_back(frame_from(ellipse_image(n, deg2rad(20), 30, 12 + k % 8)));
    const auto registered = register_frames(frames, registration_mode::brightness_centroid);
    const in_plane_estimate ref = estimate_in_plane_angle(registered, 32.0, grid);

    rng_stream g(63, 0);
    std::vector<silhouette_image> common = frames, per_frame = frames;
    const int cu = static_cast<int>(g.uniform() * 32) - 16, cv = static_cast<int>(g.uniform() * 32) - 16;
    for (auto& f : common) f.pixels = circular_shift(f.pixels, cu, cv);
    for (auto& f : per_frame) {
        const int tu = static_cast<int>(g.uniform() * 32) - 16;
        const int tv = static_cast<int>(g.uniform() * 32) - 16;
        f.pixels = circular_shift(f.pixels, tu, tv);
    }
    const auto reg_common = register_frames(common, registration_mode::brightness_centroid);
    const auto reg_per = register_frames(per_frame, registration_mode::brightness_centroid);
    EXPECT_EQ(estimate_in_plane_angle(reg_common, 32.0, grid).alpha_hat, ref.alpha_hat);
    EXPECT_EQ(estimate_in_plane_angle(reg_per, 32.0, grid).alpha_hat, ref.alpha_hat);
    // unregistered common shift: exact by the shift theorem alone
    EXPECT_EQ(estimate_in_plane_angle(common, 32.0, grid).alpha_hat,
              estimate_in_plane_angle(frames, 32.0, grid).alpha_hat);
}

TEST(Estimator, DegenerateStackIsAnError) {
    std::vector<silhouette_image> frames = {frame_from(bool_image(16)), frame_from(bool_image(16))};
    EXPECT_THROW(estimate_in_plane_angle(frames, 4.0, uniform_query_grid(deg2rad(5.0))),
                 degenerate_error);
    EXPECT_THROW(estimate_in_plane_angle(std::vector<silhouette_image>{frame_from(bool_image(16))},
                                         4.0, uniform_query_grid(deg2rad(5.0))),
                 config_error);
}
