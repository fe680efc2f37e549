#pragma once

// On-disk formats: binary PGM (P5) rasters, "FPES" float grids, CSV tables,
// JSON sidecars. Angles live in radians in memory; every degree-valued file
// column or JSON field carries a _deg suffix.

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polestim/errors.hpp"
#include "polestim/geometry.hpp"
#include "polestim/image.hpp"
#include "polestim/montecarlo.hpp"
#include "polestim/render.hpp"
#include "polestim/spectral.hpp"
#include "polestim/stack.hpp"
#include "polestim/triangulation.hpp"

namespace polestim {

namespace detail {

inline std::ofstream open_output(const std::string& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw io_error("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_input(const std::string& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw io_error("cannot open: " + path);
    return in;
}

/// Next ASCII integer token of a PNM header; '#' starts a comment running to
/// end of line.
inline long pnm_token(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) throw io_error("malformed PGM header: " + path);
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1000000) throw io_error("implausible PGM header field: " + path);
        c = in.get();
    }
    if (c != EOF) in.unget();
    return value;
}

/// Shortest decimal form that parses back to the same double.
inline std::string compact_double(double x) {
    char buf[40];
    if (x == std::floor(x) && std::abs(x) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", x);
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    return buf;
}

inline void expect_header(std::istream& in, const std::string& expected, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line != expected)
        throw io_error("expected header '" + expected + "' in " + path);
}

inline std::vector<double> csv_row(const std::string& line, size_t fields, const std::string& path) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        size_t used = 0;
        double v = 0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            throw io_error("non-numeric CSV cell '" + cell + "' in " + path);
        }
        if (used != cell.size()) throw io_error("trailing junk in CSV cell '" + cell + "' in " + path);
        out.push_back(v);
    }
    if (out.size() != fields) throw io_error("wrong CSV column count in " + path);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PGM (P5). Silhouettes are 8-bit 0/255; stacks use maxval = frame count with
// the PNM sample-width rule (one byte up to maxval 255, two big-endian bytes
// above).

inline void write_silhouette_pgm(const std::string& path, const bool_image& img) {
    if (img.n <= 0) throw config_error("write_silhouette_pgm: empty image");
    auto out = detail::open_output(path, true);
    out << "P5\n" << img.n << " " << img.n << "\n255\n";
    std::vector<std::uint8_t> bytes(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) bytes[i] = img.data[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("short write: " + path);
}

inline bool_image read_silhouette_pgm(const std::string& path) {
    auto in = detail::open_input(path, true);
    char m0 = 0, m1 = 0;
    in.get(m0).get(m1);
    if (m0 != 'P' || m1 != '5') throw io_error("not a P5 PGM: " + path);
    const long w = detail::pnm_token(in, path);
    const long h = detail::pnm_token(in, path);
    const long maxval = detail::pnm_token(in, path);
    in.get();  // single whitespace byte separating header and raster
    if (w != h || w < 1) throw io_error("non-square PGM: " + path);
    if (maxval != 255) throw io_error("silhouette PGM must have maxval 255: " + path);
    std::vector<std::uint8_t> bytes(static_cast<size_t>(w) * w);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw io_error("short read: " + path);
    bool_image img(static_cast<int>(w));
    for (size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] != 0 && bytes[i] != 255)
            throw io_error("silhouette PGM has a value other than 0/255: " + path);
        img.data[i] = bytes[i] ? 1 : 0;
    }
    return img;
}

inline void write_stack_pgm(const std::string& path, const int_image& img, int maxval) {
    if (img.n <= 0) throw config_error("write_stack_pgm: empty image");
    if (maxval < 1 || maxval > 65535) throw config_error("write_stack_pgm: maxval out of [1, 65535]");
    for (const auto p : img.data)
        if (p < 0 || p > maxval) throw config_error("write_stack_pgm: pixel outside [0, maxval]");
    auto out = detail::open_output(path, true);
    out << "P5\n" << img.n << " " << img.n << "\n" << maxval << "\n";
    if (maxval <= 255) {
        std::vector<std::uint8_t> bytes(img.data.size());
        for (size_t i = 0; i < img.data.size(); ++i) bytes[i] = static_cast<std::uint8_t>(img.data[i]);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    } else {
        std::vector<std::uint8_t> bytes(img.data.size() * 2);
        for (size_t i = 0; i < img.data.size(); ++i) {
            bytes[2 * i] = static_cast<std::uint8_t>(img.data[i] >> 8);  // MSB first per PNM
            bytes[2 * i + 1] = static_cast<std::uint8_t>(img.data[i] & 0xff);
        }
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }
    if (!out) throw io_error("short write: " + path);
}

inline std::pair<int_image, int> read_stack_pgm(const std::string& path) {
    auto in = detail::open_input(path, true);
    char m0 = 0, m1 = 0;
    in.get(m0).get(m1);
    if (m0 != 'P' || m1 != '5') throw io_error("not a P5 PGM: " + path);
    const long w = detail::pnm_token(in, path);
    const long h = detail::pnm_token(in, path);
    const long maxval = detail::pnm_token(in, path);
    in.get();
    if (w != h || w < 1) throw io_error("non-square PGM: " + path);
    if (maxval < 1 || maxval > 65535) throw io_error("PGM maxval out of range: " + path);
    const size_t count = static_cast<size_t>(w) * w;
    const size_t width = maxval <= 255 ? 1 : 2;
    std::vector<std::uint8_t> bytes(count * width);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw io_error("short read: " + path);
    int_image img(static_cast<int>(w));
    for (size_t i = 0; i < count; ++i) {
        const int v = width == 1 ? bytes[i] : (bytes[2 * i] << 8 | bytes[2 * i + 1]);
        if (v > maxval) throw io_error("PGM sample exceeds maxval: " + path);
        img.data[i] = v;
    }
    return {std::move(img), static_cast<int>(maxval)};
}

// ---------------------------------------------------------------------------
// "FPES" float grid: 4 magic bytes, N as little-endian int32, then N*N
// row-major little-endian float32 samples.

inline void write_float_grid(const std::string& path, const real_image& img) {
    if (img.n <= 0) throw config_error("write_float_grid: empty image");
    auto out = detail::open_output(path, true);
    out.write("FPES", 4);
    const std::int32_t n = img.n;
    std::array<std::uint8_t, 4> le{static_cast<std::uint8_t>(n & 0xff),
                                   static_cast<std::uint8_t>(n >> 8 & 0xff),
                                   static_cast<std::uint8_t>(n >> 16 & 0xff),
                                   static_cast<std::uint8_t>(n >> 24 & 0xff)};
    out.write(reinterpret_cast<const char*>(le.data()), 4);
    std::vector<float> samples(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) samples[i] = static_cast<float>(img.data[i]);
    static_assert(sizeof(float) == 4 && std::endian::native == std::endian::little,
                  "float grid writer assumes little-endian IEEE floats");
    out.write(reinterpret_cast<const char*>(samples.data()),
              static_cast<std::streamsize>(samples.size() * 4));
    if (!out) throw io_error("short write: " + path);
}

inline real_image read_float_grid(const std::string& path) {
    auto in = detail::open_input(path, true);
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string(magic, 4) != "FPES")
        throw io_error("not an FPES grid: " + path);
    std::array<std::uint8_t, 4> le{};
    in.read(reinterpret_cast<char*>(le.data()), 4);
    if (in.gcount() != 4) throw io_error("truncated FPES header: " + path);
    const std::int32_t n = le[0] | le[1] << 8 | le[2] << 16 | le[3] << 24;
    if (n < 1 || n > 1 << 16) throw io_error("implausible FPES size: " + path);
    std::vector<float> samples(static_cast<size_t>(n) * n);
    in.read(reinterpret_cast<char*>(samples.data()),
            static_cast<std::streamsize>(samples.size() * 4));
    if (in.gcount() != static_cast<std::streamsize>(samples.size() * 4))
        throw io_error("short read: " + path);
    real_image img(n);
    for (size_t i = 0; i < samples.size(); ++i) img.data[i] = samples[i];
    return img;
}

// ---------------------------------------------------------------------------
// CSV tables. Numbers are written with the shortest round-tripping form, so
// re-reading reproduces the doubles bit for bit.

inline void write_symmetry_curve_csv(const std::string& path, const symmetry_curve& curve) {
    auto out = detail::open_output(path, false);
    out << "theta_deg,psi\n";
    for (const auto& [theta, psi] : curve.points)
        out << detail::compact_double(rad2deg(theta)) << "," << detail::compact_double(psi) << "\n";
    if (!out) throw io_error("short write: " + path);
}

inline symmetry_curve read_symmetry_curve_csv(const std::string& path) {
    auto in = detail::open_input(path, false);
    detail::expect_header(in, "theta_deg,psi", path);
    symmetry_curve curve;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto row = detail::csv_row(line, 2, path);
        curve.points.emplace_back(deg2rad(row[0]), row[1]);
    }
    return curve;
}

inline void write_mc_samples_csv(const std::string& path,
                                 const std::vector<monte_carlo_sample>& samples) {
    auto out = detail::open_output(path, false);
    out << "trial,beta_deg,epsilon_deg\n";
    for (const auto& s : samples)
        out << s.trial << "," << detail::compact_double(rad2deg(s.beta)) << ","
            << detail::compact_double(rad2deg(s.epsilon)) << "\n";
    if (!out) throw io_error("short write: " + path);
}

inline void write_mc_binned_csv(const std::string& path, const std::vector<beta_bin>& bins) {
    auto out = detail::open_output(path, false);
    out << "beta_center_deg,mean_epsilon_deg,count\n";
    for (const auto& b : bins)
        out << detail::compact_double(rad2deg(b.beta_center)) << ","
            << detail::compact_double(rad2deg(b.mean_epsilon)) << "," << b.count << "\n";
    if (!out) throw io_error("short write: " + path);
}

inline const std::string measurements_csv_header =
    "alpha_deg,i_x,i_y,i_z,j_x,j_y,j_z,k_x,k_y,k_z";

inline void write_measurements_csv(const std::string& path,
                                   const std::vector<in_plane_measurement>& ms) {
    auto out = detail::open_output(path, false);
    out << measurements_csv_header << "\n";
    for (const auto& m : ms) {
        const auto& f = m.frame;
        out << detail::compact_double(rad2deg(m.alpha));
        for (const double c : {f.i_axis.x, f.i_axis.y, f.i_axis.z, f.j_axis.x, f.j_axis.y,
                               f.j_axis.z, f.k_axis.x, f.k_axis.y, f.k_axis.z})
            out << "," << detail::compact_double(c);
        out << "\n";
    }
    if (!out) throw io_error("short write: " + path);
}

inline std::vector<in_plane_measurement> read_measurements_csv(const std::string& path) {
    auto in = detail::open_input(path, false);
    detail::expect_header(in, measurements_csv_header, path);
    std::vector<in_plane_measurement> ms;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto r = detail::csv_row(line, 10, path);
        in_plane_measurement m;
        m.alpha = deg2rad(r[0]);
        m.frame.i_axis = {r[1], r[2], r[3]};
        m.frame.j_axis = {r[4], r[5], r[6]};
        m.frame.k_axis = {r[7], r[8], r[9]};
        ms.push_back(m);
    }
    return ms;
}

// ---------------------------------------------------------------------------
// JSON sidecars. nlohmann's writer emits the shortest round-tripping decimal
// for doubles and sorts keys, so dumps are deterministic.

inline void write_json(const std::string& path, const nlohmann::json& j) {
    auto out = detail::open_output(path, false);
    out << j.dump(2) << "\n";
    if (!out) throw io_error("short write: " + path);
}

inline nlohmann::json read_json(const std::string& path) {
    auto in = detail::open_input(path, false);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw io_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

/// View metadata persisted next to each silhouette PGM. The projected body
/// center rides along so known-center registration works on re-read frames.
inline nlohmann::json silhouette_sidecar(const silhouette_image& s) {
    return {{"phi_deg", rad2deg(s.longitude)}, {"lambda_deg", rad2deg(s.latitude)},
            {"r", s.range},                    {"g_deg", rad2deg(s.sun_phase)},
            {"n", s.resolution()},             {"center_u", s.center_u},
            {"center_v", s.center_v}};
}

inline void apply_silhouette_sidecar(const nlohmann::json& j, silhouette_image& s,
                                     const std::string& path) {
    try {
        if (j.at("n").get<int>() != s.resolution())
            throw io_error("sidecar resolution disagrees with PGM: " + path);
        s.longitude = deg2rad(j.at("phi_deg").get<double>());
        s.latitude = deg2rad(j.at("lambda_deg").get<double>());
        s.range = j.at("r").get<double>();
        s.sun_phase = deg2rad(j.at("g_deg").get<double>());
        s.center_u = j.at("center_u").get<double>();
        s.center_v = j.at("center_v").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw io_error("bad silhouette sidecar " + path + ": " + e.what());
    }
}

inline void write_silhouette(const std::string& pgm_path, const std::string& json_path,
                             const silhouette_image& s) {
    write_silhouette_pgm(pgm_path, s.pixels);
    write_json(json_path, silhouette_sidecar(s));
}

inline silhouette_image read_silhouette(const std::string& pgm_path,
                                        const std::string& json_path) {
    silhouette_image s;
    s.pixels = read_silhouette_pgm(pgm_path);
    apply_silhouette_sidecar(read_json(json_path), s, json_path);
    return s;
}

inline nlohmann::json stack_sidecar(const stack_image& s) {
    nlohmann::json phis = nlohmann::json::array();
    for (const double phi : s.longitudes) phis.push_back(rad2deg(phi));
    return {{"m", s.frame_count},
            {"mode", to_string(s.mode)},
            {"phi_deg", std::move(phis)},
            {"lambda_deg", rad2deg(s.latitude)},
            {"g_deg", rad2deg(s.sun_phase)}};
}

inline void write_stack(const std::string& pgm_path, const std::string& json_path,
                        const stack_image& s) {
    write_stack_pgm(pgm_path, s.pixels, std::max(1, s.frame_count));
    write_json(json_path, stack_sidecar(s));
}

}  // namespace polestim
