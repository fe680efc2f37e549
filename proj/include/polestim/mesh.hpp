#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polestim/errors.hpp"
#include "polestim/rng.hpp"
#include "polestim/vec3.hpp"

namespace polestim {

/// Body surface as an indexed triangle soup in the body frame,
/// dimensions in body-radius units.
struct triangle_mesh {
    std::vector<vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    /// True when every edge is shared by exactly two faces with opposite
    /// orientation; shadow classification of sun-averted points relies on it.
    bool watertight = false;

    void validate() const {
        if (vertices.empty() || faces.empty()) throw degenerate_error("mesh: empty");
        const int nv = static_cast<int>(vertices.size());
        for (const auto& f : faces) {
            for (int idx : f)
                if (idx < 0 || idx >= nv) throw degenerate_error("mesh: face index out of range");
            const vec3 e1 = vertices[f[1]] - vertices[f[0]];
            const vec3 e2 = vertices[f[2]] - vertices[f[0]];
            if (norm(cross(e1, e2)) < 2e-12) throw degenerate_error("mesh: degenerate face");
        }
    }
};

namespace detail {

inline bool compute_watertight(const triangle_mesh& mesh) {
    // Every directed edge must be matched by exactly one reverse edge.
    std::map<std::pair<int, int>, int> count;
    for (const auto& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            const int a = f[e], b = f[(e + 1) % 3];
            ++count[{a, b}];
        }
    }
    for (const auto& [edge, c] : count) {
        if (c != 1) return false;
        const auto rev = count.find({edge.second, edge.first});
        if (rev == count.end() || rev->second != 1) return false;
    }
    return true;
}

/// Signed volume, centroid, and inertia (unit density) of the solid bounded
/// by the mesh, via the divergence theorem over origin-anchored tetrahedra.
/// Overlapping closed components are counted with multiplicity.
struct mass_properties {
    double volume = 0.0;
    vec3 centroid{};
    double ixx = 0, iyy = 0, izz = 0, ixy = 0, ixz = 0, iyz = 0;
};

inline mass_properties compute_mass_properties(const triangle_mesh& mesh) {
    mass_properties mp;
    double sx = 0, sy = 0, sz = 0;
    double pxx = 0, pyy = 0, pzz = 0, pxy = 0, pxz = 0, pyz = 0;
    for (const auto& f : mesh.faces) {
        const vec3& a = mesh.vertices[f[0]];
        const vec3& b = mesh.vertices[f[1]];
        const vec3& c = mesh.vertices[f[2]];
        const double v6 = dot(a, cross(b, c));  // 6x signed tet volume
        mp.volume += v6 / 6.0;
        sx += v6 * (a.x + b.x + c.x) / 24.0;
        sy += v6 * (a.y + b.y + c.y) / 24.0;
        sz += v6 * (a.z + b.z + c.z) / 24.0;
        // Second moments of the tet with vertices (0, a, b, c):
        // integral of x_i x_j equals v6/120 * (sum_i sum_j + sum_i diag).
        auto mom = [v6](double pa, double pb, double pc, double qa, double qb, double qc) {
            return v6 / 120.0 *
                   ((pa + pb + pc) * (qa + qb + qc) + pa * qa + pb * qb + pc * qc);
        };
        pxx += mom(a.x, b.x, c.x, a.x, b.x, c.x);
        pyy += mom(a.y, b.y, c.y, a.y, b.y, c.y);
        pzz += mom(a.z, b.z, c.z, a.z, b.z, c.z);
        pxy += mom(a.x, b.x, c.x, a.y, b.y, c.y);
        pxz += mom(a.x, b.x, c.x, a.z, b.z, c.z);
        pyz += mom(a.y, b.y, c.y, a.z, b.z, c.z);
    }
    if (std::abs(mp.volume) > 1e-12) mp.centroid = vec3{sx, sy, sz} / mp.volume;
    mp.ixx = pyy + pzz;
    mp.iyy = pxx + pzz;
    mp.izz = pxx + pyy;
    mp.ixy = -pxy;
    mp.ixz = -pxz;
    mp.iyz = -pyz;
    return mp;
}

inline void translate(triangle_mesh& mesh, const vec3& d) {
    for (auto& v : mesh.vertices) v += d;
}

inline void rotate(triangle_mesh& mesh, const mat3& r) {
    for (auto& v : mesh.vertices) v = r * v;
}

/// Minimal rotation taking unit vector `from` onto unit vector `to`.
inline mat3 minimal_rotation(const vec3& from, const vec3& to) {
    const vec3 axis = cross(from, to);
    const double s = norm(axis), c = dot(from, to);
    if (s < 1e-12) {
        if (c > 0.0) return mat3::identity();
        // Antiparallel: rotate half a turn about any perpendicular axis.
        vec3 perp = std::abs(from.x) < 0.9 ? cross(from, vec3{1, 0, 0}) : cross(from, vec3{0, 1, 0});
        perp = normalized(perp);
        mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = -((i == j) ? 1.0 : 0.0);
        const double p[3] = {perp.x, perp.y, perp.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] += 2.0 * p[i] * p[j];
        return r;
    }
    const vec3 k = axis / s;
    // Rodrigues with cos = c, sin = s.
    mat3 kx{{{0, -k.z, k.y}, {k.z, 0, -k.x}, {-k.y, k.x, 0}}};
    mat3 r = mat3::identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double kk = 0;
            for (int l = 0; l < 3; ++l) kk += kx.m[i][l] * kx.m[l][j];
            r.m[i][j] += s * kx.m[i][j] + (1.0 - c) * kk;
        }
    return r;
}

/// Center on the volume centroid and align the maximum-inertia principal
/// axis with +z by the minimal rotation.
inline void normalize_pose(triangle_mesh& mesh) {
    mass_properties mp = compute_mass_properties(mesh);
    translate(mesh, -mp.centroid);
    mp = compute_mass_properties(mesh);
    Eigen::Matrix3d inertia;
    inertia << mp.ixx, mp.ixy, mp.ixz, mp.ixy, mp.iyy, mp.iyz, mp.ixz, mp.iyz, mp.izz;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(inertia);
    const Eigen::Vector3d axis = es.eigenvectors().col(2);  // eigenvalues ascending
    vec3 z_new{axis.x(), axis.y(), axis.z()};
    if (z_new.z < 0.0) z_new = -z_new;
    rotate(mesh, minimal_rotation(z_new, {0, 0, 1}));
}

struct edge_midpoints {
    std::map<std::pair<int, int>, int> cache;

    int midpoint(triangle_mesh& mesh, int a, int b) {
        const auto key = std::minmax(a, b);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const int idx = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
        cache.emplace(key, idx);
        return idx;
    }
};

inline void subdivide_once(triangle_mesh& mesh) {
    edge_midpoints mids;
    std::vector<std::array<int, 3>> out;
    out.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
        const int ab = mids.midpoint(mesh, f[0], f[1]);
        const int bc = mids.midpoint(mesh, f[1], f[2]);
        const int ca = mids.midpoint(mesh, f[2], f[0]);
        out.push_back({f[0], ab, ca});
        out.push_back({f[1], bc, ab});
        out.push_back({f[2], ca, bc});
        out.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(out);
}

inline triangle_mesh icosahedron() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    triangle_mesh m;
    m.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                  {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : m.vertices) v = normalized(v);
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
               {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
               {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
               {8, 6, 7},  {9, 8, 1}};
    return m;
}

/// Unit sphere from a subdivided icosahedron.
inline triangle_mesh icosphere(int subdivisions) {
    triangle_mesh m = icosahedron();
    for (int s = 0; s < subdivisions; ++s) {
        subdivide_once(m);
        for (auto& v : m.vertices) v = normalized(v);
    }
    return m;
}

}  // namespace detail

struct ellipsoid_params {
    double a = 1.0, b = 1.0, c = 1.0;

    bool operator==(const ellipsoid_params&) const = default;
};

struct bilobed_params {
    double r1 = 1.0, r2 = 0.7, separation = 1.5;

    bool operator==(const bilobed_params&) const = default;
};

struct perturbed_sphere_params {
    std::uint64_t seed = 0;
    double amplitude = 0.2;

    bool operator==(const perturbed_sphere_params&) const = default;
};

inline triangle_mesh make_ellipsoid(const ellipsoid_params& p, int subdivisions) {
    if (!(p.a > 0 && p.b > 0 && p.c > 0)) throw config_error("ellipsoid: semi-axes must be > 0");
    triangle_mesh m = detail::icosphere(std::max(0, subdivisions));
    for (auto& v : m.vertices) v = {v.x * p.a, v.y * p.b, v.z * p.c};
    detail::normalize_pose(m);
    m.watertight = detail::compute_watertight(m);
    m.validate();
    return m;
}

/// Eight-faceted diamond: square equatorial belt with apex vertices on +/-z.
/// Oblate (height below equator radius) so the spin axis is the maximum-
/// inertia axis. Subdivision refines the facets without changing the shape.
inline triangle_mesh make_diamond(int subdivisions) {
    triangle_mesh m;
    const double h = 0.55;
    m.vertices = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, h}, {0, 0, -h}};
    m.faces = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4},
               {1, 0, 5}, {2, 1, 5}, {3, 2, 5}, {0, 3, 5}};
    for (int s = 0; s < subdivisions; ++s) detail::subdivide_once(m);
    detail::normalize_pose(m);
    m.watertight = detail::compute_watertight(m);
    m.validate();
    return m;
}

/// Two spheres with centers on a line perpendicular to the spin axis,
/// placed so the analytic two-sphere center of mass sits at the origin.
/// Components may interpenetrate; each shell is closed on its own.
inline triangle_mesh make_bilobed(const bilobed_params& p, int subdivisions) {
    if (!(p.r1 > 0 && p.r2 > 0 && p.separation > 0))
        throw config_error("bilobed: dimensions must be > 0");
    const int sub = std::max(1, subdivisions);
    triangle_mesh lobe1 = detail::icosphere(sub);
    triangle_mesh lobe2 = detail::icosphere(sub);
    const double m1 = p.r1 * p.r1 * p.r1, m2 = p.r2 * p.r2 * p.r2;
    const double d1 = p.separation * m2 / (m1 + m2);
    const double d2 = p.separation - d1;
    triangle_mesh m;
    for (const auto& v : lobe1.vertices) m.vertices.push_back(v * p.r1 + vec3{d1, 0, 0});
    for (const auto& v : lobe2.vertices) m.vertices.push_back(v * p.r2 + vec3{-d2, 0, 0});
    const int offset = static_cast<int>(lobe1.vertices.size());
    m.faces = lobe1.faces;
    for (const auto& f : lobe2.faces) m.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
    detail::normalize_pose(m);
    m.watertight = detail::compute_watertight(m);
    m.validate();
    return m;
}

/// Sphere with a smooth deterministic radial perturbation: a fixed sum of
/// random cosine lobes drawn from the seed.
inline triangle_mesh make_perturbed_sphere(const perturbed_sphere_params& p, int subdivisions) {
    if (!(p.amplitude >= 0)) throw config_error("perturbed_sphere: amplitude must be >= 0");
    triangle_mesh m = detail::icosphere(std::max(1, subdivisions));
    rng_stream g(p.seed, 0x5048455245ull);  // fixed stream id for shape noise
    constexpr int lobes = 8;
    vec3 dirs[lobes];
    double freq[lobes], phase[lobes], weight[lobes];
    double weight_sum = 0.0;
    for (int k = 0; k < lobes; ++k) {
        dirs[k] = g.unit_sphere();
        freq[k] = 1.0 + 3.0 * g.uniform();
        phase[k] = 2.0 * pi * g.uniform();
        weight[k] = 0.25 + 0.75 * g.uniform();
        weight_sum += weight[k];
    }
    for (auto& v : m.vertices) {
        double bump = 0.0;
        for (int k = 0; k < lobes; ++k)
            bump += weight[k] * std::cos(freq[k] * pi * dot(dirs[k], v) + phase[k]);
        v = v * (1.0 + p.amplitude * bump / weight_sum);
    }
    detail::normalize_pose(m);
    m.watertight = detail::compute_watertight(m);
    m.validate();
    return m;
}

/// Rotate the body about its pole (+z) by phi.
inline triangle_mesh rotate_body(const triangle_mesh& mesh, double phi) {
    triangle_mesh out = mesh;
    detail::rotate(out, mat3::rot_z(phi));
    return out;
}

/// Minimal ASCII OBJ reader: v and f records; quads and larger polygons are
/// fanned; all other record types are ignored.
inline triangle_mesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("obj: cannot open " + path);
    triangle_mesh m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            vec3 v;
            if (!(ss >> v.x >> v.y >> v.z))
                throw io_error("obj: parse failure in vertex record at line " + std::to_string(lineno));
            m.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) {
                // Accept "i", "i/j", "i/j/k", "i//k".
                const size_t slash = tok.find('/');
                const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
                int i = 0;
                try {
                    i = std::stoi(head);
                } catch (const std::exception&) {
                    throw io_error("obj: parse failure in face record at line " + std::to_string(lineno));
                }
                if (i < 0) i = static_cast<int>(m.vertices.size()) + i + 1;  // relative index
                if (i <= 0 || i > static_cast<int>(m.vertices.size()))
                    throw io_error("obj: invalid face index at line " + std::to_string(lineno));
                idx.push_back(i - 1);
            }
            if (idx.size() < 3)
                throw io_error("obj: parse failure, face needs >= 3 vertices at line " + std::to_string(lineno));
            for (size_t k = 2; k < idx.size(); ++k) m.faces.push_back({idx[0], idx[k - 1], idx[k]});
        }
    }
    if (m.vertices.empty() || m.faces.empty()) throw io_error("obj: empty mesh in " + path);
    m.validate();
    m.watertight = detail::compute_watertight(m);
    return m;
}

}  // namespace polestim
