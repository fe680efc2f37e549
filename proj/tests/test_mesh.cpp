#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "polestim/mesh.hpp"

using namespace polestim;

namespace {

std::string write_temp_obj(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path.string();
}

}  // namespace

TEST(Mesh, UnitSphereVertexRadiiAreOne) {
    const triangle_mesh m = make_ellipsoid({1, 1, 1}, 3);
    ASSERT_GT(m.vertices.size(), 100u);
    for (const auto& v : m.vertices) EXPECT_NEAR(norm(v), 1.0, 1e-6);
    EXPECT_TRUE(m.watertight);
}

TEST(Mesh, BilobedExtentAlongLobeAxis) {
    const triangle_mesh m = make_bilobed({1.0, 0.7, 1.5}, 3);
    double lo[3] = {1e30, 1e30, 1e30}, hi[3] = {-1e30, -1e30, -1e30};
    for (const auto& v : m.vertices) {
        const double c[3] = {v.x, v.y, v.z};
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a]);
        }
    }
    const double expected = 1.5 + 1.0 + 0.7;
    // Lobe axis is x by construction; the spin axis z must be short.
    EXPECT_NEAR(hi[0] - lo[0], expected, 0.05 * expected);
    EXPECT_GT(hi[0] - lo[0], hi[2] - lo[2]);
    EXPECT_TRUE(m.watertight);
}

TEST(Mesh, PerturbedSphereIsDeterministic) {
    const triangle_mesh a = make_perturbed_sphere({7, 0.2}, 3);
    const triangle_mesh b = make_perturbed_sphere({7, 0.2}, 3);
    ASSERT_EQ(a.vertices.size(), b.vertices.size());
    ASSERT_EQ(a.faces, b.faces);
    for (size_t i = 0; i < a.vertices.size(); ++i) {
        EXPECT_EQ(a.vertices[i].x, b.vertices[i].x);
        EXPECT_EQ(a.vertices[i].y, b.vertices[i].y);
        EXPECT_EQ(a.vertices[i].z, b.vertices[i].z);
    }
    const triangle_mesh c = make_perturbed_sphere({8, 0.2}, 3);
    ASSERT_EQ(a.vertices.size(), c.vertices.size());
    double max_diff = 0.0;
    for (size_t i = 0; i < a.vertices.size(); ++i)
        max_diff = std::max(max_diff, norm(a.vertices[i] - c.vertices[i]));
    EXPECT_GT(max_diff, 1e-6);
}

TEST(Mesh, PerturbedSphereRadiiWithinAmplitudeBand) {
    const triangle_mesh m = make_perturbed_sphere({7, 0.2}, 3);
    // Centering shifts radii slightly; allow a loose band around 1 +/- 0.2.
    for (const auto& v : m.vertices) {
        EXPECT_GT(norm(v), 0.6);
        EXPECT_LT(norm(v), 1.4);
    }
}

TEST(Mesh, DiamondHasEightFacetsAndOblateInertia) {
    const triangle_mesh m = make_diamond(0);
    EXPECT_EQ(m.faces.size(), 8u);
    EXPECT_TRUE(m.watertight);
    const auto mp = detail::compute_mass_properties(m);
    EXPECT_GT(mp.izz, mp.ixx);
    EXPECT_GT(mp.izz, mp.iyy);
    // Subdivision refines the triangulation without changing the surface.
    const triangle_mesh fine = make_diamond(2);
    EXPECT_EQ(fine.faces.size(), 8u * 16u);
    const auto mpf = detail::compute_mass_properties(fine);
    EXPECT_NEAR(mpf.volume, mp.volume, 1e-9);
}

TEST(Mesh, GeneratedShapesAreCenteredOnVolumeCentroid) {
    for (const triangle_mesh& m :
         {make_ellipsoid({1.2, 0.9, 0.7}, 2), make_diamond(1), make_bilobed({1, 0.7, 1.5}, 2),
          make_perturbed_sphere({3, 0.15}, 3)}) {
        const auto mp = detail::compute_mass_properties(m);
        EXPECT_LT(norm(mp.centroid), 1e-9);
        EXPECT_GT(mp.volume, 0.0);
    }
}

TEST(Mesh, MaxInertiaAxisAlignedWithZ) {
    // Short semi-axis along x at construction; alignment must bring it to z.
    const triangle_mesh m = make_ellipsoid({0.5, 1.0, 1.0}, 3);
    double hi_x = 0, hi_z = 0;
    for (const auto& v : m.vertices) {
        hi_x = std::max(hi_x, std::abs(v.x));
        hi_z = std::max(hi_z, std::abs(v.z));
    }
    EXPECT_NEAR(hi_z, 0.5, 1e-6);
    EXPECT_NEAR(hi_x, 1.0, 1e-6);
    const auto mp = detail::compute_mass_properties(m);
    EXPECT_GT(mp.izz, mp.ixx + 1e-6);
    EXPECT_GT(mp.izz, mp.iyy + 1e-6);
    EXPECT_LT(std::abs(mp.ixz), 1e-9);
    EXPECT_LT(std::abs(mp.iyz), 1e-9);
}

TEST(Mesh, RotateBodyAnchors) {
    const triangle_mesh m = make_diamond(0);
    const triangle_mesh same = rotate_body(m, 0.0);
    for (size_t i = 0; i < m.vertices.size(); ++i)
        EXPECT_EQ(norm(m.vertices[i] - same.vertices[i]), 0.0);

    const triangle_mesh full = rotate_body(m, 2.0 * pi);
    for (size_t i = 0; i < m.vertices.size(); ++i)
        EXPECT_LT(norm(m.vertices[i] - full.vertices[i]), 1e-9);

    triangle_mesh single;
    single.vertices = {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
    single.faces = {{0, 1, 2}};
    const triangle_mesh quarter = rotate_body(single, pi / 2.0);
    EXPECT_LT(norm(quarter.vertices[0] - vec3{0, 1, 0}), 1e-12);
}

TEST(Mesh, LoadObjSingleTriangle) {
    const auto path = write_temp_obj("polestim_tri.obj",
                                     "# comment\n"
                                     "v 0 0 0\n"
                                     "v 1 0 0\n"
                                     "v 0 1 0\n"
                                     "vn 0 0 1\n"
                                     "f 1 2 3\n");
    const triangle_mesh m = load_obj(path);
    EXPECT_EQ(m.vertices.size(), 3u);
    EXPECT_EQ(m.faces.size(), 1u);
    EXPECT_FALSE(m.watertight);
    std::remove(path.c_str());
}

TEST(Mesh, LoadObjQuadIsFanned) {
    const auto path = write_temp_obj("polestim_quad.obj",
                                     "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                                     "f 1/1 2/2 3/3 4/4\n");
    const triangle_mesh m = load_obj(path);
    EXPECT_EQ(m.vertices.size(), 4u);
    EXPECT_EQ(m.faces.size(), 2u);
    EXPECT_EQ(m.faces[0], (std::array<int, 3>{0, 1, 2}));
    EXPECT_EQ(m.faces[1], (std::array<int, 3>{0, 2, 3}));
    std::remove(path.c_str());
}

TEST(Mesh, LoadObjNegativeIndicesAreRelative) {
    const auto path = write_temp_obj("polestim_neg.obj",
                                     "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
                                     "f -3 -2 -1\n");
    const triangle_mesh m = load_obj(path);
    EXPECT_EQ(m.faces[0], (std::array<int, 3>{0, 1, 2}));
    std::remove(path.c_str());
}

TEST(Mesh, LoadObjDistinctErrors) {
    EXPECT_THROW(load_obj("/nonexistent/path.obj"), io_error);

    const auto bad_index = write_temp_obj("polestim_badidx.obj",
                                          "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
    try {
        load_obj(bad_index);
        FAIL() << "expected invalid-index error";
    } catch (const io_error& e) {
        EXPECT_NE(std::string(e.what()).find("invalid face index"), std::string::npos);
    }
    std::remove(bad_index.c_str());

    const auto zero_index = write_temp_obj("polestim_zeroidx.obj",
                                           "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n");
    try {
        load_obj(zero_index);
        FAIL() << "expected invalid-index error";
    } catch (const io_error& e) {
        EXPECT_NE(std::string(e.what()).find("invalid face index"), std::string::npos);
    }
    std::remove(zero_index.c_str());

    const auto parse_fail = write_temp_obj("polestim_parse.obj", "v 0 zero 0\nf 1 1 1\n");
    try {
        load_obj(parse_fail);
        FAIL() << "expected parse error";
    } catch (const io_error& e) {
        EXPECT_NE(std::string(e.what()).find("parse failure"), std::string::npos);
    }
    std::remove(parse_fail.c_str());

    const auto empty = write_temp_obj("polestim_empty.obj", "# nothing here\n");
    try {
        load_obj(empty);
        FAIL() << "expected empty-mesh error";
    } catch (const io_error& e) {
        EXPECT_NE(std::string(e.what()).find("empty mesh"), std::string::npos);
    }
    std::remove(empty.c_str());
}

TEST(Mesh, ValidateRejectsDegenerateAndOutOfRange) {
    triangle_mesh bad;
    bad.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    bad.faces = {{0, 1, 2}};
    EXPECT_THROW(bad.validate(), degenerate_error);

    triangle_mesh oob;
    oob.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    oob.faces = {{0, 1, 3}};
    EXPECT_THROW(oob.validate(), degenerate_error);
}
