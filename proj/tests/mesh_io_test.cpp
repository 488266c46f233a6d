#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "meshdenoise/mesh_io.hpp"
#include "meshdenoise/shapes.hpp"
#include "test_support.hpp"

namespace mdn {
namespace {

using test::temp_path;
using test::write_text;

void expect_same_faces(const Mesh& a, const Mesh& b) {
  ASSERT_EQ(a.face_count(), b.face_count());
  for (std::size_t f = 0; f < a.face_count(); ++f) EXPECT_EQ(a.face(f), b.face(f));
}

TEST(MeshIo, SingleTriangleObj) {
  const auto p = temp_path("tri.obj");
  write_text(p, "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\n");
  const Mesh m = load_mesh(p);
  EXPECT_EQ(m.vertex_count(), 3u);
  EXPECT_EQ(m.face_count(), 1u);
  EXPECT_TRUE(m.topology().face_neighbors(0).empty());
}

TEST(MeshIo, CubeObjAdjacency) {
  std::ostringstream s;
  const Mesh cube = shapes::cube();
  write_mesh(s, cube, MeshFormat::Obj);
  const auto p = temp_path("cube.obj");
  write_text(p, s.str());
  const Mesh m = load_mesh(p);
  EXPECT_EQ(m.vertex_count(), 8u);
  EXPECT_EQ(m.face_count(), 12u);
  for (std::size_t f = 0; f < 12; ++f) EXPECT_EQ(m.topology().face_neighbors(f).size(), 3u);
}

TEST(MeshIo, NegativeIndicesAndQuads) {
  const auto p = temp_path("quad.obj");
  write_text(p, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf -4/1 -3/2 -2/3 -1/4\n");
  const Mesh m = load_mesh(p);
  ASSERT_EQ(m.face_count(), 2u);
  EXPECT_EQ(m.face(0), (Face{0, 1, 2}));
  EXPECT_EQ(m.face(1), (Face{0, 2, 3}));
}

TEST(MeshIo, ObjParseErrorsCarryLineNumber) {
  const auto p = temp_path("bad.obj");
  write_text(p, "v 0 0 0\nv 1 0 zz\n");
  try {
    load_mesh(p);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  write_text(p, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
  EXPECT_THROW(load_mesh(p), FormatError);
}

TEST(MeshIo, NonManifoldFileIsStructuralError) {
  const auto p = temp_path("nonmanifold.obj");
  write_text(p, "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n");
  EXPECT_THROW(load_mesh(p), StructuralError);
}

TEST(MeshIo, MissingFileIsIoError) {
  EXPECT_THROW(load_mesh(temp_path("does_not_exist.obj")), IoError);
  EXPECT_THROW(save_mesh(shapes::cube(), "/nonexistent_dir/x.obj"), IoError);
}

TEST(MeshIo, SphereWithPaperScaleCounts) {
  // A genus-0 mesh with the same vertex and face counts as the Fandisk model.
  const Mesh base = shapes::uv_sphere(80, 80);
  std::vector<Vec3> v = base.vertices();
  std::vector<Face> f(base.faces().begin(), base.faces().end());
  for (int k = 0; k < 73; ++k) {
    const Face t = f[k];
    const Index c = static_cast<Index>(v.size());
    v.push_back((v[t[0]] + v[t[1]] + v[t[2]]) / 3.0);
    f[k] = {t[0], t[1], c};
    f.push_back({t[1], t[2], c});
    f.push_back({t[2], t[0], c});
  }
  const Mesh m(v, f);
  const auto p = temp_path("fandisk_counts.ply");
  save_mesh(m, p);
  const Mesh loaded = load_mesh(p);
  EXPECT_EQ(loaded.vertex_count(), 6475u);
  EXPECT_EQ(loaded.face_count(), 12946u);
}

TEST(MeshIo, BinaryPlyRoundTripIsBitExact) {
  test::Rng rng(1);
  const Mesh m = test::jittered(shapes::cube(), rng, 0.1);
  const auto p = temp_path("cube_bin.ply");
  save_mesh(m, p, MeshFormat::PlyBinary);
  const Mesh back = load_mesh(p);
  ASSERT_EQ(back.vertex_count(), m.vertex_count());
  for (std::size_t i = 0; i < m.vertex_count(); ++i) {
    EXPECT_EQ(std::memcmp(back.vertex(i).data(), m.vertex(i).data(), sizeof(double) * 3), 0);
  }
  expect_same_faces(m, back);
}

TEST(MeshIo, AsciiRoundTripWithNineDigits) {
  test::Rng rng(2);
  const Mesh m = test::random_mesh(rng);
  const double diag = bbox_diagonal(m.vertices());
  for (MeshFormat fmt : {MeshFormat::Obj, MeshFormat::PlyAscii}) {
    const auto p = temp_path(fmt == MeshFormat::Obj ? "nine.obj" : "nine.ply");
    save_mesh(m, p, fmt, SaveOptions{9});
    const Mesh back = load_mesh(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.vertex_count(); ++i) worst = std::max(worst, (back.vertex(i) - m.vertex(i)).cwiseAbs().maxCoeff());
    EXPECT_LE(worst, 1e-6 * diag);
    expect_same_faces(m, back);
  }
}

TEST(MeshIo, DefaultAsciiPrecisionRoundTripsExactly) {
  test::Rng rng(4);
  const Mesh m = test::random_mesh(rng);
  const auto p = temp_path("exact.obj");
  save_mesh(m, p);
  const Mesh back = load_mesh(p);
  for (std::size_t i = 0; i < m.vertex_count(); ++i) EXPECT_EQ(back.vertex(i), m.vertex(i));
}

TEST(MeshIo, PlyWithExtraPropertiesAndFloat32) {
  std::string data =
      "ply\nformat binary_little_endian 1.0\ncomment test\nelement vertex 3\nproperty float x\nproperty float y\n"
      "property float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\n"
      "property int flags\nend_header\n";
  auto put = [&](const void* src, std::size_t n) { data.append(static_cast<const char*>(src), n); };
  const float coords[3][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  for (const auto& c : coords) {
    put(c, sizeof(float) * 3);
    const unsigned char red = 200;
    put(&red, 1);
  }
  const unsigned char n = 3;
  put(&n, 1);
  const int idx[3] = {0, 1, 2};
  put(idx, sizeof(idx));
  const int flags = 7;
  put(&flags, sizeof(flags));
  const auto p = temp_path("extra.ply");
  write_text(p, data);
  const Mesh m = load_mesh(p);
  ASSERT_EQ(m.vertex_count(), 3u);
  ASSERT_EQ(m.face_count(), 1u);
  EXPECT_EQ(m.vertex(1), Vec3(1, 0, 0));
}

TEST(MeshIo, AsciiPlyPolygonIsFanTriangulated) {
  const auto p = temp_path("quad.ply");
  write_text(p,
             "ply\nformat ascii 1.0\nelement vertex 4\nproperty double x\nproperty double y\nproperty double z\n"
             "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
             "0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  const Mesh m = load_mesh(p);
  EXPECT_EQ(m.face_count(), 2u);
}

TEST(MeshIo, BigEndianPlyRejected) {
  const auto p = temp_path("be.ply");
  write_text(p, "ply\nformat binary_big_endian 1.0\nelement vertex 0\nend_header\n");
  try {
    load_mesh(p);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("big-endian"), std::string::npos);
  }
}

TEST(MeshIo, TruncatedBinaryPlyReportsOffset) {
  const auto p = temp_path("trunc.ply");
  write_text(p, "ply\nformat binary_little_endian 1.0\nelement vertex 2\nproperty double x\nproperty double y\n"
                "property double z\nend_header\n\x01\x02");
  try {
    load_mesh(p);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace mdn
