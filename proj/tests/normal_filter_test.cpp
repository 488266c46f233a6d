#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "meshdenoise/normal_filter.hpp"
#include "meshdenoise/shapes.hpp"
#include "test_support.hpp"

namespace mdn {
namespace {

FaceField field_of(std::vector<Vec3> normals, std::vector<double> areas, std::vector<Vec3> centroids) {
  FaceField f;
  f.degenerate.assign(normals.size(), 0);
  f.normals = std::move(normals);
  f.areas = std::move(areas);
  f.centroids = std::move(centroids);
  return f;
}

// Every face sees every other face, with the distances filled in.
NeighborDisk complete_disks(const FaceField& f) {
  detail::Rows<DiskEntry> rows;
  for (std::size_t i = 0; i < f.size(); ++i) {
    rows.values.push_back({static_cast<Index>(i), 0.0});
    for (std::size_t j = 0; j < f.size(); ++j)
      if (j != i) rows.values.push_back({static_cast<Index>(j), (f.centroids[i] - f.centroids[j]).norm()});
    rows.offsets.push_back(rows.values.size());
  }
  return NeighborDisk(1e300, std::move(rows));
}

TEST(Kernels, TukeyClosedForm) {
  EXPECT_EQ(tukey_weight(0.0, 0.7), 0.5);
  EXPECT_EQ(tukey_weight(0.7, 0.7), 0.0);
  EXPECT_EQ(tukey_weight(0.7000001, 0.7), 0.0);
  EXPECT_EQ(tukey_weight(5.0, 0.7), 0.0);
  EXPECT_EQ(tukey_weight(0.5, 1.0), 0.28125);
}

TEST(Kernels, GaussianClosedForm) {
  EXPECT_EQ(gaussian_weight(0.0, 2.0), 1.0);
  EXPECT_NEAR(gaussian_weight(2.0, 2.0), 0.6065306597126334, 1e-15);
  EXPECT_NEAR(gaussian_weight(6.0, 2.0), std::exp(-4.5), 1e-17);
  EXPECT_NEAR(gaussian_weight(6.0, 2.0), 0.0111089965, 1e-10);
}

TEST(Kernels, TukeyIsMonotoneAndBounded) {
  double prev = 0.5;
  for (int k = 0; k <= 1000; ++k) {
    const double w = tukey_weight(k * 1e-3, 1.0);
    EXPECT_LE(w, prev);
    EXPECT_GE(w, 0.0);
    prev = w;
  }
}

TEST(FilterNormals, IdenticalNormalsAreFixed) {
  const Mesh m = shapes::grid(6, 5, 0.3);
  const FaceField field = compute_face_field(m);
  const NeighborDisk disks = build_disks(m, field, default_radius(mesh_stats(m)));
  const FilterResult r = filter_normals(field, disks, FilterParams{0.2, 0.5});
  EXPECT_EQ(r.warned_faces, 0u);
  for (const Vec3& n : r.normals) EXPECT_NEAR((n - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
}

TEST(FilterNormals, CutoffKeepsDissimilarNeighborsOut) {
  // Two coplanar equal-area faces with hand-set normals 60 degrees apart:
  // |n_i - n_j| = 1 > sigma_s.
  const double alpha = std::numbers::pi / 3.0;
  const FaceField f = field_of({Vec3(0, 0, 1), Vec3(std::sin(alpha), 0, std::cos(alpha))}, {0.5, 0.5},
                               {Vec3(0, 0, 0), Vec3(0.5, 0, 0)});
  const FilterResult r = filter_normals(f, complete_disks(f), FilterParams{1.0, 0.9});
  EXPECT_NEAR((r.normals[0] - f.normals[0]).norm(), 0.0, 1e-15);
  EXPECT_NEAR((r.normals[1] - f.normals[1]).norm(), 0.0, 1e-15);
  // With sigma_s above the difference the faces do mix.
  const FilterResult mixed = filter_normals(f, complete_disks(f), FilterParams{1.0, 1.5});
  EXPECT_GT((mixed.normals[0] - f.normals[0]).norm(), 1e-3);
}

TEST(FilterNormals, FiveFaceFanMatchesHandSum) {
  const Mesh fan = shapes::polygon_fan(5);
  FaceField f = compute_face_field(fan);
  f.normals = {Vec3(0, 0, 1), Vec3(0.1, 0, 1).normalized(), Vec3(0, 0.2, 1).normalized(),
               Vec3(-0.3, 0.1, 1).normalized(), Vec3(0.9, 0, 0.3).normalized()};
  f.areas = {0.4, 0.5, 0.6, 0.7, 0.8};
  const double sc = 0.6, ss = 0.55;
  const FilterResult r = filter_normals(f, complete_disks(f), FilterParams{sc, ss});
  for (std::size_t i = 0; i < 5; ++i) {
    double sx = 0, sy = 0, sz = 0;
    for (std::size_t j = 0; j < 5; ++j) {
      const double dc = (f.centroids[i] - f.centroids[j]).norm();
      const double ds = (f.normals[i] - f.normals[j]).norm();
      const double u = ds / ss;
      const double g = ds <= ss ? 0.5 * (1 - u * u) * (1 - u * u) : 0.0;
      const double w = f.areas[j] * std::exp(-dc * dc / (2 * sc * sc)) * g;
      sx += w * f.normals[j].x();
      sy += w * f.normals[j].y();
      sz += w * f.normals[j].z();
    }
    const double len = std::sqrt(sx * sx + sy * sy + sz * sz);
    EXPECT_NEAR(r.normals[i].x(), sx / len, 1e-12);
    EXPECT_NEAR(r.normals[i].y(), sy / len, 1e-12);
    EXPECT_NEAR(r.normals[i].z(), sz / len, 1e-12);
  }
}

TEST(FilterNormals, MatchesBruteForceOracle) {
  test::Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Mesh m = test::random_mesh(rng, 500);
    const MeshStats s = mesh_stats(m);
    const double r = default_radius(s), sc = s.avg_centroid_distance, ss = test::uniform(rng, 0.3, 1.0);
    const FaceField field = compute_face_field(m);
    const FilterResult got = filter_normals(field, build_disks(m, field, r), FilterParams{sc, ss});
    const auto want = test::oracle::bilateral_filter(m, r, sc, ss);
    for (std::size_t f = 0; f < m.face_count(); ++f) EXPECT_NEAR((got.normals[f] - want[f]).norm(), 0.0, 1e-12);
  }
}

TEST(FilterNormals, OutputIsUnitLength) {
  test::Rng rng(32);
  const Mesh m = test::random_mesh(rng);
  const FaceField field = compute_face_field(m);
  const FilterResult r = filter_normals(field, build_disks(m, field, default_radius(mesh_stats(m))), FilterParams{0.3, 0.6});
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    if (!field.degenerate[f]) EXPECT_NEAR(r.normals[f].norm(), 1.0, 1e-9);
  }
}

TEST(FilterNormals, RotationEquivariant) {
  test::Rng rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    const Mesh m = test::random_mesh(rng);
    const Eigen::Matrix3d rot = test::random_rotation(rng);
    const Mesh moved = test::transformed(m, rot, Vec3(1, 2, 3));
    const MeshStats s = mesh_stats(m);
    const FilterParams p{s.avg_centroid_distance, 0.6};
    const FaceField fa = compute_face_field(m), fb = compute_face_field(moved);
    const FilterResult a = filter_normals(fa, build_disks(m, fa, default_radius(s)), p);
    const FilterResult b = filter_normals(fb, build_disks(moved, fb, default_radius(s)), p);
    for (std::size_t f = 0; f < m.face_count(); ++f) EXPECT_NEAR((rot * a.normals[f] - b.normals[f]).norm(), 0.0, 1e-9);
  }
}

TEST(FilterNormals, PermutationEquivariant) {
  test::Rng rng(34);
  const Mesh m = test::random_mesh(rng);
  std::vector<Index> perm(m.face_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Face> faces(m.face_count());
  for (std::size_t k = 0; k < perm.size(); ++k) faces[k] = m.face(perm[k]);
  const Mesh s(m.vertices(), faces);
  const MeshStats st = mesh_stats(m);
  const FilterParams p{st.avg_centroid_distance, 0.6};
  const FaceField fa = compute_face_field(m), fb = compute_face_field(s);
  const FilterResult a = filter_normals(fa, build_disks(m, fa, default_radius(st)), p);
  const FilterResult b = filter_normals(fb, build_disks(s, fb, default_radius(st)), p);
  for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_NEAR((b.normals[k] - a.normals[perm[k]]).norm(), 0.0, 1e-13);
}

TEST(FilterNormals, CreaseNormalsStayExact) {
  const Mesh m = shapes::dihedral(90.0, 8, 0.25);
  const FaceField field = compute_face_field(m);
  const MeshStats s = mesh_stats(m);
  const FilterResult r =
      filter_normals(field, build_disks(m, field, default_radius(s)), FilterParams{s.avg_centroid_distance, 0.6});
  for (std::size_t f = 0; f < m.face_count(); ++f) EXPECT_NEAR((r.normals[f] - field.normals[f]).norm(), 0.0, 1e-12);
}

TEST(FilterNormals, DeterministicAcrossWorkerCounts) {
  test::Rng rng(35);
  const Mesh m = test::random_mesh(rng);
  const FaceField field = compute_face_field(m);
  const MeshStats s = mesh_stats(m);
  const NeighborDisk d = build_disks(m, field, default_radius(s));
  const FilterResult one = filter_normals(field, d, FilterParams{s.avg_centroid_distance, 0.5}, 1);
  const FilterResult many = filter_normals(field, d, FilterParams{s.avg_centroid_distance, 0.5}, 7);
  for (std::size_t f = 0; f < m.face_count(); ++f) EXPECT_EQ(one.normals[f], many.normals[f]);
}

TEST(FilterNormals, CancellingSumKeepsInputAndWarns) {
  // Self weight 1 * 0.5 against two opposite normals weighing 0.25 each.
  const double g = tukey_weight(2.0, 4.0);
  ASSERT_EQ(g, 0.28125);
  const Vec3 c(0, 0, 0);
  const FaceField f = field_of({Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(0, 0, -1)}, {1.0, 0.25 / g, 0.25 / g}, {c, c, c});
  const FilterResult r = filter_normals(f, complete_disks(f), FilterParams{1.0, 4.0});
  EXPECT_EQ(r.warned_faces, 1u);
  EXPECT_EQ(r.normals[0], Vec3(0, 0, 1));
}

TEST(FilterNormals, DegenerateFacesAreSkipped) {
  const Mesh m({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0.5, 1, 0)}, {{0, 1, 3}, {1, 2, 3}, {0, 2, 1}});
  FaceField field = compute_face_field(m);
  ASSERT_TRUE(field.degenerate[2]);
  const FilterResult r = filter_normals(field, build_disks(m, field, 10.0), FilterParams{1.0, 0.5});
  EXPECT_EQ(r.normals[2], Vec3::Zero());
  EXPECT_NEAR((r.normals[0] - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
  EXPECT_EQ(r.warned_faces, 0u);
}

TEST(FilterNormals, RejectsBadParameters) {
  const Mesh m = shapes::cube();
  const FaceField field = compute_face_field(m);
  const NeighborDisk d = build_disks(m, field, 1.0);
  EXPECT_THROW(filter_normals(field, d, FilterParams{0.0, 0.5}), ArgumentError);
  EXPECT_THROW(filter_normals(field, d, FilterParams{1.0, -1.0}), ArgumentError);
}

}  // namespace
}  // namespace mdn
