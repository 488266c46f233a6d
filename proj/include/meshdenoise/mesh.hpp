#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "meshdenoise/types.hpp"

namespace mdn {

/// An undirected edge (a < b) with the one or two faces incident on it.
struct Edge {
  Index a = 0;
  Index b = 0;
  std::array<Index, 2> face_ids{};
  std::uint8_t face_count = 0;

  bool interior() const { return face_count == 2; }
  std::span<const Index> faces() const { return {face_ids.data(), face_count}; }
};

/// One edge of a vertex star seen from its center: the opposite vertex and
/// the faces incident on the edge.
struct StarEdge {
  Index neighbor = 0;
  std::array<Index, 2> face_ids{};
  std::uint8_t face_count = 0;

  std::span<const Index> faces() const { return {face_ids.data(), face_count}; }
};

namespace detail {

// Compressed row storage for per-element variable-length lists.
template <class T>
struct Rows {
  std::vector<std::size_t> offsets{0};
  std::vector<T> values;

  std::size_t size() const { return offsets.size() - 1; }
  std::span<const T> operator[](std::size_t i) const {
    return {values.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

}  // namespace detail

/// Connectivity of a triangle mesh. Built once from the face list and shared
/// between all meshes that differ only in vertex positions.
class Topology {
 public:
  Topology() = default;

  Topology(std::vector<Face> faces, std::size_t vertex_count)
      : faces_(std::move(faces)), vertex_count_(vertex_count) {
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      const Face& t = faces_[f];
      for (Index v : t) {
        if (v >= vertex_count_) {
          throw StructuralError("face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                                " but the mesh has " + std::to_string(vertex_count_) + " vertices");
        }
      }
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
        throw StructuralError("face " + std::to_string(f) + " repeats a vertex index");
      }
    }
    build_vertex_faces();
    build_edges();
  }

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t face_count() const { return faces_.size(); }
  std::span<const Face> faces() const { return faces_; }
  const Face& face(std::size_t f) const { return faces_[f]; }
  std::span<const Edge> edges() const { return edges_; }

  /// Faces incident on vertex v, ascending.
  std::span<const Index> vertex_faces(std::size_t v) const { return vertex_faces_[v]; }
  /// Faces sharing an edge with face f, in the order of f's edges (v0v1, v1v2, v2v0).
  std::span<const Index> face_neighbors(std::size_t f) const { return face_adjacency_[f]; }
  /// Star of vertex v ordered by neighbor index.
  std::span<const StarEdge> star(std::size_t v) const { return stars_[v]; }

 private:
  void build_vertex_faces() {
    std::vector<std::size_t> counts(vertex_count_, 0);
    for (const Face& t : faces_)
      for (Index v : t) ++counts[v];
    vertex_faces_.offsets.assign(vertex_count_ + 1, 0);
    for (std::size_t v = 0; v < vertex_count_; ++v) vertex_faces_.offsets[v + 1] = vertex_faces_.offsets[v] + counts[v];
    vertex_faces_.values.resize(vertex_faces_.offsets.back());
    std::vector<std::size_t> cursor(vertex_faces_.offsets.begin(), vertex_faces_.offsets.end() - 1);
    for (std::size_t f = 0; f < faces_.size(); ++f)
      for (Index v : faces_[f]) vertex_faces_.values[cursor[v]++] = static_cast<Index>(f);
  }

  void build_edges() {
    struct HalfRecord {
      Index a, b, face;
      std::uint8_t local;
    };
    std::vector<HalfRecord> records;
    records.reserve(faces_.size() * 3);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      for (std::uint8_t k = 0; k < 3; ++k) {
        Index u = faces_[f][k];
        Index w = faces_[f][(k + 1) % 3];
        if (u > w) std::swap(u, w);
        records.push_back({u, w, static_cast<Index>(f), k});
      }
    }
    std::sort(records.begin(), records.end(), [](const HalfRecord& x, const HalfRecord& y) {
      if (x.a != y.a) return x.a < y.a;
      if (x.b != y.b) return x.b < y.b;
      return x.face < y.face;
    });

    std::vector<std::array<Index, 3>> face_edges(faces_.size());
    for (std::size_t i = 0; i < records.size();) {
      std::size_t j = i;
      while (j < records.size() && records[j].a == records[i].a && records[j].b == records[i].b) ++j;
      if (j - i > 2) {
        throw StructuralError("non-manifold edge (" + std::to_string(records[i].a) + ", " +
                              std::to_string(records[i].b) + ") is shared by " + std::to_string(j - i) + " faces");
      }
      Edge e;
      e.a = records[i].a;
      e.b = records[i].b;
      for (std::size_t k = i; k < j; ++k) {
        e.face_ids[e.face_count++] = records[k].face;
        face_edges[records[k].face][records[k].local] = static_cast<Index>(edges_.size());
      }
      edges_.push_back(e);
      i = j;
    }

    face_adjacency_.offsets.assign(1, 0);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      for (Index ei : face_edges[f]) {
        const Edge& e = edges_[ei];
        if (e.interior()) face_adjacency_.values.push_back(e.face_ids[0] == f ? e.face_ids[1] : e.face_ids[0]);
      }
      face_adjacency_.offsets.push_back(face_adjacency_.values.size());
    }

    // Edges are sorted by (a, b), so appending to both endpoints keeps each
    // star sorted by neighbor index.
    std::vector<std::size_t> counts(vertex_count_, 0);
    for (const Edge& e : edges_) {
      ++counts[e.a];
      ++counts[e.b];
    }
    stars_.offsets.assign(vertex_count_ + 1, 0);
    for (std::size_t v = 0; v < vertex_count_; ++v) stars_.offsets[v + 1] = stars_.offsets[v] + counts[v];
    stars_.values.resize(stars_.offsets.back());
    std::vector<std::size_t> cursor(stars_.offsets.begin(), stars_.offsets.end() - 1);
    for (const Edge& e : edges_) {
      stars_.values[cursor[e.a]++] = StarEdge{e.b, e.face_ids, e.face_count};
      stars_.values[cursor[e.b]++] = StarEdge{e.a, e.face_ids, e.face_count};
    }
  }

  std::vector<Face> faces_;
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  detail::Rows<Index> vertex_faces_;
  detail::Rows<Index> face_adjacency_;
  detail::Rows<StarEdge> stars_;
};

/// Indexed triangle mesh: vertex positions plus shared, immutable topology.
class Mesh {
 public:
  Mesh() : topology_(std::make_shared<const Topology>()) {}

  Mesh(std::vector<Vec3> vertices, std::vector<Face> faces)
      : vertices_(std::move(vertices)),
        topology_(std::make_shared<const Topology>(std::move(faces), vertices_.size())) {}

  /// Same connectivity, new positions.
  Mesh with_vertices(std::vector<Vec3> vertices) const {
    if (vertices.size() != vertices_.size()) {
      throw ArgumentError("with_vertices: expected " + std::to_string(vertices_.size()) + " positions, got " +
                          std::to_string(vertices.size()));
    }
    Mesh m;
    m.vertices_ = std::move(vertices);
    m.topology_ = topology_;
    return m;
  }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return topology_->face_count(); }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
  std::span<const Face> faces() const { return topology_->faces(); }
  const Face& face(std::size_t f) const { return topology_->face(f); }
  const Topology& topology() const { return *topology_; }

  bool same_topology(const Mesh& other) const {
    return topology_ == other.topology_ ||
           std::equal(faces().begin(), faces().end(), other.faces().begin(), other.faces().end());
  }

 private:
  std::vector<Vec3> vertices_;
  std::shared_ptr<const Topology> topology_;
};

/// Per-face unit normal, area and centroid.
struct FaceField {
  std::vector<Vec3> normals;
  std::vector<double> areas;
  std::vector<Vec3> centroids;
  std::vector<char> degenerate;

  std::size_t size() const { return normals.size(); }
  std::size_t degenerate_count() const { return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1)); }
};

struct MeshStats {
  double avg_edge_length = 0.0;
  double avg_centroid_distance = 0.0;
  double bbox_diagonal = 0.0;
};

inline double bbox_diagonal(std::span<const Vec3> points) {
  if (points.empty()) return 0.0;
  Vec3 lo = points.front();
  Vec3 hi = points.front();
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

/// Faces with area below this fraction of the squared bounding-box diagonal are degenerate.
inline constexpr double kDegenerateAreaFactor = 1e-12;

inline FaceField compute_face_field(const Mesh& mesh) {
  const std::size_t nf = mesh.face_count();
  FaceField field;
  field.normals.resize(nf);
  field.areas.resize(nf);
  field.centroids.resize(nf);
  field.degenerate.assign(nf, 0);
  const double diag = bbox_diagonal(mesh.vertices());
  const double min_area = kDegenerateAreaFactor * diag * diag;
  for (std::size_t f = 0; f < nf; ++f) {
    const Face& t = mesh.face(f);
    const Vec3& p0 = mesh.vertex(t[0]);
    const Vec3& p1 = mesh.vertex(t[1]);
    const Vec3& p2 = mesh.vertex(t[2]);
    const Vec3 cross = (p1 - p0).cross(p2 - p0);
    const double len = cross.norm();
    field.areas[f] = 0.5 * len;
    field.centroids[f] = (p0 + p1 + p2) / 3.0;
    if (!(field.areas[f] >= min_area) || len == 0.0) {
      field.degenerate[f] = 1;
      field.normals[f] = Vec3::Zero();
    } else {
      field.normals[f] = cross / len;
    }
  }
  return field;
}

inline MeshStats mesh_stats(const Mesh& mesh) {
  const Topology& topo = mesh.topology();
  if (topo.edges().empty()) throw ArgumentError("mesh_stats: mesh has no edges");
  MeshStats s;
  double edge_sum = 0.0;
  for (const Edge& e : topo.edges()) edge_sum += (mesh.vertex(e.a) - mesh.vertex(e.b)).norm();
  s.avg_edge_length = edge_sum / static_cast<double>(topo.edges().size());

  double centroid_sum = 0.0;
  std::size_t pairs = 0;
  for (const Edge& e : topo.edges()) {
    if (!e.interior()) continue;
    const Face& fa = mesh.face(e.face_ids[0]);
    const Face& fb = mesh.face(e.face_ids[1]);
    const Vec3 ca = (mesh.vertex(fa[0]) + mesh.vertex(fa[1]) + mesh.vertex(fa[2])) / 3.0;
    const Vec3 cb = (mesh.vertex(fb[0]) + mesh.vertex(fb[1]) + mesh.vertex(fb[2])) / 3.0;
    centroid_sum += (ca - cb).norm();
    ++pairs;
  }
  // Without adjacent pairs fall back to the centroid spacing of two
  // equilateral triangles with the average edge length.
  s.avg_centroid_distance =
      pairs > 0 ? centroid_sum / static_cast<double>(pairs) : s.avg_edge_length / std::sqrt(3.0);
  s.bbox_diagonal = bbox_diagonal(mesh.vertices());
  return s;
}

/// Copy of the star of vertex i; use Topology::star for a non-owning view.
inline std::vector<StarEdge> vertex_star(const Mesh& mesh, std::size_t i) {
  if (i >= mesh.vertex_count()) throw ArgumentError("vertex_star: vertex index out of range");
  const auto star = mesh.topology().star(i);
  return {star.begin(), star.end()};
}

}  // namespace mdn
