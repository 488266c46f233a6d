#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "meshdenoise/mesh.hpp"
#include "meshdenoise/parallel.hpp"

namespace mdn {

struct DiskEntry {
  Index face = 0;
  double distance = 0.0;
};

/// Geometric neighbor disk of every face. Entry lists start with the face
/// itself and follow breadth-first discovery order.
class NeighborDisk {
 public:
  NeighborDisk() = default;
  NeighborDisk(double radius, detail::Rows<DiskEntry> rows) : radius_(radius), rows_(std::move(rows)) {}

  double radius() const { return radius_; }
  std::size_t face_count() const { return rows_.size(); }
  std::span<const DiskEntry> operator[](std::size_t face) const { return rows_[face]; }

  std::size_t total_entries() const { return rows_.values.size(); }

 private:
  double radius_ = 0.0;
  detail::Rows<DiskEntry> rows_;
};

inline double default_radius(const MeshStats& stats) { return 2.0 * stats.avg_centroid_distance; }

/// Breadth-first search over edge-adjacent faces starting at each face,
/// admitting faces whose centroid is within `radius` of the start face's
/// centroid and expanding only through admitted faces.
inline NeighborDisk build_disks(const Mesh& mesh, const FaceField& field, double radius, unsigned workers = 1) {
  if (!(radius > 0.0)) throw ArgumentError("build_disks: radius must be positive");
  const std::size_t nf = mesh.face_count();
  if (field.size() != nf) throw ArgumentError("build_disks: face field does not match mesh");
  const Topology& topo = mesh.topology();

  std::vector<std::vector<DiskEntry>> per_face(nf);
  parallel_for_chunks(nf, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> stamp(nf, 0);
    std::size_t generation = 0;
    std::vector<Index> queue;
    for (std::size_t i = begin; i < end; ++i) {
      ++generation;
      auto& out = per_face[i];
      const Vec3& ci = field.centroids[i];
      queue.assign(1, static_cast<Index>(i));
      stamp[i] = generation;
      out.push_back({static_cast<Index>(i), 0.0});
      for (std::size_t head = 0; head < queue.size(); ++head) {
        for (Index g : topo.face_neighbors(queue[head])) {
          if (stamp[g] == generation) continue;
          stamp[g] = generation;
          const double d = (field.centroids[g] - ci).norm();
          if (d <= radius) {
            out.push_back({g, d});
            queue.push_back(g);
          }
        }
      }
    }
  });

  detail::Rows<DiskEntry> rows;
  rows.offsets.reserve(nf + 1);
  for (auto& list : per_face) {
    rows.values.insert(rows.values.end(), list.begin(), list.end());
    rows.offsets.push_back(rows.values.size());
  }
  return NeighborDisk(radius, std::move(rows));
}

}  // namespace mdn
