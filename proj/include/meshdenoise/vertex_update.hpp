#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshdenoise/mesh.hpp"
#include "meshdenoise/parallel.hpp"

namespace mdn {

/// Which part of the differential coordinate drives the fidelity term.
/// TangentOnly reproduces the tangent-diffusion ablation and is not meant for
/// production runs.
enum class FidelityMode { Full, TangentOnly };

struct UpdateParams {
  double lambda_I = 0.0;
  double decay = 0.6;
  int inner_vertex_iters = 1;
  FidelityMode fidelity = FidelityMode::Full;

  void validate() const {
    if (!(lambda_I >= 0.0)) throw ArgumentError("lambda_I must be non-negative");
    if (!(decay > 0.0 && decay <= 1.0)) throw ArgumentError("decay must lie in (0, 1]");
    if (inner_vertex_iters < 1) throw ArgumentError("inner_vertex_iters must be positive");
  }
};

struct DifferentialCoordinate {
  Vec3 d = Vec3::Zero();
  Vec3 tangential = Vec3::Zero();
  Vec3 r = Vec3::Zero();
};

/// Area-weighted mean of the incident filtered face normals, renormalized.
/// Empty when the vertex has no usable incident face.
inline std::optional<Vec3> vertex_normal(const Mesh& mesh, std::span<const Vec3> face_normals, std::size_t i) {
  Vec3 sum = Vec3::Zero();
  double area_sum = 0.0;
  for (Index f : mesh.topology().vertex_faces(i)) {
    const Face& t = mesh.face(f);
    const double a =
        0.5 * (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(mesh.vertex(t[2]) - mesh.vertex(t[0])).norm();
    sum += a * face_normals[f];
    area_sum += a;
  }
  if (!(area_sum > 0.0)) return std::nullopt;
  const Vec3 mean = sum / area_sum;
  const double len = mean.norm();
  if (!(len >= 1e-12)) return std::nullopt;
  return mean / len;
}

/// Offset from v_i to the squared-edge-length weighted centroid of its 1-ring.
inline Vec3 differential_coordinate(const Mesh& mesh, std::size_t i) {
  const Vec3& vi = mesh.vertex(i);
  Vec3 weighted = Vec3::Zero();
  double weight_sum = 0.0;
  for (const StarEdge& e : mesh.topology().star(i)) {
    const Vec3& vj = mesh.vertex(e.neighbor);
    const double w = (vi - vj).squaredNorm();
    weighted += w * vj;
    weight_sum += w;
  }
  if (!(weight_sum > 0.0)) return Vec3::Zero();
  return weighted / weight_sum - vi;
}

inline DifferentialCoordinate fidelity_term(const Vec3& d, const Vec3& vnormal) {
  DifferentialCoordinate out;
  out.d = d;
  out.tangential = d - d.dot(vnormal) * vnormal;
  out.r = out.d + out.tangential;
  return out;
}

/// Descent direction of the edge/face-normal orthogonality energy at vertex i:
/// (1 / 3|F_v(i)|) * sum over star edges (i,j) and faces k on them of
/// (n_k . (v_j - v_i)) n_k.
inline Vec3 orthogonality_step(const Mesh& mesh, std::span<const Vec3> face_normals, std::size_t i) {
  const Topology& topo = mesh.topology();
  const std::size_t face_count = topo.vertex_faces(i).size();
  if (face_count == 0) return Vec3::Zero();
  const Vec3& vi = mesh.vertex(i);
  Vec3 step = Vec3::Zero();
  for (const StarEdge& e : topo.star(i)) {
    const Vec3 edge = mesh.vertex(e.neighbor) - vi;
    for (Index k : e.faces()) {
      const Vec3& n = face_normals[k];
      step += n.dot(edge) * n;
    }
  }
  return step / (3.0 * static_cast<double>(face_count));
}

struct VertexUpdateResult {
  std::vector<Vec3> positions;
  // Vertices that fell back to R = 2D because their normal was undefined (summed over inner passes).
  std::size_t undefined_normals = 0;
};

/// Explicit update v + orthogonality_step + lambda * R for every vertex,
/// computed from a snapshot of the input positions and repeated
/// inner_vertex_iters times with the face normals held fixed.
inline VertexUpdateResult update_vertices(const Mesh& mesh, std::span<const Vec3> face_normals,
                                          const UpdateParams& params, double lambda, unsigned workers = 1) {
  params.validate();
  if (!(lambda >= 0.0)) throw ArgumentError("update_vertices: lambda must be non-negative");
  if (face_normals.size() != mesh.face_count()) throw ArgumentError("update_vertices: normals do not match mesh");

  VertexUpdateResult result;
  Mesh current = mesh;
  const std::size_t nv = mesh.vertex_count();
  std::vector<char> undefined(nv, 0);
  for (int pass = 0; pass < params.inner_vertex_iters; ++pass) {
    std::vector<Vec3> next(nv);
    parallel_for(nv, workers, [&](std::size_t i) {
      Vec3 p = current.vertex(i) + orthogonality_step(current, face_normals, i);
      undefined[i] = 0;
      if (lambda > 0.0) {
        const Vec3 d = differential_coordinate(current, i);
        const std::optional<Vec3> n = vertex_normal(current, face_normals, i);
        DifferentialCoordinate dc;
        if (n) {
          dc = fidelity_term(d, *n);
        } else {
          dc = DifferentialCoordinate{d, d, d + d};
          undefined[i] = 1;
        }
        p += lambda * (params.fidelity == FidelityMode::Full ? dc.r : dc.tangential);
      }
      next[i] = p;
    });
    for (std::size_t i = 0; i < nv; ++i) {
      if (!next[i].allFinite()) {
        throw NumericError("vertex update produced a non-finite position at vertex " + std::to_string(i));
      }
      result.undefined_normals += static_cast<std::size_t>(undefined[i]);
    }
    current = current.with_vertices(std::move(next));
  }
  result.positions = current.vertices();
  return result;
}

inline double decay_lambda(double lambda, double decay) { return decay * lambda; }

}  // namespace mdn
