#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "meshdenoise/mesh.hpp"

namespace mdn {

enum class NoiseDistribution { Gaussian, Uniform };
enum class NoiseDirection { Random, VertexNormal };

/// Displacement magnitudes scale with intensity * average edge length.
struct NoiseSpec {
  NoiseDistribution distribution = NoiseDistribution::Gaussian;
  NoiseDirection direction = NoiseDirection::Random;
  double intensity = 0.0;
  std::uint64_t seed = 0;
};

/// Portable random stream: std::mt19937_64 (fully specified by the standard)
/// with hand-written conversions, since the standard distributions are
/// implementation-defined.
class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1) with 53 random bits.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes two draws per call.
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform direction on the unit sphere from a normalized Gaussian triple.
  Vec3 unit_vector() {
    for (;;) {
      Vec3 v(gaussian(), gaussian(), gaussian());
      const double len = v.norm();
      if (len > 1e-12) return v / len;
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline std::string to_string(NoiseDistribution d) { return d == NoiseDistribution::Gaussian ? "gaussian" : "uniform"; }
inline std::string to_string(NoiseDirection d) { return d == NoiseDirection::Random ? "random" : "normal"; }

/// Area-weighted vertex normals of a mesh's own faces; zero for vertices
/// without a usable incident face.
inline std::vector<Vec3> area_weighted_vertex_normals(const Mesh& mesh) {
  const FaceField field = compute_face_field(mesh);
  std::vector<Vec3> normals(mesh.vertex_count(), Vec3::Zero());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    Vec3 sum = Vec3::Zero();
    for (Index f : mesh.topology().vertex_faces(v)) sum += field.areas[f] * field.normals[f];
    const double len = sum.norm();
    if (len > 0.0) normals[v] = sum / len;
  }
  return normals;
}

/// Displaces each vertex by m * d. The random stream is consumed in vertex
/// order (direction first, then magnitude), so a seed fixes the output.
inline Mesh add_noise(const Mesh& mesh, const NoiseSpec& spec) {
  if (!(spec.intensity >= 0.0)) throw ArgumentError("noise intensity must be non-negative");
  if (spec.intensity == 0.0) return mesh;
  const double sigma = spec.intensity * mesh_stats(mesh).avg_edge_length;
  std::vector<Vec3> normals;
  if (spec.direction == NoiseDirection::VertexNormal) normals = area_weighted_vertex_normals(mesh);

  NoiseRng rng(spec.seed);
  std::vector<Vec3> out = mesh.vertices();
  for (std::size_t v = 0; v < out.size(); ++v) {
    const Vec3 dir = spec.direction == NoiseDirection::Random ? rng.unit_vector() : normals[v];
    const double m = spec.distribution == NoiseDistribution::Gaussian ? sigma * rng.gaussian()
                                                                       : rng.uniform(-sigma, sigma);
    out[v] += m * dir;
  }
  return mesh.with_vertices(std::move(out));
}

/// Sidecar record that makes a corruption reproducible.
inline nlohmann::json noise_provenance(const Mesh& clean, const NoiseSpec& spec) {
  const MeshStats stats = mesh_stats(clean);
  return {
      {"distribution", to_string(spec.distribution)},
      {"direction", to_string(spec.direction)},
      {"intensity", spec.intensity},
      {"seed", spec.seed},
      {"avg_edge_length", stats.avg_edge_length},
      {"sigma_n", spec.intensity * stats.avg_edge_length},
      {"generator", "mt19937_64; uniform=(u64>>11 + 0.5)*2^-53; normal=Box-Muller"},
      {"vertex_count", clean.vertex_count()},
      {"face_count", clean.face_count()},
  };
}

}  // namespace mdn
