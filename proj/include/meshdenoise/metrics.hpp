#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "meshdenoise/mesh.hpp"
#include "meshdenoise/parallel.hpp"

namespace mdn {

struct ClosestPoint {
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
};

namespace detail {

inline ClosestPoint closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec3 q = a + t * ab;
  return {q, (p - q).norm()};
}

}  // namespace detail

/// Exact closest point on a triangle by Voronoi-region classification.
/// Degenerate triangles fall back to the nearest of their three edges.
inline ClosestPoint closest_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const double scale = std::max({ab.squaredNorm(), ac.squaredNorm(), (c - b).squaredNorm()});
  if (ab.cross(ac).squaredNorm() <= 1e-24 * scale * scale) {
    ClosestPoint best = detail::closest_on_segment(p, a, b);
    for (const ClosestPoint& cand : {detail::closest_on_segment(p, b, c), detail::closest_on_segment(p, c, a)}) {
      if (cand.distance < best.distance) best = cand;
    }
    return best;
  }

  auto result = [&](const Vec3& q) { return ClosestPoint{q, (p - q).norm()}; };
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return result(a);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return result(b);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return result(a + (d1 / (d1 - d3)) * ab);

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return result(c);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return result(a + (d2 / (d2 - d6)) * ac);

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) return result(b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b));

  const double denom = 1.0 / (va + vb + vc);
  return result(a + ab * (vb * denom) + ac * (vc * denom));
}

/// Uniform grid over triangle bounding boxes answering exact
/// point-to-surface distance queries.
class TriangleGrid {
 public:
  explicit TriangleGrid(const Mesh& mesh) : mesh_(mesh) {
    const std::size_t nf = mesh.face_count();
    if (nf == 0) throw ArgumentError("TriangleGrid: reference mesh has no faces");
    lo_ = mesh.vertex(mesh.face(0)[0]);
    Vec3 hi = lo_;
    double extent_sum = 0.0;
    for (const Face& f : mesh.faces()) {
      Vec3 flo = mesh.vertex(f[0]);
      Vec3 fhi = flo;
      for (Index v : f) {
        flo = flo.cwiseMin(mesh.vertex(v));
        fhi = fhi.cwiseMax(mesh.vertex(v));
      }
      lo_ = lo_.cwiseMin(flo);
      hi = hi.cwiseMax(fhi);
      extent_sum += (fhi - flo).maxCoeff();
    }
    const Vec3 size = hi - lo_;
    const double diag = size.norm();
    cell_ = std::max(extent_sum / static_cast<double>(nf), diag * 1e-9);
    if (!(cell_ > 0.0)) cell_ = 1.0;
    // Keep the cell count within a small multiple of the face count.
    for (;;) {
      std::size_t total = 1;
      for (int a = 0; a < 3; ++a) {
        dims_[a] = static_cast<long long>(std::floor(size[a] / cell_)) + 1;
        total *= static_cast<std::size_t>(dims_[a]);
      }
      if (total <= 8 * nf + 64) break;
      cell_ *= 1.5;
    }

    std::vector<std::pair<std::size_t, Index>> entries;
    for (std::size_t f = 0; f < nf; ++f) {
      const Face& t = mesh.face(f);
      Vec3 flo = mesh.vertex(t[0]);
      Vec3 fhi = flo;
      for (Index v : t) {
        flo = flo.cwiseMin(mesh.vertex(v));
        fhi = fhi.cwiseMax(mesh.vertex(v));
      }
      const auto c0 = cell_of(flo);
      const auto c1 = cell_of(fhi);
      for (long long x = c0[0]; x <= c1[0]; ++x)
        for (long long y = c0[1]; y <= c1[1]; ++y)
          for (long long z = c0[2]; z <= c1[2]; ++z) entries.emplace_back(linear(x, y, z), static_cast<Index>(f));
    }
    std::sort(entries.begin(), entries.end());
    const std::size_t cells = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
    cells_.offsets.assign(cells + 1, 0);
    cells_.values.reserve(entries.size());
    for (const auto& [cell, face] : entries) {
      ++cells_.offsets[cell + 1];
      cells_.values.push_back(face);
    }
    for (std::size_t c = 0; c < cells; ++c) cells_.offsets[c + 1] += cells_.offsets[c];
  }

  /// Distance from p to the closest triangle. `stamp` is caller-owned scratch
  /// sized to the face count, letting concurrent callers share the grid.
  double distance(const Vec3& p, std::vector<std::size_t>& stamp, std::size_t& generation) const {
    ++generation;
    std::array<long long, 3> c;
    long long k_min = 0;
    long long k_max = 0;
    for (int a = 0; a < 3; ++a) {
      c[a] = static_cast<long long>(std::floor((p[a] - lo_[a]) / cell_));
      const long long below = -c[a];
      const long long above = c[a] - (dims_[a] - 1);
      k_min = std::max({k_min, below, above});
      k_max = std::max({k_max, std::llabs(c[a]), std::llabs(c[a] - (dims_[a] - 1))});
    }
    double best = std::numeric_limits<double>::infinity();
    for (long long k = k_min; k <= k_max; ++k) {
      // Cells k rings away are at least (k - 1) cell widths from p.
      if (best <= static_cast<double>(k - 1) * cell_) break;
      std::array<long long, 3> lo, hi;
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0LL, c[a] - k);
        hi[a] = std::min(dims_[a] - 1, c[a] + k);
      }
      for (long long x = lo[0]; x <= hi[0]; ++x)
        for (long long y = lo[1]; y <= hi[1]; ++y)
          for (long long z = lo[2]; z <= hi[2]; ++z) {
            if (std::max({std::llabs(x - c[0]), std::llabs(y - c[1]), std::llabs(z - c[2])}) != k) continue;
            for (Index f : cells_[linear(x, y, z)]) {
              if (stamp[f] == generation) continue;
              stamp[f] = generation;
              const Face& t = mesh_.face(f);
              const double d =
                  closest_point_triangle(p, mesh_.vertex(t[0]), mesh_.vertex(t[1]), mesh_.vertex(t[2])).distance;
              best = std::min(best, d);
            }
          }
    }
    return best;
  }

  double distance(const Vec3& p) const {
    std::vector<std::size_t> stamp(mesh_.face_count(), 0);
    std::size_t generation = 0;
    return distance(p, stamp, generation);
  }

 private:
  std::array<long long, 3> cell_of(const Vec3& p) const {
    std::array<long long, 3> c;
    for (int a = 0; a < 3; ++a) {
      c[a] = std::clamp(static_cast<long long>(std::floor((p[a] - lo_[a]) / cell_)), 0LL, dims_[a] - 1);
    }
    return c;
  }
  std::size_t linear(long long x, long long y, long long z) const {
    return static_cast<std::size_t>((x * dims_[1] + y) * dims_[2] + z);
  }

  const Mesh& mesh_;
  Vec3 lo_;
  double cell_ = 1.0;
  std::array<long long, 3> dims_{1, 1, 1};
  detail::Rows<Index> cells_;
};

struct AngleError {
  double radians = 0.0;
  double degrees = 0.0;
  std::size_t excluded_faces = 0;
};

inline void require_same_faces(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ArgumentError(std::string(what) + ": face counts differ (" + std::to_string(a) + " vs " +
                        std::to_string(b) + ")");
  }
}

// atan2 form of acos(clamp(a.b)): exact at 0 and well-conditioned near it.
inline double normal_angle(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

/// Mean angle between corresponding face normals. Faces degenerate in either
/// field are skipped and counted.
inline AngleError msae(const FaceField& denoised, const FaceField& reference) {
  require_same_faces(denoised.size(), reference.size(), "msae");
  AngleError out;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t f = 0; f < denoised.size(); ++f) {
    if (denoised.degenerate[f] || reference.degenerate[f]) {
      ++out.excluded_faces;
      continue;
    }
    sum += normal_angle(denoised.normals[f], reference.normals[f]);
    ++used;
  }
  out.radians = used > 0 ? sum / static_cast<double>(used) : 0.0;
  out.degrees = out.radians * 180.0 / std::numbers::pi;
  return out;
}

/// Area-weighted RMS distance from the denoised vertices to the reference
/// surface; per-vertex weights are the denoised incident face areas.
inline double positional_error(const Mesh& denoised, const Mesh& reference, unsigned workers = 1) {
  if (reference.face_count() == 0) throw ArgumentError("positional_error: reference mesh has no faces");
  const FaceField field = compute_face_field(denoised);
  double total_area = 0.0;
  for (double a : field.areas) total_area += a;
  if (!(total_area > 0.0)) throw ArgumentError("positional_error: denoised mesh has zero area");

  const TriangleGrid grid(reference);
  const std::size_t nv = denoised.vertex_count();
  std::vector<double> terms(nv, 0.0);
  parallel_for_chunks(nv, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> stamp(reference.face_count(), 0);
    std::size_t generation = 0;
    for (std::size_t v = begin; v < end; ++v) {
      double weight = 0.0;
      for (Index f : denoised.topology().vertex_faces(v)) weight += field.areas[f];
      if (weight == 0.0) continue;
      const double d = grid.distance(denoised.vertex(v), stamp, generation);
      terms[v] = weight * d * d;
    }
  });
  double sum = 0.0;
  for (double t : terms) sum += t;
  return std::sqrt(sum / (3.0 * total_area));
}

struct QualityReport {
  std::vector<double> per_face;  // +inf for degenerate faces
  double mean = 0.0;
  double max = 0.0;
  std::size_t degenerate_faces = 0;
};

/// Circumradius over shortest edge for a single triangle; +inf if degenerate.
inline double triangle_quality(const Vec3& p0, const Vec3& p1, const Vec3& p2, double min_area = 0.0) {
  const double a = (p1 - p0).norm();
  const double b = (p2 - p1).norm();
  const double c = (p0 - p2).norm();
  const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
  const double e_min = std::min({a, b, c});
  if (!(area > min_area) || !(e_min > 0.0)) return std::numeric_limits<double>::infinity();
  return (a * b * c) / (4.0 * area) / e_min;
}

/// Per-face quality with mean and max over non-degenerate faces.
inline QualityReport quality_index(const Mesh& mesh) {
  QualityReport out;
  const double diag = bbox_diagonal(mesh.vertices());
  const double min_area = kDegenerateAreaFactor * diag * diag;
  out.per_face.resize(mesh.face_count());
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Face& t = mesh.face(f);
    const double q = triangle_quality(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]), min_area);
    out.per_face[f] = q;
    if (std::isinf(q)) {
      ++out.degenerate_faces;
      continue;
    }
    sum += q;
    out.max = std::max(out.max, q);
    ++used;
  }
  out.mean = used > 0 ? sum / static_cast<double>(used) : 0.0;
  return out;
}

/// Faces whose normal points against the reference normal.
inline std::size_t flip_count(const FaceField& denoised, const FaceField& reference) {
  require_same_faces(denoised.size(), reference.size(), "flip_count");
  std::size_t count = 0;
  for (std::size_t f = 0; f < denoised.size(); ++f) {
    if (denoised.normals[f].dot(reference.normals[f]) < 0.0) ++count;
  }
  return count;
}

/// Reference-free flip statistic: faces whose normal points against the
/// area-weighted mean normal of the other faces sharing one of its vertices.
/// Not comparable with flip_count.
inline std::size_t intrinsic_flip_count(const Mesh& mesh, const FaceField& field) {
  std::size_t count = 0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    if (field.degenerate[f]) continue;
    Vec3 sum = Vec3::Zero();
    for (Index v : mesh.face(f)) {
      for (Index g : mesh.topology().vertex_faces(v)) {
        if (g != f) sum += field.areas[g] * field.normals[g];
      }
    }
    if (field.normals[f].dot(sum) < 0.0) ++count;
  }
  return count;
}

using EdgeKey = std::pair<Index, Index>;

/// Interior edges whose two face normals differ by at least theta_deg.
inline std::vector<EdgeKey> feature_edges(const Mesh& mesh, const FaceField& field, double theta_deg) {
  if (!(theta_deg > 0.0 && theta_deg < 180.0)) throw ArgumentError("feature_edges: theta must lie in (0, 180)");
  const double theta = theta_deg * std::numbers::pi / 180.0;
  std::vector<EdgeKey> out;
  for (const Edge& e : mesh.topology().edges()) {
    if (!e.interior()) continue;
    const Index fa = e.face_ids[0];
    const Index fb = e.face_ids[1];
    if (field.degenerate[fa] || field.degenerate[fb]) continue;
    if (normal_angle(field.normals[fa], field.normals[fb]) >= theta) out.emplace_back(e.a, e.b);
  }
  return out;
}

struct MetricsReport {
  double msae_deg = 0.0;
  double msae_rad = 0.0;
  double e_v = 0.0;
  double q_mean = 0.0;
  double q_max = 0.0;
  std::size_t flip_count = 0;
  std::size_t excluded_faces = 0;
  std::size_t degenerate_faces = 0;
  double feature_theta_deg = 65.0;
  std::vector<EdgeKey> feature_edges;
  std::optional<nlohmann::json> params_echo;
};

inline MetricsReport evaluate(const Mesh& denoised, const Mesh& reference, double feature_theta_deg = 65.0,
                              unsigned workers = 1) {
  if (!denoised.same_topology(reference)) throw ArgumentError("evaluate: meshes must share connectivity");
  const FaceField df = compute_face_field(denoised);
  const FaceField rf = compute_face_field(reference);
  MetricsReport r;
  const AngleError angle = msae(df, rf);
  r.msae_deg = angle.degrees;
  r.msae_rad = angle.radians;
  r.excluded_faces = angle.excluded_faces;
  r.e_v = positional_error(denoised, reference, workers);
  const QualityReport q = quality_index(denoised);
  r.q_mean = q.mean;
  r.q_max = q.max;
  r.degenerate_faces = q.degenerate_faces;
  r.flip_count = flip_count(df, rf);
  r.feature_theta_deg = feature_theta_deg;
  r.feature_edges = feature_edges(denoised, df, feature_theta_deg);
  return r;
}

inline nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : r.feature_edges) edges.push_back({a, b});
  nlohmann::json j = {
      {"msae_deg", r.msae_deg},
      {"msae_rad", r.msae_rad},
      {"e_v", r.e_v},
      {"q_mean", r.q_mean},
      {"q_max", r.q_max},
      {"flip_count", r.flip_count},
      {"excluded_faces", r.excluded_faces},
      {"degenerate_faces", r.degenerate_faces},
      {"feature_theta_deg", r.feature_theta_deg},
      {"feature_edge_count", r.feature_edges.size()},
      {"feature_edges", edges},
  };
  j["params"] = r.params_echo ? *r.params_echo : nlohmann::json(nullptr);
  return j;
}

/// Single-row text table with columns MSAE | E_v x 1e-3 | Q | Parameters.
inline std::string to_table(const MetricsReport& r, const std::string& label = "mesh") {
  std::string params = "-";
  if (r.params_echo && r.params_echo->contains("sigma_s")) {
    const auto& p = *r.params_echo;
    std::ostringstream s;
    s << '(' << p.value("sigma_s", 0.0) << ", " << p.value("lambda_I", 0.0) << ", " << p.value("iterations", 0)
      << ')';
    params = s.str();
  }
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-16s %10s %14s %8s %8s  %s\n", "Model", "MSAE", "E_v(x1e-3)", "Q", "Flips",
                "Parameters");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-16s %10.4f %14.4f %8.4f %8zu  %s\n", label.c_str(), r.msae_deg, r.e_v * 1e3,
                r.q_mean, r.flip_count, params.c_str());
  out += buf;
  return out;
}

}  // namespace mdn
