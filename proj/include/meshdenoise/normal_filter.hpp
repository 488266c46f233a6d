#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "meshdenoise/mesh.hpp"
#include "meshdenoise/neighborhood.hpp"
#include "meshdenoise/parallel.hpp"

namespace mdn {

/// Similarity kernel on the normal-difference magnitude. Tukey is the
/// supported path; Gaussian exists for ablation runs.
enum class Similarity { Tukey, Gaussian };

struct FilterParams {
  double sigma_c = 1.0;
  double sigma_s = 0.5;
  Similarity similarity = Similarity::Tukey;

  void validate() const {
    if (!(sigma_c > 0.0) || !(sigma_s > 0.0)) throw ArgumentError("filter kernel widths must be positive");
  }
};

/// Tukey's bi-weight: 0.5 (1 - (x/s)^2)^2 for x <= s, zero beyond.
inline double tukey_weight(double x, double sigma_s) {
  if (x > sigma_s) return 0.0;
  // (s - x)(s + x) / s^2 avoids the cancellation in 1 - (x/s)^2 near the cutoff.
  const double w = ((sigma_s - x) * (sigma_s + x)) / (sigma_s * sigma_s);
  return 0.5 * w * w;
}

/// exp(-x^2 / (2 s^2)).
inline double gaussian_weight(double x, double sigma_c) {
  // Evaluate (x/s)^2 with its rounding residuals so the exponent is accurate
  // to the last bit before exp amplifies the error.
  const double q = x / sigma_c;
  const double q_residual = std::fma(-q, sigma_c, x) / sigma_c;
  const double p = q * q;
  const double p_residual = std::fma(q, q, -p);
  return std::exp(-0.5 * (p + (p_residual + 2.0 * q * q_residual)));
}

inline double similarity_weight(double x, const FilterParams& params) {
  return params.similarity == Similarity::Tukey ? tukey_weight(x, params.sigma_s) : gaussian_weight(x, params.sigma_s);
}

struct FilterResult {
  std::vector<Vec3> normals;
  // Faces whose weighted sum could not be renormalized; they keep their input normal.
  std::size_t warned_faces = 0;
};

/// One bilateral pass over all faces. Every face reads only the input
/// normals, so faces are independent and the result does not depend on the
/// worker count. Degenerate faces are skipped both as centers and as
/// neighbors.
inline FilterResult filter_normals(const FaceField& field, const NeighborDisk& disks, const FilterParams& params,
                                   unsigned workers = 1) {
  params.validate();
  const std::size_t nf = field.size();
  if (disks.face_count() != nf) throw ArgumentError("filter_normals: disks do not match the face field");

  FilterResult result;
  result.normals.resize(nf);
  std::vector<char> warned(nf, 0);
  parallel_for(nf, workers, [&](std::size_t i) {
    const Vec3& ni = field.normals[i];
    if (field.degenerate[i]) {
      result.normals[i] = ni;
      return;
    }
    const Vec3& ci = field.centroids[i];
    Vec3 sum = Vec3::Zero();
    double k = 0.0;
    for (const DiskEntry& e : disks[i]) {
      const Index j = e.face;
      if (field.degenerate[j]) continue;
      const Vec3& nj = field.normals[j];
      const double w = field.areas[j] * gaussian_weight((ci - field.centroids[j]).norm(), params.sigma_c) *
                       similarity_weight((ni - nj).norm(), params);
      sum += w * nj;
      k += w;
    }
    if (k > 0.0) {
      const Vec3 mean = sum / k;
      const double len = mean.norm();
      if (len >= 1e-12) {
        result.normals[i] = mean / len;
        return;
      }
    }
    result.normals[i] = ni;
    warned[i] = 1;
  });
  for (char w : warned) result.warned_faces += static_cast<std::size_t>(w);
  return result;
}

}  // namespace mdn
