#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "meshdenoise/mesh.hpp"
#include "meshdenoise/neighborhood.hpp"
#include "meshdenoise/normal_filter.hpp"
#include "meshdenoise/vertex_update.hpp"

namespace mdn {

/// The three user parameters (sigma_s, lambda_I, iterations) plus expert
/// overrides. Unset overrides are derived from the input mesh:
/// radius = 2 c_a, sigma_c = c_a.
struct DenoiseConfig {
  double sigma_s = 0.5;
  double lambda_I = 0.2;
  int iterations = 50;
  std::optional<double> sigma_c;
  std::optional<double> radius;
  double decay = 0.6;
  int inner_vertex_iters = 1;
  bool recompute_disks = false;
  Similarity similarity = Similarity::Tukey;
  FidelityMode fidelity = FidelityMode::Full;
  unsigned workers = 1;

  void validate() const {
    if (iterations < 1) throw ArgumentError("iterations must be at least 1");
    if (!(sigma_s > 0.0)) throw ArgumentError("sigma_s must be positive");
    if (!(lambda_I >= 0.0)) throw ArgumentError("lambda_I must be non-negative");
    if (sigma_c && !(*sigma_c > 0.0)) throw ArgumentError("sigma_c must be positive");
    if (radius && !(*radius > 0.0)) throw ArgumentError("radius must be positive");
    UpdateParams{lambda_I, decay, inner_vertex_iters, fidelity}.validate();
  }
};

struct IterationRecord {
  int iteration = 0;
  double lambda = 0.0;
  double max_displacement = 0.0;
  std::size_t warned_faces = 0;
  std::size_t undefined_vertex_normals = 0;
};

struct DenoiseResult {
  Mesh mesh;
  std::vector<IterationRecord> log;
  double avg_centroid_distance = 0.0;
  double radius = 0.0;
  double sigma_c = 0.0;
};

/// Two-stage denoiser. Each outer iteration recomputes the face field from the
/// current positions, runs one bilateral normal pass, moves the vertices with
/// the current lambda and then decays lambda.
inline DenoiseResult denoise(const Mesh& input, const DenoiseConfig& config) {
  config.validate();
  if (input.face_count() == 0) throw ArgumentError("denoise: mesh has no faces");

  DenoiseResult out;
  const MeshStats stats = mesh_stats(input);
  out.avg_centroid_distance = stats.avg_centroid_distance;
  out.radius = config.radius.value_or(default_radius(stats));
  out.sigma_c = config.sigma_c.value_or(stats.avg_centroid_distance);

  const FilterParams filter{out.sigma_c, config.sigma_s, config.similarity};
  const UpdateParams update{config.lambda_I, config.decay, config.inner_vertex_iters, config.fidelity};

  Mesh mesh = input;
  FaceField field = compute_face_field(mesh);
  NeighborDisk disks = build_disks(mesh, field, out.radius, config.workers);
  double lambda = config.lambda_I;
  out.log.reserve(static_cast<std::size_t>(config.iterations));

  for (int t = 0; t < config.iterations; ++t) {
    if (t > 0) {
      field = compute_face_field(mesh);
      if (config.recompute_disks) disks = build_disks(mesh, field, out.radius, config.workers);
    }
    const FilterResult filtered = filter_normals(field, disks, filter, config.workers);
    VertexUpdateResult moved = update_vertices(mesh, filtered.normals, update, lambda, config.workers);

    IterationRecord rec;
    rec.iteration = t;
    rec.lambda = lambda;
    rec.warned_faces = filtered.warned_faces;
    rec.undefined_vertex_normals = moved.undefined_normals;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
      rec.max_displacement = std::max(rec.max_displacement, (moved.positions[v] - mesh.vertex(v)).norm());
    }
    out.log.push_back(rec);

    mesh = mesh.with_vertices(std::move(moved.positions));
    lambda = decay_lambda(lambda, config.decay);
  }
  out.mesh = std::move(mesh);
  return out;
}

inline std::string to_string(Similarity s) { return s == Similarity::Tukey ? "tukey" : "gaussian"; }
inline std::string to_string(FidelityMode m) { return m == FidelityMode::Full ? "full" : "tangent"; }

inline nlohmann::json to_json(const DenoiseConfig& c) {
  nlohmann::json j = {
      {"sigma_s", c.sigma_s},
      {"lambda_I", c.lambda_I},
      {"iterations", c.iterations},
      {"decay", c.decay},
      {"inner_vertex_iters", c.inner_vertex_iters},
      {"recompute_disks", c.recompute_disks},
      {"similarity", to_string(c.similarity)},
      {"fidelity", to_string(c.fidelity)},
      {"workers", c.workers},
  };
  j["sigma_c"] = c.sigma_c ? nlohmann::json(*c.sigma_c) : nlohmann::json(nullptr);
  j["radius"] = c.radius ? nlohmann::json(*c.radius) : nlohmann::json(nullptr);
  return j;
}

/// Reads the keys written by to_json; absent keys keep the values in `base`.
inline DenoiseConfig config_from_json(const nlohmann::json& j, DenoiseConfig base = {}) {
  if (!j.is_object()) throw ArgumentError("denoise config must be a JSON object");
  auto number = [&](const char* key, double& dst) {
    if (j.contains(key) && !j[key].is_null()) dst = j[key].get<double>();
  };
  auto optional_number = [&](const char* key, std::optional<double>& dst) {
    if (j.contains(key) && !j[key].is_null()) dst = j[key].get<double>();
  };
  try {
    number("sigma_s", base.sigma_s);
    number("lambda_I", base.lambda_I);
    number("decay", base.decay);
    optional_number("sigma_c", base.sigma_c);
    optional_number("radius", base.radius);
    if (j.contains("iterations")) base.iterations = j["iterations"].get<int>();
    if (j.contains("inner_vertex_iters")) base.inner_vertex_iters = j["inner_vertex_iters"].get<int>();
    if (j.contains("recompute_disks")) base.recompute_disks = j["recompute_disks"].get<bool>();
    if (j.contains("workers")) base.workers = j["workers"].get<unsigned>();
    if (j.contains("similarity")) {
      const auto s = j["similarity"].get<std::string>();
      if (s == "tukey") base.similarity = Similarity::Tukey;
      else if (s == "gaussian") base.similarity = Similarity::Gaussian;
      else throw ArgumentError("unknown similarity '" + s + "'");
    }
    if (j.contains("fidelity")) {
      const auto s = j["fidelity"].get<std::string>();
      if (s == "full") base.fidelity = FidelityMode::Full;
      else if (s == "tangent") base.fidelity = FidelityMode::TangentOnly;
      else throw ArgumentError("unknown fidelity mode '" + s + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad denoise config: ") + e.what());
  }
  return base;
}

inline nlohmann::json log_to_json(const DenoiseConfig& config, const DenoiseResult& result) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const IterationRecord& r : result.log) {
    iterations.push_back({{"iteration", r.iteration},
                          {"lambda", r.lambda},
                          {"max_displacement", r.max_displacement},
                          {"warned_faces", r.warned_faces},
                          {"undefined_vertex_normals", r.undefined_vertex_normals}});
  }
  return {
      {"config", to_json(config)},
      {"derived", {{"avg_centroid_distance", result.avg_centroid_distance},
                   {"radius", result.radius},
                   {"sigma_c", result.sigma_c}}},
      {"iterations", iterations},
  };
}

}  // namespace mdn
