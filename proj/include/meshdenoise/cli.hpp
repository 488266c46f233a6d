#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "meshdenoise/mesh_io.hpp"
#include "meshdenoise/metrics.hpp"
#include "meshdenoise/noise.hpp"
#include "meshdenoise/pipeline.hpp"

namespace mdn::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

namespace detail {

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline MeshFormat output_format(const std::filesystem::path& path, bool ply_ascii) {
  const MeshFormat f = format_from_path(path);
  return (f == MeshFormat::PlyBinary && ply_ascii) ? MeshFormat::PlyAscii : f;
}

// Thrown for parameter values that parse but are invalid; reported as usage errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace detail

/// Runs the command line. Output and diagnostics go to the given streams so
/// the tool can be driven in-process.
inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Feature-preserving triangle mesh denoising", "meshdenoise"};
  app.require_subcommand(1);

  // denoise
  auto* denoise_cmd = app.add_subcommand("denoise", "Denoise a mesh with bilateral normal filtering and vertex update");
  std::string dn_in, dn_out, dn_log, dn_config, dn_similarity = "tukey", dn_fidelity = "full";
  DenoiseConfig dn_defaults;
  double dn_sigma_s = dn_defaults.sigma_s, dn_lambda = dn_defaults.lambda_I, dn_decay = dn_defaults.decay;
  double dn_sigma_c = 0.0, dn_radius = 0.0;
  int dn_iters = dn_defaults.iterations, dn_inner = dn_defaults.inner_vertex_iters;
  unsigned dn_workers = 1;
  bool dn_recompute = false, dn_ascii = false;
  denoise_cmd->add_option("input", dn_in, "Input mesh (.obj or .ply)")->required();
  denoise_cmd->add_option("-o,--output", dn_out, "Output mesh")->required();
  auto* o_sigma_s = denoise_cmd->add_option("--sigma-s", dn_sigma_s, "Similarity kernel width");
  auto* o_lambda = denoise_cmd->add_option("--lambda", dn_lambda, "Fidelity factor lambda_I");
  auto* o_iters = denoise_cmd->add_option("--iters", dn_iters, "Outer iterations");
  auto* o_sigma_c = denoise_cmd->add_option("--sigma-c", dn_sigma_c, "Closeness kernel width (default c_a)");
  auto* o_radius = denoise_cmd->add_option("--radius", dn_radius, "Neighbor disk radius (default 2 c_a)");
  auto* o_decay = denoise_cmd->add_option("--decay", dn_decay, "Per-iteration lambda decay");
  auto* o_inner = denoise_cmd->add_option("--inner-iters", dn_inner, "Vertex passes per outer iteration");
  auto* o_recompute = denoise_cmd->add_flag("--recompute-disks", dn_recompute, "Rebuild neighbor disks every iteration");
  auto* o_similarity = denoise_cmd->add_option("--similarity", dn_similarity, "tukey | gaussian (ablation)")
                           ->check(CLI::IsMember({"tukey", "gaussian"}));
  auto* o_fidelity = denoise_cmd->add_option("--fidelity", dn_fidelity, "full | tangent (ablation)")
                         ->check(CLI::IsMember({"full", "tangent"}));
  auto* o_workers = denoise_cmd->add_option("--workers", dn_workers, "Worker threads (0 = all cores)");
  denoise_cmd->add_option("--config", dn_config, "JSON config; explicit flags override it");
  denoise_cmd->add_option("--log", dn_log, "Iteration log path (default <output>.log.json)");
  denoise_cmd->add_flag("--ply-ascii", dn_ascii, "Write ASCII instead of binary PLY");

  // add-noise
  auto* noise_cmd = app.add_subcommand("add-noise", "Corrupt a mesh with synthetic noise");
  std::string nz_in, nz_out, nz_prov, nz_dist = "gaussian", nz_dir = "random";
  double nz_k = 0.3;
  std::uint64_t nz_seed = 0;
  bool nz_ascii = false;
  noise_cmd->add_option("input", nz_in, "Clean mesh")->required();
  noise_cmd->add_option("-o,--output", nz_out, "Noisy mesh (default <stem>.noisy<ext>)");
  noise_cmd->add_option("--dist", nz_dist, "gaussian | uniform")->check(CLI::IsMember({"gaussian", "uniform"}));
  noise_cmd->add_option("--dir", nz_dir, "random | normal")->check(CLI::IsMember({"random", "normal"}));
  noise_cmd->add_option("--k", nz_k, "Intensity in multiples of the average edge length")->check(CLI::NonNegativeNumber);
  noise_cmd->add_option("--seed", nz_seed, "Random seed");
  noise_cmd->add_option("--provenance", nz_prov, "Provenance JSON path (default <output>.noise.json)");
  noise_cmd->add_flag("--ply-ascii", nz_ascii, "Write ASCII instead of binary PLY");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Compare a denoised mesh with its reference");
  std::string mt_in, mt_ref, mt_out, mt_log, mt_label = "mesh";
  double mt_theta = 65.0;
  bool mt_table = false;
  unsigned mt_workers = 1;
  metrics_cmd->add_option("input", mt_in, "Denoised mesh")->required();
  metrics_cmd->add_option("--reference", mt_ref, "Ground-truth mesh with identical connectivity")->required();
  metrics_cmd->add_option("--theta", mt_theta, "Feature-edge dihedral threshold in degrees");
  metrics_cmd->add_option("--log", mt_log, "Denoise log whose parameters are echoed in the report");
  metrics_cmd->add_option("-o,--output", mt_out, "Report JSON path (default stdout)");
  metrics_cmd->add_flag("--table", mt_table, "Print an aligned text table instead of JSON");
  metrics_cmd->add_option("--label", mt_label, "Row label for --table");
  metrics_cmd->add_option("--workers", mt_workers, "Worker threads");

  // feature-edges
  auto* fe_cmd = app.add_subcommand("feature-edges", "List edges whose dihedral angle exceeds a threshold");
  std::string fe_in, fe_out;
  double fe_theta = 65.0;
  fe_cmd->add_option("input", fe_in, "Mesh")->required();
  fe_cmd->add_option("--theta", fe_theta, "Dihedral threshold in degrees");
  fe_cmd->add_option("-o,--output", fe_out, "Edge list path (default stdout)");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Print mesh statistics");
  std::string st_in;
  stats_cmd->add_option("input", st_in, "Mesh")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (denoise_cmd->parsed()) {
      DenoiseConfig config;
      try {
        if (!dn_config.empty()) config = config_from_json(detail::read_json(dn_config), config);
        if (o_sigma_s->count()) config.sigma_s = dn_sigma_s;
        if (o_lambda->count()) config.lambda_I = dn_lambda;
        if (o_iters->count()) config.iterations = dn_iters;
        if (o_sigma_c->count()) config.sigma_c = dn_sigma_c;
        if (o_radius->count()) config.radius = dn_radius;
        if (o_decay->count()) config.decay = dn_decay;
        if (o_inner->count()) config.inner_vertex_iters = dn_inner;
        if (o_recompute->count()) config.recompute_disks = dn_recompute;
        if (o_similarity->count()) config.similarity = dn_similarity == "tukey" ? Similarity::Tukey : Similarity::Gaussian;
        if (o_fidelity->count()) config.fidelity = dn_fidelity == "full" ? FidelityMode::Full : FidelityMode::TangentOnly;
        if (o_workers->count()) config.workers = dn_workers;
        config.validate();
      } catch (const ArgumentError& e) {
        throw detail::UsageError(e.what());
      }
      const MeshFormat format = detail::output_format(dn_out, dn_ascii);
      const Mesh input = load_mesh(dn_in);
      const DenoiseResult result = denoise(input, config);
      save_mesh(result.mesh, dn_out, format);
      detail::write_json(log_to_json(config, result), dn_log.empty() ? dn_out + ".log.json" : dn_log);
      return kOk;
    }

    if (noise_cmd->parsed()) {
      NoiseSpec spec;
      spec.distribution = nz_dist == "gaussian" ? NoiseDistribution::Gaussian : NoiseDistribution::Uniform;
      spec.direction = nz_dir == "random" ? NoiseDirection::Random : NoiseDirection::VertexNormal;
      spec.intensity = nz_k;
      spec.seed = nz_seed;
      if (nz_out.empty()) {
        const std::filesystem::path p(nz_in);
        nz_out = (p.parent_path() / (p.stem().string() + ".noisy" + p.extension().string())).string();
      }
      const MeshFormat format = detail::output_format(nz_out, nz_ascii);
      const Mesh clean = load_mesh(nz_in);
      save_mesh(add_noise(clean, spec), nz_out, format);
      nlohmann::json prov = noise_provenance(clean, spec);
      prov["input"] = nz_in;
      prov["output"] = nz_out;
      detail::write_json(prov, nz_prov.empty() ? nz_out + ".noise.json" : nz_prov);
      return kOk;
    }

    if (metrics_cmd->parsed()) {
      if (!(mt_theta > 0.0 && mt_theta < 180.0)) throw detail::UsageError("--theta must lie in (0, 180)");
      const Mesh denoised = load_mesh(mt_in);
      const Mesh reference = load_mesh(mt_ref);
      MetricsReport report = evaluate(denoised, reference, mt_theta, mt_workers);
      if (!mt_log.empty()) {
        const nlohmann::json log = detail::read_json(mt_log);
        report.params_echo = log.contains("config") ? log["config"] : log;
      }
      const std::string text = mt_table ? to_table(report, mt_label) : to_json(report).dump(2) + "\n";
      if (mt_out.empty()) {
        out << text;
      } else {
        std::ofstream f(mt_out, std::ios::trunc);
        if (!f) throw IoError("cannot open '" + mt_out + "' for writing");
        f << text;
      }
      return kOk;
    }

    if (fe_cmd->parsed()) {
      if (!(fe_theta > 0.0 && fe_theta < 180.0)) throw detail::UsageError("--theta must lie in (0, 180)");
      const Mesh mesh = load_mesh(fe_in);
      const auto edges = feature_edges(mesh, compute_face_field(mesh), fe_theta);
      std::ostringstream text;
      for (const auto& [a, b] : edges) text << a << ' ' << b << '\n';
      if (fe_out.empty()) {
        out << text.str();
      } else {
        std::ofstream f(fe_out, std::ios::trunc);
        if (!f) throw IoError("cannot open '" + fe_out + "' for writing");
        f << text.str();
      }
      return kOk;
    }

    if (stats_cmd->parsed()) {
      const Mesh mesh = load_mesh(st_in);
      const MeshStats s = mesh_stats(mesh);
      const nlohmann::json j = {{"vertices", mesh.vertex_count()},
                                {"faces", mesh.face_count()},
                                {"edges", mesh.topology().edges().size()},
                                {"avg_edge_length", s.avg_edge_length},
                                {"avg_centroid_distance", s.avg_centroid_distance},
                                {"bbox_diagonal", s.bbox_diagonal}};
      out << j.dump(2) << '\n';
      return kOk;
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

inline int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args);
}

}  // namespace mdn::cli
