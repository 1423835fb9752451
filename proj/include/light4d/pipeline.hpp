#pragma once

#include "light4d/config.hpp"
#include "light4d/guidance.hpp"
#include "light4d/metrics.hpp"
#include "light4d/scenes.hpp"

#include <filesystem>
#include <memory>
#include <vector>

namespace light4d {

// Everything the solver needs for one configured scene.
struct SceneSetup {
  VideoTensor source;        // yaw-0 camera, source light
  RenderedScene geometry;    // target views, source light
  VideoTensor ground_truth;  // target views, target light
};

SceneSetup prepare_scene(const RunConfig& cfg);

std::shared_ptr<const LatentCodec> make_codec(const RunConfig& cfg);
GuidanceRun make_guidance_run(const RunConfig& cfg, const SceneSetup& scene);
LatentVideo make_init_latent(const RunConfig& cfg, const SceneSetup& scene, const LatentCodec& codec);

struct PipelineResult {
  SceneSetup scene;
  InferenceResult inference;
  // Against the source-lit target views and against the ground-truth relit views.
  MetricReport vs_source;
  MetricReport vs_ground_truth;
};

PipelineResult run_pipeline(const RunConfig& cfg);

// frames/, trace.csv, metrics_source.{json,csv}, metrics_ground_truth.{json,csv},
// output.l4dt and the effective config.toml.
void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const PipelineResult& r);

// Source, geometry and ground-truth frames plus normal/albedo/mask dumps.
void write_scene(const std::filesystem::path& dir, const RunConfig& cfg, const SceneSetup& scene);

struct TauGRow {
  double tau_g = 0.0;
  double hfpr = 0.0;            // against the source-lit views, unclipped
  double flicker_energy = 0.0;
  double motion_flow_l1 = 0.0;  // against the source-lit views
  double psnr = 0.0;            // against the ground truth
};

// One run per threshold. With scale_phases, tau_r and tau_s keep their ratio
// to tau_g; otherwise they are left alone and tau_g <= tau_r is an error.
std::vector<TauGRow> ablate_tau_g(const RunConfig& cfg, const std::vector<double>& tau_g,
                                  bool scale_phases = false);
std::string tau_g_csv(const std::vector<TauGRow>& rows);

}  // namespace light4d
