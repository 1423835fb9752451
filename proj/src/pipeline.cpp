#include "light4d/pipeline.hpp"

#include "light4d/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace light4d {

SceneSetup prepare_scene(const RunConfig& cfg) {
  SceneSpec front = cfg.scene;
  front.yaw_start = 0.0;
  front.yaw_end = 0.0;
  SceneSetup s{render(front, cfg.source_light).video, render(cfg.scene, cfg.source_light), {}};
  s.ground_truth = s.geometry.relit(cfg.target_light);
  return s;
}

std::shared_ptr<const LatentCodec> make_codec(const RunConfig& cfg) {
  if (cfg.solver.codec == CodecKind::identity) return std::make_shared<IdentityCodec>();
  return std::make_shared<PoolingCodec>(cfg.solver.pool_factor, cfg.solver.latent_channels,
                                        cfg.scene.channels);
}

GuidanceRun make_guidance_run(const RunConfig& cfg, const SceneSetup& scene) {
  GuidanceRun run;
  run.priors.codec = make_codec(cfg);
  run.priors.geometric = std::make_shared<LinearGeometricPrior>(
      run.priors.codec->encode(scene.geometry.video), cfg.geometry.mode, cfg.geometry.shrinkage,
      cfg.geometry.coherence_window, cfg.geometry.coherence_sigma);
  run.priors.relighting =
      std::make_shared<LambertianRelightPrior>(scene.geometry.buffers(), cfg.relight);
  run.schedule = cfg.schedule;
  run.plan = make_step_plan(cfg.solver.steps, cfg.solver.sigma_form, cfg.solver.delta);
  run.lighting = cfg.target_light;
  run.tca = cfg.tca;
  if (cfg.ablation.disable_tca) run.tca.gamma = 0.0;
  run.fdi = cfg.fdi;
  run.gmm_reference = cfg.gmm_reference;
  run.post_smooth = cfg.post_smooth;
  run.seed = cfg.seed;
  run.use_cni = !cfg.ablation.disable_cni;
  run.use_gmm = !cfg.ablation.disable_gmm;
  run.use_fdi = !cfg.ablation.disable_fdi;
  run.use_dfg = !cfg.ablation.disable_dfg;
  return run;
}

LatentVideo make_init_latent(const RunConfig& cfg, const SceneSetup& scene, const LatentCodec& codec) {
  const SceneSpec spec = cfg.scene;
  const double sigma_start = sigma_of(cfg.solver.sigma_form, 1.0);
  return init_latent(scene.source, scene.geometry.camera, codec, cfg.seed, sigma_start,
                     [spec](const VideoTensor& src, const CameraTrajectory& cam) {
                       return reproject_from_front(spec, src, cam);
                     });
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  PipelineResult r;
  r.scene = prepare_scene(cfg);
  const GuidanceRun run = make_guidance_run(cfg, r.scene);
  r.inference = run_inference(run, make_init_latent(cfg, r.scene, *run.priors.codec));
  r.vs_source = evaluate(r.inference.video, r.scene.geometry.video, cfg.flow);
  r.vs_ground_truth = evaluate(r.inference.video, r.scene.ground_truth, cfg.flow);
  return r;
}

void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const PipelineResult& r) {
  std::filesystem::create_directories(dir);
  write_frames(dir / "frames", r.inference.video, cfg.frame_format);
  r.inference.trace.write_csv(dir / "trace.csv");
  r.vs_source.write(dir / "metrics_source.json", dir / "metrics_source.csv");
  r.vs_ground_truth.write(dir / "metrics_ground_truth.json", dir / "metrics_ground_truth.csv");
  write_tensor(dir / "output.l4dt", r.inference.video);
  std::ofstream c(dir / "config.toml", std::ios::binary);
  if (!c) throw std::runtime_error("cannot write " + (dir / "config.toml").string());
  c << to_toml(cfg);
}

void write_scene(const std::filesystem::path& dir, const RunConfig& cfg, const SceneSetup& scene) {
  std::filesystem::create_directories(dir);
  write_frames(dir / "source", scene.source, cfg.frame_format);
  write_frames(dir / "geometry", scene.geometry.video, cfg.frame_format);
  write_frames(dir / "ground_truth", scene.ground_truth, cfg.frame_format);
  write_tensor(dir / "normals.l4dt", scene.geometry.normals);
  write_tensor(dir / "albedo.l4dt", scene.geometry.albedo);
  write_tensor(dir / "mask.l4dt", scene.geometry.mask);
}

std::vector<TauGRow> ablate_tau_g(const RunConfig& cfg, const std::vector<double>& tau_g,
                                  bool scale_phases) {
  if (tau_g.empty()) throw ConfigError("tau_g list is empty");
  std::vector<TauGRow> rows;
  for (double g : tau_g) {
    RunConfig c = cfg;
    if (scale_phases) {
      c.schedule.tau_r = cfg.schedule.tau_r * g / cfg.schedule.tau_g;
      c.schedule.tau_s = cfg.schedule.tau_s * g / cfg.schedule.tau_g;
    }
    c.schedule.tau_g = g;
    if (!(g > c.schedule.tau_r && g <= 1.0)) {
      throw ConfigError("tau_g " + std::to_string(g) + " must lie in (tau_r, 1] with tau_r = " +
                        std::to_string(c.schedule.tau_r));
    }
    const PipelineResult r = run_pipeline(c);
    rows.push_back({g, r.vs_source.hfpr_raw, r.vs_source.flicker_energy, r.vs_source.motion_flow_l1,
                    r.vs_ground_truth.frame_psnr});
  }
  return rows;
}

std::string tau_g_csv(const std::vector<TauGRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(10) << "tau_g,hfpr,flicker_energy,motion_flow_l1,psnr\n";
  for (const auto& r : rows) {
    os << r.tau_g << ',' << r.hfpr << ',' << r.flicker_energy << ',' << r.motion_flow_l1 << ','
       << r.psnr << '\n';
  }
  return os.str();
}

}  // namespace light4d
