#include "light4d/guidance.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace light4d {

void GuidanceRun::validate() const {
  if (!priors.geometric || !priors.codec) throw std::invalid_argument("guidance run: missing priors");
  schedule.validate();
  if (plan.steps() < 1) throw std::invalid_argument("guidance run: empty step plan");
  if (!(plan.delta > 0.0)) throw std::invalid_argument("guidance run: delta must be > 0");
  lighting.validate();
  tca.validate();
  fdi.validate();
  if (post_smooth.enabled && (post_smooth.window < 1 || post_smooth.window % 2 == 0)) {
    throw std::invalid_argument("guidance run: post smoothing window must be odd");
  }
  if (schedule.peak() > 0.0 && !priors.relighting) {
    throw std::invalid_argument("guidance run: schedule fuses a relit target but no relighting prior is set");
  }
}

double GuidanceRun::lambda(double t) const {
  return use_dfg ? lambda_at(schedule, t) : schedule.peak();
}

std::string to_string(Branch b) { return b == Branch::geometric ? "geometric" : "fused"; }

int StepTrace::relight_calls() const {
  int n = 0;
  for (const auto& s : steps) n += s.relight_calls;
  return n;
}

std::string StepTrace::csv() const {
  std::ostringstream os;
  os << "k,t,sigma,lambda,branch,z_norm,residual_norm,relight_calls\n";
  os << std::setprecision(17);
  for (const auto& s : steps) {
    os << s.k << ',' << s.t << ',' << s.sigma << ',' << s.lambda << ',' << to_string(s.branch) << ','
       << s.z_norm << ',' << s.residual_norm << ',' << s.relight_calls << '\n';
  }
  return os.str();
}

void StepTrace::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  out << csv();
}

std::uint64_t stream_seed(std::uint64_t seed, NoiseStream stream) {
  std::uint64_t x = seed ^ (static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

NoiseSource::NoiseSource(bool canonical, std::uint64_t seed, int h, int w, int c, int frames)
    : canonical_(canonical),
      h_(h),
      w_(w),
      c_(c),
      frames_(frames),
      field_(NoiseField::canonical(stream_seed(seed, NoiseStream::canonical), h, w, c, frames)),
      rng_(canonical ? 0 : std::random_device{}()) {}

const NoiseField& NoiseSource::next() {
  if (!canonical_) field_ = NoiseField::independent(rng_, h_, w_, c_, frames_);
  return field_;
}

LatentVideo hybrid_target(const LatentVideo& z0_geo, const GuidanceRun& run, double lambda,
                          NoiseSource& noise, int* relight_calls) {
  if (lambda == 0.0) return z0_geo;
  const LatentCodec& codec = *run.priors.codec;
  const VideoTensor x_geo = codec.decode(z0_geo);
  std::optional<TcaConfig> tca;
  if (run.use_tca) tca = run.tca;
  VideoTensor x_light = run.priors.relighting->relight(x_geo, run.lighting, noise.next(), tca);
  if (relight_calls) ++*relight_calls;
  assert_finite(x_light, "relit prediction");
  if (run.use_gmm) x_light = global_moment_match(x_light, run.gmm_reference);
  if (run.use_fdi) x_light = fdi_regularize(x_light, run.fdi);
  const VideoTensor fused(x_geo.shape(), (1.0 - lambda) * x_geo.array() + lambda * x_light.array());
  LatentVideo target = codec.encode(fused);
  assert_finite(target, "hybrid target");
  return target;
}

InferenceResult run_inference(const GuidanceRun& run, const LatentVideo& z_init) {
  run.validate();
  const LatentCodec& codec = *run.priors.codec;
  const Shape4 pixel = codec.decode(z_init).shape();
  NoiseSource noise(run.use_cni, run.seed, pixel.height, pixel.width, pixel.channels, pixel.frames);

  InferenceResult result;
  LatentVideo z = z_init;
  const StepPlan& plan = run.plan;
  for (int k = 0; k < plan.steps(); ++k) {
    StepRecord rec;
    rec.k = k;
    rec.t = plan.times[static_cast<std::size_t>(k)];
    rec.sigma = plan.sigmas[static_cast<std::size_t>(k)];
    rec.sigma_next = plan.sigmas[static_cast<std::size_t>(k) + 1];
    rec.lambda = run.lambda(rec.t);
    rec.branch = rec.lambda > 0.0 ? Branch::fused : Branch::geometric;
    try {
      const LatentVideo z0 = run.priors.geometric->estimate_clean(z, rec.sigma);
      const LatentVideo target = hybrid_target(z0, run, rec.lambda, noise, &rec.relight_calls);
      rec.z_norm = l2_norm(z);
      rec.residual_norm = l2_norm(LatentVideo(z.shape(), z.array() - target.array()));
      z = euler_step(z, target, rec.sigma, rec.sigma_next, plan.delta);
      assert_finite(z, "solver state");
    } catch (const NonFiniteError& e) {
      throw SolverError("step " + std::to_string(k) + ": " + e.what(), k);
    }
    result.trace.steps.push_back(rec);
  }

  VideoTensor video = codec.decode(z);
  if (run.post_smooth.enabled) {
    video = adaptive_temporal_smooth(video, run.post_smooth.window, run.post_smooth.sigma,
                                     run.post_smooth.gate_threshold);
  }
  assert_finite(video, "output video");
  result.video = clamp01(std::move(video));
  result.latent = std::move(z);
  return result;
}

LatentVideo init_latent(const VideoTensor& source, const CameraTrajectory& trajectory,
                        const LatentCodec& codec, std::uint64_t seed, double sigma_start,
                        const SourceWarp& warp) {
  if (trajectory.frames() != source.frames()) {
    throw std::invalid_argument("init_latent: trajectory has " + std::to_string(trajectory.frames()) +
                                " frames, source has " + std::to_string(source.frames()));
  }
  LatentVideo z = codec.encode(warp ? warp(source, trajectory) : source);
  if (sigma_start == 0.0) return z;
  std::mt19937_64 rng(stream_seed(seed, NoiseStream::init));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < z.array().size(); ++i) z.array()[i] += sigma_start * normal(rng);
  return z;
}

}  // namespace light4d
