#pragma once

#include "light4d/coherence.hpp"
#include "light4d/priors.hpp"
#include "light4d/schedule.hpp"
#include "light4d/tca.hpp"
#include "light4d/tensor.hpp"
#include "light4d/types.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace light4d {

// z' = z + (sigma_next - sigma) * (z - target) / (sigma + delta)
template <typename Scalar, typename Space>
Tensor4<Scalar, Space> euler_step(const Tensor4<Scalar, Space>& z,
                                  const Tensor4<Scalar, Space>& target, Scalar sigma,
                                  Scalar sigma_next, Scalar delta) {
  if (z.shape() != target.shape()) throw std::invalid_argument("euler_step: shape mismatch");
  if (!(sigma >= sigma_next && sigma_next >= Scalar(0))) {
    throw std::invalid_argument("euler_step: need sigma >= sigma_next >= 0");
  }
  if (!(delta > Scalar(0))) throw std::invalid_argument("euler_step: delta must be > 0");
  return Tensor4<Scalar, Space>(
      z.shape(), z.array() + ((sigma_next - sigma) / (sigma + delta)) * (z.array() - target.array()));
}

struct GuidanceRun {
  PriorBundle priors;
  FusionSchedule schedule;
  StepPlan plan = make_step_plan(25);
  LightingSpec lighting;
  TcaConfig tca;
  FdiConfig fdi;
  GmmReference gmm_reference = GmmReference::average_moments;
  PostSmoothConfig post_smooth;
  std::uint64_t seed = 0;

  bool use_tca = true;
  // Off: every relight call draws fresh, unseeded per-frame noise.
  bool use_cni = true;
  bool use_gmm = true;
  bool use_fdi = true;
  // Off: lambda(t) is the schedule's peak at every step.
  bool use_dfg = true;

  void validate() const;
  double lambda(double t) const;
};

enum class Branch { geometric, fused };

std::string to_string(Branch b);

struct StepRecord {
  int k = 0;
  double t = 0.0;
  double sigma = 0.0;
  double sigma_next = 0.0;
  double lambda = 0.0;
  Branch branch = Branch::geometric;
  double z_norm = 0.0;
  double residual_norm = 0.0;  // |z - z_target| before the update
  int relight_calls = 0;
};

struct StepTrace {
  std::vector<StepRecord> steps;

  int relight_calls() const;
  // k, t, sigma, lambda, branch, z_norm, residual_norm, relight_calls
  std::string csv() const;
  void write_csv(const std::filesystem::path& path) const;
};

// Relighting noise for one run: one canonical map, or a fresh map per frame
// and per call when canonical noise is off.
class NoiseSource {
 public:
  NoiseSource(bool canonical, std::uint64_t seed, int h, int w, int c, int frames);
  const NoiseField& next();

 private:
  bool canonical_;
  int h_, w_, c_, frames_;
  NoiseField field_;
  std::mt19937_64 rng_;
};

// Guidance target for one step. With lambda == 0 returns z0_geo untouched;
// otherwise decode, relight, moment-match, band-regularize, fuse and
// re-encode. `relight_calls` is incremented per relight invocation.
LatentVideo hybrid_target(const LatentVideo& z0_geo, const GuidanceRun& run, double lambda,
                          NoiseSource& noise, int* relight_calls = nullptr);

struct InferenceResult {
  VideoTensor video;
  LatentVideo latent;
  StepTrace trace;
};

// Thrown when the solver state goes non-finite; names the step.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

InferenceResult run_inference(const GuidanceRun& run, const LatentVideo& z_init);

// Maps the source clip into the target views.
using SourceWarp = std::function<VideoTensor(const VideoTensor&, const CameraTrajectory&)>;

// encode(warp(source)) + sigma_start * eps, eps from a stream keyed on seed
// that is distinct from the relighting noise. An empty warp leaves the source
// unchanged.
LatentVideo init_latent(const VideoTensor& source, const CameraTrajectory& trajectory,
                        const LatentCodec& codec, std::uint64_t seed, double sigma_start,
                        const SourceWarp& warp = {});

enum class NoiseStream : std::uint64_t { canonical = 1, init = 2 };

std::uint64_t stream_seed(std::uint64_t seed, NoiseStream stream);

}  // namespace light4d
