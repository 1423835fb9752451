#pragma once

#include "light4d/coherence.hpp"
#include "light4d/tca.hpp"
#include "light4d/tensor.hpp"
#include "light4d/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace light4d {

// ---------------------------------------------------------------------------
// Latent codec: encoder/decoder pair between pixel space and the latent space
// the solver runs in.

class LatentCodec {
 public:
  virtual ~LatentCodec() = default;
  virtual LatentVideo encode(const VideoTensor& x) const = 0;
  virtual VideoTensor decode(const LatentVideo& z) const = 0;
  virtual Shape4 latent_shape(const Shape4& pixel) const = 0;
  // True when decode(encode(x)) == x for every x.
  virtual bool lossless() const = 0;
  virtual std::string name() const = 0;
};

class IdentityCodec final : public LatentCodec {
 public:
  LatentVideo encode(const VideoTensor& x) const override;
  VideoTensor decode(const LatentVideo& z) const override;
  Shape4 latent_shape(const Shape4& pixel) const override { return pixel; }
  bool lossless() const override { return true; }
  std::string name() const override { return "identity"; }
};

// Block-average encoder with nearest-neighbour decoder. Latent channels beyond
// the pixel channels carry the block mean over all pixel channels and are
// ignored on decode. decode(encode(.)) is an orthogonal projection, so the
// round-trip error of x is exactly its within-block variation.
class PoolingCodec final : public LatentCodec {
 public:
  explicit PoolingCodec(int factor = 8, int latent_channels = 4, int pixel_channels = 3);

  LatentVideo encode(const VideoTensor& x) const override;
  VideoTensor decode(const LatentVideo& z) const override;
  Shape4 latent_shape(const Shape4& pixel) const override;
  bool lossless() const override { return factor_ == 1 && latent_channels_ == pixel_channels_; }
  std::string name() const override { return "pooling"; }

  int factor() const { return factor_; }
  int latent_channels() const { return latent_channels_; }

 private:
  int factor_;
  int latent_channels_;
  int pixel_channels_;
};

// ---------------------------------------------------------------------------
// Geometric prior: clean-latent estimate from a noisy state.

class GeometricPrior {
 public:
  virtual ~GeometricPrior() = default;
  virtual LatentVideo estimate_clean(const LatentVideo& z, double sigma) const = 0;
};

// Contamination model z = z* + sigma * eps around a known clean latent z*.
// Oracle mode returns z* for any z. Imperfect mode returns the shrinkage
// estimate z - sigma * (z - z*) / (sigma + shrinkage), which trusts the
// current state more as sigma falls. Coherent mode applies the same gain only
// to the temporally smoothed deviation,
//   z* + shrinkage / (sigma + shrinkage) * T(z - z*),
// so per-frame jitter in the state is rejected at every noise level.
class LinearGeometricPrior final : public GeometricPrior {
 public:
  enum class Mode { oracle, imperfect, coherent };

  explicit LinearGeometricPrior(LatentVideo target, Mode mode = Mode::oracle,
                                double shrinkage = 1e-8, int coherence_window = 9,
                                double coherence_sigma = 2.0);

  LatentVideo estimate_clean(const LatentVideo& z, double sigma) const override;

  const LatentVideo& target() const { return target_; }
  Mode mode() const { return mode_; }
  double shrinkage() const { return shrinkage_; }

 private:
  LatentVideo target_;
  Mode mode_;
  double shrinkage_;
  int coherence_window_;
  double coherence_sigma_;
};

LinearGeometricPrior::Mode geometric_mode_from_string(const std::string& s);
std::string to_string(LinearGeometricPrior::Mode m);

// ---------------------------------------------------------------------------
// Relighting prior: per-frame relit prediction from a decoded geometry video.

class RelightingPrior {
 public:
  virtual ~RelightingPrior() = default;
  // `tca` selects temporally consistent attention in the feature stage;
  // nullopt runs plain per-frame attention.
  virtual VideoTensor relight(const VideoTensor& x, const LightingSpec& light,
                              const NoiseField& noise,
                              const std::optional<TcaConfig>& tca) const = 0;
};

// Per-pixel scene buffers, all in the frame's own camera space.
struct SceneBuffers {
  VideoTensor normals;  // F x H x W x 3, unit length inside the mask
  VideoTensor albedo;   // F x H x W x C
  VideoTensor mask;     // F x H x W x 1, 1 on the object and 0 on background
  double background = 0.2;
  CameraTrajectory camera;

  void validate() const;
};

struct LambertianConfig {
  // Weight of the Lambertian render against the tone-mapped input.
  double blend = 0.8;
  // Amplitude of the noise-driven appearance perturbation.
  double noise_gain = 0.0;
  // Share of the perturbation drawn from a per-frame sampler stream rather
  // than from the supplied noise. Frames are relit independently, so even a
  // shared noise map does not give identical sampling paths.
  double sampler_jitter = 0.5;
  // Relative per-frame exposure change per unit of noise.
  double exposure_gain = 0.0;
  // Per-frame tilt of the light direction per unit of noise.
  double light_jitter = 0.0;
  int patch = 8;
  int feature_dim = 16;
  // Scale of the query/key projections; larger makes attention sharper.
  double feature_scale = 2.0;
  std::uint64_t seed = 0x11ce5eedULL;

  void validate() const;
};

// Analytic stand-in for an image relighting network:
//   lambert = albedo * max(0, n . l) * intensity + albedo * ambient   (clamped)
//   base    = blend * lambert + (1 - blend) * clamp(x, 0, 1)
// and, when noise_gain > 0, a noise perturbation routed through a patch-token
// attention stage (where TCA applies) plus a per-frame exposure change.
class LambertianRelightPrior final : public RelightingPrior {
 public:
  LambertianRelightPrior(SceneBuffers buffers, LambertianConfig cfg = {});

  VideoTensor relight(const VideoTensor& x, const LightingSpec& light, const NoiseField& noise,
                      const std::optional<TcaConfig>& tca) const override;

  // Lambertian term alone, clamped to [0, 1].
  VideoTensor shade(const LightingSpec& light) const;
  // Shades frame f into out with the world-space direction dir.
  void shade_frame(const LightingSpec& light, const Eigen::Vector3d& dir, int f, VideoTensor& out) const;

  const SceneBuffers& buffers() const { return buffers_; }
  const LambertianConfig& config() const { return cfg_; }

 private:
  SceneBuffers buffers_;
  LambertianConfig cfg_;
  Eigen::MatrixXd query_proj_;
  Eigen::MatrixXd key_proj_;
};

// Patch tokens of one frame: row i is the flattened p x p x C patch i in
// raster order. H and W must be multiples of p.
Eigen::MatrixXd patchify(const VideoTensor& x, int f, int patch);
void unpatchify(const Eigen::MatrixXd& tokens, int patch, VideoTensor& out, int f);

struct PriorBundle {
  std::shared_ptr<const GeometricPrior> geometric;
  std::shared_ptr<const RelightingPrior> relighting;
  std::shared_ptr<const LatentCodec> codec;
};

}  // namespace light4d
