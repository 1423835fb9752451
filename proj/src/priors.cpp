#include "light4d/priors.hpp"

#include "light4d/filters.hpp"
#include "light4d/parallel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace light4d {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix(splitmix(splitmix(a) ^ b) ^ c);
}

}  // namespace

// ---------------------------------------------------------------------------
// Codecs

LatentVideo IdentityCodec::encode(const VideoTensor& x) const {
  return reinterpret_space<LatentSpace>(x);
}

VideoTensor IdentityCodec::decode(const LatentVideo& z) const {
  return reinterpret_space<PixelSpace>(z);
}

PoolingCodec::PoolingCodec(int factor, int latent_channels, int pixel_channels)
    : factor_(factor), latent_channels_(latent_channels), pixel_channels_(pixel_channels) {
  if (factor < 1) throw std::invalid_argument("pooling factor must be >= 1");
  if (pixel_channels < 1 || latent_channels < pixel_channels) {
    throw std::invalid_argument("pooling codec needs latent_channels >= pixel channels >= 1");
  }
}

Shape4 PoolingCodec::latent_shape(const Shape4& pixel) const {
  if (pixel.height % factor_ != 0 || pixel.width % factor_ != 0) {
    throw std::invalid_argument("pooling codec: frame " + std::to_string(pixel.height) + "x" +
                                std::to_string(pixel.width) + " is not a multiple of " +
                                std::to_string(factor_));
  }
  if (pixel.channels != pixel_channels_) {
    throw std::invalid_argument("pooling codec: expected " + std::to_string(pixel_channels_) +
                                " pixel channels, got " + std::to_string(pixel.channels));
  }
  return {pixel.frames, pixel.height / factor_, pixel.width / factor_, latent_channels_};
}

LatentVideo PoolingCodec::encode(const VideoTensor& x) const {
  const Shape4 ls = latent_shape(x.shape());
  LatentVideo z(ls);
  const double area = static_cast<double>(factor_) * factor_;
  for (int f = 0; f < ls.frames; ++f) {
    for (int by = 0; by < ls.height; ++by) {
      for (int bx = 0; bx < ls.width; ++bx) {
        for (int c = 0; c < pixel_channels_; ++c) {
          z(f, by, bx, c) =
              x.plane(f, c).block(by * factor_, bx * factor_, factor_, factor_).sum() / area;
        }
        double mean = 0.0;
        for (int c = 0; c < pixel_channels_; ++c) mean += z(f, by, bx, c);
        mean /= pixel_channels_;
        for (int c = pixel_channels_; c < latent_channels_; ++c) z(f, by, bx, c) = mean;
      }
    }
  }
  return z;
}

VideoTensor PoolingCodec::decode(const LatentVideo& z) const {
  if (z.channels() != latent_channels_) {
    throw std::invalid_argument("pooling codec: latent has " + std::to_string(z.channels()) +
                                " channels, expected " + std::to_string(latent_channels_));
  }
  VideoTensor x({z.frames(), z.height() * factor_, z.width() * factor_, pixel_channels_});
  for (int f = 0; f < z.frames(); ++f) {
    for (int y = 0; y < x.height(); ++y) {
      for (int xx = 0; xx < x.width(); ++xx) {
        for (int c = 0; c < pixel_channels_; ++c) x(f, y, xx, c) = z(f, y / factor_, xx / factor_, c);
      }
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Geometric prior

LinearGeometricPrior::LinearGeometricPrior(LatentVideo target, Mode mode, double shrinkage,
                                           int coherence_window, double coherence_sigma)
    : target_(std::move(target)),
      mode_(mode),
      shrinkage_(shrinkage),
      coherence_window_(coherence_window),
      coherence_sigma_(coherence_sigma) {
  if (!(shrinkage > 0.0)) throw std::invalid_argument("geometric prior shrinkage must be > 0");
  if (coherence_window < 1 || coherence_window % 2 == 0 || !(coherence_sigma > 0.0)) {
    throw std::invalid_argument("geometric prior coherence window must be odd with sigma > 0");
  }
  assert_finite(target_, "geometric target");
}

LatentVideo LinearGeometricPrior::estimate_clean(const LatentVideo& z, double sigma) const {
  if (z.shape() != target_.shape()) {
    throw std::invalid_argument("geometric prior: state shape " + to_string(z.shape()) +
                                " does not match configured " + to_string(target_.shape()));
  }
  if (!(sigma >= 0.0)) throw std::invalid_argument("geometric prior: sigma must be >= 0");
  if (mode_ == Mode::oracle) return target_;
  if (mode_ == Mode::imperfect) {
    return LatentVideo(z.shape(),
                       z.array() - (sigma / (sigma + shrinkage_)) * (z.array() - target_.array()));
  }
  const VideoTensor deviation(z.shape(), z.array() - target_.array());
  const VideoTensor smooth = temporal_filter(deviation, coherence_window_, coherence_sigma_, true);
  return LatentVideo(z.shape(), target_.array() + (shrinkage_ / (sigma + shrinkage_)) * smooth.array());
}

LinearGeometricPrior::Mode geometric_mode_from_string(const std::string& s) {
  if (s == "oracle") return LinearGeometricPrior::Mode::oracle;
  if (s == "imperfect") return LinearGeometricPrior::Mode::imperfect;
  if (s == "coherent") return LinearGeometricPrior::Mode::coherent;
  throw std::invalid_argument("unknown geometric prior mode '" + s + "'");
}

std::string to_string(LinearGeometricPrior::Mode m) {
  switch (m) {
    case LinearGeometricPrior::Mode::oracle: return "oracle";
    case LinearGeometricPrior::Mode::imperfect: return "imperfect";
    case LinearGeometricPrior::Mode::coherent: return "coherent";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Relighting prior

void SceneBuffers::validate() const {
  const Shape4& s = albedo.shape();
  if (normals.shape() != Shape4{s.frames, s.height, s.width, 3}) {
    throw std::invalid_argument("scene buffers: normals must be F x H x W x 3");
  }
  if (mask.shape() != Shape4{s.frames, s.height, s.width, 1}) {
    throw std::invalid_argument("scene buffers: mask must be F x H x W x 1");
  }
  if (camera.frames() != s.frames) {
    throw std::invalid_argument("scene buffers: camera trajectory frame count mismatch");
  }
}

void LambertianConfig::validate() const {
  if (!(blend > 0.0 && blend <= 1.0)) throw std::invalid_argument("relight blend must lie in (0, 1]");
  if (!(noise_gain >= 0.0)) throw std::invalid_argument("relight noise gain must be >= 0");
  if (!(sampler_jitter >= 0.0 && sampler_jitter <= 1.0)) {
    throw std::invalid_argument("relight sampler jitter must lie in [0, 1]");
  }
  if (!(exposure_gain >= 0.0)) throw std::invalid_argument("relight exposure gain must be >= 0");
  if (!(light_jitter >= 0.0)) throw std::invalid_argument("relight light jitter must be >= 0");
  if (patch < 1 || feature_dim < 1) throw std::invalid_argument("relight patch/feature sizes must be >= 1");
}

Eigen::MatrixXd patchify(const VideoTensor& x, int f, int patch) {
  if (x.height() % patch != 0 || x.width() % patch != 0) {
    throw std::invalid_argument("patchify: frame size is not a multiple of the patch size");
  }
  const int ph = x.height() / patch;
  const int pw = x.width() / patch;
  const int c = x.channels();
  Eigen::MatrixXd tokens(ph * pw, patch * patch * c);
  for (int py = 0; py < ph; ++py) {
    for (int px = 0; px < pw; ++px) {
      int col = 0;
      for (int y = 0; y < patch; ++y) {
        for (int xx = 0; xx < patch; ++xx) {
          for (int ch = 0; ch < c; ++ch) {
            tokens(py * pw + px, col++) = x(f, py * patch + y, px * patch + xx, ch);
          }
        }
      }
    }
  }
  return tokens;
}

void unpatchify(const Eigen::MatrixXd& tokens, int patch, VideoTensor& out, int f) {
  const int pw = out.width() / patch;
  const int c = out.channels();
  for (Eigen::Index t = 0; t < tokens.rows(); ++t) {
    const int py = static_cast<int>(t) / pw;
    const int px = static_cast<int>(t) % pw;
    int col = 0;
    for (int y = 0; y < patch; ++y) {
      for (int xx = 0; xx < patch; ++xx) {
        for (int ch = 0; ch < c; ++ch) out(f, py * patch + y, px * patch + xx, ch) = tokens(t, col++);
      }
    }
  }
}

LambertianRelightPrior::LambertianRelightPrior(SceneBuffers buffers, LambertianConfig cfg)
    : buffers_(std::move(buffers)), cfg_(cfg) {
  buffers_.validate();
  cfg_.validate();
  const int in_dim = cfg_.patch * cfg_.patch * buffers_.albedo.channels();
  std::mt19937_64 rng(cfg_.seed);
  std::normal_distribution<double> normal(0.0, cfg_.feature_scale / std::sqrt(in_dim));
  query_proj_.resize(in_dim, cfg_.feature_dim);
  key_proj_.resize(in_dim, cfg_.feature_dim);
  for (Eigen::Index i = 0; i < query_proj_.size(); ++i) query_proj_.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < key_proj_.size(); ++i) key_proj_.data()[i] = normal(rng);
}

VideoTensor LambertianRelightPrior::shade(const LightingSpec& light) const {
  light.validate();
  VideoTensor out(buffers_.albedo.shape());
  for (int f = 0; f < out.frames(); ++f) shade_frame(light, light.direction, f, out);
  return clamp01(std::move(out));
}

void LambertianRelightPrior::shade_frame(const LightingSpec& light, const Eigen::Vector3d& dir, int f,
                                         VideoTensor& out) const {
  const VideoTensor& n = buffers_.normals;
  const VideoTensor& a = buffers_.albedo;
  const Eigen::Vector3d l = buffers_.camera.world_to_camera(f) * dir;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (buffers_.mask(f, y, x, 0) < 0.5) {
        for (int c = 0; c < a.channels(); ++c) out(f, y, x, c) = buffers_.background;
        continue;
      }
      const double ndotl = n(f, y, x, 0) * l.x() + n(f, y, x, 1) * l.y() + n(f, y, x, 2) * l.z();
      const double diffuse = std::max(0.0, ndotl) * light.intensity;
      for (int c = 0; c < a.channels(); ++c) {
        out(f, y, x, c) = a(f, y, x, c) * diffuse + a(f, y, x, c) * light.ambient;
      }
    }
  }
}

VideoTensor LambertianRelightPrior::relight(const VideoTensor& x, const LightingSpec& light,
                                            const NoiseField& noise,
                                            const std::optional<TcaConfig>& tca) const {
  if (x.shape() != buffers_.albedo.shape()) {
    throw std::invalid_argument("relight: input shape " + to_string(x.shape()) +
                                " does not match scene buffers " +
                                to_string(buffers_.albedo.shape()));
  }
  const VideoTensor input = clamp01(x);
  if (cfg_.noise_gain == 0.0 && cfg_.exposure_gain == 0.0 && cfg_.light_jitter == 0.0) {
    return VideoTensor(x.shape(), cfg_.blend * shade(light).array() + (1.0 - cfg_.blend) * input.array());
  }

  if (noise.height() != x.height() || noise.width() != x.width() ||
      noise.channels() != x.channels() || noise.frames() != x.frames()) {
    throw std::invalid_argument("relight: noise field does not match the video shape");
  }
  const int frames = x.frames();
  const double shared_share = std::sqrt(1.0 - cfg_.sampler_jitter);
  const double jitter_share = std::sqrt(cfg_.sampler_jitter);

  // Effective per-frame sampling noise: the supplied map mixed with the
  // frame's own sampler stream.
  VideoTensor eff(x.shape());
  parallel_for(frames, [&](int f) {
    std::mt19937_64 rng(stream_seed(cfg_.seed, noise.seed(), static_cast<std::uint64_t>(f)));
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::ArrayXd& shared = noise.frame(f);
    auto dst = eff.frame(f);
    for (Eigen::Index i = 0; i < dst.size(); ++i) {
      dst[i] = shared_share * shared[i] + jitter_share * normal(rng);
    }
  });

  // Per-frame light tilt from two noise contrasts orthogonal to the exposure
  // contrast, so the three are independent for white noise.
  light.validate();
  VideoTensor out(x.shape());
  const double norm = std::sqrt(static_cast<double>(x.shape().frame_size()));
  parallel_for(frames, [&](int f) {
    Eigen::Vector3d dir = light.direction;
    if (cfg_.light_jitter > 0.0) {
      const Eigen::ArrayXd& e = eff.frame(f);
      const Eigen::Index n = e.size();
      double u = 0.0, v = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        u += (i % 2 == 0) ? e[i] : -e[i];
        v += (i < n / 2) ? e[i] : -e[i];
      }
      dir += cfg_.light_jitter * Eigen::Vector3d(u / norm, v / norm, 0.0);
      if (dir.norm() > 0.0) dir.normalize();
    }
    shade_frame(light, dir, f, out);
    out.frame(f) = cfg_.blend * out.frame(f).max(0.0).min(1.0) + (1.0 - cfg_.blend) * input.frame(f);
  });

  FeatureSequence queries(frames, 0, 0), keys(frames, 0, 0), values(frames, 0, 0);
  std::vector<Eigen::MatrixXd> q(static_cast<std::size_t>(frames)), k(q.size()), v(q.size());
  parallel_for(frames, [&](int f) {
    Eigen::MatrixXd content = patchify(input, f, cfg_.patch);
    content.colwise() -= content.rowwise().mean();
    q[static_cast<std::size_t>(f)] = content * query_proj_;
    k[static_cast<std::size_t>(f)] = content * key_proj_;
    v[static_cast<std::size_t>(f)] = cfg_.noise_gain * patchify(eff, f, cfg_.patch);
  });
  queries = FeatureSequence(std::move(q));
  keys = FeatureSequence(std::move(k));
  values = FeatureSequence(std::move(v));

  FeatureSequence mixed;
  if (tca) {
    mixed = tca_forward(queries, keys, values, *tca).out;
  } else {
    std::vector<Eigen::MatrixXd> h(static_cast<std::size_t>(frames));
    parallel_for(frames, [&](int f) {
      h[static_cast<std::size_t>(f)] = attention(queries[f], keys[f], values[f]);
    });
    mixed = FeatureSequence(std::move(h));
  }

  VideoTensor perturbation(x.shape());
  for (int f = 0; f < frames; ++f) {
    unpatchify(mixed[f], cfg_.patch, perturbation, f);
    const double exposure = 1.0 + cfg_.exposure_gain * eff.frame(f).sum() / norm;
    out.frame(f) = (out.frame(f) + perturbation.frame(f)) * exposure;
  }
  return clamp01(std::move(out));
}

}  // namespace light4d
