#pragma once

#include "light4d/tensor.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace light4d {

// Per-frame noise maps handed to the relighting prior. A canonical field holds
// one standard-normal map shared by every frame; an independent field holds a
// fresh map per frame.
class NoiseField {
 public:
  int frames() const { return frames_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  bool broadcast() const { return shared_; }
  std::uint64_t seed() const { return seed_; }

  const Eigen::ArrayXd& frame(int f) const {
    return broadcast() ? maps_.front() : maps_.at(static_cast<std::size_t>(f));
  }

  static NoiseField canonical(std::uint64_t seed, int height, int width, int channels, int frames);
  static NoiseField independent(std::mt19937_64& rng, int height, int width, int channels,
                                int frames);

 private:
  NoiseField(int h, int w, int c, int f, std::uint64_t seed)
      : frames_(f), height_(h), width_(w), channels_(c), seed_(seed) {}

  int frames_ = 0;
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::uint64_t seed_ = 0;
  bool shared_ = false;
  std::vector<Eigen::ArrayXd> maps_;
};

inline NoiseField canonical_noise(std::uint64_t seed, int h, int w, int c, int frames) {
  return NoiseField::canonical(seed, h, w, c, frames);
}

struct MomentStats {
  Eigen::ArrayXd mean;
  Eigen::ArrayXd stddev;
};

// Per-channel mean and population standard deviation over all pixels of frame f.
MomentStats frame_moments(const VideoTensor& x, int f);
VideoTensor temporal_mean(const VideoTensor& x);

enum class GmmReference {
  // mu_ref is the mean of the temporal-average frame; sigma_ref is the
  // temporal average of the per-frame deviations. Idempotent.
  average_moments,
  // mu_ref and sigma_ref both measured on the temporal-average frame.
  average_frame,
};

// Rescales every frame so that its per-channel mean and deviation equal the
// reference statistics. Channels of frames with zero deviation pass through;
// their frame indices are appended to `passthrough` when given.
VideoTensor global_moment_match(const VideoTensor& x,
                                GmmReference reference = GmmReference::average_moments,
                                std::vector<int>* passthrough = nullptr);

MomentStats gmm_reference(const VideoTensor& x, GmmReference reference);

enum class TemporalKind { moving_average, gaussian };

TemporalKind temporal_kind_from_string(const std::string& s);
std::string to_string(TemporalKind k);

struct FdiConfig {
  double blur_sigma = 3.0;
  TemporalKind temporal = TemporalKind::gaussian;
  int window = 9;
  double temporal_sigma = 2.0;

  void validate() const;
};

struct FdiBands {
  VideoTensor low;
  VideoTensor high;
  VideoTensor smoothed_low;
};

FdiBands fdi_decompose(const VideoTensor& x, const FdiConfig& cfg);

// Temporal smoothing of the blurred band only: T(x * G) + (x - x * G).
// Computed as x + (T(low) - low), which is exact when T is the identity.
VideoTensor fdi_regularize(const VideoTensor& x, const FdiConfig& cfg);

struct PostSmoothConfig {
  bool enabled = false;
  int window = 9;
  double sigma = 25.0;
  double gate_threshold = 1e-4;
};

// Temporal Gaussian smoothing blended in per pixel by
// clamp(local temporal variance / gate_threshold, 0, 1); gate_threshold <= 0
// smooths everywhere.
VideoTensor adaptive_temporal_smooth(const VideoTensor& x, int window = 9, double sigma = 25.0,
                                     double gate_threshold = 1e-4);

}  // namespace light4d
