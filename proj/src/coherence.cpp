#include "light4d/coherence.hpp"

#include "light4d/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace light4d {

NoiseField NoiseField::canonical(std::uint64_t seed, int height, int width, int channels,
                                 int frames) {
  if (height < 1 || width < 1 || channels < 1 || frames < 1) {
    throw std::invalid_argument("noise field dimensions must be positive");
  }
  NoiseField field(height, width, channels, frames, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::ArrayXd map(static_cast<Eigen::Index>(height) * width * channels);
  for (Eigen::Index i = 0; i < map.size(); ++i) map[i] = normal(rng);
  field.maps_.push_back(std::move(map));
  field.shared_ = true;
  return field;
}

NoiseField NoiseField::independent(std::mt19937_64& rng, int height, int width, int channels,
                                   int frames) {
  if (height < 1 || width < 1 || channels < 1 || frames < 1) {
    throw std::invalid_argument("noise field dimensions must be positive");
  }
  NoiseField field(height, width, channels, frames, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int f = 0; f < frames; ++f) {
    Eigen::ArrayXd map(static_cast<Eigen::Index>(height) * width * channels);
    for (Eigen::Index i = 0; i < map.size(); ++i) map[i] = normal(rng);
    field.maps_.push_back(std::move(map));
  }
  return field;
}

MomentStats frame_moments(const VideoTensor& x, int f) {
  const int c = x.channels();
  const Eigen::Index pixels = static_cast<Eigen::Index>(x.height()) * x.width();
  const auto frame = x.frame(f);
  Eigen::Map<const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic>> m(frame.data(), c, pixels);
  MomentStats s;
  s.mean = m.rowwise().mean();
  s.stddev = ((m.colwise() - s.mean).square().rowwise().sum() / static_cast<double>(pixels)).sqrt();
  return s;
}

VideoTensor temporal_mean(const VideoTensor& x) {
  VideoTensor mean({1, x.height(), x.width(), x.channels()});
  for (int f = 0; f < x.frames(); ++f) mean.frame(0) += x.frame(f);
  mean.frame(0) /= static_cast<double>(x.frames());
  return mean;
}

MomentStats gmm_reference(const VideoTensor& x, GmmReference reference) {
  MomentStats ref = frame_moments(temporal_mean(x), 0);
  if (reference == GmmReference::average_moments) {
    ref.stddev.setZero();
    for (int f = 0; f < x.frames(); ++f) ref.stddev += frame_moments(x, f).stddev;
    ref.stddev /= static_cast<double>(x.frames());
  }
  return ref;
}

VideoTensor global_moment_match(const VideoTensor& x, GmmReference reference,
                                std::vector<int>* passthrough) {
  if (x.frames() == 1) return x;
  const MomentStats ref = gmm_reference(x, reference);
  VideoTensor out(x.shape());
  const int c = x.channels();
  const Eigen::Index pixels = static_cast<Eigen::Index>(x.height()) * x.width();
  for (int f = 0; f < x.frames(); ++f) {
    const MomentStats s = frame_moments(x, f);
    const auto src = x.frame(f);
    auto dst = out.frame(f);
    Eigen::Map<const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic>> in(src.data(), c, pixels);
    Eigen::Map<Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic>> res(dst.data(), c, pixels);
    bool degenerate = false;
    for (int ch = 0; ch < c; ++ch) {
      if (!(s.stddev[ch] > 1e-12)) {
        res.row(ch) = in.row(ch);
        degenerate = true;
        continue;
      }
      res.row(ch) = ref.mean[ch] + (ref.stddev[ch] / s.stddev[ch]) * (in.row(ch) - s.mean[ch]);
    }
    if (degenerate && passthrough) passthrough->push_back(f);
  }
  return out;
}

TemporalKind temporal_kind_from_string(const std::string& s) {
  if (s == "moving_average") return TemporalKind::moving_average;
  if (s == "gaussian") return TemporalKind::gaussian;
  throw std::invalid_argument("unknown temporal operator '" + s + "'");
}

std::string to_string(TemporalKind k) {
  return k == TemporalKind::gaussian ? "gaussian" : "moving_average";
}

void FdiConfig::validate() const {
  if (!(blur_sigma > 0.0)) throw std::invalid_argument("fdi blur sigma must be > 0");
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("fdi window must be odd");
  if (temporal == TemporalKind::gaussian && !(temporal_sigma > 0.0)) {
    throw std::invalid_argument("fdi temporal sigma must be > 0");
  }
}

FdiBands fdi_decompose(const VideoTensor& x, const FdiConfig& cfg) {
  cfg.validate();
  FdiBands bands;
  bands.low = gaussian_blur(x, cfg.blur_sigma);
  bands.high = VideoTensor(x.shape(), x.array() - bands.low.array());
  bands.smoothed_low = temporal_filter(bands.low, cfg.window, cfg.temporal_sigma,
                                       cfg.temporal == TemporalKind::gaussian);
  return bands;
}

VideoTensor fdi_regularize(const VideoTensor& x, const FdiConfig& cfg) {
  const FdiBands bands = fdi_decompose(x, cfg);
  return VideoTensor(x.shape(), x.array() + (bands.smoothed_low.array() - bands.low.array()));
}

VideoTensor adaptive_temporal_smooth(const VideoTensor& x, int window, double sigma,
                                     double gate_threshold) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("smoothing window must be odd");
  const VideoTensor smoothed = temporal_filter(x, window, sigma, true);
  const int frames = x.frames();
  const int half = window / 2;
  VideoTensor out(x.shape());
  for (int f = 0; f < frames; ++f) {
    const int lo = std::max(0, f - half);
    const int hi = std::min(frames - 1, f + half);
    const double n = hi - lo + 1;
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(x.frame(f).size());
    Eigen::ArrayXd sq = sum;
    for (int j = lo; j <= hi; ++j) {
      sum += x.frame(j);
      sq += x.frame(j).square();
    }
    const Eigen::ArrayXd var = (sq / n - (sum / n).square()).max(0.0);
    const Eigen::ArrayXd blend =
        gate_threshold > 0.0 ? (var / gate_threshold).min(1.0).eval() : Eigen::ArrayXd::Ones(var.size());
    out.frame(f) = x.frame(f) + blend * (smoothed.frame(f) - x.frame(f));
  }
  return out;
}

}  // namespace light4d
