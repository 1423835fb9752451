#include "light4d/filters.hpp"

#include "light4d/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace light4d {

std::vector<double> gaussian_taps(double sigma, int radius) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be > 0");
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int d = -radius; d <= radius; ++d) {
    const double w = std::exp(-0.5 * d * d / (sigma * sigma));
    taps[static_cast<std::size_t>(d + radius)] = w;
    total += w;
  }
  for (double& w : taps) w /= total;
  return taps;
}

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

template <typename Space>
Tensor4<double, Space> gaussian_blur(const Tensor4<double, Space>& x, double sigma,
                                     double truncate) {
  const int radius = static_cast<int>(std::ceil(truncate * sigma));
  const auto taps = gaussian_taps(sigma, radius);
  const Shape4& s = x.shape();
  Tensor4<double, Space> tmp(s), out(s);
  parallel_for(s.frames, [&](int f) {
    for (int y = 0; y < s.height; ++y) {
      for (int xx = 0; xx < s.width; ++xx) {
        for (int c = 0; c < s.channels; ++c) {
          double acc = 0.0;
          for (int d = -radius; d <= radius; ++d) {
            acc += taps[static_cast<std::size_t>(d + radius)] *
                   x(f, y, reflect_index(xx + d, s.width), c);
          }
          tmp(f, y, xx, c) = acc;
        }
      }
    }
    for (int y = 0; y < s.height; ++y) {
      for (int xx = 0; xx < s.width; ++xx) {
        for (int c = 0; c < s.channels; ++c) {
          double acc = 0.0;
          for (int d = -radius; d <= radius; ++d) {
            acc += taps[static_cast<std::size_t>(d + radius)] *
                   tmp(f, reflect_index(y + d, s.height), xx, c);
          }
          out(f, y, xx, c) = acc;
        }
      }
    }
  });
  return out;
}

template LatentVideo gaussian_blur(const LatentVideo&, double, double);
template VideoTensor gaussian_blur(const VideoTensor&, double, double);

VideoTensor temporal_filter(const VideoTensor& x, int window, double sigma, bool gaussian) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("temporal window must be odd");
  if (gaussian && !(sigma > 0.0)) throw std::invalid_argument("temporal sigma must be > 0");
  const int frames = x.frames();
  const int half = window / 2;
  VideoTensor out(x.shape());
  for (int f = 0; f < frames; ++f) {
    const int lo = std::max(0, f - half);
    const int hi = std::min(frames - 1, f + half);
    double total = 0.0;
    std::vector<double> w;
    for (int j = lo; j <= hi; ++j) {
      const double d = j - f;
      w.push_back(gaussian ? std::exp(-0.5 * d * d / (sigma * sigma)) : 1.0);
      total += w.back();
    }
    auto dst = out.frame(f);
    dst.setZero();
    for (int j = lo; j <= hi; ++j) dst += (w[static_cast<std::size_t>(j - lo)] / total) * x.frame(j);
  }
  return out;
}

}  // namespace light4d
