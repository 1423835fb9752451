#pragma once

#include "light4d/tensor.hpp"

#include <vector>

namespace light4d {

// Normalized 1-D Gaussian taps on [-radius, radius].
std::vector<double> gaussian_taps(double sigma, int radius);

// Index into [0, n) with half-sample symmetric reflection (d c b a | a b c d).
int reflect_index(int i, int n);

// Separable per-frame, per-channel Gaussian blur, kernel truncated at
// ceil(truncate * sigma), reflected borders.
template <typename Space>
Tensor4<double, Space> gaussian_blur(const Tensor4<double, Space>& x, double sigma,
                                     double truncate = 3.0);

// Temporal convolution with per-frame taps (see temporal_window) applied to
// every pixel; taps are renormalized over the frames that exist.
VideoTensor temporal_filter(const VideoTensor& x, int window, double sigma, bool gaussian);

extern template LatentVideo gaussian_blur(const LatentVideo&, double, double);
extern template VideoTensor gaussian_blur(const VideoTensor&, double, double);

}  // namespace light4d
