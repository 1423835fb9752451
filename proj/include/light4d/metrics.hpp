#pragma once

#include "light4d/tensor.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace light4d {

using Image = Eigen::ArrayXXd;  // H x W, row = y

// Luma of frame f: Rec. 601 weights for 3 channels, the channel itself for 1.
Image luminance(const VideoTensor& v, int f);

// 10 log10(1 / MSE) per frame, 99 when the frames are identical.
std::vector<double> frame_psnr(const VideoTensor& a, const VideoTensor& b);

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double c1 = 0.01 * 0.01;
  double c2 = 0.03 * 0.03;
};

// Mean SSIM over every full window position (no padding).
double ssim(const Image& a, const Image& b, const SsimConfig& cfg = {});

struct FlowField {
  Image u;  // horizontal displacement, pixels
  Image v;  // vertical displacement, pixels
};

struct FlowConfig {
  double alpha = 10.0;
  int iterations = 200;
  int levels = 3;
};

// Coarse-to-fine Horn-Schunck flow from i0 to i1, so that
// i1(y + v, x + u) ~ i0(y, x). Both images are scaled by a common factor that
// maps their joint mean to 127.5.
FlowField horn_schunck(const Image& i0, const Image& i1, const FlowConfig& cfg = {});

// Backward bilinear warp: out(y, x) = img(y + v, x + u), borders clamped.
Image warp_backward(const Image& img, const FlowField& flow);

// Flow between consecutive frames of v (F - 1 fields).
std::vector<FlowField> video_flow(const VideoTensor& v, const FlowConfig& cfg = {});

// For each consecutive pair, warps b's luma along flow[f] toward a's luma and
// takes SSIM. flow must hold one field per pair (F - 1 entries).
std::vector<double> warp_aligned_ssim(const VideoTensor& a, const VideoTensor& b,
                                      const std::vector<FlowField>& flow, const SsimConfig& cfg = {});

// Laplacian energy of relit over that of source, summed over all frames and
// channels. Unclipped.
double hfpr(const VideoTensor& relit, const VideoTensor& source);
std::vector<double> hfpr_per_frame(const VideoTensor& relit, const VideoTensor& source);
double laplacian_energy(const VideoTensor& v, int f);
inline double clip_hfpr(double h) { return h < 0.0 ? 0.0 : (h > 2.0 ? 2.0 : h); }

// Mean |flow_a - flow_b|_1 over pixels and frame pairs; per pair in `series`.
double motion_flow_l1(const VideoTensor& a, const VideoTensor& b, const FlowConfig& cfg = {},
                      std::vector<double>* series = nullptr);

// Mean squared second temporal difference over pixels, channels and interior
// frames. Needs F >= 3.
double flicker_energy(const VideoTensor& x, std::vector<double>* series = nullptr);

struct MetricReport {
  double frame_psnr = 0.0;
  double warp_ssim = 0.0;
  double hfpr = 0.0;      // clipped to [0, 2]
  double hfpr_raw = 0.0;
  double motion_flow_l1 = 0.0;
  double flicker_energy = 0.0;

  std::vector<double> psnr_series;
  std::vector<double> ssim_series;
  std::vector<double> hfpr_series;
  std::vector<double> flow_series;
  std::vector<double> flicker_series;

  std::string json() const;
  // One row per frame; columns left empty where a series has no entry.
  std::string csv() const;
  void write(const std::filesystem::path& json_path, const std::filesystem::path& csv_path) const;
};

// Metrics of `video` against `reference`. Flow for the warp-aligned SSIM is
// estimated on the reference clip.
MetricReport evaluate(const VideoTensor& video, const VideoTensor& reference,
                      const FlowConfig& flow = {}, const SsimConfig& ssim_cfg = {});

}  // namespace light4d
