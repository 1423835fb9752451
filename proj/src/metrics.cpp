#include "light4d/metrics.hpp"

#include "light4d/filters.hpp"
#include "light4d/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace light4d {
namespace {

void require_same_shape(const VideoTensor& a, const VideoTensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + to_string(a.shape()) +
                                " vs " + to_string(b.shape()));
  }
}

double bilinear(const Image& img, double y, double x) {
  const Eigen::Index h = img.rows();
  const Eigen::Index w = img.cols();
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(y));
  const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(x));
  const Eigen::Index y1 = std::min(y0 + 1, h - 1);
  const Eigen::Index x1 = std::min(x0 + 1, w - 1);
  const double ay = y - y0;
  const double ax = x - x0;
  return (1 - ay) * ((1 - ax) * img(y0, x0) + ax * img(y0, x1)) +
         ay * ((1 - ax) * img(y1, x0) + ax * img(y1, x1));
}

// 2x2 box downsample; odd trailing rows/columns fold into the last cell.
Image downsample(const Image& img) {
  const Eigen::Index h = std::max<Eigen::Index>(1, img.rows() / 2);
  const Eigen::Index w = std::max<Eigen::Index>(1, img.cols() / 2);
  Image out = Image::Zero(h, w);
  Image count = Image::Zero(h, w);
  for (Eigen::Index y = 0; y < img.rows(); ++y) {
    for (Eigen::Index x = 0; x < img.cols(); ++x) {
      const Eigen::Index cy = std::min(y / 2, h - 1);
      const Eigen::Index cx = std::min(x / 2, w - 1);
      out(cy, cx) += img(y, x);
      count(cy, cx) += 1.0;
    }
  }
  return out / count;
}

// Bilinear resize of a flow component to h x w, values multiplied by gain.
Image upsample_flow(const Image& coarse, Eigen::Index h, Eigen::Index w, double gain) {
  Image out(h, w);
  const double sy = static_cast<double>(coarse.rows()) / h;
  const double sx = static_cast<double>(coarse.cols()) / w;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      out(y, x) = gain * bilinear(coarse, (y + 0.5) * sy - 0.5, (x + 0.5) * sx - 0.5);
    }
  }
  return out;
}

// Central differences with clamped borders.
void gradients(const Image& img, Image& gx, Image& gy) {
  const Eigen::Index h = img.rows();
  const Eigen::Index w = img.cols();
  gx.resize(h, w);
  gy.resize(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index xl = std::max<Eigen::Index>(0, x - 1), xr = std::min(w - 1, x + 1);
      const Eigen::Index yu = std::max<Eigen::Index>(0, y - 1), yd = std::min(h - 1, y + 1);
      gx(y, x) = (img(y, xr) - img(y, xl)) / static_cast<double>(std::max<Eigen::Index>(1, xr - xl));
      gy(y, x) = (img(yd, x) - img(yu, x)) / static_cast<double>(std::max<Eigen::Index>(1, yd - yu));
    }
  }
}

// Horn-Schunck neighbourhood average (1/6 edge neighbours, 1/12 corners),
// clamped borders.
Image hs_average(const Image& f) {
  const Eigen::Index h = f.rows();
  const Eigen::Index w = f.cols();
  Image out(h, w);
  auto at = [&](Eigen::Index y, Eigen::Index x) {
    return f(std::clamp<Eigen::Index>(y, 0, h - 1), std::clamp<Eigen::Index>(x, 0, w - 1));
  };
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      out(y, x) = (at(y - 1, x) + at(y + 1, x) + at(y, x - 1) + at(y, x + 1)) / 6.0 +
                  (at(y - 1, x - 1) + at(y - 1, x + 1) + at(y + 1, x - 1) + at(y + 1, x + 1)) / 12.0;
    }
  }
  return out;
}

void refine(const Image& i0, const Image& i1, FlowField& flow, const FlowConfig& cfg) {
  const Image warped = warp_backward(i1, flow);
  Image gx0, gy0, gx1, gy1;
  gradients(i0, gx0, gy0);
  gradients(warped, gx1, gy1);
  const Image ix = 0.5 * (gx0 + gx1);
  const Image iy = 0.5 * (gy0 + gy1);
  const Image it = warped - i0;
  const Image denom = cfg.alpha * cfg.alpha + ix.square() + iy.square();
  const Image u0 = flow.u;
  const Image v0 = flow.v;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const Image ubar = hs_average(flow.u);
    const Image vbar = hs_average(flow.v);
    const Image r = (ix * (ubar - u0) + iy * (vbar - v0) + it) / denom;
    flow.u = ubar - ix * r;
    flow.v = vbar - iy * r;
  }
}

}  // namespace

Image luminance(const VideoTensor& v, int f) {
  if (v.channels() == 1) return v.plane(f, 0);
  if (v.channels() != 3) throw std::invalid_argument("luminance: expected 1 or 3 channels");
  return 0.299 * v.plane(f, 0) + 0.587 * v.plane(f, 1) + 0.114 * v.plane(f, 2);
}

std::vector<double> frame_psnr(const VideoTensor& a, const VideoTensor& b) {
  require_same_shape(a, b, "frame_psnr");
  std::vector<double> out(static_cast<std::size_t>(a.frames()));
  for (int f = 0; f < a.frames(); ++f) {
    const double mse = (a.frame(f) - b.frame(f)).square().mean();
    out[static_cast<std::size_t>(f)] = mse == 0.0 ? 99.0 : std::min(99.0, 10.0 * std::log10(1.0 / mse));
  }
  return out;
}

double ssim(const Image& a, const Image& b, const SsimConfig& cfg) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("ssim: size mismatch");
  const int n = cfg.window;
  if (a.rows() < n || a.cols() < n) throw std::invalid_argument("ssim: image smaller than window");
  const std::vector<double> taps = gaussian_taps(cfg.sigma, n / 2);
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = taps[static_cast<std::size_t>(i)] * taps[static_cast<std::size_t>(j)];
  w /= w.sum();
  const Eigen::Index rows = a.rows() - n + 1;
  const Eigen::Index cols = a.cols() - n + 1;
  double total = 0.0;
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      const auto pa = a.block(y, x, n, n);
      const auto pb = b.block(y, x, n, n);
      const Eigen::ArrayXXd wa = w.array();
      const double ma = (wa * pa).sum();
      const double mb = (wa * pb).sum();
      const double va = (wa * (pa - ma).square()).sum();
      const double vb = (wa * (pb - mb).square()).sum();
      const double cov = (wa * (pa - ma) * (pb - mb)).sum();
      total += ((2 * ma * mb + cfg.c1) * (2 * cov + cfg.c2)) /
               ((ma * ma + mb * mb + cfg.c1) * (va + vb + cfg.c2));
    }
  }
  return total / static_cast<double>(rows * cols);
}

Image warp_backward(const Image& img, const FlowField& flow) {
  if (flow.u.rows() != img.rows() || flow.u.cols() != img.cols() || flow.v.rows() != img.rows() ||
      flow.v.cols() != img.cols()) {
    throw std::invalid_argument("warp_backward: flow does not match the image size");
  }
  Image out(img.rows(), img.cols());
  for (Eigen::Index y = 0; y < img.rows(); ++y)
    for (Eigen::Index x = 0; x < img.cols(); ++x)
      out(y, x) = bilinear(img, y + flow.v(y, x), x + flow.u(y, x));
  return out;
}

FlowField horn_schunck(const Image& i0, const Image& i1, const FlowConfig& cfg) {
  if (i0.rows() != i1.rows() || i0.cols() != i1.cols()) {
    throw std::invalid_argument("horn_schunck: size mismatch");
  }
  if (cfg.levels < 1 || cfg.iterations < 0 || !(cfg.alpha > 0.0)) {
    throw std::invalid_argument("horn_schunck: invalid configuration");
  }
  const double mean = 0.5 * (i0.mean() + i1.mean());
  const double scale = mean > 1e-6 ? 127.5 / mean : 255.0;

  std::vector<Image> p0{i0 * scale};
  std::vector<Image> p1{i1 * scale};
  for (int l = 1; l < cfg.levels; ++l) {
    if (p0.back().rows() < 8 || p0.back().cols() < 8) break;
    p0.push_back(downsample(p0.back()));
    p1.push_back(downsample(p1.back()));
  }
  FlowField flow{Image::Zero(p0.back().rows(), p0.back().cols()),
                 Image::Zero(p0.back().rows(), p0.back().cols())};
  for (int l = static_cast<int>(p0.size()) - 1; l >= 0; --l) {
    const Image& a = p0[static_cast<std::size_t>(l)];
    if (flow.u.rows() != a.rows() || flow.u.cols() != a.cols()) {
      const double gx = static_cast<double>(a.cols()) / flow.u.cols();
      const double gy = static_cast<double>(a.rows()) / flow.v.rows();
      flow.u = upsample_flow(flow.u, a.rows(), a.cols(), gx);
      flow.v = upsample_flow(flow.v, a.rows(), a.cols(), gy);
    }
    refine(a, p1[static_cast<std::size_t>(l)], flow, cfg);
  }
  return flow;
}

std::vector<FlowField> video_flow(const VideoTensor& v, const FlowConfig& cfg) {
  if (v.frames() < 2) throw std::invalid_argument("flow needs at least 2 frames");
  std::vector<FlowField> out(static_cast<std::size_t>(v.frames() - 1));
  parallel_for(v.frames() - 1, [&](int f) {
    out[static_cast<std::size_t>(f)] = horn_schunck(luminance(v, f), luminance(v, f + 1), cfg);
  });
  return out;
}

std::vector<double> warp_aligned_ssim(const VideoTensor& a, const VideoTensor& b,
                                      const std::vector<FlowField>& flow, const SsimConfig& cfg) {
  require_same_shape(a, b, "warp_aligned_ssim");
  if (static_cast<int>(flow.size()) != a.frames() - 1) {
    throw std::invalid_argument("warp_aligned_ssim: need one flow field per frame pair");
  }
  std::vector<double> out(flow.size());
  parallel_for(static_cast<int>(flow.size()), [&](int f) {
    const Image warped = warp_backward(luminance(b, f + 1), flow[static_cast<std::size_t>(f)]);
    out[static_cast<std::size_t>(f)] = ssim(luminance(a, f), warped, cfg);
  });
  return out;
}

double laplacian_energy(const VideoTensor& v, int f) {
  double e = 0.0;
  for (int c = 0; c < v.channels(); ++c) {
    const auto p = v.plane(f, c);
    const Eigen::Index h = p.rows();
    const Eigen::Index w = p.cols();
    if (h < 3 || w < 3) continue;
    const Eigen::ArrayXXd lap = p.block(0, 1, h - 2, w - 2) + p.block(2, 1, h - 2, w - 2) +
                                p.block(1, 0, h - 2, w - 2) + p.block(1, 2, h - 2, w - 2) -
                                4.0 * p.block(1, 1, h - 2, w - 2);
    e += lap.square().sum();
  }
  return e;
}

double hfpr(const VideoTensor& relit, const VideoTensor& source) {
  require_same_shape(relit, source, "hfpr");
  double num = 0.0;
  double den = 0.0;
  for (int f = 0; f < relit.frames(); ++f) {
    num += laplacian_energy(relit, f);
    den += laplacian_energy(source, f);
  }
  if (!(den > 0.0)) throw std::domain_error("hfpr: source has no high-frequency energy");
  return num / den;
}

std::vector<double> hfpr_per_frame(const VideoTensor& relit, const VideoTensor& source) {
  require_same_shape(relit, source, "hfpr");
  std::vector<double> out(static_cast<std::size_t>(relit.frames()));
  for (int f = 0; f < relit.frames(); ++f) {
    const double den = laplacian_energy(source, f);
    out[static_cast<std::size_t>(f)] =
        den > 0.0 ? laplacian_energy(relit, f) / den : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double motion_flow_l1(const VideoTensor& a, const VideoTensor& b, const FlowConfig& cfg,
                      std::vector<double>* series) {
  require_same_shape(a, b, "motion_flow_l1");
  if (a.frames() < 2) throw std::invalid_argument("motion_flow_l1 needs at least 2 frames");
  const auto fa = video_flow(a, cfg);
  const auto fb = video_flow(b, cfg);
  double total = 0.0;
  if (series) series->clear();
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const double d = ((fa[i].u - fb[i].u).abs() + (fa[i].v - fb[i].v).abs()).mean();
    if (series) series->push_back(d);
    total += d;
  }
  return total / static_cast<double>(fa.size());
}

double flicker_energy(const VideoTensor& x, std::vector<double>* series) {
  if (x.frames() < 3) throw std::invalid_argument("flicker_energy needs at least 3 frames");
  double total = 0.0;
  if (series) series->clear();
  for (int f = 1; f + 1 < x.frames(); ++f) {
    const double e = (x.frame(f + 1) - 2.0 * x.frame(f) + x.frame(f - 1)).square().mean();
    if (series) series->push_back(e);
    total += e;
  }
  return total / (x.frames() - 2);
}

std::string MetricReport::json() const {
  auto scalar = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  auto series = [&](const std::vector<double>& s) {
    nlohmann::json a = nlohmann::json::array();
    for (double v : s) a.push_back(scalar(v));
    return a;
  };
  nlohmann::json j;
  j["frame_psnr"] = scalar(frame_psnr);
  j["warp_ssim"] = scalar(warp_ssim);
  j["hfpr"] = scalar(hfpr);
  j["hfpr_raw"] = scalar(hfpr_raw);
  j["motion_flow_l1"] = scalar(motion_flow_l1);
  j["flicker_energy"] = scalar(flicker_energy);
  j["series"] = {{"frame_psnr", series(psnr_series)},
                 {"warp_ssim", series(ssim_series)},
                 {"hfpr", series(hfpr_series)},
                 {"motion_flow_l1", series(flow_series)},
                 {"flicker_energy", series(flicker_series)}};
  return j.dump(2) + "\n";
}

std::string MetricReport::csv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "frame,frame_psnr,warp_ssim,hfpr,motion_flow_l1,flicker_energy\n";
  auto cell = [&](const std::vector<double>& s, std::size_t i) {
    if (i < s.size() && std::isfinite(s[i])) os << s[i];
  };
  for (std::size_t i = 0; i < psnr_series.size(); ++i) {
    os << i << ',';
    cell(psnr_series, i);
    os << ',';
    cell(ssim_series, i);
    os << ',';
    cell(hfpr_series, i);
    os << ',';
    cell(flow_series, i);
    os << ',';
    // Second differences are centred on interior frames.
    if (i >= 1) cell(flicker_series, i - 1);
    os << '\n';
  }
  return os.str();
}

void MetricReport::write(const std::filesystem::path& json_path,
                         const std::filesystem::path& csv_path) const {
  std::ofstream j(json_path, std::ios::binary);
  std::ofstream c(csv_path, std::ios::binary);
  if (!j || !c) throw std::runtime_error("cannot write metric report next to " + json_path.string());
  j << json();
  c << csv();
}

MetricReport evaluate(const VideoTensor& video, const VideoTensor& reference, const FlowConfig& flow,
                      const SsimConfig& ssim_cfg) {
  require_same_shape(video, reference, "evaluate");
  if (video.frames() < 2) throw std::invalid_argument("evaluate needs at least 2 frames");
  MetricReport r;
  r.psnr_series = frame_psnr(video, reference);
  r.frame_psnr = Eigen::Map<const Eigen::ArrayXd>(r.psnr_series.data(),
                                                  static_cast<Eigen::Index>(r.psnr_series.size()))
                     .mean();
  const auto ref_flow = video_flow(reference, flow);
  r.ssim_series = warp_aligned_ssim(video, video, ref_flow, ssim_cfg);
  r.warp_ssim = Eigen::Map<const Eigen::ArrayXd>(r.ssim_series.data(),
                                                 static_cast<Eigen::Index>(r.ssim_series.size()))
                    .mean();
  r.hfpr_raw = hfpr(video, reference);
  r.hfpr = clip_hfpr(r.hfpr_raw);
  r.hfpr_series = hfpr_per_frame(video, reference);
  r.motion_flow_l1 = motion_flow_l1(video, reference, flow, &r.flow_series);
  r.flicker_energy = video.frames() >= 3 ? flicker_energy(video, &r.flicker_series)
                                         : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace light4d
