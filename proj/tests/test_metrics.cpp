#include "light4d/metrics.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace light4d;

namespace {

constexpr double kPi = std::numbers::pi;

Image random_image(int h, int w, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image a(h, w);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  return a;
}

// Straightforward SSIM: Gaussian window built from scratch, every valid position.
double ssim_reference(const Image& a, const Image& b, int n, double sigma, double c1, double c2) {
  std::vector<double> g(static_cast<std::size_t>(n));
  double gs = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = i - n / 2;
    g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2 * sigma * sigma));
    gs += g[static_cast<std::size_t>(i)];
  }
  double total = 0.0;
  int count = 0;
  for (int y = 0; y + n <= a.rows(); ++y)
    for (int x = 0; x + n <= a.cols(); ++x) {
      double ma = 0, mb = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double w = g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)] / (gs * gs);
          ma += w * a(y + i, x + j);
          mb += w * b(y + i, x + j);
        }
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double w = g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)] / (gs * gs);
          const double da = a(y + i, x + j) - ma, db = b(y + i, x + j) - mb;
          va += w * da * da;
          vb += w * db * db;
          cov += w * da * db;
        }
      total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return total / count;
}

// Smooth periodic pattern translated right by `shift` pixels per frame.
VideoTensor moving_pattern(int frames, double shift) {
  VideoTensor v(Shape4{frames, 48, 48, 1});
  for (int f = 0; f < frames; ++f)
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 48; ++x) {
        const double xs = x - shift * f;
        v(f, y, x, 0) = 0.5 + 0.2 * std::sin(2 * kPi * xs / 16.0) * std::cos(2 * kPi * y / 20.0);
      }
  return v;
}

VideoTensor random_video(Shape4 s, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VideoTensor v(s);
  for (auto& x : v.array()) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("frame PSNR") {
  const VideoTensor a(Shape4{2, 4, 4, 3}, 0.5);
  CHECK(frame_psnr(a, a) == std::vector<double>{99.0, 99.0});
  const VideoTensor b(Shape4{2, 4, 4, 3}, 0.6);
  for (double p : frame_psnr(a, b)) CHECK(p == doctest::Approx(20.0).epsilon(1e-12));
  const VideoTensor zero(Shape4{1, 4, 4, 3}, 0.0), one(Shape4{1, 4, 4, 3}, 1.0);
  CHECK(frame_psnr(zero, one)[0] == doctest::Approx(0.0));
  CHECK_THROWS(frame_psnr(a, zero));
}

TEST_CASE("SSIM examples") {
  std::mt19937 rng(1);
  const Image a = random_image(24, 24, rng);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ssim(a, 1.0 - a) < 0.0);

  const SsimConfig cfg;
  const double p = 0.3, q = 0.7;
  const double expect = (2 * p * q + cfg.c1) / (p * p + q * q + cfg.c1);
  CHECK(ssim(Image::Constant(16, 16, p), Image::Constant(16, 16, q)) == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS(ssim(Image::Zero(8, 8), Image::Zero(8, 8)));
  CHECK_THROWS(ssim(Image::Zero(16, 16), Image::Zero(16, 12)));
}

TEST_CASE("SSIM matches a direct evaluation") {
  std::mt19937 rng(2);
  for (int i = 0; i < 20; ++i) {
    const Image a = random_image(32, 32, rng);
    const Image b = 0.6 * a + 0.4 * random_image(32, 32, rng);
    CHECK(std::abs(ssim(a, b) - ssim_reference(a, b, 11, 1.5, 1e-4, 9e-4)) < 1e-6);
  }
}

TEST_CASE("high-frequency preservation ratio") {
  const VideoTensor s = random_video(Shape4{3, 16, 16, 3}, 3);
  CHECK(hfpr(s, s) == doctest::Approx(1.0).epsilon(1e-14));
  const VideoTensor half(s.shape(), 0.5 * s.array());
  CHECK(hfpr(half, s) == doctest::Approx(0.25).epsilon(1e-12));
  const VideoTensor shifted(s.shape(), s.array() + 0.3);
  CHECK(hfpr(shifted, s) == doctest::Approx(1.0).epsilon(1e-12));
  for (double c : {0.1, 2.0, 3.5}) {
    const VideoTensor k(s.shape(), c * s.array());
    CHECK(hfpr(k, s) == doctest::Approx(c * c).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hfpr(s, VideoTensor(s.shape(), 0.4)), std::domain_error);
  CHECK(clip_hfpr(3.0) == 2.0);
  CHECK(clip_hfpr(-1.0) == 0.0);
  const auto per = hfpr_per_frame(half, s);
  for (double h : per) CHECK(h == doctest::Approx(0.25));
}

TEST_CASE("Horn-Schunck recovers a one pixel translation") {
  const VideoTensor v = moving_pattern(2, 1.0);
  const FlowField fl = horn_schunck(luminance(v, 0), luminance(v, 1));
  const double u = fl.u.block(8, 8, 32, 32).mean();
  const double vv = fl.v.block(8, 8, 32, 32).mean();
  CHECK(std::abs(u - 1.0) < 0.2);
  CHECK(std::abs(vv) < 0.2);

  const FlowField zero{Image::Zero(48, 48), Image::Zero(48, 48)};
  const Image i0 = luminance(v, 0);
  CHECK((warp_backward(i0, zero) - i0).abs().maxCoeff() == 0.0);
  CHECK_THROWS(horn_schunck(i0, Image::Zero(10, 10)));
}

TEST_CASE("motion flow L1") {
  const VideoTensor a = moving_pattern(4, 1.0);
  CHECK(motion_flow_l1(a, a) == 0.0);

  const VideoTensor still = moving_pattern(4, 0.0);
  const double d = motion_flow_l1(a, still);
  CHECK(d > 0.7);
  CHECK(d < 1.3);

  const VideoTensor dim(a.shape(), 0.9 * a.array() + 0.05);
  CHECK(motion_flow_l1(a, dim) <= 0.1);

  std::vector<double> series;
  motion_flow_l1(a, still, {}, &series);
  CHECK(series.size() == 3);
}

TEST_CASE("flicker energy") {
  CHECK(flicker_energy(VideoTensor(Shape4{5, 4, 4, 3}, 0.4)) == 0.0);

  VideoTensor ramp(Shape4{6, 4, 4, 1});
  for (int f = 0; f < 6; ++f) ramp.frame(f).setConstant(0.1 * f);
  CHECK(flicker_energy(ramp) < 1e-28);

  const double a = 0.05;
  VideoTensor alt(Shape4{7, 4, 4, 3});
  for (int f = 0; f < 7; ++f) alt.frame(f).setConstant(0.5 + (f % 2 ? -a : a));
  std::vector<double> series;
  CHECK(flicker_energy(alt, &series) == doctest::Approx(16 * a * a).epsilon(1e-12));
  CHECK(series.size() == 5);

  const VideoTensor x = random_video(Shape4{6, 5, 5, 3}, 4);
  VideoTensor y(x.shape());
  for (int f = 0; f < 6; ++f) y.frame(f) = x.frame(f) + 0.02 * f + 0.1;
  CHECK(flicker_energy(y) == doctest::Approx(flicker_energy(x)).epsilon(1e-12));
  const VideoTensor s(x.shape(), 3.0 * x.array());
  CHECK(flicker_energy(s) == doctest::Approx(9.0 * flicker_energy(x)).epsilon(1e-12));

  CHECK_THROWS(flicker_energy(VideoTensor(Shape4{2, 4, 4, 3})));
}

TEST_CASE("metric report") {
  const VideoTensor ref = moving_pattern(4, 1.0);
  const MetricReport self = evaluate(ref, ref);
  CHECK(self.frame_psnr == 99.0);
  CHECK(self.hfpr == doctest::Approx(1.0));
  CHECK(self.motion_flow_l1 == 0.0);
  CHECK(self.warp_ssim > 0.8);

  const auto j = nlohmann::json::parse(self.json());
  for (const char* key : {"frame_psnr", "warp_ssim", "hfpr", "hfpr_raw", "motion_flow_l1", "flicker_energy"})
    CHECK(j.contains(key));
  const std::string csv = self.csv();
  CHECK(csv.rfind("frame,frame_psnr,warp_ssim,hfpr,motion_flow_l1,flicker_energy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  const MetricReport two = evaluate(moving_pattern(2, 1.0), moving_pattern(2, 1.0));
  CHECK(std::isnan(two.flicker_energy));
  CHECK(nlohmann::json::parse(two.json())["flicker_energy"].is_null());
  CHECK_THROWS(evaluate(ref, moving_pattern(3, 1.0)));
}

TEST_CASE("luminance weights") {
  VideoTensor v(Shape4{1, 2, 2, 3});
  v.frame(0).setZero();
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) v(0, y, x, 1) = 1.0;
  CHECK((luminance(v, 0) - 0.587).abs().maxCoeff() < 1e-15);
  CHECK_THROWS(luminance(VideoTensor(Shape4{1, 2, 2, 2}), 0));
}
