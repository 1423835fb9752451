#include "light4d/coherence.hpp"
#include "light4d/scenes.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace light4d;

namespace {

SceneSpec still_sphere() {
  SceneSpec s;
  s.albedo = AlbedoPattern::constant;
  s.yaw_start = s.yaw_end = 0.0;
  s.frames = 2;
  return s;
}

// Column of the brightest pixel on row y of frame f, channel 0.
int brightest_column(const VideoTensor& v, int f, int y) {
  int best = 0;
  for (int x = 1; x < v.width(); ++x)
    if (v(f, y, x, 0) > v(f, y, best, 0)) best = x;
  return best;
}

}  // namespace

TEST_CASE("sphere centre under a frontal light") {
  const SceneSpec s = still_sphere();
  for (double intensity : {0.5, 1.0}) {
    const RenderedScene r = render(s, lighting_from_label("Front", intensity, 0.1));
    const double expect = 0.7 * intensity + 0.7 * 0.1;
    for (int c = 0; c < 3; ++c) CHECK(r.video(0, 32, 32, c) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.normals(0, 32, 32, 2) == doctest::Approx(1.0));
  }
}

TEST_CASE("static scenes render identical frames") {
  for (SceneKind k : {SceneKind::sphere, SceneKind::textured_plane, SceneKind::two_spheres}) {
    SceneSpec s;
    s.kind = k;
    s.yaw_start = s.yaw_end = 10.0;
    s.frames = 4;
    const RenderedScene r = render(s, lighting_from_label("Left"));
    for (int f = 1; f < 4; ++f) CHECK((r.video.frame(f) == r.video.frame(0)).all());
  }
}

TEST_CASE("highlight follows the camera") {
  SceneSpec s = still_sphere();
  s.height = s.width = 128;
  s.yaw_start = s.yaw_end = 30.0;
  const RenderedScene r = render(s, lighting_from_label("Front"));
  const double radius = 0.35 * 128;
  const int x = brightest_column(r.video, 0, 64);
  CHECK(std::abs(std::abs(x - 64.0) - radius * 0.5) <= 1.0);

  const RenderedScene r0 = render(still_sphere(), lighting_from_label("Front"));
  CHECK(std::abs(brightest_column(r0.video, 0, 32) - 32) <= 1);
}

TEST_CASE("camera sweeps") {
  const CameraTrajectory a = camera_sweep(180, 49);
  CHECK(a.frames() == 49);
  CHECK(a.yaw_deg.front() == doctest::Approx(-90.0));
  CHECK(a.yaw_deg.back() == doctest::Approx(90.0));
  CHECK(a.yaw_deg[24] == doctest::Approx(0.0));

  const CameraTrajectory b = camera_sweep(30, 2);
  CHECK(b.yaw_deg == std::vector<double>{-15.0, 15.0});
  const CameraTrajectory c = camera_sweep(90, 3);
  CHECK(c.yaw_deg == std::vector<double>{-45.0, 0.0, 45.0});

  CHECK_THROWS(camera_sweep(45, 10));
  CHECK_THROWS(camera_sweep(90, 1));
}

TEST_CASE("ground-truth relighting equals the deterministic Lambertian prior") {
  SceneSpec s;
  s.frames = 6;
  const RenderedScene r = render(s, lighting_from_label("Front"));
  LambertianConfig cfg;
  cfg.blend = 1.0;
  const LambertianRelightPrior prior(r.buffers(), cfg);
  for (const char* label : {"Left", "Right", "Top", "Bottom", "Back"}) {
    const LightingSpec l = lighting_from_label(label);
    const VideoTensor gt = r.relit(l);
    const VideoTensor pred = prior.relight(r.video, l, canonical_noise(1, 64, 64, 3, 6), std::nullopt);
    CHECK((gt.array() - pred.array()).abs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("buffers") {
  SceneSpec s;
  s.kind = SceneKind::two_spheres;
  s.frames = 3;
  s.background = 0.15;
  const RenderedScene r = render(s, lighting_from_label("Top"));
  int inside = 0;
  for (int f = 0; f < 3; ++f)
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        if (r.mask(f, y, x, 0) == 0.0) {
          for (int c = 0; c < 3; ++c) CHECK(r.video(f, y, x, c) == 0.15);
          continue;
        }
        ++inside;
        const double n = std::sqrt(r.normals(f, y, x, 0) * r.normals(f, y, x, 0) +
                                   r.normals(f, y, x, 1) * r.normals(f, y, x, 1) +
                                   r.normals(f, y, x, 2) * r.normals(f, y, x, 2));
        CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.normals(f, y, x, 2) >= 0.0);
      }
  CHECK(inside > 0);
  CHECK((r.video.array() >= 0.0).all());
  CHECK((r.video.array() <= 1.0).all());
}

TEST_CASE("sinusoidal object motion") {
  SceneSpec s = still_sphere();
  s.frames = 8;
  s.motion_amplitude = 6.0;
  const RenderedScene r = render(s, lighting_from_label("Front"));
  for (int f = 0; f < 8; ++f) {
    double sum = 0.0, mass = 0.0;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        sum += r.mask(f, y, x, 0) * x;
        mass += r.mask(f, y, x, 0);
      }
    const double expect = 32.0 + 6.0 * std::sin(2.0 * std::numbers::pi * f / 8.0);
    CHECK(std::abs(sum / mass - expect) < 0.5);
  }
}

TEST_CASE("two spheres occlude each other side-on") {
  SceneSpec s;
  s.kind = SceneKind::two_spheres;
  s.yaw_start = s.yaw_end = 90.0;
  s.frames = 1;
  const SurfaceSample hit = sample_surface(s, 0, 90.0, 32, 32);
  REQUIRE(hit.hit);
  // Both centres project to the image centre; the visible one is nearer the camera.
  CHECK(hit.normal.z() == doctest::Approx(1.0));
}

TEST_CASE("bilinear sampling") {
  VideoTensor v(Shape4{1, 2, 2, 1});
  v(0, 0, 0, 0) = 0.0;
  v(0, 0, 1, 0) = 1.0;
  v(0, 1, 0, 0) = 2.0;
  v(0, 1, 1, 0) = 3.0;
  CHECK(sample_bilinear(v, 0, 1.0, 1.0, 0) == 3.0);
  CHECK(sample_bilinear(v, 0, 0.5, 0.5, 0) == doctest::Approx(1.5));
  CHECK(sample_bilinear(v, 0, -4.0, 7.0, 0) == 2.0);
}

TEST_CASE("reprojection at the reference view is the identity") {
  SceneSpec s;
  s.yaw_start = s.yaw_end = 0.0;
  s.frames = 2;
  const VideoTensor v = render(s, lighting_from_label("Front")).video;
  CHECK((reproject_from_front(s, v, s.trajectory()).array() - v.array()).abs().maxCoeff() < 1e-12);
  CHECK_THROWS(reproject_from_front(s, v, camera_sweep(30, 3)));
}

TEST_CASE("scene names and validation") {
  CHECK(scene_kind_from_string(to_string(SceneKind::two_spheres)) == SceneKind::two_spheres);
  CHECK(albedo_pattern_from_string(to_string(AlbedoPattern::gradient)) == AlbedoPattern::gradient);
  CHECK_THROWS(scene_kind_from_string("cube"));
  CHECK_THROWS(albedo_pattern_from_string("stripes"));
  SceneSpec s;
  s.yaw_end = 100.0;
  CHECK_THROWS(s.validate());
  s = {};
  s.channels = 2;
  CHECK_THROWS(s.validate());
  s = {};
  s.background = -0.1;
  CHECK_THROWS(s.validate());
  CHECK_THROWS(render(s, lighting_from_label("Front")));
}
