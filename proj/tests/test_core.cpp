#include "light4d/io.hpp"
#include "light4d/parallel.hpp"
#include "light4d/tensor.hpp"
#include "light4d/types.hpp"

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

using namespace light4d;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("light4d_core_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

VideoTensor random_video(Shape4 s, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VideoTensor v(s);
  for (auto& x : v.array()) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("constant fill") {
  const VideoTensor z(Shape4{2, 4, 4, 3}, 0.0);
  CHECK(z.shape() == Shape4{2, 4, 4, 3});
  CHECK(z.array().size() == 96);
  CHECK(z.array().abs().maxCoeff() == 0.0);

  const VideoTensor one(Shape4{1, 1, 1, 1}, 1.0);
  CHECK(one(0, 0, 0, 0) == 1.0);

  const VideoTensor half(Shape4{3, 5, 7, 2}, 0.5);
  for (int f = 0; f < 3; ++f) CHECK(half.frame(f).mean() == 0.5);
}

TEST_CASE("non-positive shapes are rejected") {
  CHECK_THROWS_AS(VideoTensor(Shape4{0, 4, 4, 3}), std::invalid_argument);
  CHECK_THROWS_AS(VideoTensor(Shape4{1, 4, -1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(VideoTensor(Shape4{1, 2, 2, 1}, VideoTensor::Storage::Zero(3)), std::invalid_argument);
}

TEST_CASE("layout is frame-major, row-major, channels interleaved") {
  VideoTensor v(Shape4{2, 3, 4, 2});
  for (Eigen::Index i = 0; i < v.array().size(); ++i) v.array()[i] = static_cast<double>(i);
  CHECK(v(0, 0, 0, 1) == 1.0);
  CHECK(v(0, 0, 1, 0) == 2.0);
  CHECK(v(0, 1, 0, 0) == 8.0);
  CHECK(v(1, 0, 0, 0) == 24.0);
  CHECK(v.frame(1)[0] == 24.0);
  CHECK(v.plane(1, 1)(2, 3) == v(1, 2, 3, 1));
  v.plane(0, 0)(1, 2) = -5.0;
  CHECK(v(0, 1, 2, 0) == -5.0);
}

TEST_CASE("assert_finite names the first bad entry") {
  VideoTensor v(Shape4{2, 3, 3, 2}, 0.0);
  CHECK_NOTHROW(assert_finite(v));
  v(0, 0, 0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    assert_finite(v);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.where() == std::array<int, 4>{0, 0, 0, 0});
    CHECK(std::string(e.what()).find("(0,0,0,0)") != std::string::npos);
  }
  v(0, 0, 0, 0) = 0.0;
  v(1, 2, 1, 1) = std::numeric_limits<double>::infinity();
  try {
    assert_finite(v);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.where() == std::array<int, 4>{1, 2, 1, 1});
  }
}

TEST_CASE("clamp01 and reinterpret_space") {
  VideoTensor v(Shape4{1, 1, 3, 1});
  v.array() << -0.5, 0.25, 1.5;
  const VideoTensor c = clamp01(v);
  CHECK(c(0, 0, 0, 0) == 0.0);
  CHECK(c(0, 0, 1, 0) == 0.25);
  CHECK(c(0, 0, 2, 0) == 1.0);
  const LatentVideo l = reinterpret_space<LatentSpace>(v);
  CHECK((l.array() == v.array()).all());
}

TEST_CASE("label directions are unit vectors") {
  for (const char* label : {"Left", "Right", "Top", "Bottom", "Front", "Back"}) {
    const LightingSpec l = lighting_from_label(label);
    CHECK(l.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(l.validate());
  }
  CHECK(direction_for_label("Left").x() < 0.0);
  CHECK(direction_for_label("Right").x() > 0.0);
  CHECK_THROWS(direction_for_label("Sideways"));
  LightingSpec bad;
  bad.direction = {1.0, 1.0, 0.0};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("camera rotation") {
  const Eigen::Matrix3d r = yaw_rotation(90.0);
  CHECK((r * Eigen::Vector3d::UnitX() - Eigen::Vector3d(0, 0, -1)).norm() < 1e-12);
  CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CameraTrajectory cam{{0.0, 30.0}};
  CHECK((cam.world_to_camera(0) - Eigen::Matrix3d::Identity()).norm() < 1e-15);
  CHECK((cam.world_to_camera(1) * yaw_rotation(30.0) - Eigen::Matrix3d::Identity()).norm() < 1e-12);
}

TEST_CASE("feature sequence shapes") {
  FeatureSequence a(3, 4, 5);
  CHECK(a.frames() == 3);
  CHECK(a.tokens() == 4);
  CHECK(a.dim() == 5);
  CHECK(a[2].rows() == 4);
  CHECK_THROWS(FeatureSequence({Eigen::MatrixXd(2, 3), Eigen::MatrixXd(3, 3)}));
}

TEST_CASE("tensor dump round-trips bit-exactly") {
  const fs::path dir = scratch("dump");
  VideoTensorF t(Shape4{2, 5, 3, 4});
  std::mt19937 rng(3);
  std::normal_distribution<float> n;
  for (auto& x : t.array()) x = n(rng);
  write_tensor(dir / "t.l4dt", t);
  const VideoTensorF back = read_tensor(dir / "t.l4dt");
  CHECK(back.shape() == t.shape());
  CHECK((back.array() == t.array()).all());
  CHECK(fs::file_size(dir / "t.l4dt") == 20 + 4 * t.array().size());

  std::ifstream in(dir / "t.l4dt", std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  CHECK(std::string(magic, 4) == "L4DT");

  std::ofstream(dir / "bad.l4dt", std::ios::binary) << "NOPE0000";
  CHECK_THROWS(read_tensor(dir / "bad.l4dt"));
}

TEST_CASE("8-bit frames round-trip within quantization") {
  const fs::path dir = scratch("frames");
  const VideoTensor v = random_video(Shape4{3, 6, 5, 3}, 11);
  for (FrameFormat fmt : {FrameFormat::png, FrameFormat::ppm}) {
    const fs::path sub = dir / (fmt == FrameFormat::png ? "png" : "ppm");
    const auto paths = write_frames(sub, v, fmt);
    REQUIRE(paths.size() == 3);
    CHECK(paths[0].filename().string().starts_with("frame_0000"));
    const VideoTensor back = read_frames(sub);
    CHECK(back.shape() == v.shape());
    CHECK((back.array() - v.array()).abs().maxCoeff() <= 0.5 / 255.0 + 1e-12);
  }
  CHECK(list_frames(scratch("empty")).empty());
  CHECK(frame_format_from_string("ppm") == FrameFormat::ppm);
  CHECK_THROWS(frame_format_from_string("gif"));
}

TEST_CASE("parallel_for visits each index once") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(257, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK(thread_budget() >= 1);
  setenv("LIGHT4D_THREADS", "1", 1);
  CHECK(thread_budget() == 1);
  unsetenv("LIGHT4D_THREADS");
}
