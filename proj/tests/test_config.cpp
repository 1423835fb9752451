#include "light4d/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace light4d;

TEST_CASE("empty text gives the defaults") {
  const RunConfig c = parse_config("");
  const RunConfig d;
  CHECK(c.seed == d.seed);
  CHECK(c.schedule.tau_g == 0.7);
  CHECK(c.schedule.tau_r == 0.5);
  CHECK(c.schedule.tau_s == 0.2);
  CHECK(c.schedule.lambda_max == 0.5);
  CHECK(c.schedule.lambda_end == 0.25);
  CHECK(c.solver.steps == 25);
  CHECK(c.solver.delta == 1e-8);
  CHECK(c.target_light.label == "Left");
  CHECK(to_toml(c) == to_toml(d));
}

TEST_CASE("values are read") {
  const RunConfig c = parse_config(R"(
seed = 42
out = "somewhere"
[scene]
kind = "two_spheres"
frames = 9
[light]
label = "Top"
intensity = 0.8
[schedule]
tau_g = 0.8
[solver]
steps = 10
codec = "pooling"
[ablation]
disable_fdi = true
[fdi]
temporal = "moving_average"
)");
  CHECK(c.seed == 42);
  CHECK(c.out == "somewhere");
  CHECK(c.scene.kind == SceneKind::two_spheres);
  CHECK(c.scene.frames == 9);
  CHECK(c.target_light.label == "Top");
  CHECK(c.target_light.intensity == 0.8);
  CHECK(c.schedule.tau_g == 0.8);
  CHECK(c.solver.steps == 10);
  CHECK(c.solver.codec == CodecKind::pooling);
  CHECK(c.ablation.disable_fdi);
  CHECK_FALSE(c.ablation.disable_tca);
  CHECK(c.fdi.temporal == TemporalKind::moving_average);
}

TEST_CASE("unknown keys and wrong types are rejected") {
  CHECK_THROWS_AS(parse_config("colour = 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scene]\nradius = 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mystery]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = \"seven\""), ConfigError);
  CHECK_THROWS_AS(parse_config("[solver]\nsteps = 2.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("scene = 4"), ConfigError);
  CHECK_THROWS_AS(parse_config("[scene]\nkind = \"cube\""), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = "), ConfigError);
  try {
    parse_config("[tca]\nradus = 2");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("tca.radus") != std::string::npos);
  }
}

TEST_CASE("invalid settings are rejected") {
  CHECK_THROWS_AS(parse_config("[schedule]\ntau_g = 0.4"), ConfigError);
  CHECK_THROWS_AS(parse_config("[schedule]\nlambda_max = 1.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("[solver]\nsteps = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("[solver]\ndelta = 0.0"), ConfigError);
  CHECK_THROWS_AS(parse_config("[geometry]\ncoherence_window = 4"), ConfigError);
  CHECK_THROWS_AS(parse_config("[relight]\npatch = 7"), ConfigError);
  CHECK_THROWS_AS(parse_config("[post_smooth]\nwindow = 8"), ConfigError);
  CHECK_THROWS_AS(parse_config("[tca]\ngamma = -0.1"), ConfigError);
  CHECK_THROWS_AS(parse_config("out = \"\""), ConfigError);
  RunConfig c;
  c.flow.levels = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("serialization round trip") {
  RunConfig c;
  c.seed = 123456789;
  c.scene.kind = SceneKind::textured_plane;
  c.scene.motion_amplitude = 2.5;
  c.target_light = lighting_from_label("Bottom", 0.7, 0.05);
  c.schedule.tau_g = 0.85;
  c.solver.sigma_form = SigmaForm::cosine;
  c.geometry.mode = LinearGeometricPrior::Mode::oracle;
  c.relight.light_jitter = 0.3;
  c.gmm_reference = GmmReference::average_frame;
  c.ablation.disable_cni = true;
  const std::string text = to_toml(c);
  const RunConfig back = parse_config(text);
  CHECK(to_toml(back) == text);
  CHECK(back.seed == c.seed);
  CHECK(back.scene.kind == SceneKind::textured_plane);
  CHECK(back.target_light.direction.isApprox(c.target_light.direction));
  CHECK(back.gmm_reference == GmmReference::average_frame);
  CHECK(back.ablation.disable_cni);
}

TEST_CASE("presets") {
  const double half[] = {15.0, 45.0, 90.0};
  int i = 0;
  for (int range : {30, 90, 180}) {
    const RunConfig c = preset_config(range);
    CHECK(c.scene.yaw_start == doctest::Approx(-half[i]));
    CHECK(c.scene.yaw_end == doctest::Approx(half[i]));
    CHECK(to_toml(parse_config(to_toml(c))) == to_toml(c));
    ++i;
  }
  CHECK_THROWS_AS(preset_text(45), ConfigError);
}

TEST_CASE("loading from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "light4d_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / "c.toml";
  {
    std::ofstream(path) << "seed = 5\n[scene]\nframes = 4\n";
  }
  const RunConfig c = load_config(path);
  CHECK(c.seed == 5);
  CHECK(c.scene.frames == 4);
  CHECK_THROWS_AS(load_config(dir / "missing.toml"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("enum names") {
  CHECK(codec_kind_from_string(to_string(CodecKind::pooling)) == CodecKind::pooling);
  CHECK(gmm_reference_from_string(to_string(GmmReference::average_moments)) == GmmReference::average_moments);
  CHECK_THROWS(codec_kind_from_string("vae"));
  CHECK_THROWS(gmm_reference_from_string("median"));
}
