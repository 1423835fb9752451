#pragma once

#include "light4d/coherence.hpp"
#include "light4d/io.hpp"
#include "light4d/metrics.hpp"
#include "light4d/priors.hpp"
#include "light4d/scenes.hpp"
#include "light4d/schedule.hpp"
#include "light4d/tca.hpp"
#include "light4d/types.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace light4d {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CodecKind { identity, pooling };

struct SolverConfig {
  int steps = 25;
  SigmaForm sigma_form = SigmaForm::linear;
  double delta = 1e-8;
  CodecKind codec = CodecKind::identity;
  int pool_factor = 8;
  int latent_channels = 4;
};

struct GeometryConfig {
  LinearGeometricPrior::Mode mode = LinearGeometricPrior::Mode::coherent;
  double shrinkage = 0.05;
  int coherence_window = 9;
  double coherence_sigma = 2.0;
};

struct AblationConfig {
  bool disable_tca = false;
  bool disable_cni = false;
  bool disable_gmm = false;
  bool disable_fdi = false;
  bool disable_dfg = false;

  static AblationConfig all() { return {true, true, true, true, true}; }
};

struct RunConfig {
  std::uint64_t seed = 7;
  std::string out = "light4d_out";
  FrameFormat frame_format = FrameFormat::png;

  SceneSpec scene;
  LightingSpec source_light = lighting_from_label("Front");
  LightingSpec target_light = lighting_from_label("Left");
  FusionSchedule schedule;
  SolverConfig solver;
  GeometryConfig geometry;
  // Per-frame relighting is stochastic by default.
  LambertianConfig relight{.noise_gain = 0.6, .sampler_jitter = 0.8, .exposure_gain = 0.2,
                           .light_jitter = 0.6};
  TcaConfig tca;
  GmmReference gmm_reference = GmmReference::average_moments;
  FdiConfig fdi;
  PostSmoothConfig post_smooth;
  AblationConfig ablation;
  FlowConfig flow;

  // Throws ConfigError naming the first invalid setting.
  void validate() const;
};

// Parses TOML text. Missing keys keep their defaults; unknown sections or
// keys and wrongly typed values raise ConfigError.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

// Every setting, defaults included. parse_config(to_toml(c)) reproduces c.
std::string to_toml(const RunConfig& cfg);

// Built-in presets for the 30, 90 and 180 degree camera sweeps.
std::string preset_text(int range_deg);
RunConfig preset_config(int range_deg);

std::string to_string(CodecKind k);
CodecKind codec_kind_from_string(const std::string& s);
std::string to_string(GmmReference r);
GmmReference gmm_reference_from_string(const std::string& s);
std::string to_string(FrameFormat f);

}  // namespace light4d
