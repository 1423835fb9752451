#include "light4d/config.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include "presets_embedded.hpp"

namespace light4d {
namespace {

using Keys = std::initializer_list<std::string_view>;

std::string where_of(const std::string& section, std::string_view key) {
  return section.empty() ? std::string(key) : section + "." + std::string(key);
}

void check_keys(const toml::table& t, const std::string& section, Keys allowed) {
  for (const auto& [k, v] : t) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k.str();
    if (!ok) throw ConfigError("unknown config key '" + where_of(section, k.str()) + "'");
  }
}

[[noreturn]] void type_error(const std::string& section, std::string_view key, const char* want) {
  throw ConfigError("config key '" + where_of(section, key) + "' must be " + want);
}

void read(const toml::table& t, const std::string& s, std::string_view key, double& dst) {
  const toml::node* n = t.get(key);
  if (!n) return;
  if (auto v = n->as_floating_point()) {
    dst = v->get();
  } else if (auto i = n->as_integer()) {
    dst = static_cast<double>(i->get());
  } else {
    type_error(s, key, "a number");
  }
}

void read(const toml::table& t, const std::string& s, std::string_view key, int& dst) {
  const toml::node* n = t.get(key);
  if (!n) return;
  auto i = n->as_integer();
  if (!i) type_error(s, key, "an integer");
  const std::int64_t v = i->get();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    type_error(s, key, "an integer in int range");
  }
  dst = static_cast<int>(v);
}

void read(const toml::table& t, const std::string& s, std::string_view key, std::uint64_t& dst) {
  const toml::node* n = t.get(key);
  if (!n) return;
  auto i = n->as_integer();
  if (!i || i->get() < 0) type_error(s, key, "a non-negative integer");
  dst = static_cast<std::uint64_t>(i->get());
}

void read(const toml::table& t, const std::string& s, std::string_view key, bool& dst) {
  const toml::node* n = t.get(key);
  if (!n) return;
  auto b = n->as_boolean();
  if (!b) type_error(s, key, "a boolean");
  dst = b->get();
}

void read(const toml::table& t, const std::string& s, std::string_view key, std::string& dst) {
  const toml::node* n = t.get(key);
  if (!n) return;
  auto v = n->as_string();
  if (!v) type_error(s, key, "a string");
  dst = v->get();
}

bool read(const toml::table& t, const std::string& s, std::string_view key, Eigen::Vector3d& dst) {
  const toml::node* n = t.get(key);
  if (!n) return false;
  auto a = n->as_array();
  if (!a || a->size() != 3) type_error(s, key, "an array of 3 numbers");
  for (std::size_t i = 0; i < 3; ++i) {
    const toml::node& e = *a->get(i);
    if (auto f = e.as_floating_point()) {
      dst[static_cast<Eigen::Index>(i)] = f->get();
    } else if (auto k = e.as_integer()) {
      dst[static_cast<Eigen::Index>(i)] = static_cast<double>(k->get());
    } else {
      type_error(s, key, "an array of 3 numbers");
    }
  }
  return true;
}

// Enum fields: read a string and convert, rewrapping conversion errors.
template <typename E, typename Conv>
void read_enum(const toml::table& t, const std::string& s, std::string_view key, E& dst, Conv conv) {
  std::string text;
  if (!t.get(key)) return;
  read(t, s, key, text);
  try {
    dst = conv(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config key '" + where_of(s, key) + "': " + e.what());
  }
}

const toml::table* section(const toml::table& root, std::string_view name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  auto t = n->as_table();
  if (!t) throw ConfigError("config key '" + std::string(name) + "' must be a table");
  return t;
}

void read_light(const toml::table& t, const std::string& s, LightingSpec& light) {
  check_keys(t, s, {"label", "direction", "intensity", "ambient"});
  std::string label = light.label;
  read(t, s, "label", label);
  Eigen::Vector3d dir = light.direction;
  const bool has_dir = read(t, s, "direction", dir);
  if (!has_dir && t.get("label")) {
    try {
      dir = direction_for_label(label);
    } catch (const std::invalid_argument&) {
      throw ConfigError("config '" + s + "': label '" + label +
                        "' has no built-in direction; set direction explicitly");
    }
  }
  light.label = label;
  light.direction = dir;
  read(t, s, "intensity", light.intensity);
  read(t, s, "ambient", light.ambient);
}

toml::array vec3(const Eigen::Vector3d& v) { return toml::array{v.x(), v.y(), v.z()}; }

toml::table light_table(const LightingSpec& l) {
  return toml::table{{"label", l.label},
                     {"direction", vec3(l.direction)},
                     {"intensity", l.intensity},
                     {"ambient", l.ambient}};
}

std::int64_t i64(std::uint64_t v) {
  if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw ConfigError("seed does not fit a TOML integer");
  }
  return static_cast<std::int64_t>(v);
}

template <typename Fn>
void guard(const char* what, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string to_string(CodecKind k) { return k == CodecKind::identity ? "identity" : "pooling"; }

CodecKind codec_kind_from_string(const std::string& s) {
  if (s == "identity") return CodecKind::identity;
  if (s == "pooling") return CodecKind::pooling;
  throw std::invalid_argument("unknown codec '" + s + "'");
}

std::string to_string(GmmReference r) {
  return r == GmmReference::average_moments ? "average_moments" : "average_frame";
}

GmmReference gmm_reference_from_string(const std::string& s) {
  if (s == "average_moments") return GmmReference::average_moments;
  if (s == "average_frame") return GmmReference::average_frame;
  throw std::invalid_argument("unknown moment reference '" + s + "'");
}

std::string to_string(FrameFormat f) { return f == FrameFormat::png ? "png" : "ppm"; }

void RunConfig::validate() const {
  if (out.empty()) throw ConfigError("out must not be empty");
  guard("scene", [&] { scene.validate(); });
  guard("source_light", [&] { source_light.validate(); });
  guard("light", [&] { target_light.validate(); });
  guard("schedule", [&] { schedule.validate(); });
  if (solver.steps < 1) throw ConfigError("solver.steps must be >= 1");
  if (!(solver.delta > 0.0)) throw ConfigError("solver.delta must be > 0");
  if (solver.codec == CodecKind::pooling) {
    guard("solver", [&] {
      PoolingCodec(solver.pool_factor, solver.latent_channels, scene.channels)
          .latent_shape({scene.frames, scene.height, scene.width, scene.channels});
    });
  }
  if (!(geometry.shrinkage > 0.0)) throw ConfigError("geometry.shrinkage must be > 0");
  if (geometry.coherence_window < 1 || geometry.coherence_window % 2 == 0) {
    throw ConfigError("geometry.coherence_window must be a positive odd integer");
  }
  if (!(geometry.coherence_sigma > 0.0)) throw ConfigError("geometry.coherence_sigma must be > 0");
  guard("relight", [&] { relight.validate(); });
  if (scene.height % relight.patch != 0 || scene.width % relight.patch != 0) {
    throw ConfigError("relight.patch must divide the scene height and width");
  }
  guard("tca", [&] { tca.validate(); });
  guard("fdi", [&] { fdi.validate(); });
  if (post_smooth.window < 1 || post_smooth.window % 2 == 0) {
    throw ConfigError("post_smooth.window must be odd");
  }
  if (flow.levels < 1 || flow.iterations < 0 || !(flow.alpha > 0.0)) {
    throw ConfigError("flow settings invalid: need levels >= 1, iterations >= 0, alpha > 0");
  }
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e;
    throw ConfigError("cannot parse " + origin + ": " + os.str());
  }
  check_keys(root, "",
             {"seed", "out", "frame_format", "scene", "source_light", "light", "schedule", "solver",
              "geometry", "relight", "tca", "gmm", "fdi", "post_smooth", "ablation", "flow"});
  RunConfig c;
  read(root, "", "seed", c.seed);
  read(root, "", "out", c.out);
  read_enum(root, "", "frame_format", c.frame_format, frame_format_from_string);

  if (auto t = section(root, "scene")) {
    const std::string s = "scene";
    check_keys(*t, s,
               {"kind", "height", "width", "frames", "yaw_start", "yaw_end", "albedo", "albedo_value",
                "motion_amplitude", "background", "channels"});
    read_enum(*t, s, "kind", c.scene.kind, scene_kind_from_string);
    read(*t, s, "height", c.scene.height);
    read(*t, s, "width", c.scene.width);
    read(*t, s, "frames", c.scene.frames);
    read(*t, s, "yaw_start", c.scene.yaw_start);
    read(*t, s, "yaw_end", c.scene.yaw_end);
    read_enum(*t, s, "albedo", c.scene.albedo, albedo_pattern_from_string);
    read(*t, s, "albedo_value", c.scene.albedo_value);
    read(*t, s, "motion_amplitude", c.scene.motion_amplitude);
    read(*t, s, "background", c.scene.background);
    read(*t, s, "channels", c.scene.channels);
  }
  if (auto t = section(root, "source_light")) read_light(*t, "source_light", c.source_light);
  if (auto t = section(root, "light")) read_light(*t, "light", c.target_light);
  if (auto t = section(root, "schedule")) {
    const std::string s = "schedule";
    check_keys(*t, s,
               {"mode", "tau_g", "tau_r", "tau_s", "lambda_max", "lambda_end", "two_phase_start",
                "two_phase_full", "two_phase_peak"});
    read_enum(*t, s, "mode", c.schedule.mode, schedule_mode_from_string);
    read(*t, s, "tau_g", c.schedule.tau_g);
    read(*t, s, "tau_r", c.schedule.tau_r);
    read(*t, s, "tau_s", c.schedule.tau_s);
    read(*t, s, "lambda_max", c.schedule.lambda_max);
    read(*t, s, "lambda_end", c.schedule.lambda_end);
    read(*t, s, "two_phase_start", c.schedule.two_phase_start);
    read(*t, s, "two_phase_full", c.schedule.two_phase_full);
    read(*t, s, "two_phase_peak", c.schedule.two_phase_peak);
  }
  if (auto t = section(root, "solver")) {
    const std::string s = "solver";
    check_keys(*t, s, {"steps", "sigma_form", "delta", "codec", "pool_factor", "latent_channels"});
    read(*t, s, "steps", c.solver.steps);
    read_enum(*t, s, "sigma_form", c.solver.sigma_form, sigma_form_from_string);
    read(*t, s, "delta", c.solver.delta);
    read_enum(*t, s, "codec", c.solver.codec, codec_kind_from_string);
    read(*t, s, "pool_factor", c.solver.pool_factor);
    read(*t, s, "latent_channels", c.solver.latent_channels);
  }
  if (auto t = section(root, "geometry")) {
    const std::string s = "geometry";
    check_keys(*t, s, {"mode", "shrinkage", "coherence_window", "coherence_sigma"});
    read_enum(*t, s, "mode", c.geometry.mode, geometric_mode_from_string);
    read(*t, s, "shrinkage", c.geometry.shrinkage);
    read(*t, s, "coherence_window", c.geometry.coherence_window);
    read(*t, s, "coherence_sigma", c.geometry.coherence_sigma);
  }
  if (auto t = section(root, "relight")) {
    const std::string s = "relight";
    check_keys(*t, s,
               {"blend", "noise_gain", "sampler_jitter", "exposure_gain", "light_jitter", "patch", "feature_dim",
                "feature_scale", "seed"});
    read(*t, s, "blend", c.relight.blend);
    read(*t, s, "noise_gain", c.relight.noise_gain);
    read(*t, s, "sampler_jitter", c.relight.sampler_jitter);
    read(*t, s, "exposure_gain", c.relight.exposure_gain);
    read(*t, s, "light_jitter", c.relight.light_jitter);
    read(*t, s, "patch", c.relight.patch);
    read(*t, s, "feature_dim", c.relight.feature_dim);
    read(*t, s, "feature_scale", c.relight.feature_scale);
    read(*t, s, "seed", c.relight.seed);
  }
  if (auto t = section(root, "tca")) {
    const std::string s = "tca";
    check_keys(*t, s, {"radius", "window_sigma", "gamma", "normalize_weights"});
    read(*t, s, "radius", c.tca.radius);
    read(*t, s, "window_sigma", c.tca.window_sigma);
    read(*t, s, "gamma", c.tca.gamma);
    read(*t, s, "normalize_weights", c.tca.normalize_weights);
  }
  if (auto t = section(root, "gmm")) {
    check_keys(*t, "gmm", {"reference"});
    read_enum(*t, "gmm", "reference", c.gmm_reference, gmm_reference_from_string);
  }
  if (auto t = section(root, "fdi")) {
    const std::string s = "fdi";
    check_keys(*t, s, {"blur_sigma", "temporal", "window", "temporal_sigma"});
    read(*t, s, "blur_sigma", c.fdi.blur_sigma);
    read_enum(*t, s, "temporal", c.fdi.temporal, temporal_kind_from_string);
    read(*t, s, "window", c.fdi.window);
    read(*t, s, "temporal_sigma", c.fdi.temporal_sigma);
  }
  if (auto t = section(root, "post_smooth")) {
    const std::string s = "post_smooth";
    check_keys(*t, s, {"enabled", "window", "sigma", "gate_threshold"});
    read(*t, s, "enabled", c.post_smooth.enabled);
    read(*t, s, "window", c.post_smooth.window);
    read(*t, s, "sigma", c.post_smooth.sigma);
    read(*t, s, "gate_threshold", c.post_smooth.gate_threshold);
  }
  if (auto t = section(root, "ablation")) {
    const std::string s = "ablation";
    check_keys(*t, s, {"disable_tca", "disable_cni", "disable_gmm", "disable_fdi", "disable_dfg"});
    read(*t, s, "disable_tca", c.ablation.disable_tca);
    read(*t, s, "disable_cni", c.ablation.disable_cni);
    read(*t, s, "disable_gmm", c.ablation.disable_gmm);
    read(*t, s, "disable_fdi", c.ablation.disable_fdi);
    read(*t, s, "disable_dfg", c.ablation.disable_dfg);
  }
  if (auto t = section(root, "flow")) {
    const std::string s = "flow";
    check_keys(*t, s, {"alpha", "iterations", "levels"});
    read(*t, s, "alpha", c.flow.alpha);
    read(*t, s, "iterations", c.flow.iterations);
    read(*t, s, "levels", c.flow.levels);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), path.string());
}

std::string to_toml(const RunConfig& c) {
  toml::table root;
  root.insert("seed", i64(c.seed));
  root.insert("out", c.out);
  root.insert("frame_format", to_string(c.frame_format));
  root.insert("scene", toml::table{{"kind", to_string(c.scene.kind)},
                                   {"height", c.scene.height},
                                   {"width", c.scene.width},
                                   {"frames", c.scene.frames},
                                   {"yaw_start", c.scene.yaw_start},
                                   {"yaw_end", c.scene.yaw_end},
                                   {"albedo", to_string(c.scene.albedo)},
                                   {"albedo_value", c.scene.albedo_value},
                                   {"motion_amplitude", c.scene.motion_amplitude},
                                   {"background", c.scene.background},
                                   {"channels", c.scene.channels}});
  root.insert("source_light", light_table(c.source_light));
  root.insert("light", light_table(c.target_light));
  root.insert("schedule", toml::table{{"mode", to_string(c.schedule.mode)},
                                      {"tau_g", c.schedule.tau_g},
                                      {"tau_r", c.schedule.tau_r},
                                      {"tau_s", c.schedule.tau_s},
                                      {"lambda_max", c.schedule.lambda_max},
                                      {"lambda_end", c.schedule.lambda_end},
                                      {"two_phase_start", c.schedule.two_phase_start},
                                      {"two_phase_full", c.schedule.two_phase_full},
                                      {"two_phase_peak", c.schedule.two_phase_peak}});
  root.insert("solver", toml::table{{"steps", c.solver.steps},
                                    {"sigma_form", to_string(c.solver.sigma_form)},
                                    {"delta", c.solver.delta},
                                    {"codec", to_string(c.solver.codec)},
                                    {"pool_factor", c.solver.pool_factor},
                                    {"latent_channels", c.solver.latent_channels}});
  root.insert("geometry",
              toml::table{{"mode", to_string(c.geometry.mode)},
                          {"shrinkage", c.geometry.shrinkage},
                          {"coherence_window", c.geometry.coherence_window},
                          {"coherence_sigma", c.geometry.coherence_sigma}});
  root.insert("relight", toml::table{{"blend", c.relight.blend},
                                     {"noise_gain", c.relight.noise_gain},
                                     {"sampler_jitter", c.relight.sampler_jitter},
                                     {"exposure_gain", c.relight.exposure_gain},
                                     {"light_jitter", c.relight.light_jitter},
                                     {"patch", c.relight.patch},
                                     {"feature_dim", c.relight.feature_dim},
                                     {"feature_scale", c.relight.feature_scale},
                                     {"seed", i64(c.relight.seed)}});
  root.insert("tca", toml::table{{"radius", c.tca.radius},
                                 {"window_sigma", c.tca.window_sigma},
                                 {"gamma", c.tca.gamma},
                                 {"normalize_weights", c.tca.normalize_weights}});
  root.insert("gmm", toml::table{{"reference", to_string(c.gmm_reference)}});
  root.insert("fdi", toml::table{{"blur_sigma", c.fdi.blur_sigma},
                                 {"temporal", to_string(c.fdi.temporal)},
                                 {"window", c.fdi.window},
                                 {"temporal_sigma", c.fdi.temporal_sigma}});
  root.insert("post_smooth", toml::table{{"enabled", c.post_smooth.enabled},
                                         {"window", c.post_smooth.window},
                                         {"sigma", c.post_smooth.sigma},
                                         {"gate_threshold", c.post_smooth.gate_threshold}});
  root.insert("ablation", toml::table{{"disable_tca", c.ablation.disable_tca},
                                      {"disable_cni", c.ablation.disable_cni},
                                      {"disable_gmm", c.ablation.disable_gmm},
                                      {"disable_fdi", c.ablation.disable_fdi},
                                      {"disable_dfg", c.ablation.disable_dfg}});
  root.insert("flow", toml::table{{"alpha", c.flow.alpha},
                                  {"iterations", c.flow.iterations},
                                  {"levels", c.flow.levels}});
  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

std::string preset_text(int range_deg) {
  switch (range_deg) {
    case 30: return std::string(presets::k30);
    case 90: return std::string(presets::k90);
    case 180: return std::string(presets::k180);
    default:
      throw ConfigError("no preset for range " + std::to_string(range_deg) + " (use 30, 90 or 180)");
  }
}

RunConfig preset_config(int range_deg) {
  return parse_config(preset_text(range_deg), "preset_" + std::to_string(range_deg) + ".toml");
}

}  // namespace light4d
