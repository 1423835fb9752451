#include "light4d/config.hpp"
#include "light4d/io.hpp"
#include "light4d/metrics.hpp"
#include "light4d/pipeline.hpp"
#include "light4d/schedule.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace light4d;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> preset;
};

RunConfig resolve(const Globals& g) {
  RunConfig cfg;
  if (!g.config.empty()) {
    cfg = load_config(g.config);
  } else if (g.preset) {
    cfg = preset_config(*g.preset);
  }
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.out = g.out;
  cfg.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int fail(const std::string& command, const std::string& kind, const std::string& message) {
  nlohmann::json j{{"status", "error"}, {"command", command}, {"kind", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return kind == "config" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"light4d: training-free relighting guidance on synthetic scenes"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "Run configuration (TOML)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override the run seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--preset", g.preset, "Built-in preset: 30, 90 or 180")
      ->check(CLI::IsMember({30, 90, 180}));

  auto* run = app.add_subcommand("run", "Render the scene, run guidance, write frames, trace and metrics");

  auto* ablate = app.add_subcommand("ablate-tau-g", "One full run per geometric isolation threshold");
  std::vector<double> tau_list{0.5, 0.7, 0.9};
  bool scale_phases = false;
  ablate->add_option("--tau-g", tau_list, "Thresholds to sweep")->delimiter(',');
  ablate->add_flag("--scale-phases", scale_phases,
                   "Scale tau_r and tau_s with tau_g instead of keeping them fixed");

  auto* eval = app.add_subcommand("eval", "Metrics of the frames in DIR_A against DIR_B");
  std::string dir_a, dir_b;
  eval->add_option("dir_a", dir_a)->required()->check(CLI::ExistingDirectory);
  eval->add_option("dir_b", dir_b)->required()->check(CLI::ExistingDirectory);

  auto* dump = app.add_subcommand("dump-schedule", "Emit (t, lambda) samples as CSV");
  int samples = 1001;
  dump->add_option("--samples", samples, "Number of evenly spaced t values")->check(CLI::Range(2, 1000000));

  auto* scene = app.add_subcommand("render-scene", "Write source, geometry and ground-truth renders");

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (run->parsed()) {
      const RunConfig cfg = resolve(g);
      const PipelineResult r = run_pipeline(cfg);
      write_outputs(cfg.out, cfg, r);
      std::cout << "wrote " << r.inference.video.frames() << " frames to " << (fs::path(cfg.out) / "frames")
                << "\n"
                << "vs source:       hfpr " << r.vs_source.hfpr << "  flow_l1 " << r.vs_source.motion_flow_l1
                << "  flicker " << r.vs_source.flicker_energy << "\n"
                << "vs ground truth: psnr " << r.vs_ground_truth.frame_psnr << "  warp_ssim "
                << r.vs_ground_truth.warp_ssim << "\n";
    } else if (ablate->parsed()) {
      const RunConfig cfg = resolve(g);
      const std::string csv = tau_g_csv(ablate_tau_g(cfg, tau_list, scale_phases));
      write_text(fs::path(cfg.out) / "tau_g_ablation.csv", csv);
      std::cout << csv;
    } else if (eval->parsed()) {
      const auto fa = list_frames(dir_a);
      const auto fb = list_frames(dir_b);
      if (fa.empty() || fb.empty()) {
        return fail(command, "input", "no frames found in " + (fa.empty() ? dir_a : dir_b));
      }
      if (fa.size() != fb.size()) {
        return fail(command, "input",
                    "frame count mismatch: " + dir_a + " has " + std::to_string(fa.size()) + ", " + dir_b +
                        " has " + std::to_string(fb.size()));
      }
      RunConfig cfg;
      if (!g.config.empty() || g.preset) cfg = resolve(g);
      const MetricReport report = evaluate(read_frames(dir_a), read_frames(dir_b), cfg.flow);
      if (!g.out.empty()) {
        fs::create_directories(g.out);
        report.write(fs::path(g.out) / "metrics.json", fs::path(g.out) / "metrics.csv");
      }
      std::cout << report.json();
    } else if (dump->parsed()) {
      const RunConfig cfg = resolve(g);
      std::ostringstream os;
      os << std::setprecision(17) << "t,lambda\n";
      for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        os << t << ',' << lambda_at(cfg.schedule, t) << '\n';
      }
      if (!g.out.empty()) write_text(fs::path(g.out) / "schedule.csv", os.str());
      std::cout << os.str();
    } else if (scene->parsed()) {
      const RunConfig cfg = resolve(g);
      write_scene(cfg.out, cfg, prepare_scene(cfg));
      std::cout << "wrote scene renders to " << cfg.out << "\n";
    }
  } catch (const ConfigError& e) {
    return fail(command, "config", e.what());
  } catch (const SolverError& e) {
    return fail(command, "solver", e.what());
  } catch (const std::exception& e) {
    return fail(command, "runtime", e.what());
  }
  return 0;
}
