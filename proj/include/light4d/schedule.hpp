#pragma once

#include <string>
#include <vector>

namespace light4d {

enum class ScheduleMode { four_phase, two_phase };

ScheduleMode schedule_mode_from_string(const std::string& s);
std::string to_string(ScheduleMode m);

// Fusion weight lambda(t) between the geometric and the relighting target.
//
// four_phase, with t running from 1 (pure noise) down to 0:
//   t in (tau_g, 1]      0                                   geometric isolation
//   t in [tau_r, tau_g]  lambda_max * sqrt((tau_g - t) / (tau_g - tau_r))
//   t in [tau_s, tau_r)  lambda_max                          plateau
//   t in [0, tau_s)      (lambda_max - lambda_end) / tau_s * t + lambda_end
//
// two_phase: zero over the first 60% of a 25-step trajectory (steps
// 0..14, t >= 0.44), then a linear ramp reaching two_phase_peak at t = 0.04
// (step 24) and held below that.
struct FusionSchedule {
  double tau_g = 0.7;
  double tau_r = 0.5;
  double tau_s = 0.2;
  double lambda_max = 0.5;
  double lambda_end = 0.25;
  ScheduleMode mode = ScheduleMode::four_phase;

  double two_phase_start = 0.44;
  double two_phase_full = 0.04;
  double two_phase_peak = 0.5;

  void validate() const;
  // Upper bound of lambda over [0, 1].
  double peak() const;
};

// Throws std::out_of_range when t is outside [0, 1].
double lambda_at(const FusionSchedule& schedule, double t);

// Largest |lambda(b + e) - lambda(b - e)| over the phase boundaries and over
// `grid` evenly spaced interior points, probing one ulp on either side.
double check_continuity(const FusionSchedule& schedule, int grid = 1000);

// Phase boundaries in t for the schedule's mode.
std::vector<double> phase_boundaries(const FusionSchedule& schedule);

enum class SigmaForm { linear, cosine };

SigmaForm sigma_form_from_string(const std::string& s);
std::string to_string(SigmaForm f);

double sigma_of(SigmaForm form, double t);

// Discrete solver plan. Step k (0-based) moves from times[k] to times[k + 1];
// times has K + 1 entries running from 1 to 0.
struct StepPlan {
  std::vector<double> times;
  std::vector<double> sigmas;
  double delta = 1e-8;
  SigmaForm form = SigmaForm::linear;

  int steps() const { return static_cast<int>(times.size()) - 1; }
};

StepPlan make_step_plan(int steps, SigmaForm form = SigmaForm::linear, double delta = 1e-8);

}  // namespace light4d
