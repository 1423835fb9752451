#include "light4d/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace light4d {

ScheduleMode schedule_mode_from_string(const std::string& s) {
  if (s == "four_phase") return ScheduleMode::four_phase;
  if (s == "two_phase") return ScheduleMode::two_phase;
  throw std::invalid_argument("unknown schedule mode '" + s + "'");
}

std::string to_string(ScheduleMode m) {
  return m == ScheduleMode::four_phase ? "four_phase" : "two_phase";
}

void FusionSchedule::validate() const {
  if (mode == ScheduleMode::four_phase) {
    if (!(0.0 < tau_s && tau_s < tau_r && tau_r < tau_g && tau_g <= 1.0)) {
      throw std::invalid_argument("schedule thresholds must satisfy 0 < tau_s < tau_r < tau_g <= 1");
    }
    if (!(lambda_max >= 0.0 && lambda_max <= 1.0)) {
      throw std::invalid_argument("lambda_max must lie in [0, 1]");
    }
    if (!(lambda_end >= 0.0 && lambda_end <= lambda_max)) {
      throw std::invalid_argument("lambda_end must lie in [0, lambda_max]");
    }
  } else {
    if (!(0.0 <= two_phase_full && two_phase_full < two_phase_start && two_phase_start <= 1.0)) {
      throw std::invalid_argument("two-phase ramp must satisfy 0 <= full < start <= 1");
    }
    if (!(two_phase_peak >= 0.0 && two_phase_peak <= 1.0)) {
      throw std::invalid_argument("two-phase peak must lie in [0, 1]");
    }
  }
}

double FusionSchedule::peak() const {
  return mode == ScheduleMode::four_phase ? lambda_max : two_phase_peak;
}

double lambda_at(const FusionSchedule& s, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::out_of_range("lambda_at: t must lie in [0, 1]");
  if (s.mode == ScheduleMode::two_phase) {
    if (t >= s.two_phase_start) return 0.0;
    if (t <= s.two_phase_full) return s.two_phase_peak;
    return s.two_phase_peak * (s.two_phase_start - t) / (s.two_phase_start - s.two_phase_full);
  }
  if (t > s.tau_g) return 0.0;
  if (t >= s.tau_r) return s.lambda_max * std::sqrt((s.tau_g - t) / (s.tau_g - s.tau_r));
  if (t >= s.tau_s) return s.lambda_max;
  return (s.lambda_max - s.lambda_end) / s.tau_s * t + s.lambda_end;
}

std::vector<double> phase_boundaries(const FusionSchedule& s) {
  if (s.mode == ScheduleMode::two_phase) return {s.two_phase_start, s.two_phase_full};
  return {s.tau_g, s.tau_r, s.tau_s};
}

double check_continuity(const FusionSchedule& s, int grid) {
  if (grid < 1000) throw std::invalid_argument("check_continuity: grid must be >= 1000");
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto jump_at = [&](double b) {
    const double lo = std::nextafter(b, -inf);
    const double hi = std::nextafter(b, inf);
    if (lo < 0.0 || hi > 1.0) return 0.0;
    return std::abs(lambda_at(s, hi) - lambda_at(s, lo));
  };
  double worst = 0.0;
  for (double b : phase_boundaries(s)) worst = std::max(worst, jump_at(b));
  for (int i = 1; i < grid; ++i) worst = std::max(worst, jump_at(static_cast<double>(i) / grid));
  return worst;
}

SigmaForm sigma_form_from_string(const std::string& s) {
  if (s == "linear") return SigmaForm::linear;
  if (s == "cosine") return SigmaForm::cosine;
  throw std::invalid_argument("unknown sigma form '" + s + "'");
}

std::string to_string(SigmaForm f) { return f == SigmaForm::linear ? "linear" : "cosine"; }

double sigma_of(SigmaForm form, double t) {
  if (form == SigmaForm::linear) return t;
  return 1.0 - std::cos(0.5 * std::numbers::pi * t);
}

StepPlan make_step_plan(int steps, SigmaForm form, double delta) {
  if (steps < 1) throw std::invalid_argument("step plan needs at least one step");
  if (!(delta > 0.0)) throw std::invalid_argument("step plan stabilizer delta must be > 0");
  StepPlan plan;
  plan.delta = delta;
  plan.form = form;
  plan.times.resize(static_cast<std::size_t>(steps) + 1);
  plan.sigmas.resize(plan.times.size());
  for (int k = 0; k <= steps; ++k) {
    // (K - k) / K keeps grid times such as 11/25 correctly rounded.
    const double t = static_cast<double>(steps - k) / steps;
    plan.times[static_cast<std::size_t>(k)] = t;
    plan.sigmas[static_cast<std::size_t>(k)] = sigma_of(form, t);
  }
  return plan;
}

}  // namespace light4d
