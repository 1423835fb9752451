#include "light4d/schedule.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace light4d;

namespace {

// Written out case by case, separate from the library's evaluation.
double reference_lambda(double t, double g, double r, double s, double lmax, double lend) {
  if (t > g) return 0.0;
  if (t >= r) return lmax * std::sqrt((g - t) / (g - r));
  if (t >= s) return lmax;
  return (lmax - lend) / s * t + lend;
}

}  // namespace

TEST_CASE("four-phase values at the boundaries") {
  const FusionSchedule s;
  CHECK(lambda_at(s, 1.0) == 0.0);
  CHECK(lambda_at(s, 0.7) == 0.0);
  CHECK(lambda_at(s, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lambda_at(s, 0.0) == 0.25);
  CHECK(lambda_at(s, 0.55) == doctest::Approx(0.5 * std::sqrt(0.75)).epsilon(1e-14));
  CHECK(lambda_at(s, 0.55) == doctest::Approx(0.4330127).epsilon(1e-6));
  CHECK_THROWS_AS(lambda_at(s, 1.5), std::out_of_range);
  CHECK_THROWS_AS(lambda_at(s, -0.01), std::out_of_range);
}

TEST_CASE("matches the scalar reference at random times") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const FusionSchedule s;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double t = u(rng);
    worst = std::max(worst, std::abs(lambda_at(s, t) - reference_lambda(t, 0.7, 0.5, 0.2, 0.5, 0.25)));
  }
  CHECK(worst <= 1e-12);

  FusionSchedule other;
  other.tau_g = 0.9;
  other.tau_r = 0.3;
  other.tau_s = 0.1;
  other.lambda_max = 0.8;
  other.lambda_end = 0.1;
  for (int i = 0; i < 1000; ++i) {
    const double t = u(rng);
    CHECK(lambda_at(other, t) == doctest::Approx(reference_lambda(t, 0.9, 0.3, 0.1, 0.8, 0.1)).epsilon(1e-12));
  }
}

TEST_CASE("bounded and monotone by phase") {
  const FusionSchedule s;
  double prev = lambda_at(s, 0.7);
  for (int i = 1; i <= 500; ++i) {
    const double t = 0.7 - 0.5 * i / 500.0;  // falls from tau_g to tau_s
    const double l = lambda_at(s, t);
    CHECK(l >= prev - 1e-15);
    prev = l;
  }
  for (int i = 0; i <= 1000; ++i) {
    const double l = lambda_at(s, i / 1000.0);
    CHECK(l >= 0.0);
    CHECK(l <= s.lambda_max);
  }
  for (int i = 1; i <= 200; ++i) {
    CHECK(lambda_at(s, 0.2 * i / 200.0) >= lambda_at(s, 0.2 * (i - 1) / 200.0));
  }
}

TEST_CASE("continuity at the phase boundaries") {
  const FusionSchedule s;
  CHECK(check_continuity(s) <= 5e-7);
  CHECK(check_continuity(s) <= 1e-6 * s.lambda_max);

  FusionSchedule off;
  off.lambda_max = 0.0;
  off.lambda_end = 0.0;
  CHECK(check_continuity(off) == 0.0);

  FusionSchedule two;
  two.mode = ScheduleMode::two_phase;
  CHECK(check_continuity(two) <= 1e-12);

  const auto b = phase_boundaries(s);
  REQUIRE(b.size() == 3);
  CHECK(b[0] == 0.7);
  CHECK(b[1] == 0.5);
  CHECK(b[2] == 0.2);
}

TEST_CASE("two-phase schedule switches on at step 15") {
  FusionSchedule two;
  two.mode = ScheduleMode::two_phase;
  const StepPlan plan = make_step_plan(25);
  int first = -1;
  for (int k = 0; k < plan.steps(); ++k) {
    if (lambda_at(two, plan.times[static_cast<std::size_t>(k)]) > 0.0) {
      first = k;
      break;
    }
  }
  CHECK(first == 15);
  CHECK(lambda_at(two, plan.times[24]) == doctest::Approx(0.5));
  CHECK(lambda_at(two, 0.0) == doctest::Approx(0.5));
  CHECK(two.peak() == 0.5);
}

TEST_CASE("invalid schedules are rejected") {
  FusionSchedule s;
  s.tau_r = 0.8;
  CHECK_THROWS(s.validate());
  s = {};
  s.lambda_max = -0.1;
  CHECK_THROWS(s.validate());
  s = {};
  s.tau_s = 0.0;
  CHECK_THROWS(s.validate());
  CHECK(schedule_mode_from_string("two_phase") == ScheduleMode::two_phase);
  CHECK_THROWS(schedule_mode_from_string("three_phase"));
}

TEST_CASE("step plan endpoints and ordering") {
  const StepPlan p = make_step_plan(25);
  CHECK(p.steps() == 25);
  CHECK(p.times.front() == 1.0);
  CHECK(p.times.back() == 0.0);
  CHECK(p.sigmas.back() == 0.0);
  CHECK(p.delta == 1e-8);
  CHECK(p.times[14] == 0.44);
  for (std::size_t k = 1; k < p.sigmas.size(); ++k) CHECK(p.sigmas[k] < p.sigmas[k - 1]);

  const StepPlan one = make_step_plan(1);
  CHECK(one.steps() == 1);
  CHECK(one.times == std::vector<double>{1.0, 0.0});

  const StepPlan c = make_step_plan(10, SigmaForm::cosine);
  CHECK(c.sigmas.front() == doctest::Approx(1.0));
  CHECK(c.sigmas.back() == 0.0);
  for (std::size_t k = 1; k < c.sigmas.size(); ++k) CHECK(c.sigmas[k] < c.sigmas[k - 1]);
  CHECK(sigma_of(SigmaForm::linear, 0.3) == 0.3);

  CHECK_THROWS(make_step_plan(0));
  CHECK_THROWS(make_step_plan(5, SigmaForm::linear, 0.0));
}
