#include "doctest.h"

#include <cmath>
#include <random>

#include "lvfront/errors.hpp"
#include "lvfront/pde.hpp"

using namespace lvfront;

namespace {

const ModelParams kModel{0.5, 0.5, 1, 1};

const FrontProfile& front22() {
  static const FrontProfile f = solve_system_front({kModel, 2.2});
  return f;
}

const SuperSubPair& pair110() {
  static const SuperSubPair p = [] {
    auto orbit = std::make_shared<const DiffusionFreeOrbit>(solve_diffusion_free(kModel, 0.3, 0.3));
    return build_front_family(front22(), orbit, {1, 1, 0});
  }();
  return p;
}

SchemeConfig small_config() {
  SchemeConfig cfg;
  cfg.x_half_length = 60;
  cfg.nx = 601;
  cfg.dt = 0.02;
  cfg.t_start = -5;
  cfg.t_end = 5;
  cfg.snapshot_interval = 1.0;
  return cfg;
}

FieldState uniform_state(const SchemeConfig& cfg, double u, double v) {
  FieldState s;
  s.x = cfg.grid();
  s.u.assign(s.x.size(), u);
  s.v.assign(s.x.size(), v);
  s.time = cfg.t_start;
  return s;
}

// Position where u crosses level by linear interpolation on an increasing profile.
double crossing(const FieldState& s, double level) {
  for (std::size_t i = 0; i + 1 < s.u.size(); ++i)
    if (s.u[i] <= level && s.u[i + 1] > level)
      return s.x[i] + (level - s.u[i]) / (s.u[i + 1] - s.u[i]) * (s.x[i + 1] - s.x[i]);
  return std::nan("");
}

}  // namespace

TEST_CASE("equilibria are fixed points of the scheme") {
  SchemeConfig cfg = small_config();
  cfg.t_end = cfg.t_start + 1;
  const double us = kModel.u_star(), vs = kModel.v_star();
  for (auto [u, v] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {us, vs}}) {
    const auto out = simulate(uniform_state(cfg, u, v), kModel, cfg).back();
    for (std::size_t i = 0; i < out.u.size(); ++i) {
      REQUIRE(std::abs(out.u[i] - u) < 1e-14);
      REQUIRE(std::abs(out.v[i] - v) < 1e-14);
    }
  }
}

TEST_CASE("manufactured solution converges at second order in space and first in time") {
  const auto space = manufactured_space_study(kModel, 3);
  REQUIRE(space.orders.size() == 2);
  for (double p : space.orders) CHECK(std::abs(p - 2.0) < 0.2);
  const auto time = manufactured_time_study(kModel, 3);
  for (double p : time.orders) CHECK(p > 0.9);
  const auto heun = manufactured_time_study(kModel, 3, true);
  for (double p : heun.orders) CHECK(p > 1.8);
  CHECK(heun.errors.back() < time.errors.back());
}

TEST_CASE("reflection commutes with stepping bit for bit") {
  SchemeConfig cfg = small_config();
  cfg.t_end = cfg.t_start + 2;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  FieldState s = uniform_state(cfg, 0, 0);
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    s.u[i] = 0.5 + 0.4 * std::sin(0.1 * s.x[i] + 1.0) * U(rng);
    s.v[i] = 0.5 + 0.4 * std::cos(0.07 * s.x[i]) * U(rng);
  }
  const auto a = reflect(simulate(s, kModel, cfg).back());
  const auto b = simulate(reflect(s), kModel, cfg).back();
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    REQUIRE(a.u[i] == b.u[i]);
    REQUIRE(a.v[i] == b.v[i]);
  }
}

TEST_CASE("a front initial datum travels at the front speed") {
  const ProfileEvaluator ev(front22());
  SchemeConfig cfg;
  cfg.x_half_length = 60;
  cfg.nx = 1201;
  cfg.dt = 0.005;
  cfg.t_start = 0;
  cfg.t_end = 12;
  cfg.snapshot_times = {4.0, 12.0};
  FieldState s = uniform_state(cfg, 0, 0);
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const auto j = ev(s.x[i] - 25.0);
    s.u[i] = j.phi;
    s.v[i] = j.psi;
  }
  const auto snaps = simulate(s, kModel, cfg);
  REQUIRE(snaps.size() == 2);
  const double level = 0.5 * kModel.u_star();
  const double x4 = crossing(snaps[0], level), x12 = crossing(snaps[1], level);
  const double speed = (x4 - x12) / 8.0;
  CHECK(std::abs(speed - 2.2) < 0.01 * 2.2);
}

TEST_CASE("the solution from the sub-solution stays between the pair") {
  std::vector<FieldState> snaps;
  const auto cert = comparison_harness(pair110(), kModel, small_config(), true, &snaps);
  CHECK(cert.pass);
  CHECK(cert.violations == 0);
  CHECK(cert.snapshots == snaps.size());
  CHECK(cert.u_lower.margin > -cert.epsilon);

  const auto bounds = derivative_bound_probe(snaps, kModel);
  CHECK(bounds.bounded);
  CHECK(bounds.max_dx_u < 1.0);
  CHECK(bounds.max_dt_u < 1.0);
}

TEST_CASE("sandwich failures are reported") {
  SchemeConfig cfg = small_config();
  cfg.t_end = cfg.t_start + 1;
  FieldState s = uniform_state(cfg, 0, 1);  // u = 0 is below u_sub wherever the front is positive
  s.time = cfg.t_start;
  const auto snaps = simulate(s, kModel, cfg);
  const auto cert = check_sandwich(snaps, pair110(), cfg);
  CHECK_FALSE(cert.pass);
  CHECK(cert.u_lower.margin < 0);
}

TEST_CASE("random data in the box stay in the box") {
  SchemeConfig cfg;
  cfg.x_half_length = 10;
  cfg.nx = 101;
  cfg.dt = 0.05;
  cfg.t_start = 0;
  cfg.t_end = 2;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int draw = 0; draw < 100; ++draw) {
    const ModelParams m{0.05 + 0.9 * U(rng), 0.05 + 0.9 * U(rng), 0.2 + 4 * U(rng), 0.2 + 4 * U(rng)};
    FieldState s = uniform_state(cfg, 0, 0);
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      s.u[i] = U(rng);
      s.v[i] = U(rng);
    }
    const auto out = simulate(s, m, cfg);
    for (const auto& snap : out)
      for (std::size_t i = 0; i < snap.u.size(); ++i) {
        REQUIRE(snap.u[i] >= 0.0);
        REQUIRE(snap.u[i] <= 1.0);
        REQUIRE(snap.v[i] >= 0.0);
        REQUIRE(snap.v[i] <= 1.0);
      }
  }
}

TEST_CASE("configuration errors") {
  SchemeConfig cfg = small_config();
  cfg.theta = 0.3;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.t_end = cfg.t_start;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.dt_floor = 1.0;
  FieldState s = uniform_state(cfg, 0.5, 0.5);
  s.u[300] = 1.5;
  try {
    simulate(s, kModel, cfg);
    FAIL("expected a rejected step");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::StepRejectedFloor || e.kind() == ErrorKind::InitialDataOutOfBox));
  }
}

TEST_CASE("backward starts converge and keep the reflection symmetry") {
  SchemeConfig cfg = small_config();
  cfg.theta = 0.5;
  cfg.heun_reaction = true;
  EntireOptions opt;
  opt.window_start = -2;
  opt.window_end = 4;
  opt.window_interval = 1.0;
  const auto approx = entire_approximation(pair110(), kModel, cfg, {4, 8, 16}, opt);
  REQUIRE(approx.cauchy_gaps.size() == 2);
  CHECK(approx.cauchy_gaps[1] <= approx.cauchy_gaps[0]);
  for (double e : approx.symmetry_errors) CHECK(e == 0.0);
  for (const auto& s : approx.sandwiches) CHECK(s.pass);
  CHECK(approx.super_sub_limit_gap >= 0.0);

  const auto rep = check_entire_properties(approx, pair110(), kModel);
  CHECK(rep.symmetry.passed);
  CHECK(rep.edge_decay.passed);
  CHECK(rep.final_bounds_v.passed);
  // v_sub vanishes identically for this family, so sup v at the start has no rate
  CHECK(std::isnan(rep.fitted_rate_sub));
  CHECK_FALSE(rep.backward_decay.passed);
  CHECK(std::isfinite(rep.fitted_rate_super));

  CHECK_THROWS_AS(entire_approximation(pair110(), kModel, cfg, {8, 4}, opt), Error);
}
