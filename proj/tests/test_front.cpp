#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "lvfront/errors.hpp"
#include "lvfront/front.hpp"

using namespace lvfront;

namespace {

// Oracle: 6th-order central differences taken directly from the stored values
// (no use of the stored derivatives), substituted into the profile ODEs.
double fd_residual(const FrontProfile& f) {
  static const double d1[] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  static const double d2[] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
  const double h = f.h();
  const auto& m = f.model;
  double worst = 0.0;
  for (std::size_t i = 3; i + 3 < f.size(); ++i) {
    double p1 = 0, p2 = 0, q1 = 0, q2 = 0;
    for (int k = 0; k < 7; ++k) {
      p1 += d1[k] * f.phi[i + k - 3];
      p2 += d2[k] * f.phi[i + k - 3];
      q1 += d1[k] * f.psi[i + k - 3];
      q2 += d2[k] * f.psi[i + k - 3];
    }
    p1 /= h;
    q1 /= h;
    p2 /= h * h;
    q2 /= h * h;
    const double u = f.phi[i], v = f.psi[i];
    const double ru = p2 - f.c * p1 + u * (1 - u - m.k1 * v);
    const double rv = m.d * q2 - f.c * q1 + m.r * v * (1 - v - m.k2 * u);
    worst = std::max({worst, std::abs(ru), std::abs(rv)});
  }
  return worst;
}

bool strictly_increasing(const std::vector<double>& y) {
  for (std::size_t i = 1; i < y.size(); ++i)
    if (!(y[i] > y[i - 1])) return false;
  return true;
}

}  // namespace

TEST_CASE("symmetric front at c = 2.2") {
  const ModelParams m{0.5, 0.5, 1, 1};
  const auto f = solve_system_front({m, 2.2});
  CHECK(f.residual_norm < 1e-8);
  CHECK(fd_residual(f) < 1e-6);
  CHECK(midpoint_residual(f).max_residual < 1e-6);
  CHECK(min_slope(f) > 0.0);
  CHECK(strictly_increasing(f.phi));
  CHECK(strictly_increasing(f.psi));
  const auto b = boundary_errors(f);
  CHECK(b.left_error < 1e-8);
  CHECK(b.right_error < 1e-8);
  CHECK(f.phi.front() < 1e-8);
  CHECK(std::abs(f.phi.back() - m.u_star()) < 1e-8);
  // phase condition
  const auto mid = std::find(f.xi.begin(), f.xi.end(), 0.0) - f.xi.begin();
  CHECK(f.phi[mid] == doctest::Approx(m.u_star() / 2).epsilon(1e-10));
  // u <-> v symmetry of the parameters
  for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(std::abs(f.phi[i] - f.psi[i]) < 1e-9);
}

TEST_CASE("asymmetric fronts stay inside the box and satisfy the ODE") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> k(0.05, 0.95), rr(0.3, 3.0);
  for (int trial = 0; trial < 8; ++trial) {
    const ModelParams m{k(rng), k(rng), rr(rng), rr(rng)};
    const double c = c_min(m) * (1.05 + 0.3 * trial / 8.0);
    const auto f = solve_system_front({m, c});
    CAPTURE(m.k1);
    CAPTURE(m.k2);
    CAPTURE(m.r);
    CAPTURE(m.d);
    CHECK(fd_residual(f) < 1e-6);
    CHECK(min_slope(f) > 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      REQUIRE(f.phi[i] > 0.0);
      REQUIRE(f.psi[i] > 0.0);
      REQUIRE(f.phi[i] < m.u_star() + 1e-10);
      REQUIRE(f.psi[i] < m.v_star() + 1e-10);
    }
  }
}

TEST_CASE("subminimal speed is rejected") {
  CHECK_THROWS_AS(solve_system_front({{0.5, 0.5, 1, 1}, 1.9}), Error);
  try {
    solve_system_front({{0.5, 0.5, 1, 1}, 1.9});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SubminimalSpeed);
  }
}

TEST_CASE("reflection") {
  const auto f = solve_system_front({{0.5, 0.5, 1, 1}, 2.2});
  const auto g = reflect(f);
  const auto back = reflect(g);
  CHECK(back.xi == f.xi);
  CHECK(back.phi == f.phi);
  CHECK(back.psi == f.psi);
  CHECK(back.dphi == f.dphi);
  CHECK(back.dpsi == f.dpsi);
  CHECK(g.orientation == -1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    REQUIRE(g.dphi[i] < 0.0);
    REQUIRE(g.dpsi[i] < 0.0);
  }
  CHECK(g.phi.front() == f.phi.back());
  CHECK(g.phi.back() == f.phi.front());
  const auto i0 = std::find(f.xi.begin(), f.xi.end(), 0.0) - f.xi.begin();
  const auto j0 = std::find(g.xi.begin(), g.xi.end(), 0.0) - g.xi.begin();
  CHECK(g.phi[j0] == f.phi[i0]);
}

TEST_CASE("scalar fronts") {
  const ModelParams m{0.5, 0.5, 1, 1};
  const double s = 2 * std::sqrt(0.5);
  const auto f = solve_scalar_front(m, ScalarWhich::U_eq, s);
  CHECK(f.residual_norm < 1e-8);
  CHECK(f.phi.front() < 1e-8);
  CHECK(std::abs(f.phi.back() - 0.5) < 1e-8);
  CHECK(min_slope(f) > 0.0);
  CHECK(midpoint_residual(f).max_residual < 1e-6);

  // u = (1-k1) w turns the equation into w'' - s w' + (1-k1) w (1 - w) = 0.
  const double s2 = 1.2 * s;
  const auto a = solve_scalar_front(m, ScalarWhich::U_eq, s2);
  const auto w = solve_scalar_kpp({1.0, 0.5, 1.0}, s2);
  REQUIRE(a.size() == w.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.phi[i] - 0.5 * w.phi[i]));
  CHECK(worst < 1e-6);

  CHECK_THROWS_AS(solve_scalar_front(m, ScalarWhich::U_eq, 0.9 * s), Error);
  const ModelParams mv{0.3, 0.6, 2.0, 0.5};
  const auto v = solve_scalar_front(mv, ScalarWhich::V_eq, 1.1 * scalar_min_speed(mv, ScalarWhich::V_eq));
  CHECK(std::abs(v.phi.back() - 0.4) < 1e-8);
  CHECK(v.kind == FrontKind::ScalarV);
}

TEST_CASE("tail rates match the spectral predictions") {
  const WaveParams wave{{0.5, 0.5, 1, 1}, 2.2};
  const auto f = solve_system_front(wave);
  const auto spec = coexistence_eigenvalues(wave);
  const auto ev = origin_eigenvalues(wave);
  const auto plus = fit_tail_rate(f, TailSide::PlusInfinity);
  CHECK(std::abs(plus.fitted_rate / spec.lambda2 - 1) < 0.02);
  CHECK(std::abs(plus.fitted_rate_psi / spec.lambda2 - 1) < 0.02);
  CHECK(std::abs(plus.amplitude_ratio / spec.tau2 - 1) < 0.05);
  const auto minus = fit_tail_rate(f, TailSide::MinusInfinity);
  const bool near3 = std::abs(minus.fitted_rate / ev.lambda3 - 1) < 0.02;
  const bool near4 = std::abs(minus.fitted_rate / ev.lambda4 - 1) < 0.02;
  CHECK((near3 || near4));

  // asymmetric: coupling ratio differs from one
  const WaveParams w2{{0.3, 0.7, 0.5, 2}, 2.5};
  const auto g = solve_system_front(w2);
  const auto s2 = coexistence_eigenvalues(w2);
  const auto p2 = fit_tail_rate(g, TailSide::PlusInfinity);
  CHECK(std::abs(p2.fitted_rate / s2.lambda2 - 1) < 0.02);
  CHECK(std::abs(p2.amplitude_ratio / s2.tau2 - 1) < 0.05);
}

TEST_CASE("secular tail at the minimal speed") {
  const WaveParams wave{{0.5, 0.5, 1, 1}, 2.0};
  const auto f = solve_system_front(wave);
  const auto t = fit_tail_rate(f, TailSide::MinusInfinity);
  CHECK(t.secular_detected);
  CHECK(std::abs(t.fitted_rate - 1.0) < 0.1);
}

TEST_CASE("synthetic exponential tail is fitted exactly") {
  const WaveParams wave{{0.5, 0.5, 1, 1}, 2.2};
  const auto spec = coexistence_eigenvalues(wave);
  FrontProfile f;
  f.model = wave.model;
  f.c = wave.c;
  const double us = f.model.u_star(), vs = f.model.v_star();
  for (int i = -600; i <= 600; ++i) {
    const double x = i * 0.1;
    const double e = std::exp(spec.lambda2 * x);
    f.xi.push_back(x);
    f.phi.push_back(x >= 0 ? us - e : us / 2);
    f.psi.push_back(x >= 0 ? vs - spec.tau2 * e : vs / 2);
  }
  f.dphi.assign(f.size(), 0.0);
  f.dpsi.assign(f.size(), 0.0);
  const auto t = fit_tail_rate(f, TailSide::PlusInfinity);
  CHECK(std::abs(t.fitted_rate - spec.lambda2) < 1e-10);
  CHECK(std::abs(t.amplitude_ratio - spec.tau2) < 1e-8);
}

TEST_CASE("tail fit errors") {
  const auto f = solve_system_front({{0.5, 0.5, 1, 1}, 2.2});
  CHECK_THROWS_AS(fit_tail_rate(f, TailSide::PlusInfinity, {1e-3, 0.5}), Error);
  try {
    fit_tail_rate(f, TailSide::PlusInfinity, {1e-3, 1.0001e-3});
    FAIL("expected WindowTooNarrow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WindowTooNarrow);
  }
}

TEST_CASE("tail constants certify the envelope inequalities") {
  const WaveParams wave{{0.5, 0.5, 1, 1}, 2.2};
  const auto f = solve_system_front(wave);
  const auto k = estimate_tail_constants(f);
  CHECK(k.M1_bar > 0);
  CHECK(k.M1_bar <= k.M1);
  CHECK(k.M2_bar <= k.M2);
  CHECK(k.M3_bar <= k.M3);
  CHECK(k.M4 > 0);
  // Independent re-check of the displayed inequalities.
  const double us = f.phi_limit(), vs = f.psi_limit();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.xi[i];
    if (x <= 0) {
      const double env = std::exp(k.kappa * x);
      REQUIRE(f.phi[i] / f.dphi[i] > 0);
      REQUIRE(f.phi[i] <= k.M2 * env * (1 + 1e-12));
      REQUIRE(f.phi[i] >= k.M2_bar * env * (1 - 1e-12));
      REQUIRE(f.psi[i] <= k.M2 * env * (1 + 1e-12));
      REQUIRE(f.dphi[i] <= k.M2 * env * (1 + 1e-12));
    }
    if (x >= 0) {
      const double gap = std::max(us - f.phi[i], vs - f.psi[i]);
      REQUIRE(f.dphi[i] / gap <= k.M3 * (1 + 1e-12));
      REQUIRE(f.dpsi[i] / gap >= k.M3_bar * (1 - 1e-12));
      REQUIRE(f.dphi[i] <= k.M4 * std::exp(k.lambda2 * x) * (1 + 1e-12));
    }
  }
  // scalar and reflected inputs are accepted
  CHECK_NOTHROW(estimate_tail_constants(reflect(f)));
  CHECK_NOTHROW(estimate_tail_constants(solve_scalar_front(wave.model, ScalarWhich::U_eq, 1.6)));
}

TEST_CASE("csv export") {
  const auto f = solve_scalar_front({0.5, 0.5, 1, 1}, ScalarWhich::U_eq, 1.6);
  const auto csv = front_to_csv(f);
  CHECK(csv.rfind("# c=", 0) == 0);
  CHECK(csv.find("xi,phi,psi,dphi,dpsi") != std::string::npos);
}
