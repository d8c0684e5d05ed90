#include "doctest.h"

#include <cmath>

#include "lvfront/errors.hpp"
#include "lvfront/supersub.hpp"

using namespace lvfront;

namespace {

const ModelParams kModel{0.5, 0.5, 1, 1};

const FrontProfile& front22() {
  static const FrontProfile f = solve_system_front({kModel, 2.2});
  return f;
}

std::shared_ptr<const DiffusionFreeOrbit> orbit() {
  static const auto o = std::make_shared<const DiffusionFreeOrbit>(solve_diffusion_free(kModel, 0.3, 0.3));
  return o;
}

}  // namespace

TEST_CASE("profile evaluator reproduces grid values and extrapolates smoothly") {
  const auto& f = front22();
  const ProfileEvaluator ev(f);
  for (std::size_t i = 0; i < f.size(); i += 97) {
    const auto j = ev(f.xi[i]);
    REQUIRE(std::abs(j.phi - f.phi[i]) < 1e-14);
    REQUIRE(std::abs(j.dphi - f.dphi[i]) < 1e-12);
  }
  // monotone between nodes
  const auto j = ev(0.5 * (f.xi[1000] + f.xi[1001]));
  CHECK(j.phi > f.phi[1000]);
  CHECK(j.phi < f.phi[1001]);
  // continuity across the grid ends
  const double a = f.xi.front(), b = f.xi.back();
  CHECK(std::abs(ev(a - 1e-9).phi - ev(a).phi) < 1e-12 * (1 + ev(a).phi) + 1e-15);
  CHECK(std::abs(ev(b + 1e-9).phi - ev(b).phi) < 1e-12);
  CHECK(ev(b + 50).phi <= kModel.u_star());
  CHECK(ev(a - 50).phi > 0);
  CHECK(ev(a - 50).phi < ev(a).phi);
  CHECK_THROWS_AS(ProfileEvaluator(reflect(f)), Error);
}

TEST_CASE("selector parsing and validation") {
  CHECK(Selector::parse("101").i == 1);
  CHECK(Selector::parse("101").j == 0);
  CHECK(all_selectors().size() == 7);
  CHECK_THROWS_AS(Selector::parse("12"), Error);
  try {
    build_front_family(front22(), orbit(), {0, 0, 0});
    FAIL("expected SelectorAllZero");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SelectorAllZero);
  }
}

TEST_CASE("front family evaluations") {
  const auto& f = front22();
  const double c = f.c;
  const auto p110 = build_front_family(f, orbit(), {1, 1, 0});
  const ProfileEvaluator ev(f);
  for (double t : {-10.0, 0.0, 3.0}) {
    const auto v = p110.values(0.0, t);
    CHECK(v.u_sub == doctest::Approx(ev(c * t).phi).epsilon(1e-15));
    CHECK(v.u_super == 1.0);
    CHECK(v.v_sub == 0.0);
    for (double x : {0.5, 7.0, 30.0}) {
      const auto a = p110.values(x, t), b = p110.values(-x, t);
      REQUIRE(a.u_sub == b.u_sub);
      REQUIRE(a.v_super == b.v_super);
    }
  }
  const auto p100 = build_front_family(f, nullptr, {1, 0, 0});
  for (double x : {-20.0, -1.0, 4.0}) {
    const auto v = p100.values(x, 2.0);
    const auto j = ev(x + 2.0 * c);
    CHECK(v.u_sub == j.phi);
    CHECK(v.v_super == j.psi);
  }
}

TEST_CASE("front family inequalities for all selectors") {
  for (const auto& s : all_selectors()) {
    CAPTURE(s.str());
    const auto pair = build_front_family(front22(), orbit(), s);
    const auto cert = verify_inequalities(pair, {}, {});
    CHECK(cert.pass);
    CHECK(cert.ordering_violations == 0);
    CHECK(cert.worst_super_u.residual == 0.0);
    CHECK(cert.worst_sub_v.residual == 0.0);
    CHECK(cert.worst_sub_u.residual <= cert.slack);
    CHECK(cert.worst_super_v.residual >= -cert.slack);
  }
}

TEST_CASE("sub residual on a strict front branch equals k1 phi (v_super - psi)") {
  const auto& f = front22();
  const auto pair = build_front_family(f, orbit(), {1, 1, 0});
  const ProfileEvaluator ev(f);
  const double x = 6.0, t = 1.0;  // phi(x+ct) is the strict max
  const auto j = pair.jets(x, t);
  REQUIRE(j.u_sub.branch == 0);
  const double u = j.u_sub.value;
  const double res = j.u_sub.dt - j.u_sub.dxx - u * (1 - u - kModel.k1 * j.v_super.value);
  const auto fj = ev(x + f.c * t);
  const double expected = kModel.k1 * fj.phi * (j.v_super.value - fj.psi);
  CHECK(res == doctest::Approx(expected).epsilon(1e-9));
  CHECK(res < 0.0);
}

TEST_CASE("front family converges to the coexistence state") {
  const auto pair = build_front_family(front22(), orbit(), {1, 1, 1});
  const auto v = pair.values(3.0, 40.0);
  CHECK(std::abs(v.u_sub - kModel.u_star()) < 1e-4);
  CHECK(std::abs(v.v_super - kModel.v_star()) < 1e-4);
}

TEST_CASE("scalar family") {
  const ModelParams m{0.4, 0.3, 1.5, 0.8};
  const double s1 = 1.1 * scalar_min_speed(m, ScalarWhich::U_eq);
  const double s2 = 1.1 * scalar_min_speed(m, ScalarWhich::V_eq);
  const auto fu = solve_scalar_front(m, ScalarWhich::U_eq, s1);
  const auto fv = solve_scalar_front(m, ScalarWhich::V_eq, s2);
  const auto pair = build_scalar_family(fu, fv);
  const auto cert = verify_inequalities(pair, {}, {});
  CHECK(cert.pass);
  CHECK(cert.worst_super_u.residual >= 0.0);
  CHECK(cert.worst_super_v.residual >= 0.0);
  // super u residual is k1 v_sub
  const auto j = pair.jets(2.0, 1.0);
  const double res = -1.0 * (1 - 1 - m.k1 * j.v_sub.value);
  CHECK(res == doctest::Approx(m.k1 * j.v_sub.value));
  for (double x : {0.3, 5.0}) CHECK(pair.values(x, -2.0).u_sub == pair.values(-x, -2.0).u_sub);
  CHECK(std::abs(pair.values(1.0, 90.0).u_sub - (1 - m.k1)) < 1e-8);
  CHECK_THROWS_AS(build_scalar_family(fv, fu), Error);
}

TEST_CASE("certificates are deterministic across thread counts") {
  const auto pair = build_front_family(front22(), orbit(), {1, 1, 1});
  InequalityOptions a, b;
  a.threads = 1;
  b.threads = 4;
  const auto ca = verify_inequalities(pair, {}, a);
  const auto cb = verify_inequalities(pair, {}, b);
  CHECK(ca.worst_sub_u.residual == cb.worst_sub_u.residual);
  CHECK(ca.worst_sub_u.x == cb.worst_sub_u.x);
  CHECK(ca.worst_super_v.residual == cb.worst_super_v.residual);
  CHECK(ca.ridge_points_skipped == cb.ridge_points_skipped);
}

TEST_CASE("domain errors") {
  const auto pair = build_front_family(front22(), orbit(), {1, 1, 1});
  CHECK_THROWS_AS(pair.values(0.0, 45.0), Error);
  Lattice big;
  big.t_hi = 60;
  CHECK_THROWS_AS(verify_inequalities(pair, big, {}), Error);
}
