#include "lvfront/model.hpp"

#include <cmath>
#include <sstream>

#include "lvfront/errors.hpp"

namespace lvfront {

void ModelParams::validate() const {
  for (double value : {k1, k2, r, d}) {
    if (!std::isfinite(value) || value <= 0.0) {
      std::ostringstream msg;
      msg << "model parameters must be positive and finite (k1=" << k1 << ", k2=" << k2
          << ", r=" << r << ", d=" << d << ")";
      fail(ErrorKind::InvalidArgument, msg.str());
    }
  }
}

double ModelParams::u_star() const {
  const double det = 1.0 - k1 * k2;
  if (det == 0.0) fail(ErrorKind::DegenerateRegime, "k1*k2 == 1: coexistence state undefined");
  return (1.0 - k1) / det;
}

double ModelParams::v_star() const {
  const double det = 1.0 - k1 * k2;
  if (det == 0.0) fail(ErrorKind::DegenerateRegime, "k1*k2 == 1: coexistence state undefined");
  return (1.0 - k2) / det;
}

std::string to_string(RegimeCase tag) {
  switch (tag) {
    case RegimeCase::Case_i: return "Case_i";
    case RegimeCase::Case_ii: return "Case_ii";
    case RegimeCase::Case_iii: return "Case_iii";
    case RegimeCase::Case_iv_weak: return "Case_iv_weak";
  }
  return "?";
}

Regime classify_regime(const ModelParams& params) {
  params.validate();
  const double k1 = params.k1;
  const double k2 = params.k2;
  if (k1 == 1.0 || k2 == 1.0) {
    fail(ErrorKind::DegenerateRegime, "k1 == 1 or k2 == 1 lies on a regime boundary");
  }
  if (k1 < 1.0 && k2 > 1.0) return {RegimeCase::Case_i, "u survives: (u,v) -> (1,0)"};
  if (k2 < 1.0 && k1 > 1.0) return {RegimeCase::Case_ii, "v survives: (u,v) -> (0,1)"};
  if (k1 > 1.0 && k2 > 1.0) {
    return {RegimeCase::Case_iii, "strong competition: bistable between (1,0) and (0,1)"};
  }
  return {RegimeCase::Case_iv_weak, "weak competition: coexistence state attracts"};
}

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Origin: return "Origin";
    case EquilibriumKind::UOnly: return "UOnly";
    case EquilibriumKind::VOnly: return "VOnly";
    case EquilibriumKind::Coexistence: return "Coexistence";
  }
  return "?";
}

std::vector<Equilibrium> equilibria(const ModelParams& params) {
  params.validate();
  const double us = params.u_star();
  const double vs = params.v_star();
  const bool inside = us >= 0.0 && vs >= 0.0 && us <= 1.0 && vs <= 1.0;
  return {
      {0.0, 0.0, EquilibriumKind::Origin, true},
      {1.0, 0.0, EquilibriumKind::UOnly, true},
      {0.0, 1.0, EquilibriumKind::VOnly, true},
      {us, vs, EquilibriumKind::Coexistence, inside},
  };
}

ReactionValue reaction(const ModelParams& params, double u, double v) {
  return {u * (1.0 - u - params.k1 * v), params.r * v * (1.0 - v - params.k2 * u)};
}

Residual residual_operators(const ModelParams& params, const FieldJet& jet) {
  const ReactionValue fg = reaction(params, jet.u, jet.v);
  return {jet.u_t - jet.u_xx - fg.f, jet.v_t - params.d * jet.v_xx - fg.g};
}

AssumptionReport check_front_existence_assumptions(const ModelParams& params, int samples) {
  params.validate();
  if (!params.weak_competition()) {
    fail(ErrorKind::InvalidArgument, "assumption check requires 0 < k1, k2 < 1");
  }
  if (samples < 1) fail(ErrorKind::InvalidArgument, "samples must be positive");

  const double k1 = params.k1;
  const double k2 = params.k2;
  const double r = params.r;
  const double us = params.u_star();
  const double vs = params.v_star();

  // Per-capita rates.
  auto f = [&](double u, double v) { return 1.0 - u - k1 * v; };
  auto g = [&](double u, double v) { return r * (1.0 - v - k2 * u); };

  AssumptionReport report;
  report.samples = samples;
  auto record = [&](char which, double u, double v, std::string detail) {
    report.failures.push_back({which, u, v, std::move(detail)});
  };

  const double scale = 1e-14;
  if (std::abs(f(us, vs)) > scale || std::abs(g(us, vs)) > scale * std::max(1.0, r)) {
    record('a', us, vs, "per-capita rates do not vanish at the coexistence state");
  }

  // Constant partials of the linear per-capita rates.
  const double fu = -1.0, fv = -k1, gu = -r * k2, gv = -r;
  const double f00 = f(0.0, 0.0);
  const double g00 = g(0.0, 0.0);
  for (int i = 1; i <= samples; ++i) {
    const double u = us * i / (samples + 1.0);
    for (int j = 1; j <= samples; ++j) {
      const double v = vs * j / (samples + 1.0);
      ++report.points_checked;
      const double fuv = f(u, v);
      const double guv = g(u, v);
      if (!(fuv > 0.0 && fuv < f00)) record('b', u, v, "f outside (0, f(0,0))");
      if (!(guv > 0.0 && guv < g00)) record('b', u, v, "g outside (0, g(0,0))");
      if (!(fu < 0.0 && fv <= 0.0 && gu <= 0.0 && gv < 0.0)) {
        record('c', u, v, "derivative sign condition fails");
      }
    }
  }

  // Linearization [[u* f_u, u* f_v], [v* g_u, v* g_v]].
  const double a = us * fu, b = us * fv, c = vs * gu, dd = vs * gv;
  const double tr = a + dd;
  const double det = a * dd - b * c;
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) {
    record('d', us, vs, "linearization has complex eigenvalues");
  } else {
    const double sq = std::sqrt(disc);
    report.jacobian_eigenvalues = {(tr - sq) / 2.0, (tr + sq) / 2.0};
    if (!(report.jacobian_eigenvalues[1] < 0.0)) {
      record('d', us, vs, "linearization eigenvalue not negative");
    }
  }

  if (!report.pass()) {
    const auto& first = report.failures.front();
    std::ostringstream msg;
    msg << "assumption (" << first.assumption << ") fails at (u,v)=(" << first.u << ","
        << first.v << "): " << first.detail;
    fail(ErrorKind::AssumptionViolated, msg.str());
  }
  return report;
}

}  // namespace lvfront
