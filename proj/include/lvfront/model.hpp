#pragma once

#include <array>
#include <string>
#include <vector>

namespace lvfront {

/// Positive constants of the diffusive competition system
///   u_t = u_xx + u(1 - u - k1 v),   v_t = d v_xx + r v(1 - v - k2 u).
struct ModelParams {
  double k1 = 0.5;
  double k2 = 0.5;
  double r = 1.0;
  double d = 1.0;

  /// Throws InvalidArgument unless all four fields are finite and > 0.
  void validate() const;

  bool weak_competition() const { return k1 > 0 && k1 < 1 && k2 > 0 && k2 < 1; }

  /// Coexistence state; throws DegenerateRegime when k1*k2 == 1.
  double u_star() const;
  double v_star() const;
};

enum class RegimeCase { Case_i, Case_ii, Case_iii, Case_iv_weak };

struct Regime {
  RegimeCase tag;
  std::string description;
};

std::string to_string(RegimeCase tag);

/// Four-way classification of the diffusion-free dynamics by (k1, k2).
/// Throws DegenerateRegime on the lines k1 == 1 or k2 == 1.
Regime classify_regime(const ModelParams& params);

enum class EquilibriumKind { Origin, UOnly, VOnly, Coexistence };

std::string to_string(EquilibriumKind kind);

struct Equilibrium {
  double u = 0.0;
  double v = 0.0;
  EquilibriumKind kind = EquilibriumKind::Origin;
  /// False for a coexistence point with a negative component (outside
  /// weak competition).
  bool in_unit_box = true;
};

/// Origin, (1,0), (0,1) and the coexistence point, in that order.
std::vector<Equilibrium> equilibria(const ModelParams& params);

struct ReactionValue {
  double f = 0.0;
  double g = 0.0;
};

/// (u(1 - u - k1 v), r v(1 - v - k2 u)).
ReactionValue reaction(const ModelParams& params, double u, double v);

/// Pointwise data needed to evaluate the residual operators.
struct FieldJet {
  double u = 0.0;
  double v = 0.0;
  double u_t = 0.0;
  double v_t = 0.0;
  double u_xx = 0.0;
  double v_xx = 0.0;
};

struct Residual {
  double f3 = 0.0;
  double f4 = 0.0;
};

/// F3 = u_t - u_xx - u(1-u-k1 v), F4 = v_t - d v_xx - r v(1-v-k2 u).
Residual residual_operators(const ModelParams& params, const FieldJet& jet);

struct AssumptionFailure {
  char assumption = '?';
  double u = 0.0;
  double v = 0.0;
  std::string detail;
};

struct AssumptionReport {
  int samples = 0;
  std::size_t points_checked = 0;
  std::array<double, 2> jacobian_eigenvalues{};
  std::vector<AssumptionFailure> failures;
  bool pass() const { return failures.empty(); }
};

/// Checks the four structural hypotheses (zero at the coexistence state,
/// bounds on the per-capita rates, derivative signs, stable linearization) on
/// a samples x samples lattice of the open box (0,u*) x (0,v*). Throws
/// AssumptionViolated if any sample fails.
AssumptionReport check_front_existence_assumptions(const ModelParams& params, int samples = 50);

}  // namespace lvfront
