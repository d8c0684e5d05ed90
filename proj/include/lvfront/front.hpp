#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lvfront/model.hpp"
#include "lvfront/spectral.hpp"

namespace lvfront {

/// Uniform grid on [-half_length, half_length] plus solver controls.
struct GridSpec {
  double half_length = 60.0;
  int n_points = 2001;  ///< odd, so that xi = 0 is a node
  double boundary_tol = 1e-8;
  /// Extend either end (same spacing) until the slowest decay there is below
  /// 1e-2 * boundary_tol. The grid may then be asymmetric about 0.
  bool auto_extend = true;
  int max_newton = 60;
  double newton_tol = 1e-11;

  void validate() const;
};

enum class FrontKind { SystemFront, ScalarU, ScalarV };

std::string to_string(FrontKind kind);

/// Scalar monostable equation D w'' - s w' + R w (K - w) = 0.
struct ScalarEquation {
  double D = 1.0;
  double R = 1.0;
  double K = 1.0;
};

struct FrontProfile {
  std::vector<double> xi;
  std::vector<double> phi;
  std::vector<double> psi;   ///< empty for scalar kinds
  std::vector<double> dphi;
  std::vector<double> dpsi;  ///< empty for scalar kinds
  double c = 0.0;
  FrontKind kind = FrontKind::SystemFront;
  double residual_norm = 0.0;
  int newton_iterations = 0;
  ModelParams model;
  ScalarEquation scalar;  ///< scalar kinds only
  /// +1 for fronts increasing in xi, -1 after reflection.
  int orientation = 1;

  bool is_system() const { return kind == FrontKind::SystemFront; }
  std::size_t size() const { return xi.size(); }
  double h() const { return xi[1] - xi[0]; }
  /// Limit of phi (resp. psi) on the rising side.
  double phi_limit() const;
  double psi_limit() const;
  /// Second derivatives from the profile ODE.
  double phi_second(std::size_t i) const;
  double psi_second(std::size_t i) const;
};

/// Newton collocation for the front from (0,0) to (u*,v*).
/// Throws SubminimalSpeed, NoConvergence, MonotonicityLost.
FrontProfile solve_system_front(const WaveParams& wave, const GridSpec& grid = {});

/// Front of D w'' - s w' + R w (K - w) = 0 from 0 to K.
FrontProfile solve_scalar_kpp(const ScalarEquation& eq, double s, const GridSpec& grid = {});

enum class ScalarWhich { U_eq, V_eq };

/// Scalar fronts of the u equation (1, 1, 1-k1) or the v equation
/// (d, r, 1-k2) with v absent (resp. u absent).
FrontProfile solve_scalar_front(const ModelParams& model, ScalarWhich which, double s,
                                const GridSpec& grid = {});

double scalar_min_speed(const ModelParams& model, ScalarWhich which);

/// xi -> -xi with arrays reversed and derivatives negated.
FrontProfile reflect(const FrontProfile& front);

struct MidpointCheck {
  double max_residual = 0.0;
  double worst_xi = 0.0;
};

/// Residual of the profile ODE at cell midpoints using 8-node interpolation,
/// a discretization independent of the solver's.
MidpointCheck midpoint_residual(const FrontProfile& front);

struct BoundaryCheck {
  double left_error = 0.0;   ///< max of phi, psi at the decaying end
  double right_error = 0.0;  ///< max distance to the limits at the rising end
};
BoundaryCheck boundary_errors(const FrontProfile& front);

/// Minimum of dphi (and dpsi) over the grid, times orientation.
double min_slope(const FrontProfile& front);

struct TailFit {
  TailSide side = TailSide::PlusInfinity;
  double fitted_rate = 0.0;      ///< phi
  double fitted_rate_psi = 0.0;  ///< psi (system fronts)
  double predicted_rate = 0.0;
  double predicted_rate_psi = 0.0;
  double relative_error = 0.0;   ///< max over components
  std::pair<double, double> window{1e-6, 1e-3};
  std::pair<double, double> xi_window{0.0, 0.0};
  bool secular_detected = false;
  double amplitude_ratio = 0.0;     ///< plus side: psi / phi coefficient
  double predicted_ratio = 0.0;     ///< tau2
  double ratio_error = 0.0;
  double r_squared = 0.0;           ///< min over components
  double log_linear_rate = 0.0;     ///< plain regression for phi
};

/// Log-linear regression of the distance to the limit over the xi range where
/// the distance lies in [lo, hi] times the limit scale. On the minus side a
/// (A + B xi) e^{lambda xi} model is fitted as well and used when the xi term
/// is significant. Throws WindowTooNarrow and PoorFit.
TailFit fit_tail_rate(const FrontProfile& front, TailSide side,
                      std::pair<double, double> window = {1e-6, 1e-3});

struct TailConstants {
  double M1 = 0.0, M1_bar = 0.0;
  double M2 = 0.0, M2_bar = 0.0;
  double kappa = 0.0;
  double M3 = 0.0, M3_bar = 0.0;
  double M4 = 0.0;
  double lambda2 = 0.0;
  std::size_t points_checked = 0;
};

/// Grid scans for the envelope constants on xi <= 0 and xi >= 0, then an
/// explicit check of every inequality. Throws BoundViolated.
TailConstants estimate_tail_constants(const FrontProfile& front);

/// CSV with header comments for c, kind and residual_norm.
std::string front_to_csv(const FrontProfile& front);

}  // namespace lvfront
