#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lvfront/model.hpp"
#include "lvfront/supersub.hpp"

namespace lvfront {

enum class Boundary { NeumannZero, DirichletFromPair };
std::string to_string(Boundary b);

struct SchemeConfig {
  double x_half_length = 150.0;
  int nx = 3001;  ///< odd keeps x = 0 a node and the grid exactly symmetric
  double dt = 0.01;
  double t_start = -10.0;
  double t_end = 30.0;
  Boundary boundary = Boundary::NeumannZero;
  double theta = 1.0;  ///< implicit weight of the diffusion term
  /// Heun predictor-corrector for the reaction; with theta = 0.5 the step is
  /// second order in time.
  bool heun_reaction = false;
  /// Snapshot cadence; ignored when snapshot_times is non-empty.
  double snapshot_interval = 0.5;
  std::vector<double> snapshot_times;
  double dt_floor = 1e-8;
  /// Reject steps leaving [0, 1]^2 (off for forced runs).
  bool check_box = true;

  void validate() const;
  double dx() const { return 2.0 * x_half_length / (nx - 1); }
  std::vector<double> grid() const;
};

struct FieldState {
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> v;
  double time = 0.0;
};

/// Source terms added to the right-hand sides, evaluated explicitly.
using Forcing = std::function<void(double t, const std::vector<double>& x, std::vector<double>& fu,
                                   std::vector<double>& fv)>;

struct StepExtras {
  const SuperSubPair* pair = nullptr;  ///< DirichletFromPair boundary data
  const Forcing* forcing = nullptr;
};

/// One IMEX step of size config.dt: theta-weighted implicit diffusion,
/// explicit (optionally Heun) reaction, second-order differences. A step leaving the box is
/// redone as two half steps; throws StepRejectedFloor below dt_floor.
FieldState step(const FieldState& state, const ModelParams& model, const SchemeConfig& config,
                const StepExtras& extras = {});

/// Steps from t_start to t_end. Without snapshot_times it records the initial
/// state, every snapshot_interval and the final state; otherwise exactly the
/// listed times (rounded to the step grid).
std::vector<FieldState> simulate(const FieldState& initial, const ModelParams& model,
                                 const SchemeConfig& config, const StepExtras& extras = {});

/// Mirror image x -> -x (grid must be symmetric).
FieldState reflect(const FieldState& state);

struct SandwichMargin {
  double margin = 0.0;  ///< signed; negative beyond epsilon means violation
  double x = 0.0;
  double t = 0.0;
};

struct SandwichCertificate {
  double epsilon = 0.0;
  /// Worst values of u - u_sub, u_super - u, v - v_sub, v_super - v.
  SandwichMargin u_lower, u_upper, v_lower, v_upper;
  std::size_t snapshots = 0;
  std::size_t violations = 0;
  std::vector<double> times;
  std::vector<double> worst_margin_by_time;  ///< min of the four at each snapshot
  bool pass = false;
};

/// Compares snapshots with the pair; epsilon < 0 selects 5 (dx^2 + dt).
SandwichCertificate check_sandwich(const std::vector<FieldState>& snapshots, const SuperSubPair& pair,
                                   const SchemeConfig& config, double epsilon = -1.0);

/// Starts from the sub-solution at t_start and checks the sandwich at each
/// snapshot. Throws SandwichViolated when requested.
SandwichCertificate comparison_harness(const SuperSubPair& pair, const ModelParams& model,
                                       const SchemeConfig& config, bool throw_on_violation = true,
                                       std::vector<FieldState>* snapshots_out = nullptr);

struct DerivativeBounds {
  double max_dt_u = 0.0, max_dt_v = 0.0;
  double max_dx_u = 0.0, max_dx_v = 0.0;
  double max_dxx_u = 0.0, max_dxx_v = 0.0;
  double early_max = 0.0;  ///< largest norm over the earlier half of the probed snapshots
  double late_max = 0.0;
  std::size_t snapshots_probed = 0;
  bool bounded = false;
};

/// Discrete sup norms for snapshots with t > t_start + 1; time derivatives
/// come from the discrete right-hand side. Throws UnboundedGrowth when the
/// later half exceeds 1.5 times the earlier half.
DerivativeBounds derivative_bound_probe(const std::vector<FieldState>& simulation, const ModelParams& model,
                                        bool throw_on_growth = true);

/// Manufactured solution u = A e^{-t} cos(pi x / L) + u*, v = A e^{-t}
/// cos(pi x / L) + v* and the forcing that makes it exact.
struct Manufactured {
  ModelParams model;
  double L = 1.0;
  double amplitude = 1.0;
  double u(double x, double t) const;
  double v(double x, double t) const;
  Forcing forcing() const;
};

struct ConvergenceStudy {
  std::vector<double> steps;   ///< dx or dt
  std::vector<double> errors;  ///< max-norm error at the final time
  std::vector<double> orders;  ///< log2 ratios of successive errors
};

/// Spatial study from dx = 0.25 with dt = 0.1 dx^2 (dx halved each level), temporal study
/// on a fixed fine grid with dt halved each level.
ConvergenceStudy manufactured_space_study(const ModelParams& model, int levels = 3);
ConvergenceStudy manufactured_time_study(const ModelParams& model, int levels = 3, bool second_order = false);

// --- entire solutions -------------------------------------------------------

struct EntireApproximation {
  std::vector<int> n_list;
  std::vector<double> start_times;
  std::vector<double> window_times;
  /// snapshots[k][s]: start -n_list[k], window time s.
  std::vector<std::vector<FieldState>> snapshots;
  /// Same runs started from the super-solution (cross-check; may be empty).
  std::vector<std::vector<FieldState>> super_snapshots;
  std::vector<double> cauchy_gaps;  ///< between n_list[k] and n_list[k+1]
  std::vector<double> gap_ratios;
  std::vector<double> symmetry_errors;   ///< per n, over the window
  std::vector<SandwichCertificate> sandwiches;  ///< per n
  /// sup_x v at t = -n for the sub start and the super start.
  std::vector<double> sup_v_at_start;
  std::vector<double> sup_v_at_start_super;
  double super_sub_limit_gap = 0.0;  ///< largest n: sup |sub start - super start|
  SchemeConfig config;
};

struct EntireOptions {
  double window_start = std::numeric_limits<double>::quiet_NaN();  ///< default -n_min / 2
  double window_end = 10.0;
  double window_interval = 0.5;
  bool super_start = true;
  double gap_floor = 1e-12;  ///< gaps below this count as converged
  bool throw_on_failure = true;
};

/// Backward starts: for each n simulate from t = -n with the sub-solution as
/// initial data and record the common window. Starts run concurrently.
/// Throws NoConvergenceTrend when the gaps grow.
EntireApproximation entire_approximation(const SuperSubPair& pair, const ModelParams& model,
                                         const SchemeConfig& config, const std::vector<int>& n_list,
                                         const EntireOptions& options = {});

struct PropertyResult {
  int index = 0;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct EntirePropertiesReport {
  PropertyResult symmetry;          ///< (i)
  PropertyResult backward_decay;    ///< (ii)
  PropertyResult edge_decay;        ///< (iii)
  PropertyResult final_bounds_u;    ///< (iv), u part
  PropertyResult final_bounds_v;    ///< (iv), v part
  double envelope_rate = 0.0;       ///< v*
  double fitted_rate_sub = 0.0;     ///< NaN when sup v vanishes at every start
  double fitted_rate_super = 0.0;
  bool all_passed() const;
};

struct PropertyTolerances {
  double symmetry = 1e-10;
  double rate_relative = 0.2;
  double edge = 1e-6;
  double delta = 0.02;
  double epsilon = 1e-3;
};

/// Checks properties (i)-(iv) for a (1,1,0) front-family approximation.
/// Throws PropertyFailed when requested.
EntirePropertiesReport check_entire_properties(const EntireApproximation& approx, const SuperSubPair& pair,
                                               const ModelParams& model, const PropertyTolerances& tol = {},
                                               bool throw_on_failure = false);

}  // namespace lvfront
