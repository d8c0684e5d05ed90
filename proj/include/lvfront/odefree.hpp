#pragma once

#include <string>
#include <vector>

#include "lvfront/model.hpp"

namespace lvfront {

/// Orbit of p' = p(1 - p - k1 q), q' = r q(1 - q - k2 p) through (theta1, theta2)
/// at t = 0, sampled on a uniform grid over [-T, T].
struct DiffusionFreeOrbit {
  ModelParams model;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double T = 40.0;
  double tol = 1e-10;
  std::vector<double> t;
  std::vector<double> p;
  std::vector<double> q;
  double beta_hat1 = 0.0;            ///< theta1 / (u* - theta1)
  double beta_hat2 = 0.0;            ///< theta2 / (u* - theta2), as printed
  double beta_hat2_corrected = 0.0;  ///< theta2 / (v* - theta2)
  bool monotone = true;              ///< p and q increasing on the grid
  bool in_box = true;                ///< 0 < p < u*, 0 < q < v* on the grid

  struct Point {
    double p, q, dp, dq;
  };
  /// Quintic Hermite evaluation using the exact vector field for the first
  /// and second derivatives. Throws DomainExceeded outside [-T, T].
  Point at(double time) const;
  double dt() const { return t[1] - t[0]; }
};

/// Adaptive Dormand-Prince 5(4) integration of (log p, log q) forward and
/// backward from t = 0, so tol is a relative tolerance on p and q.
/// Throws InitialDataOutOfBox, Blowup.
DiffusionFreeOrbit solve_diffusion_free(const ModelParams& model, double theta1, double theta2,
                                        double T = 40.0, double tol = 1e-10, double grid_step = 0.02);

/// Logistic curve K b e^{a t} / (1 + b e^{a t}); evaluated in a form that
/// does not overflow or underflow for large |t|.
double logistic_envelope(double K, double beta, double rate, double t);

struct EnvelopeCheck {
  std::string name;
  std::size_t points = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  ///< min over points of log(value) - log(bound) (or reverse)
  double first_violation_t = 0.0;
  bool holds() const { return violations == 0; }
};

struct EnvelopeReport {
  /// The claim as displayed: lower logistic envelopes (rate u* for p, v* for
  /// q) below (p, q) below (u*, v*) for all t. Reported only.
  EnvelopeCheck printed_p_lower;
  EnvelopeCheck printed_q_lower;            ///< printed beta_hat2
  EnvelopeCheck printed_q_lower_corrected;  ///< theta2 / (v* - theta2)
  EnvelopeCheck p_upper;                    ///< p <= u*
  EnvelopeCheck q_upper;                    ///< q <= v*
  bool printed_claim_holds = false;
  /// Comparison statements that follow from p' >= p (u* - p) while q < v*
  /// (and q' >= r q (v* - q) while p < u*): the envelope is a lower bound for
  /// t >= 0 and an upper bound for t <= 0. Certified; violations throw.
  EnvelopeCheck certified_p;
  EnvelopeCheck certified_q;  ///< rate r v*, corrected constant
  std::size_t exempt_points = 0;  ///< where the comparison hypothesis fails
  double backward_constant = 0.0;  ///< max(p, q)(-T) e^{min(u*, v*) T}
};

/// Throws EnvelopeViolated with the offending t if a certified statement fails
/// by more than 100 tol (relative).
EnvelopeReport certify_logistic_envelope(const DiffusionFreeOrbit& orbit);

/// CSV columns t, p1, q1, lower_env_p, lower_env_q (corrected constant).
std::string orbit_to_csv(const DiffusionFreeOrbit& orbit);

}  // namespace lvfront
