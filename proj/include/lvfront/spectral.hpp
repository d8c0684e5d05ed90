#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lvfront/model.hpp"

namespace lvfront {

/// Model plus a wave speed c, with c >= c_min checked by validate().
struct WaveParams {
  ModelParams model;
  double c = 2.0;

  /// Throws InvalidArgument for bad model data and SubminimalSpeed when
  /// c < c_min - 1e-12.
  void validate() const;
};

/// 2 max(1, sqrt(r d)).
double c_min(const ModelParams& model);

enum class BasePoint { CoexistencePoint, OriginPoint };

struct LinearizationMatrix {
  Eigen::Matrix4d entries = Eigen::Matrix4d::Zero();
  BasePoint base_point = BasePoint::OriginPoint;
};

/// Linearization of the first-order wave system (phi, phi', psi, psi') at the
/// coexistence point or at the origin.
LinearizationMatrix linearize(const WaveParams& wave, BasePoint at);

struct OriginEigenvalues {
  double lambda3 = 0.0;
  double lambda4 = 0.0;
  double lambda5 = 0.0;
  double lambda6 = 0.0;
};

/// Closed-form roots of the two quadratic factors at the origin.
OriginEigenvalues origin_eigenvalues(const WaveParams& wave);

/// Roots of sum_k coeffs[k] x^k (coeffs.back() != 0) via the eigenvalues of
/// the companion matrix.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

/// Coefficients (ascending powers) of the characteristic quartic at the
/// coexistence point. rho scales the (2,3) coupling entry; rho = 1 is the
/// true matrix.
std::array<double, 5> coexistence_quartic(const WaveParams& wave, double rho = 1.0);

struct CoexistenceSpectrum {
  double lambda1 = 0.0;  ///< larger negative root
  double lambda2 = 0.0;  ///< smaller negative root
  double pos_small = 0.0;
  double pos_large = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double mu2 = 0.0;
  double max_quartic_residual = 0.0;
  /// Eigenvectors (1, lambda, tau, tau*lambda) for lambda1, lambda2.
  Eigen::Vector4d eigvec1 = Eigen::Vector4d::Zero();
  Eigen::Vector4d eigvec2 = Eigen::Vector4d::Zero();
};

/// Solves the coexistence quartic and returns the 2+2 split with tau values.
/// Throws SignSplitViolation if the split is not two negative plus two
/// positive real roots.
CoexistenceSpectrum coexistence_eigenvalues(const WaveParams& wave);

/// (mu1, mu2, mu3, mu4): roots of the decoupled quartic (rho = 0).
std::array<double, 4> decoupled_roots(const WaveParams& wave);

struct HomotopyStep {
  double rho = 0.0;
  double det = 0.0;
  std::array<double, 4> roots{};
  int negative = 0;
  int positive = 0;
};

struct HomotopyReport {
  std::vector<HomotopyStep> steps;
  double max_rho0_mismatch = 0.0;
  bool pass = false;
};

/// Follows the coupling parameter rho over [0, 1] in rho_steps uniform steps
/// and checks det > 0 and the 2+2 real split at each. Throws HomotopyBreak.
HomotopyReport homotopy_check(const WaveParams& wave, int rho_steps = 11);

/// Coincidence pattern of the origin eigenvalues.
enum class MultiplicityCase {
  Simple,
  Double34,
  Double56,
  Double35,
  Double36,
  Double45,
  Double46,
  Pair34_56,
  Pair35_46,
  Triple345,
  Triple346,
  Triple356,
  Triple456,
  Quadruple,
};

std::string to_string(MultiplicityCase tag);

enum class TailSide { PlusInfinity, MinusInfinity };

std::string to_string(TailSide side);

struct TemplateTerm {
  double rate = 0.0;
  int polynomial_degree = 0;
  std::string coefficient_sign_constraint;
};

struct AsymptoticTemplate {
  TailSide side = TailSide::MinusInfinity;
  std::vector<TemplateTerm> terms_phi;
  std::vector<TemplateTerm> terms_psi;
  std::string coupling;
};

using JordanChain = std::vector<Eigen::Vector4d>;

struct EigenvalueEntry {
  double value = 0.0;
  int multiplicity = 1;
};

struct SpectralReport {
  BasePoint base_point = BasePoint::OriginPoint;
  std::vector<EigenvalueEntry> eigenvalues;  ///< ascending, distinct
  int stable_dim = 0;
  int unstable_dim = 0;
  std::vector<Eigen::Vector4d> eigvectors;
  std::vector<JordanChain> generalized_eigvectors;
  double tau1 = 0.0;
  double tau2 = 0.0;
  MultiplicityCase case_tag = MultiplicityCase::Simple;
  AsymptoticTemplate asymptotic;
  /// Origin eigenvalues after snapping coincident values.
  OriginEigenvalues origin{};
};

/// Coincidence pattern from the closed-form eigenvalues alone, at relative
/// tolerance tol.
MultiplicityCase coincidence_pattern(const OriginEigenvalues& ev, double tol = 1e-9);

/// Full origin report: parameter predicates first, eigenvalue coincidence as
/// fallback. Throws AmbiguousMultiplicity when the two disagree.
SpectralReport classify_minus_infinity(const WaveParams& wave, double tol = 1e-9);

/// Report at the coexistence point with the plus-infinity template.
SpectralReport classify_plus_infinity(const WaveParams& wave);

/// Jordan chains spanning the generalized eigenspace of lambda. Each chain is
/// ordered v0 (eigenvector), v1, ... with (M - lambda I) v_k = v_{k-1}.
/// Throws NotAnEigenvalue.
std::vector<JordanChain> generalized_eigenvector_chains(const LinearizationMatrix& matrix,
                                                        double lambda,
                                                        int algebraic_multiplicity);

}  // namespace lvfront
