#pragma once

#include <array>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "lvfront/front.hpp"
#include "lvfront/odefree.hpp"

namespace lvfront {

/// Evaluates a stored increasing front at arbitrary xi: quintic Hermite inside
/// the grid (values, stored slopes, second derivatives from the profile ODE),
/// exponential tails outside it with the fitted tail rates.
class ProfileEvaluator {
 public:
  struct Jet {
    double phi = 0.0, dphi = 0.0, psi = 0.0, dpsi = 0.0;
  };

  /// Throws InvalidArgument for a decreasing (reflected) profile.
  explicit ProfileEvaluator(FrontProfile front, double extrapolation_tol = 1e-8);

  /// Throws DomainExceeded when the extrapolation uncertainty at xi is above
  /// the tolerance.
  Jet operator()(double xi) const;

  /// Second derivatives from the profile ODE at a jet.
  double phi_second(const Jet& j) const;
  double psi_second(const Jet& j) const;

  const FrontProfile& front() const { return front_; }
  double left_rate_phi() const { return left_phi_; }
  double left_rate_psi() const { return left_psi_; }
  double right_rate() const { return right_; }
  double extrapolation_uncertainty(double xi) const;

 private:
  FrontProfile front_;
  double tol_;
  double left_phi_ = 0.0, left_psi_ = 0.0, right_ = 0.0;
  double dleft_phi_ = 0.0, dleft_psi_ = 0.0, dright_ = 0.0;  // fitted - predicted
};

enum class Family { FrontFamily, ScalarKPPFamily };
std::string to_string(Family f);

/// Which of the three branches (front, reflected front, orbit) are present.
struct Selector {
  int i = 1, j = 1, m = 0;
  std::string str() const;
  /// Parses "110" and similar. Throws InvalidArgument.
  static Selector parse(const std::string& s);
};

/// All seven admissible selectors in the order 001, 010, ..., 111.
std::vector<Selector> all_selectors();

struct SpaceTimeDomain {
  double x_lo = -100.0, x_hi = 100.0;
  double t_lo = -40.0, t_hi = 40.0;
};

struct BranchJet {
  double value = 0.0;
  double dt = 0.0;
  double dxx = 0.0;
  int branch = -1;
};

/// Value with first time derivative and second space derivative of one
/// component, taken on the active branch.
struct ComponentJet {
  double value = 0.0;
  double dt = 0.0;
  double dxx = 0.0;
  int branch = -1;  ///< -1 for constant components
  /// Relative distance to the runner-up branch (infinity if only one).
  double tie_gap = std::numeric_limits<double>::infinity();
  /// Every present branch, active one included.
  std::array<BranchJet, 3> candidates{};
  int n_candidates = 0;
};

struct PairJets {
  ComponentJet u_super, v_super, u_sub, v_sub;
};

struct PairValues {
  double u_super = 0.0, v_super = 0.0, u_sub = 0.0, v_sub = 0.0;
};

/// Coupled super-/sub-solution pair. Front family: u_super = 1, v_sub = 0,
/// u_sub = max of the active branches phi(x+ct), phi(-x+ct), p1(t) and v_super
/// = min of psi(x+ct), psi(-x+ct), q1(t). Scalar family: u_super = v_super =
/// 1, u_sub = max(phi(x+s1 t), phi(-x+s1 t)), v_sub likewise with psi and s2.
class SuperSubPair {
 public:
  Family family = Family::FrontFamily;
  Selector selector;
  ModelParams model;
  SpaceTimeDomain domain;
  /// 10 x the largest residual norm of the underlying fronts.
  double default_slack = 0.0;
  /// Time interval of the coupled super-sub definition; the translation
  /// functions of that definition have no instance for these pairs.
  double T1 = -std::numeric_limits<double>::infinity();
  double T0 = std::numeric_limits<double>::infinity();

  std::shared_ptr<const ProfileEvaluator> front_u;  ///< system front or scalar u front
  std::shared_ptr<const ProfileEvaluator> front_v;  ///< scalar v front
  std::shared_ptr<const DiffusionFreeOrbit> orbit;
  double speed_u = 0.0;  ///< c or s1
  double speed_v = 0.0;  ///< c or s2

  /// Throws DomainExceeded outside the declared domain.
  PairJets jets(double x, double t) const;
  PairValues values(double x, double t) const;
  /// Componentwise values on a spatial grid at time t.
  void sample(const std::vector<double>& x, double t, std::vector<double>& u_super,
              std::vector<double>& v_super, std::vector<double>& u_sub, std::vector<double>& v_sub) const;
};

/// Throws SelectorAllZero, InvalidArgument (front/orbit mismatch).
SuperSubPair build_front_family(const FrontProfile& front, std::shared_ptr<const DiffusionFreeOrbit> orbit,
                                Selector selector);

/// Throws SubminimalSpeed when a front is slower than its minimal speed.
SuperSubPair build_scalar_family(const FrontProfile& front_u, const FrontProfile& front_v);

struct Lattice {
  double x_lo = -40.0, x_hi = 40.0;
  int nx = 161;
  double t_lo = -20.0, t_hi = 20.0;
  int nt = 81;
};

struct InequalityOptions {
  double ridge_margin = 1e-8;  ///< relative tie margin between branches
  double slack = -1.0;         ///< < 0: use the pair's default slack
  bool throw_on_violation = true;
  int threads = 0;             ///< 0: hardware concurrency
};

struct WorstPoint {
  double residual = 0.0;
  double x = 0.0;
  double t = 0.0;
};

struct InequalityCertificate {
  Lattice lattice;
  double slack = 0.0;
  double ridge_margin = 0.0;
  /// Super residuals must be >= -slack (worst = minimum), sub residuals
  /// <= slack (worst = maximum).
  WorstPoint worst_super_u, worst_super_v, worst_sub_u, worst_sub_v;
  std::size_t points = 0;
  /// Points where some component has a branch within ridge_margin of the
  /// active one. These are checked on every near-tied branch.
  std::size_t ridge_points = 0;
  /// Ridge points where a near-tied branch fails its inequality; no residual
  /// is recorded for them.
  std::size_t ridge_points_skipped = 0;
  std::size_t ordering_violations = 0;
  bool pass = false;
};

/// Checks the four coupled differential inequalities and the ordering at
/// every lattice point. Where branches tie within ridge_margin every tied
/// branch is checked, and the point is skipped only if one of them fails.
/// Throws InequalityViolated when requested.
InequalityCertificate verify_inequalities(const SuperSubPair& pair, const Lattice& lattice,
                                          const InequalityOptions& options = {});

}  // namespace lvfront
