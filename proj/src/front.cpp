#include "lvfront/front.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "lvfront/errors.hpp"
#include "lvfront/stencil.hpp"

namespace lvfront {

namespace {

constexpr int kStencilWidth = 7;

// Extra scalar equation on the unknown vector, with its gradient.
struct Constraint {
  std::function<double(const Eigen::VectorXd&, std::vector<std::pair<int, double>>&)> eval;
};

// m coupled equations D_k y_k'' - c y_k' + R_k(y) = 0 on a uniform grid,
// closed by 2m constraints. Unknown (k, i) sits at index k * n + i.
struct Collocation {
  int m = 1;
  int n = 0;
  double h = 0.0;
  double c = 0.0;
  std::vector<double> diffusion;
  // y -> (R, dR/dy row-major)
  std::function<void(const double*, double*, double*)> reaction;
  std::vector<Constraint> constraints;
  std::vector<double> col_scale;
};

struct NewtonResult {
  Eigen::VectorXd x;
  double residual = 0.0;  // max interior residual, unscaled
  int iterations = 0;
};

double interior_residuals(const Collocation& p, const UniformStencil& st, const Eigen::VectorXd& x,
                          Eigen::VectorXd* out) {
  const int n = p.n;
  double worst = 0.0;
  std::vector<double> y(p.m), r(p.m), jac(p.m * p.m);
  for (int i = 1; i < n - 1; ++i) {
    const int s0 = st.start(i);
    const auto& w1 = st.weights(i, 1);
    const auto& w2 = st.weights(i, 2);
    for (int k = 0; k < p.m; ++k) y[k] = x(k * n + i);
    p.reaction(y.data(), r.data(), jac.data());
    for (int k = 0; k < p.m; ++k) {
      double d1 = 0.0, d2 = 0.0;
      for (int q = 0; q < st.width(); ++q) {
        const double v = x(k * n + s0 + q);
        d1 += w1[q] * v;
        d2 += w2[q] * v;
      }
      const double f = p.diffusion[k] * d2 - p.c * d1 + r[k];
      worst = std::max(worst, std::abs(f));
      if (out) (*out)(k * (n - 2) + i - 1) = f;
    }
  }
  return worst;
}

NewtonResult newton_solve(const Collocation& p, Eigen::VectorXd x, int max_iter, double tol) {
  const int n = p.n;
  const int m = p.m;
  const int dim = m * n;
  const int n_interior = m * (n - 2);
  if (n_interior + static_cast<int>(p.constraints.size()) != dim) {
    fail(ErrorKind::InvalidArgument, "collocation system is not square");
  }
  const UniformStencil st(n, p.h, kStencilWidth);
  std::vector<double> y(m), r(m), jac(m * m);
  std::vector<std::pair<int, double>> grad;

  auto scaled_residual = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& f) {
    f.resize(dim);
    interior_residuals(p, st, xv, &f);
    for (int k = 0; k < m; ++k) {
      for (int i = 1; i < n - 1; ++i) f(k * (n - 2) + i - 1) /= p.col_scale[k * n + i];
    }
    for (std::size_t q = 0; q < p.constraints.size(); ++q) {
      grad.clear();
      f(n_interior + q) = p.constraints[q].eval(xv, grad);
    }
    return f.cwiseAbs().maxCoeff();
  };

  Eigen::VectorXd f;
  double fnorm = scaled_residual(x, f);
  NewtonResult res;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool pattern_ready = false;
  int quiet = 0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_interior) * (kStencilWidth + m) + 64);
    for (int i = 1; i < n - 1; ++i) {
      const int s0 = st.start(i);
      const auto& w1 = st.weights(i, 1);
      const auto& w2 = st.weights(i, 2);
      for (int k = 0; k < m; ++k) y[k] = x(k * n + i);
      p.reaction(y.data(), r.data(), jac.data());
      for (int k = 0; k < m; ++k) {
        const int row = k * (n - 2) + i - 1;
        const double rs = 1.0 / p.col_scale[k * n + i];
        for (int q = 0; q < st.width(); ++q) {
          const int col = k * n + s0 + q;
          double a = p.diffusion[k] * w2[q] - p.c * w1[q];
          if (s0 + q == i) a += jac[k * m + k];
          trip.emplace_back(row, col, a * rs * p.col_scale[col]);
        }
        for (int l = 0; l < m; ++l) {
          if (l == k) continue;
          const int col = l * n + i;
          trip.emplace_back(row, col, jac[k * m + l] * rs * p.col_scale[col]);
        }
      }
    }
    for (std::size_t q = 0; q < p.constraints.size(); ++q) {
      grad.clear();
      p.constraints[q].eval(x, grad);
      for (const auto& [col, g] : grad) {
        trip.emplace_back(n_interior + static_cast<int>(q), col, g * p.col_scale[col]);
      }
    }
    Eigen::SparseMatrix<double> jm(dim, dim);
    jm.setFromTriplets(trip.begin(), trip.end());
    if (!pattern_ready) {
      lu.analyzePattern(jm);
      pattern_ready = true;
    }
    lu.factorize(jm);
    if (lu.info() != Eigen::Success) {
      fail(ErrorKind::NoConvergence, "singular Newton matrix (last residual " + std::to_string(fnorm) + ")");
    }
    const Eigen::VectorXd z = lu.solve(-f);
    Eigen::VectorXd dx(dim);
    for (int j = 0; j < dim; ++j) dx(j) = z(j) * p.col_scale[j];

    // Backtrack on the scaled residual.
    double alpha = 1.0;
    Eigen::VectorXd trial, ftrial;
    double tnorm = 0.0;
    for (int bt = 0; bt < 30; ++bt) {
      trial = x + alpha * dx;
      tnorm = scaled_residual(trial, ftrial);
      if (std::isfinite(tnorm) && (tnorm < fnorm || alpha < 1e-3)) break;
      alpha *= 0.5;
    }
    const double previous = fnorm;
    x = trial;
    f = ftrial;
    fnorm = tnorm;
    res.iterations = it + 1;
    const double step = z.cwiseAbs().maxCoeff() * alpha;
    // Roundoff floor: tiny residual that no longer improves.
    const bool small = fnorm < tol || (fnorm < 1e3 * tol && fnorm > 0.5 * previous);
    // One more full iteration after reaching the floor: weakly damped modes
    // near the right end are only settled by a further step.
    quiet = small ? quiet + 1 : 0;
    if (quiet >= 2 || (alpha == 1.0 && step < tol)) {
      res.x = x;
      res.residual = interior_residuals(p, st, x, nullptr);
      return res;
    }
  }
  std::ostringstream msg;
  msg << "Newton did not converge in " << max_iter << " iterations (scaled residual " << fnorm << ")";
  fail(ErrorKind::NoConvergence, msg.str());
}

// Node counts on each side of xi = 0. Each side is extended (same spacing)
// until its slowest decay reaches 1e-2 * boundary_tol; rates are negative on
// the right and positive on the left.
struct GridLayout {
  int left = 0;
  int right = 0;
  int size() const { return left + right + 1; }
};

GridLayout layout(const GridSpec& grid, double h, double left_rate, double right_rate) {
  GridLayout g;
  g.left = g.right = grid.n_points / 2;
  if (!grid.auto_extend) return g;
  const double target = std::log(1e-2 * grid.boundary_tol);
  const double need_left = target / -left_rate;
  const double need_right = target / right_rate;
  if (need_left > grid.half_length) g.left = static_cast<int>(std::ceil(need_left / h));
  if (need_right > grid.half_length) g.right = static_cast<int>(std::ceil(need_right / h));
  return g;
}

std::vector<double> grid_points(const GridLayout& g, double h) {
  std::vector<double> xi(g.size());
  for (int i = 0; i < g.size(); ++i) xi[i] = (i - g.left) * h;
  return xi;
}

std::vector<double> derivative(const std::vector<double>& y, double h) {
  const int n = static_cast<int>(y.size());
  const UniformStencil st(n, h, kStencilWidth);
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) {
    const int s0 = st.start(i);
    const auto& w = st.weights(i, 1);
    double acc = 0.0;
    for (int q = 0; q < st.width(); ++q) acc += w[q] * y[s0 + q];
    d[i] = acc;
  }
  return d;
}

double ode_second(const FrontProfile& f, std::size_t i, int component, double value, double slope,
                  double other) {
  const double drift = f.orientation * f.c * slope;
  if (!f.is_system()) {
    return (drift - f.scalar.R * value * (f.scalar.K - value)) / f.scalar.D;
  }
  (void)i;
  const auto& p = f.model;
  if (component == 0) return drift - value * (1.0 - value - p.k1 * other);
  return (drift - p.r * value * (1.0 - value - p.k2 * other)) / p.d;
}

}  // namespace

void GridSpec::validate() const {
  if (!(half_length > 0.0) || n_points < 2 * kStencilWidth + 1 || n_points % 2 == 0) {
    fail(ErrorKind::InvalidArgument, "grid needs half_length > 0 and an odd n_points >= 15");
  }
  if (!(boundary_tol > 0.0) || max_newton < 1 || !(newton_tol > 0.0)) {
    fail(ErrorKind::InvalidArgument, "invalid grid tolerances");
  }
}

std::string to_string(FrontKind kind) {
  switch (kind) {
    case FrontKind::SystemFront: return "SystemFront";
    case FrontKind::ScalarU: return "ScalarU";
    case FrontKind::ScalarV: return "ScalarV";
  }
  return "?";
}

double FrontProfile::phi_limit() const { return is_system() ? model.u_star() : scalar.K; }
double FrontProfile::psi_limit() const { return is_system() ? model.v_star() : 0.0; }

double FrontProfile::phi_second(std::size_t i) const {
  return ode_second(*this, i, 0, phi[i], dphi[i], is_system() ? psi[i] : 0.0);
}

double FrontProfile::psi_second(std::size_t i) const {
  if (!is_system()) fail(ErrorKind::InvalidArgument, "scalar front has no psi component");
  return ode_second(*this, i, 1, psi[i], dpsi[i], phi[i]);
}

FrontProfile solve_system_front(const WaveParams& wave, const GridSpec& grid) {
  wave.validate();
  grid.validate();
  const auto& p = wave.model;
  if (!p.weak_competition()) fail(ErrorKind::InvalidArgument, "system front requires weak competition");
  const double us = p.u_star();
  const double vs = p.v_star();
  const auto spec = coexistence_eigenvalues(wave);
  const auto ev = origin_eigenvalues(wave);
  const double kphi = ev.lambda4;
  const double kpsi = ev.lambda6;

  const double h = 2.0 * grid.half_length / (grid.n_points - 1);
  const auto lay = layout(grid, h, std::min(kphi, kpsi), spec.lambda2);
  const int n = lay.size();
  const auto xi = grid_points(lay, h);
  const int mid = lay.left;

  // Left eigenvectors of A1 for every eigenvalue except lambda2: the monotone
  // front leaves (u*, v*) along the lambda2 direction only.
  const auto a1 = linearize(wave, BasePoint::CoexistencePoint).entries;
  Eigen::EigenSolver<Eigen::Matrix4d> es(a1.transpose());
  std::vector<Eigen::Vector4d> left;
  int skip = 0;
  for (int k = 1; k < 4; ++k) {
    if (std::abs(es.eigenvalues()(k).real() - spec.lambda2) <
        std::abs(es.eigenvalues()(skip).real() - spec.lambda2)) {
      skip = k;
    }
  }
  for (int k = 0; k < 4; ++k) {
    if (k != skip) left.push_back(es.eigenvectors().col(k).real().normalized());
  }

  Collocation prob;
  prob.m = 2;
  prob.n = n;
  prob.h = h;
  prob.c = wave.c;
  prob.diffusion = {1.0, p.d};
  prob.reaction = [p](const double* y, double* r, double* j) {
    const double u = y[0], v = y[1];
    r[0] = u * (1.0 - u - p.k1 * v);
    r[1] = p.r * v * (1.0 - v - p.k2 * u);
    j[0] = 1.0 - 2.0 * u - p.k1 * v;
    j[1] = -p.k1 * u;
    j[2] = -p.r * p.k2 * v;
    j[3] = p.r * (1.0 - 2.0 * v - p.k2 * u);
  };
  prob.col_scale.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    prob.col_scale[i] = std::min(1.0, std::exp(kphi * xi[i]));
    prob.col_scale[n + i] = std::min(1.0, std::exp(kpsi * xi[i]));
  }

  const UniformStencil st(n, h, kStencilWidth);
  const int last = n - 1;
  const int s_last = st.start(last);
  const auto w_last = st.weights(last, 1);
  for (const auto& l : left) {
    prob.constraints.push_back({[=](const Eigen::VectorXd& x, std::vector<std::pair<int, double>>& g) {
      double dphi = 0.0, dpsi = 0.0;
      for (int q = 0; q < kStencilWidth; ++q) {
        dphi += w_last[q] * x(s_last + q);
        dpsi += w_last[q] * x(n + s_last + q);
        g.emplace_back(s_last + q, l(1) * w_last[q]);
        g.emplace_back(n + s_last + q, l(3) * w_last[q]);
      }
      g.emplace_back(last, l(0));
      g.emplace_back(n + last, l(2));
      return l(0) * (x(last) - us) + l(1) * dphi + l(2) * (x(n + last) - vs) + l(3) * dpsi;
    }});
  }
  prob.constraints.push_back({[=](const Eigen::VectorXd& x, std::vector<std::pair<int, double>>& g) {
    g.emplace_back(mid, 1.0 / us);
    return (x(mid) - us / 2.0) / us;
  }});
  Eigen::VectorXd x(2 * n);
  for (int i = 0; i < n; ++i) {
    x(i) = us / (1.0 + std::exp(-kphi * xi[i]));
    x(n + i) = vs / (1.0 + std::exp(-kpsi * xi[i]));
  }
  const auto sol = newton_solve(prob, x, grid.max_newton, grid.newton_tol);

  FrontProfile f;
  f.kind = FrontKind::SystemFront;
  f.c = wave.c;
  f.model = p;
  f.xi = xi;
  f.phi.assign(sol.x.data(), sol.x.data() + n);
  f.psi.assign(sol.x.data() + n, sol.x.data() + 2 * n);
  f.dphi = derivative(f.phi, h);
  f.dpsi = derivative(f.psi, h);
  f.residual_norm = sol.residual;
  f.newton_iterations = sol.iterations;

  // Where phi or psi is within roundoff of a limit the slope is not
  // resolvable; there only sign violations above roundoff count.
  constexpr double kRound = 1e-10;
  for (int i = 0; i < n; ++i) {
    const bool resolved = f.phi[i] > kRound && us - f.phi[i] > kRound && f.psi[i] > kRound &&
                          vs - f.psi[i] > kRound;
    const double floor = resolved ? 0.0 : -kRound;
    if (!(f.dphi[i] > floor) || !(f.dpsi[i] > floor)) {
      std::ostringstream msg;
      msg << "non-monotone front at xi=" << xi[i] << " (phi'=" << f.dphi[i] << ", psi'=" << f.dpsi[i] << ")";
      fail(ErrorKind::MonotonicityLost, msg.str());
    }
    if (!(f.phi[i] > -kRound && f.phi[i] < us + kRound && f.psi[i] > -kRound && f.psi[i] < vs + kRound)) {
      std::ostringstream msg;
      msg << std::setprecision(17) << "front leaves (0,u*)x(0,v*) at xi=" << xi[i] << " (u*-phi=" << us - f.phi[i] << ", v*-psi=" << vs - f.psi[i] << ")";
      fail(ErrorKind::MonotonicityLost, msg.str());
    }
  }
  return f;
}

FrontProfile solve_scalar_kpp(const ScalarEquation& eq, double s, const GridSpec& grid) {
  grid.validate();
  if (!(eq.D > 0.0 && eq.R > 0.0 && eq.K > 0.0)) {
    fail(ErrorKind::InvalidArgument, "scalar equation needs positive D, R, K");
  }
  const double disc = s * s - 4.0 * eq.D * eq.R * eq.K;
  if (disc < -1e-12 * s * s) {
    std::ostringstream msg;
    msg << "speed " << s << " below the minimal speed " << 2.0 * std::sqrt(eq.D * eq.R * eq.K);
    fail(ErrorKind::SubminimalSpeed, msg.str());
  }
  const double kappa = 2.0 * eq.R * eq.K / (s + std::sqrt(std::max(disc, 0.0)));
  const double mu_minus = (s - std::sqrt(s * s + 4.0 * eq.D * eq.R * eq.K)) / (2.0 * eq.D);

  const double h = 2.0 * grid.half_length / (grid.n_points - 1);
  const auto lay = layout(grid, h, kappa, mu_minus);
  const int n = lay.size();
  const auto xi = grid_points(lay, h);
  const int mid = lay.left;

  Collocation prob;
  prob.m = 1;
  prob.n = n;
  prob.h = h;
  prob.c = s;
  prob.diffusion = {eq.D};
  prob.reaction = [eq](const double* y, double* r, double* j) {
    r[0] = eq.R * y[0] * (eq.K - y[0]);
    j[0] = eq.R * (eq.K - 2.0 * y[0]);
  };
  prob.col_scale.resize(n);
  for (int i = 0; i < n; ++i) prob.col_scale[i] = std::min(1.0, std::exp(kappa * xi[i]));

  const UniformStencil st(n, h, kStencilWidth);
  const int last = n - 1;
  const int s_last = st.start(last);
  const auto w_last = st.weights(last, 1);
  const double K = eq.K;
  prob.constraints.push_back({[=](const Eigen::VectorXd& x, std::vector<std::pair<int, double>>& g) {
    double d = 0.0;
    for (int q = 0; q < kStencilWidth; ++q) {
      d += w_last[q] * x(s_last + q);
      g.emplace_back(s_last + q, w_last[q] / K);
    }
    g.emplace_back(last, -mu_minus / K);
    return (d - mu_minus * (x(last) - K)) / K;
  }});
  prob.constraints.push_back({[=](const Eigen::VectorXd& x, std::vector<std::pair<int, double>>& g) {
    g.emplace_back(mid, 1.0 / K);
    return (x(mid) - K / 2.0) / K;
  }});

  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = K / (1.0 + std::exp(-kappa * xi[i]));
  const auto sol = newton_solve(prob, x, grid.max_newton, grid.newton_tol);

  FrontProfile f;
  f.kind = FrontKind::ScalarU;
  f.c = s;
  f.scalar = eq;
  f.xi = xi;
  f.phi.assign(sol.x.data(), sol.x.data() + n);
  f.dphi = derivative(f.phi, h);
  f.residual_norm = sol.residual;
  f.newton_iterations = sol.iterations;
  for (int i = 0; i < n; ++i) {
    const bool resolved = f.phi[i] > 1e-12 && K - f.phi[i] > 1e-12;
    const double floor = resolved ? 0.0 : -1e-12;
    if (!(f.dphi[i] > floor) || !(f.phi[i] > -1e-12 && f.phi[i] < K + 1e-12)) {
      std::ostringstream msg;
      msg << "scalar front not monotone in (0,K) at xi=" << xi[i];
      fail(ErrorKind::MonotonicityLost, msg.str());
    }
  }
  return f;
}

double scalar_min_speed(const ModelParams& model, ScalarWhich which) {
  model.validate();
  if (which == ScalarWhich::U_eq) return 2.0 * std::sqrt(1.0 - model.k1);
  return 2.0 * std::sqrt(model.r * (1.0 - model.k2) * model.d);
}

FrontProfile solve_scalar_front(const ModelParams& model, ScalarWhich which, double s,
                                const GridSpec& grid) {
  model.validate();
  if (!model.weak_competition()) fail(ErrorKind::InvalidArgument, "scalar fronts require 0 < k1, k2 < 1");
  ScalarEquation eq;
  if (which == ScalarWhich::U_eq) {
    eq = {1.0, 1.0, 1.0 - model.k1};
  } else {
    eq = {model.d, model.r, 1.0 - model.k2};
  }
  const double smin = scalar_min_speed(model, which);
  if (s < smin * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "speed " << s << " below " << smin;
    fail(ErrorKind::SubminimalSpeed, msg.str());
  }
  FrontProfile f = solve_scalar_kpp(eq, s, grid);
  f.kind = which == ScalarWhich::U_eq ? FrontKind::ScalarU : FrontKind::ScalarV;
  f.model = model;
  return f;
}

FrontProfile reflect(const FrontProfile& front) {
  FrontProfile r = front;
  auto rev = [](std::vector<double>& v) { std::reverse(v.begin(), v.end()); };
  for (auto& x : r.xi) x = -x;
  rev(r.xi);
  rev(r.phi);
  rev(r.psi);
  rev(r.dphi);
  rev(r.dpsi);
  for (auto& d : r.dphi) d = -d;
  for (auto& d : r.dpsi) d = -d;
  r.orientation = -front.orientation;
  return r;
}

MidpointCheck midpoint_residual(const FrontProfile& f) {
  const int n = static_cast<int>(f.size());
  constexpr int kNodes = 8;
  MidpointCheck out;
  for (int i = 0; i + 1 < n; ++i) {
    const int s0 = std::clamp(i - kNodes / 2 + 1, 0, n - kNodes);
    const double z = 0.5 * (f.xi[i] + f.xi[i + 1]);
    const auto a = lagrange_jet(z, &f.xi[s0], &f.phi[s0], kNodes);
    double res = 0.0;
    const double drift = f.orientation * f.c;
    if (f.is_system()) {
      const auto b = lagrange_jet(z, &f.xi[s0], &f.psi[s0], kNodes);
      const auto& p = f.model;
      const double r1 = a.d2 - drift * a.d1 + a.value * (1.0 - a.value - p.k1 * b.value);
      const double r2 = p.d * b.d2 - drift * b.d1 + p.r * b.value * (1.0 - b.value - p.k2 * a.value);
      res = std::max(std::abs(r1), std::abs(r2));
    } else {
      const auto& e = f.scalar;
      res = std::abs(e.D * a.d2 - drift * a.d1 + e.R * a.value * (e.K - a.value));
    }
    if (res > out.max_residual) {
      out.max_residual = res;
      out.worst_xi = z;
    }
  }
  return out;
}

BoundaryCheck boundary_errors(const FrontProfile& f) {
  const std::size_t lo = f.orientation > 0 ? 0 : f.size() - 1;
  const std::size_t hi = f.orientation > 0 ? f.size() - 1 : 0;
  BoundaryCheck b;
  b.left_error = std::abs(f.phi[lo]);
  b.right_error = std::abs(f.phi[hi] - f.phi_limit());
  if (f.is_system()) {
    b.left_error = std::max(b.left_error, std::abs(f.psi[lo]));
    b.right_error = std::max(b.right_error, std::abs(f.psi[hi] - f.psi_limit()));
  }
  return b;
}

double min_slope(const FrontProfile& f) {
  double m = std::numeric_limits<double>::infinity();
  for (double d : f.dphi) m = std::min(m, f.orientation * d);
  for (double d : f.dpsi) m = std::min(m, f.orientation * d);
  return m;
}

std::string front_to_csv(const FrontProfile& f) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# c=" << f.c << "\n# kind=" << to_string(f.kind) << "\n# residual_norm=" << f.residual_norm
      << "\n";
  out << "xi,phi,psi,dphi,dpsi\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << f.xi[i] << ',' << f.phi[i] << ',';
    if (f.is_system()) out << f.psi[i];
    out << ',' << f.dphi[i] << ',';
    if (f.is_system()) out << f.dpsi[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace lvfront
