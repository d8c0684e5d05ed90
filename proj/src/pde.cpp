#include "lvfront/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lvfront/errors.hpp"

namespace lvfront {
namespace {

// Tridiagonal system a x[i-1] + b x[i] + c x[i+1] = d. For odd n the
// elimination runs from both ends and meets in the middle row, so a mirrored
// system yields the mirrored solution bit for bit.
void solve_tridiagonal(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c,
                       const std::vector<double>& d, std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  x.resize(n);
  if (n == 1) {
    x[0] = d[0] / b[0];
    return;
  }
  std::vector<double> cp(n), dp(n);
  if (n % 2 == 0) {
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for (int i = 1; i < n; ++i) {
      const double den = b[i] - a[i] * cp[i - 1];
      cp[i] = i + 1 < n ? c[i] / den : 0.0;
      dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    }
    x[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
    return;
  }
  const int m = n / 2;
  cp[0] = c[0] / b[0];
  dp[0] = d[0] / b[0];
  for (int i = 1; i < m; ++i) {
    const double den = b[i] - a[i] * cp[i - 1];
    cp[i] = c[i] / den;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
  }
  // from the right: x[i] = dp[i] - cp[i] x[i-1]
  cp[n - 1] = a[n - 1] / b[n - 1];
  dp[n - 1] = d[n - 1] / b[n - 1];
  for (int i = n - 2; i > m; --i) {
    const double den = b[i] - c[i] * cp[i + 1];
    cp[i] = a[i] / den;
    dp[i] = (d[i] - c[i] * dp[i + 1]) / den;
  }
  const double den = b[m] - (a[m] * cp[m - 1] + c[m] * cp[m + 1]);
  x[m] = (d[m] - (a[m] * dp[m - 1] + c[m] * dp[m + 1])) / den;
  for (int i = m - 1; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
  for (int i = m + 1; i < n; ++i) x[i] = dp[i] - cp[i] * x[i - 1];
}

// Discrete Laplacian with reflecting ends; the neighbour sum is formed first
// so that mirrored data gives mirrored results.
double laplacian(const std::vector<double>& y, int i, double inv_dx2) {
  const int n = static_cast<int>(y.size());
  if (i == 0) return 2.0 * (y[1] - y[0]) * inv_dx2;
  if (i == n - 1) return 2.0 * (y[n - 2] - y[n - 1]) * inv_dx2;
  return ((y[i - 1] + y[i + 1]) - 2.0 * y[i]) * inv_dx2;
}

bool in_box(const FieldState& s) {
  for (std::size_t i = 0; i < s.u.size(); ++i)
    if (!(s.u[i] >= 0.0 && s.u[i] <= 1.0 && s.v[i] >= 0.0 && s.v[i] <= 1.0)) return false;
  return true;
}

using Reaction = std::vector<double>;

// Reaction plus forcing at the state's own time.
void reaction(const FieldState& s, const ModelParams& m, const StepExtras& ex, Reaction& ru, Reaction& rv) {
  const std::size_t n = s.u.size();
  ru.resize(n);
  rv.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = s.u[i], v = s.v[i];
    ru[i] = u * (1.0 - u - m.k1 * v);
    rv[i] = m.r * v * (1.0 - v - m.k2 * u);
  }
  if (ex.forcing) {
    std::vector<double> fu, fv;
    (*ex.forcing)(s.time, s.x, fu, fv);
    for (std::size_t i = 0; i < n; ++i) {
      ru[i] += fu[i];
      rv[i] += fv[i];
    }
  }
}

FieldState implicit_solve(const FieldState& s, const ModelParams& m, const SchemeConfig& cfg, double dt,
                          const StepExtras& ex, const Reaction& ru, const Reaction& rv) {
  const int n = static_cast<int>(s.x.size());
  const double dx = s.x[1] - s.x[0];
  const double inv_dx2 = 1.0 / (dx * dx);
  const double th = cfg.theta;

  FieldState out;
  out.x = s.x;
  out.time = s.time + dt;
  std::vector<double> a(n), b(n), c(n), rhs(n);
  for (int comp = 0; comp < 2; ++comp) {
    const auto& y = comp == 0 ? s.u : s.v;
    const auto& react = comp == 0 ? ru : rv;
    const double D = comp == 0 ? 1.0 : m.d;
    const double lam = D * dt * inv_dx2;
    for (int i = 0; i < n; ++i) {
      rhs[i] = y[i] + dt * react[i] + (1.0 - th) * D * dt * laplacian(y, i, inv_dx2);
      a[i] = -th * lam;
      b[i] = 1.0 + 2.0 * th * lam;
      c[i] = -th * lam;
    }
    c[0] = -2.0 * th * lam;
    a[n - 1] = -2.0 * th * lam;
    a[0] = c[n - 1] = 0.0;
    if (cfg.boundary == Boundary::DirichletFromPair) {
      if (!ex.pair) fail(ErrorKind::InvalidArgument, "DirichletFromPair needs a super-sub pair");
      for (int i : {0, n - 1}) {
        const auto pv = ex.pair->values(s.x[i], out.time);
        a[i] = c[i] = 0.0;
        b[i] = 1.0;
        rhs[i] = 0.5 * (comp == 0 ? pv.u_super + pv.u_sub : pv.v_super + pv.v_sub);
      }
    }
    solve_tridiagonal(a, b, c, rhs, comp == 0 ? out.u : out.v);
  }
  return out;
}

FieldState raw_step(const FieldState& s, const ModelParams& m, const SchemeConfig& cfg, double dt,
                    const StepExtras& ex) {
  Reaction ru, rv;
  reaction(s, m, ex, ru, rv);
  FieldState pred = implicit_solve(s, m, cfg, dt, ex, ru, rv);
  if (!cfg.heun_reaction) return pred;
  Reaction pu, pv;
  reaction(pred, m, ex, pu, pv);
  for (std::size_t i = 0; i < ru.size(); ++i) {
    ru[i] = 0.5 * (ru[i] + pu[i]);
    rv[i] = 0.5 * (rv[i] + pv[i]);
  }
  return implicit_solve(s, m, cfg, dt, ex, ru, rv);
}

FieldState guarded_step(const FieldState& s, const ModelParams& m, const SchemeConfig& cfg, double dt,
                        const StepExtras& ex) {
  if (dt < cfg.dt_floor) {
    std::ostringstream msg;
    msg << "time step " << dt << " below floor " << cfg.dt_floor << " at t = " << s.time
        << " (state leaves the invariant box)";
    fail(ErrorKind::StepRejectedFloor, msg.str());
  }
  FieldState next = raw_step(s, m, cfg, dt, ex);
  if (!cfg.check_box || ex.forcing || in_box(next)) return next;
  const FieldState half = guarded_step(s, m, cfg, 0.5 * dt, ex);
  return guarded_step(half, m, cfg, 0.5 * dt, ex);
}

}  // namespace

std::string to_string(Boundary b) {
  return b == Boundary::NeumannZero ? "NeumannZero" : "DirichletFromPair";
}

void SchemeConfig::validate() const {
  if (!(x_half_length > 0)) fail(ErrorKind::InvalidArgument, "x_half_length must be positive");
  if (nx < 3) fail(ErrorKind::InvalidArgument, "nx must be at least 3");
  if (!(dt > 0)) fail(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(t_start < t_end)) fail(ErrorKind::InvalidArgument, "t_start must be below t_end");
  if (!(theta >= 0.5 && theta <= 1.0)) fail(ErrorKind::InvalidArgument, "theta must lie in [0.5, 1]");
  if (!(snapshot_interval > 0)) fail(ErrorKind::InvalidArgument, "snapshot_interval must be positive");
}

std::vector<double> SchemeConfig::grid() const {
  std::vector<double> x(nx);
  const double h = dx();
  if (nx % 2 == 1) {
    const int m = nx / 2;
    for (int i = 0; i < nx; ++i) x[i] = (i - m) * h;
  } else {
    for (int i = 0; i < nx; ++i) x[i] = -x_half_length + i * h;
  }
  return x;
}

FieldState step(const FieldState& state, const ModelParams& model, const SchemeConfig& config,
                const StepExtras& extras) {
  return guarded_step(state, model, config, config.dt, extras);
}

std::vector<FieldState> simulate(const FieldState& initial, const ModelParams& model, const SchemeConfig& cfg,
                                 const StepExtras& extras) {
  cfg.validate();
  model.validate();
  if (initial.x.size() != initial.u.size() || initial.x.size() != initial.v.size() || initial.x.size() < 3)
    fail(ErrorKind::InvalidArgument, "initial state arrays must have equal length >= 3");
  const long steps = std::lround((cfg.t_end - cfg.t_start) / cfg.dt);
  std::vector<long> marks;
  if (!cfg.snapshot_times.empty()) {
    for (double t : cfg.snapshot_times) marks.push_back(std::lround((t - cfg.t_start) / cfg.dt));
  } else {
    const long every = std::max(1L, std::lround(cfg.snapshot_interval / cfg.dt));
    for (long k = every; k < steps; k += every) marks.push_back(k);
  }
  std::sort(marks.begin(), marks.end());

  std::vector<FieldState> out;
  FieldState s = initial;
  s.time = cfg.t_start;
  const bool first_marked = cfg.snapshot_times.empty() || (!marks.empty() && marks.front() == 0);
  if (first_marked) out.push_back(s);
  std::size_t next = 0;
  while (next < marks.size() && marks[next] <= 0) ++next;
  for (long k = 1; k <= steps; ++k) {
    s = step(s, model, cfg, extras);
    s.time = cfg.t_start + static_cast<double>(k) * cfg.dt;
    bool record = k == steps && cfg.snapshot_times.empty();
    while (next < marks.size() && marks[next] == k) {
      record = true;
      ++next;
    }
    if (record) out.push_back(s);
  }
  return out;
}

FieldState reflect(const FieldState& s) {
  FieldState r = s;
  std::reverse(r.u.begin(), r.u.end());
  std::reverse(r.v.begin(), r.v.end());
  return r;
}

SandwichCertificate check_sandwich(const std::vector<FieldState>& snaps, const SuperSubPair& pair,
                                   const SchemeConfig& cfg, double epsilon) {
  SandwichCertificate cert;
  const double dx = cfg.dx();
  cert.epsilon = epsilon >= 0 ? epsilon : 5.0 * (dx * dx + cfg.dt);
  const double inf = std::numeric_limits<double>::infinity();
  cert.u_lower.margin = cert.u_upper.margin = cert.v_lower.margin = cert.v_upper.margin = inf;
  auto upd = [](SandwichMargin& w, double margin, double x, double t) {
    if (margin < w.margin) w = {margin, x, t};
  };
  for (const auto& s : snaps) {
    double worst = inf;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const auto p = pair.values(s.x[i], s.time);
      const double m1 = s.u[i] - p.u_sub, m2 = p.u_super - s.u[i];
      const double m3 = s.v[i] - p.v_sub, m4 = p.v_super - s.v[i];
      upd(cert.u_lower, m1, s.x[i], s.time);
      upd(cert.u_upper, m2, s.x[i], s.time);
      upd(cert.v_lower, m3, s.x[i], s.time);
      upd(cert.v_upper, m4, s.x[i], s.time);
      const double mn = std::min({m1, m2, m3, m4});
      worst = std::min(worst, mn);
      if (mn < -cert.epsilon) ++cert.violations;
    }
    cert.times.push_back(s.time);
    cert.worst_margin_by_time.push_back(worst);
    ++cert.snapshots;
  }
  cert.pass = cert.violations == 0;
  return cert;
}

SandwichCertificate comparison_harness(const SuperSubPair& pair, const ModelParams& model, const SchemeConfig& cfg,
                                       bool throw_on_violation, std::vector<FieldState>* snapshots_out) {
  cfg.validate();
  const auto& d = pair.domain;
  if (cfg.x_half_length > std::min(-d.x_lo, d.x_hi) || cfg.t_start < d.t_lo || cfg.t_end > d.t_hi)
    fail(ErrorKind::DomainExceeded, "simulation window is not covered by the pair domain");
  FieldState init;
  init.x = cfg.grid();
  init.time = cfg.t_start;
  std::vector<double> us, vs;
  pair.sample(init.x, cfg.t_start, us, vs, init.u, init.v);
  StepExtras ex;
  ex.pair = &pair;
  auto snaps = simulate(init, model, cfg, ex);
  auto cert = check_sandwich(snaps, pair, cfg);
  if (snapshots_out) *snapshots_out = std::move(snaps);
  if (!cert.pass && throw_on_violation) {
    const SandwichMargin* all[] = {&cert.u_lower, &cert.u_upper, &cert.v_lower, &cert.v_upper};
    const char* names[] = {"u >= u_sub", "u <= u_super", "v >= v_sub", "v <= v_super"};
    int w = 0;
    for (int k = 1; k < 4; ++k)
      if (all[k]->margin < all[w]->margin) w = k;
    std::ostringstream msg;
    msg << names[w] << " violated at x = " << all[w]->x << ", t = " << all[w]->t << " by " << -all[w]->margin
        << " (epsilon " << cert.epsilon << ")";
    fail(ErrorKind::SandwichViolated, msg.str());
  }
  return cert;
}

DerivativeBounds derivative_bound_probe(const std::vector<FieldState>& sim, const ModelParams& m,
                                        bool throw_on_growth) {
  DerivativeBounds out;
  if (sim.empty()) fail(ErrorKind::InvalidArgument, "empty simulation");
  const double t0 = sim.front().time;
  std::vector<double> norms;
  for (const auto& s : sim) {
    if (s.time <= t0 + 1.0) continue;
    const int n = static_cast<int>(s.x.size());
    const double dx = s.x[1] - s.x[0];
    const double inv_dx2 = 1.0 / (dx * dx);
    double nt_u = 0, nt_v = 0, nx_u = 0, nx_v = 0, nxx_u = 0, nxx_v = 0;
    for (int i = 0; i < n; ++i) {
      const double lu = laplacian(s.u, i, inv_dx2), lv = laplacian(s.v, i, inv_dx2);
      const double u = s.u[i], v = s.v[i];
      nt_u = std::max(nt_u, std::abs(lu + u * (1 - u - m.k1 * v)));
      nt_v = std::max(nt_v, std::abs(m.d * lv + m.r * v * (1 - v - m.k2 * u)));
      nxx_u = std::max(nxx_u, std::abs(lu));
      nxx_v = std::max(nxx_v, std::abs(lv));
      if (i > 0 && i + 1 < n) {
        nx_u = std::max(nx_u, std::abs(s.u[i + 1] - s.u[i - 1]) / (2 * dx));
        nx_v = std::max(nx_v, std::abs(s.v[i + 1] - s.v[i - 1]) / (2 * dx));
      }
    }
    out.max_dt_u = std::max(out.max_dt_u, nt_u);
    out.max_dt_v = std::max(out.max_dt_v, nt_v);
    out.max_dx_u = std::max(out.max_dx_u, nx_u);
    out.max_dx_v = std::max(out.max_dx_v, nx_v);
    out.max_dxx_u = std::max(out.max_dxx_u, nxx_u);
    out.max_dxx_v = std::max(out.max_dxx_v, nxx_v);
    norms.push_back(std::max({nt_u, nt_v, nx_u, nx_v, nxx_u, nxx_v}));
  }
  out.snapshots_probed = norms.size();
  if (norms.size() < 2) fail(ErrorKind::InvalidArgument, "probe needs at least two snapshots after t_start + 1");
  const std::size_t half = norms.size() / 2;
  out.early_max = *std::max_element(norms.begin(), norms.begin() + half);
  out.late_max = *std::max_element(norms.begin() + half, norms.end());
  out.bounded = out.late_max <= 1.5 * out.early_max + 1e-12;
  if (!out.bounded && throw_on_growth) {
    std::ostringstream msg;
    msg << "derivative norms grow: later max " << out.late_max << " > 1.5 x earlier max " << out.early_max;
    fail(ErrorKind::UnboundedGrowth, msg.str());
  }
  return out;
}

double Manufactured::u(double x, double t) const {
  return amplitude * std::exp(-t) * std::cos(std::numbers::pi * x / L) + model.u_star();
}

double Manufactured::v(double x, double t) const {
  return amplitude * std::exp(-t) * std::cos(std::numbers::pi * x / L) + model.v_star();
}

Forcing Manufactured::forcing() const {
  const Manufactured self = *this;
  return [self](double t, const std::vector<double>& x, std::vector<double>& fu, std::vector<double>& fv) {
    const auto& m = self.model;
    const double k = std::numbers::pi / self.L;
    fu.resize(x.size());
    fv.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = self.amplitude * std::exp(-t) * std::cos(k * x[i]);
      const double u = w + m.u_star(), v = w + m.v_star();
      // u_t - u_xx = -w + k^2 w
      fu[i] = (-w + k * k * w) - u * (1 - u - m.k1 * v);
      fv[i] = (-w + m.d * k * k * w) - m.r * v * (1 - v - m.k2 * u);
    }
  };
}

namespace {

double manufactured_error(const Manufactured& mf, int nx, double dt, double t_end, bool second_order = false) {
  SchemeConfig cfg;
  cfg.x_half_length = mf.L;
  cfg.nx = nx;
  cfg.dt = dt;
  cfg.t_start = 0.0;
  cfg.t_end = t_end;
  cfg.check_box = false;
  cfg.snapshot_interval = t_end;
  if (second_order) {
    cfg.theta = 0.5;
    cfg.heun_reaction = true;
  }
  FieldState s;
  s.x = cfg.grid();
  s.u.resize(nx);
  s.v.resize(nx);
  for (int i = 0; i < nx; ++i) {
    s.u[i] = mf.u(s.x[i], 0.0);
    s.v[i] = mf.v(s.x[i], 0.0);
  }
  const Forcing f = mf.forcing();
  StepExtras ex;
  ex.forcing = &f;
  const auto snaps = simulate(s, mf.model, cfg, ex);
  const auto& last = snaps.back();
  double err = 0.0;
  for (int i = 0; i < nx; ++i) {
    err = std::max(err, std::abs(last.u[i] - mf.u(last.x[i], last.time)));
    err = std::max(err, std::abs(last.v[i] - mf.v(last.x[i], last.time)));
  }
  return err;
}

void fill_orders(ConvergenceStudy& s) {
  for (std::size_t k = 1; k < s.errors.size(); ++k)
    s.orders.push_back(std::log2(s.errors[k - 1] / s.errors[k]) / std::log2(s.steps[k - 1] / s.steps[k]));
}

}  // namespace

ConvergenceStudy manufactured_space_study(const ModelParams& model, int levels) {
  Manufactured mf{model, 5.0, 1.0};
  ConvergenceStudy s;
  int nx = 41;
  for (int l = 0; l < levels; ++l, nx = 2 * nx - 1) {
    const double dx = 2 * mf.L / (nx - 1);
    const double t_end = 0.5;
    const long steps = std::lround(std::ceil(t_end / (0.1 * dx * dx)));
    s.steps.push_back(dx);
    s.errors.push_back(manufactured_error(mf, nx, t_end / steps, t_end));
  }
  fill_orders(s);
  return s;
}

ConvergenceStudy manufactured_time_study(const ModelParams& model, int levels, bool second_order) {
  Manufactured mf{model, 5.0, 1.0};
  ConvergenceStudy s;
  double dt = 0.02;
  for (int l = 0; l < levels; ++l, dt /= 2) {
    s.steps.push_back(dt);
    s.errors.push_back(manufactured_error(mf, 801, dt, 0.5, second_order));
  }
  fill_orders(s);
  return s;
}

}  // namespace lvfront
