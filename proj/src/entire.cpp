#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "lvfront/errors.hpp"
#include "lvfront/pde.hpp"

namespace lvfront {
namespace {

struct StartRun {
  std::vector<FieldState> sub;
  std::vector<FieldState> super;
  SandwichCertificate sandwich;
  double symmetry = 0.0;
  double sup_v_sub = 0.0;
  double sup_v_super = 0.0;
};

double symmetry_error(const std::vector<FieldState>& snaps) {
  double worst = 0.0;
  for (const auto& s : snaps) {
    const std::size_t n = s.u.size();
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(s.u[i] - s.u[n - 1 - i]));
      worst = std::max(worst, std::abs(s.v[i] - s.v[n - 1 - i]));
    }
  }
  return worst;
}

double sup_gap(const std::vector<FieldState>& a, const std::vector<FieldState>& b) {
  double worst = 0.0;
  for (std::size_t s = 0; s < std::min(a.size(), b.size()); ++s)
    for (std::size_t i = 0; i < a[s].u.size(); ++i) {
      worst = std::max(worst, std::abs(a[s].u[i] - b[s].u[i]));
      worst = std::max(worst, std::abs(a[s].v[i] - b[s].v[i]));
    }
  return worst;
}

StartRun run_start(const SuperSubPair& pair, const ModelParams& model, SchemeConfig cfg, int n, bool super_start) {
  cfg.t_start = -static_cast<double>(n);
  StartRun r;
  FieldState init;
  init.x = cfg.grid();
  init.time = cfg.t_start;
  std::vector<double> u_sup, v_sup;
  pair.sample(init.x, cfg.t_start, u_sup, v_sup, init.u, init.v);
  r.sup_v_sub = *std::max_element(init.v.begin(), init.v.end());
  r.sup_v_super = *std::max_element(v_sup.begin(), v_sup.end());
  StepExtras ex;
  ex.pair = &pair;
  r.sub = simulate(init, model, cfg, ex);
  r.sandwich = check_sandwich(r.sub, pair, cfg);
  r.symmetry = symmetry_error(r.sub);
  if (super_start) {
    FieldState top = init;
    top.u = u_sup;
    top.v = v_sup;
    r.super = simulate(top, model, cfg, ex);
  }
  return r;
}

// Least-squares slope of log(y) against t; NaN unless every y is positive.
double log_slope(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  for (double v : y)
    if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += std::log(y[i]);
  }
  mt /= t.size();
  my /= t.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxx += (t[i] - mt) * (t[i] - mt);
    sxy += (t[i] - mt) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace

EntireApproximation entire_approximation(const SuperSubPair& pair, const ModelParams& model,
                                         const SchemeConfig& config, const std::vector<int>& n_list,
                                         const EntireOptions& opt) {
  if (n_list.size() < 2) fail(ErrorKind::InvalidArgument, "entire approximation needs at least two start times");
  for (std::size_t k = 0; k < n_list.size(); ++k)
    if (n_list[k] <= 0 || (k > 0 && n_list[k] <= n_list[k - 1]))
      fail(ErrorKind::InvalidArgument, "n_list must be positive and increasing");
  const double w0 = std::isnan(opt.window_start) ? -0.5 * n_list.front() : opt.window_start;
  if (!(w0 >= -n_list.front() && w0 < opt.window_end))
    fail(ErrorKind::InvalidArgument, "observation window must start after -n_min and before its end");
  if (-n_list.back() < pair.domain.t_lo || opt.window_end > pair.domain.t_hi)
    fail(ErrorKind::DomainExceeded, "start times or window end outside the pair domain");

  EntireApproximation out;
  out.n_list = n_list;
  for (int n : n_list) out.start_times.push_back(-static_cast<double>(n));
  const long count = std::lround(std::floor((opt.window_end - w0) / opt.window_interval + 1e-9));
  for (long k = 0; k <= count; ++k) out.window_times.push_back(w0 + k * opt.window_interval);

  SchemeConfig cfg = config;
  cfg.t_end = opt.window_end;
  cfg.snapshot_times = out.window_times;
  out.config = cfg;

  std::vector<std::future<StartRun>> jobs;
  for (int n : n_list)
    jobs.push_back(std::async(std::launch::async, run_start, std::cref(pair), std::cref(model), cfg, n,
                              opt.super_start));
  for (auto& j : jobs) {
    StartRun r = j.get();
    out.snapshots.push_back(std::move(r.sub));
    if (opt.super_start) out.super_snapshots.push_back(std::move(r.super));
    out.sandwiches.push_back(std::move(r.sandwich));
    out.symmetry_errors.push_back(r.symmetry);
    out.sup_v_at_start.push_back(r.sup_v_sub);
    out.sup_v_at_start_super.push_back(r.sup_v_super);
  }
  for (std::size_t k = 0; k + 1 < n_list.size(); ++k) out.cauchy_gaps.push_back(sup_gap(out.snapshots[k], out.snapshots[k + 1]));
  for (std::size_t k = 0; k + 1 < out.cauchy_gaps.size(); ++k)
    out.gap_ratios.push_back(out.cauchy_gaps[k] / out.cauchy_gaps[k + 1]);
  if (opt.super_start) out.super_sub_limit_gap = sup_gap(out.snapshots.back(), out.super_snapshots.back());

  if (opt.throw_on_failure) {
    for (std::size_t k = 0; k + 1 < out.cauchy_gaps.size(); ++k) {
      const double a = out.cauchy_gaps[k], b = out.cauchy_gaps[k + 1];
      if (b > a && b > opt.gap_floor) {
        std::ostringstream msg;
        msg << "gap between starts -" << n_list[k + 1] << " and -" << n_list[k + 2] << " (" << b
            << ") exceeds the previous gap (" << a << ")";
        fail(ErrorKind::NoConvergenceTrend, msg.str());
      }
    }
  }
  return out;
}

bool EntirePropertiesReport::all_passed() const {
  return symmetry.passed && backward_decay.passed && edge_decay.passed && final_bounds_u.passed &&
         final_bounds_v.passed;
}

EntirePropertiesReport check_entire_properties(const EntireApproximation& approx, const SuperSubPair& pair,
                                               const ModelParams& model, const PropertyTolerances& tol,
                                               bool throw_on_failure) {
  if (approx.snapshots.empty()) fail(ErrorKind::InvalidArgument, "empty entire approximation");
  (void)pair;
  EntirePropertiesReport rep;
  const double us = model.u_star(), vs = model.v_star();
  std::ostringstream det;

  // (i)
  rep.symmetry.index = 1;
  rep.symmetry.measured = *std::max_element(approx.symmetry_errors.begin(), approx.symmetry_errors.end());
  rep.symmetry.threshold = tol.symmetry;
  rep.symmetry.passed = rep.symmetry.measured <= tol.symmetry;
  rep.symmetry.detail = "max |w(x,t) - w(-x,t)| over all starts and window snapshots";

  // (ii)
  rep.backward_decay.index = 2;
  rep.envelope_rate = vs;
  rep.fitted_rate_sub = log_slope(approx.start_times, approx.sup_v_at_start);
  rep.fitted_rate_super = log_slope(approx.start_times, approx.sup_v_at_start_super);
  bool trend = true;
  for (std::size_t k = 1; k < approx.sup_v_at_start.size(); ++k)
    trend = trend && approx.sup_v_at_start[k] <= approx.sup_v_at_start[k - 1];
  const bool rate_ok = std::isfinite(rep.fitted_rate_sub) &&
                       std::abs(rep.fitted_rate_sub - vs) <= tol.rate_relative * vs;
  rep.backward_decay.measured = rep.fitted_rate_sub;
  rep.backward_decay.threshold = tol.rate_relative;
  rep.backward_decay.passed = trend && rate_ok;
  det.str("");
  det << "sup_x v(., -n) non-increasing: " << (trend ? "yes" : "no") << "; fitted rate "
      << rep.fitted_rate_sub << " vs envelope rate " << vs;
  if (!std::isfinite(rep.fitted_rate_sub)) det << " (sup_x v vanishes at a start time: no rate to fit)";
  det << "; super-start rate " << rep.fitted_rate_super;
  rep.backward_decay.detail = det.str();

  // (iii): edges of the largest-n run over the window
  rep.edge_decay.index = 3;
  double edge = 0.0;
  for (const auto& s : approx.snapshots.back()) edge = std::max({edge, std::abs(s.v.front()), std::abs(s.v.back())});
  rep.edge_decay.measured = edge;
  rep.edge_decay.threshold = tol.edge;
  rep.edge_decay.passed = edge <= tol.edge;
  rep.edge_decay.detail = "max |v| at x = +-L over the observation window (edge proxy for x -> +-inf)";

  // (iv)
  const auto& last = approx.snapshots.back().back();
  const double su = *std::max_element(last.u.begin(), last.u.end());
  const double sv = *std::max_element(last.v.begin(), last.v.end());
  rep.final_bounds_u.index = 4;
  rep.final_bounds_u.measured = su;
  rep.final_bounds_u.threshold = tol.delta;
  rep.final_bounds_u.passed = su >= us - tol.delta && su <= 1.0 + tol.epsilon;
  det.str("");
  det << "sup_x u at t = " << last.time << " in [" << us - tol.delta << ", " << 1.0 + tol.epsilon << "]";
  rep.final_bounds_u.detail = det.str();
  rep.final_bounds_v.index = 4;
  rep.final_bounds_v.measured = sv;
  rep.final_bounds_v.threshold = tol.delta;
  rep.final_bounds_v.passed = sv >= -tol.epsilon && sv <= vs + tol.delta;
  det.str("");
  det << "sup_x v at t = " << last.time << " in [" << -tol.epsilon << ", " << vs + tol.delta << "]";
  rep.final_bounds_v.detail = det.str();

  if (throw_on_failure) {
    for (const PropertyResult* p :
         {&rep.symmetry, &rep.backward_decay, &rep.edge_decay, &rep.final_bounds_u, &rep.final_bounds_v}) {
      if (!p->passed) {
        std::ostringstream msg;
        msg << "property (" << p->index << ") failed: measured " << p->measured << "; " << p->detail;
        fail(ErrorKind::PropertyFailed, msg.str());
      }
    }
  }
  return rep;
}

}  // namespace lvfront
