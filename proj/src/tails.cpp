#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "lvfront/errors.hpp"
#include "lvfront/front.hpp"

namespace lvfront {
namespace {

constexpr std::size_t kMinWindowPoints = 8;

struct Sample {
  std::vector<double> xi;
  std::vector<double> dist;
};

// Points on one side of 0 where the selector distance lies in [lo, hi].
Sample window_sample(const std::vector<double>& xi, const std::vector<double>& dist,
                     const std::vector<double>& select, TailSide side, double lo, double hi) {
  Sample s;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const bool on_side = side == TailSide::PlusInfinity ? xi[i] >= 0.0 : xi[i] <= 0.0;
    if (on_side && select[i] >= lo && select[i] <= hi && dist[i] > 0.0) {
      s.xi.push_back(xi[i]);
      s.dist.push_back(dist[i]);
    }
  }
  return s;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double ssr = 0.0;  // in log space
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    f.ssr += e * e;
  }
  f.r_squared = syy > 0.0 ? 1.0 - f.ssr / syy : 1.0;
  return f;
}

struct SecularFit {
  double rate = 0.0;
  double A = 0.0;
  double B = 0.0;
  double ssr = 0.0;  // relative residuals, comparable to log-space ssr
  double r_squared = 0.0;
};

// For fixed rate the model (A + B xi) e^{rate xi} is linear in A, B; solve it
// with relative weights and return the residual sum of squares.
double secular_ssr(const Sample& s, double rate, double* A, double* B) {
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < s.xi.size(); ++i) {
    const double w = std::exp(rate * s.xi[i]) / s.dist[i];
    const double a1 = w, a2 = w * s.xi[i];
    s11 += a1 * a1;
    s12 += a1 * a2;
    s22 += a2 * a2;
    b1 += a1;
    b2 += a2;
  }
  const double det = s11 * s22 - s12 * s12;
  const double a = (b1 * s22 - b2 * s12) / det;
  const double b = (s11 * b2 - s12 * b1) / det;
  double ssr = 0.0;
  for (std::size_t i = 0; i < s.xi.size(); ++i) {
    const double w = std::exp(rate * s.xi[i]) / s.dist[i];
    const double e = (a + b * s.xi[i]) * w - 1.0;
    ssr += e * e;
  }
  if (A) *A = a;
  if (B) *B = b;
  return ssr;
}

SecularFit fit_secular(const Sample& s, double guess) {
  const double lo = guess > 0.0 ? 0.5 * guess : 1.5 * guess;
  const double hi = guess > 0.0 ? 1.5 * guess : 0.5 * guess;
  const auto best = boost::math::tools::brent_find_minima(
      [&](double rate) { return secular_ssr(s, rate, nullptr, nullptr); }, lo, hi, 52);
  SecularFit f;
  f.rate = best.first;
  f.ssr = secular_ssr(s, f.rate, &f.A, &f.B);
  double my = 0.0;
  for (double d : s.dist) my += std::log(d);
  my /= static_cast<double>(s.dist.size());
  double syy = 0.0, ssr_log = 0.0;
  for (std::size_t i = 0; i < s.xi.size(); ++i) {
    const double y = std::log(s.dist[i]);
    const double m = f.A + f.B * s.xi[i];
    const double model = m > 0.0 ? std::log(m) + f.rate * s.xi[i]
                                  : -std::numeric_limits<double>::infinity();
    syy += (y - my) * (y - my);
    ssr_log += (y - model) * (y - model);
  }
  f.r_squared = syy > 0.0 ? 1.0 - ssr_log / syy : 1.0;
  return f;
}

struct ComponentFit {
  double rate = 0.0;
  double log_linear_rate = 0.0;
  double r_squared = 0.0;
  bool secular = false;
  double xi_lo = 0.0, xi_hi = 0.0;
};

// The secular model is preferred when it explains the curvature of
// log(distance) (100x smaller residual) and its linear factor changes by more
// than 5% across the window.
ComponentFit fit_component(const Sample& s, bool try_secular) {
  std::vector<double> logd(s.dist.size());
  for (std::size_t i = 0; i < s.dist.size(); ++i) logd[i] = std::log(s.dist[i]);
  const LineFit line = fit_line(s.xi, logd);
  ComponentFit c;
  c.rate = c.log_linear_rate = line.slope;
  c.r_squared = line.r_squared;
  c.xi_lo = s.xi.front();
  c.xi_hi = s.xi.back();
  if (!try_secular || line.ssr < 1e-20) return c;
  const SecularFit sec = fit_secular(s, line.slope);
  const double span = c.xi_hi - c.xi_lo;
  const double mid = 0.5 * (c.xi_lo + c.xi_hi);
  const double factor_mid = std::abs(sec.A + sec.B * mid);
  const bool significant = factor_mid > 0.0 && std::abs(sec.B) * span > 0.05 * factor_mid;
  if (sec.ssr < 1e-2 * line.ssr && significant) {
    c.rate = sec.rate;
    c.r_squared = sec.r_squared;
    c.secular = true;
  }
  return c;
}

double nearest(double x, double a, double b) {
  return std::abs(x - a) <= std::abs(x - b) ? a : b;
}

double rel_err(double fitted, double predicted) {
  return std::abs(fitted - predicted) / std::abs(predicted);
}

// Roots of D l^2 - s l + R K = 0 (both positive at s above the minimal speed).
std::pair<double, double> scalar_origin_rates(const ScalarEquation& eq, double s) {
  const double disc = std::sqrt(std::max(s * s - 4.0 * eq.D * eq.R * eq.K, 0.0));
  return {2.0 * eq.R * eq.K / (s + disc), (s + disc) / (2.0 * eq.D)};
}

double scalar_decay_rate(const ScalarEquation& eq, double s) {
  return (s - std::sqrt(s * s + 4.0 * eq.D * eq.R * eq.K)) / (2.0 * eq.D);
}

Sample sample_or_throw(const std::vector<double>& xi, const std::vector<double>& dist,
                       const std::vector<double>& select, TailSide side, double lo, double hi,
                       const char* name) {
  Sample s = window_sample(xi, dist, select, side, lo, hi);
  if (s.xi.size() < kMinWindowPoints) {
    std::ostringstream msg;
    msg << "only " << s.xi.size() << " grid points of " << name << " in the distance window ["
        << lo << ", " << hi << "] on the " << to_string(side) << " side";
    fail(ErrorKind::WindowTooNarrow, msg.str());
  }
  return s;
}

}  // namespace

TailFit fit_tail_rate(const FrontProfile& input, TailSide side, std::pair<double, double> window) {
  const auto [lo, hi] = window;
  if (!(lo > 0.0 && lo < hi && hi < 0.2))
    fail(ErrorKind::InvalidArgument, "tail window must satisfy 0 < lo < hi < 0.2");
  const FrontProfile f = input.orientation > 0 ? input : reflect(input);
  const std::size_t n = f.size();

  TailFit out;
  out.side = side;
  out.window = window;

  const double uphi = f.phi_limit();
  std::vector<double> dphi(n);
  for (std::size_t i = 0; i < n; ++i)
    dphi[i] = side == TailSide::PlusInfinity ? uphi - f.phi[i] : f.phi[i];
  const bool minus = side == TailSide::MinusInfinity;
  // Relative distances. At the origin side of a system front the window is
  // chosen on the larger of the two, since the faster-decaying component is
  // only in its linear regime once the other one is small as well.
  std::vector<double> rel(n);
  std::vector<double> dpsi;
  if (f.is_system()) {
    const double vpsi = f.psi_limit();
    dpsi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      dpsi[i] = side == TailSide::PlusInfinity ? vpsi - f.psi[i] : f.psi[i];
      rel[i] = minus ? std::max(dphi[i] / uphi, dpsi[i] / vpsi) : dphi[i] / uphi;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) rel[i] = dphi[i] / uphi;
  }
  const Sample sphi = sample_or_throw(f.xi, dphi, rel, side, lo, hi, "phi");
  const ComponentFit cphi = fit_component(sphi, minus);
  out.fitted_rate = cphi.rate;
  out.log_linear_rate = cphi.log_linear_rate;
  out.secular_detected = cphi.secular;
  out.r_squared = cphi.r_squared;
  out.xi_window = {cphi.xi_lo, cphi.xi_hi};

  if (f.is_system()) {
    const WaveParams wave{f.model, f.c};
    std::vector<double> rel_psi(n);
    for (std::size_t i = 0; i < n; ++i) rel_psi[i] = minus ? rel[i] : dpsi[i] / f.psi_limit();
    const Sample spsi = sample_or_throw(f.xi, dpsi, rel_psi, side, lo, hi, "psi");
    const ComponentFit cpsi = fit_component(spsi, minus);
    out.fitted_rate_psi = cpsi.rate;
    out.secular_detected = out.secular_detected || cpsi.secular;
    out.r_squared = std::min(out.r_squared, cpsi.r_squared);
    out.xi_window = {std::min(cphi.xi_lo, cpsi.xi_lo), std::max(cphi.xi_hi, cpsi.xi_hi)};
    if (minus) {
      const auto ev = origin_eigenvalues(wave);
      out.predicted_rate = nearest(out.fitted_rate, ev.lambda3, ev.lambda4);
      out.predicted_rate_psi = nearest(out.fitted_rate_psi, ev.lambda5, ev.lambda6);
    } else {
      const auto spec = coexistence_eigenvalues(wave);
      out.predicted_rate = out.predicted_rate_psi = spec.lambda2;
      out.predicted_ratio = spec.tau2;
      // Pointwise ratio over the phi window, taken at its median.
      std::vector<double> ratios;
      for (std::size_t i = 0; i < n; ++i)
        if (f.xi[i] >= sphi.xi.front() && f.xi[i] <= sphi.xi.back() && dphi[i] > 0.0)
          ratios.push_back(dpsi[i] / dphi[i]);
      std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
      out.amplitude_ratio = ratios[ratios.size() / 2];
      out.ratio_error = rel_err(out.amplitude_ratio, out.predicted_ratio);
    }
    out.relative_error = std::max(rel_err(out.fitted_rate, out.predicted_rate),
                                  rel_err(out.fitted_rate_psi, out.predicted_rate_psi));
  } else {
    if (minus) {
      const auto [slow, fast] = scalar_origin_rates(f.scalar, f.c);
      out.predicted_rate = nearest(out.fitted_rate, slow, fast);
    } else {
      out.predicted_rate = scalar_decay_rate(f.scalar, f.c);
    }
    out.relative_error = rel_err(out.fitted_rate, out.predicted_rate);
  }

  if (out.r_squared < 0.999) {
    std::ostringstream msg;
    msg << "tail regression R^2 = " << out.r_squared << " below 0.999";
    fail(ErrorKind::PoorFit, msg.str());
  }
  return out;
}

TailConstants estimate_tail_constants(const FrontProfile& input) {
  const FrontProfile f = input.orientation > 0 ? input : reflect(input);
  const bool sys = f.is_system();
  const std::size_t n = f.size();

  // Rates: kappa is the slower of the two decay rates at the origin side,
  // which keeps both upper envelopes bounded; the rising side uses the
  // strong-stable rate (or the scalar decay rate).
  TailConstants k;
  if (sys) {
    const WaveParams wave{f.model, f.c};
    const auto ev = origin_eigenvalues(wave);
    k.kappa = std::min(ev.lambda4, ev.lambda6);
    k.lambda2 = coexistence_eigenvalues(wave).lambda2;
  } else {
    k.kappa = scalar_origin_rates(f.scalar, f.c).first;
    k.lambda2 = scalar_decay_rate(f.scalar, f.c);
  }

  auto violated = [](const char* what, double xi) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " at xi = " << xi;
    fail(ErrorKind::BoundViolated, msg.str());
  };

  const double inf = std::numeric_limits<double>::infinity();
  k.M1 = k.M2 = k.M3 = k.M4 = 0.0;
  k.M1_bar = k.M2_bar = k.M3_bar = inf;
  const double us = f.phi_limit(), vs = f.psi_limit();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = f.xi[i];
    const int comps = sys ? 2 : 1;
    if (x <= 0.0) {
      const double e = std::exp(-k.kappa * x);
      for (int c = 0; c < comps; ++c) {
        const double val = c == 0 ? f.phi[i] : f.psi[i];
        const double der = c == 0 ? f.dphi[i] : f.dpsi[i];
        if (!(val > 0.0) || !(der > 0.0)) violated("non-positive value or slope on xi <= 0", x);
        k.M1 = std::max(k.M1, val / der);
        k.M1_bar = std::min(k.M1_bar, val / der);
        k.M2 = std::max({k.M2, val * e, der * e});
        k.M2_bar = std::min(k.M2_bar, val * e);
      }
    }
    if (x >= 0.0) {
      const double gap = sys ? std::max(us - f.phi[i], vs - f.psi[i]) : us - f.phi[i];
      if (!(gap > 0.0)) violated("limit reached on the grid (zero distance)", x);
      const double e = std::exp(-k.lambda2 * x);
      for (int c = 0; c < comps; ++c) {
        const double der = c == 0 ? f.dphi[i] : f.dpsi[i];
        if (!(der > 0.0)) violated("non-positive slope on xi >= 0", x);
        k.M3 = std::max(k.M3, der / gap);
        k.M3_bar = std::min(k.M3_bar, der / gap);
        k.M4 = std::max(k.M4, der * e);
      }
    }
  }

  // Explicit certification pass.
  for (std::size_t i = 0; i < n; ++i) {
    const double x = f.xi[i];
    const int comps = sys ? 2 : 1;
    for (int c = 0; c < comps; ++c) {
      const double val = c == 0 ? f.phi[i] : f.psi[i];
      const double der = c == 0 ? f.dphi[i] : f.dpsi[i];
      if (x <= 0.0) {
        const double env = std::exp(k.kappa * x);
        if (val / der > k.M1 || val / der < k.M1_bar) violated("ratio bound (value/slope)", x);
        if (val > k.M2 * env * (1 + 1e-14) || val < k.M2_bar * env * (1 - 1e-14))
          violated("exponential envelope", x);
        if (der > k.M2 * env * (1 + 1e-14)) violated("slope envelope", x);
        ++k.points_checked;
      }
      if (x >= 0.0) {
        const double gap = sys ? std::max(us - f.phi[i], vs - f.psi[i]) : us - f.phi[i];
        if (der / gap > k.M3 || der / gap < k.M3_bar) violated("ratio bound (slope/gap)", x);
        if (der > k.M4 * std::exp(k.lambda2 * x) * (1 + 1e-14)) violated("slope decay envelope", x);
        ++k.points_checked;
      }
    }
  }
  if (!(k.M1_bar <= k.M1 && k.M2_bar <= k.M2 && k.M3_bar <= k.M3 && k.M1_bar > 0 && k.M2_bar > 0 &&
        k.M3_bar > 0 && k.M4 > 0))
    fail(ErrorKind::BoundViolated, "tail constants are not positive and ordered");
  return k;
}

}  // namespace lvfront
