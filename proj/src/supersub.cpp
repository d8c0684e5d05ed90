#include "lvfront/supersub.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "lvfront/errors.hpp"

namespace lvfront {
namespace {

struct Quintic {
  double value, slope;
};

// Quintic Hermite on one cell; d* and s* are first and second derivatives.
Quintic quintic(double s, double h, double y0, double d0, double s0, double y1, double d1, double s1) {
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  d0 *= h;
  d1 *= h;
  s0 *= h * h;
  s1 *= h * h;
  const double v = (1 - 10 * s3 + 15 * s4 - 6 * s5) * y0 + (s - 6 * s3 + 8 * s4 - 3 * s5) * d0 +
                   0.5 * (s2 - 3 * s3 + 3 * s4 - s5) * s0 + 0.5 * (s3 - 2 * s4 + s5) * s1 +
                   (-4 * s3 + 7 * s4 - 3 * s5) * d1 + (10 * s3 - 15 * s4 + 6 * s5) * y1;
  const double g = (-30 * s2 + 60 * s3 - 30 * s4) * y0 + (1 - 18 * s2 + 32 * s3 - 15 * s4) * d0 +
                   0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4) * s0 + 0.5 * (3 * s2 - 8 * s3 + 5 * s4) * s1 +
                   (-12 * s2 + 28 * s3 - 15 * s4) * d1 + (30 * s2 - 60 * s3 + 30 * s4) * y1;
  return {v, g / h};
}

struct Rates {
  double phi, psi;
};

Rates predicted_left(const FrontProfile& f) {
  if (f.is_system()) {
    const auto ev = origin_eigenvalues({f.model, f.c});
    return {ev.lambda4, ev.lambda6};
  }
  const auto& e = f.scalar;
  const double disc = std::sqrt(std::max(f.c * f.c - 4.0 * e.D * e.R * e.K, 0.0));
  return {2.0 * e.R * e.K / (f.c + disc), 0.0};
}

double predicted_right(const FrontProfile& f) {
  if (f.is_system()) return coexistence_eigenvalues({f.model, f.c}).lambda2;
  const auto& e = f.scalar;
  return (f.c - std::sqrt(f.c * f.c + 4.0 * e.D * e.R * e.K)) / (2.0 * e.D);
}

void check_domain(const SpaceTimeDomain& d, double x, double t) {
  if (x < d.x_lo || x > d.x_hi || t < d.t_lo || t > d.t_hi) {
    std::ostringstream msg;
    msg << "(x, t) = (" << x << ", " << t << ") outside the pair domain [" << d.x_lo << ", " << d.x_hi
        << "] x [" << d.t_lo << ", " << d.t_hi << "]";
    fail(ErrorKind::DomainExceeded, msg.str());
  }
}

double tie_gap(double best, double second) {
  const double scale = std::max({std::abs(best), std::abs(second), 1e-300});
  return std::abs(best - second) / scale;
}

// Picks the max (or min) of up to three branch jets and records the gap to
// the runner-up.
ComponentJet select(const ComponentJet* branches, const bool* active, int count, bool take_max) {
  ComponentJet best;
  double second = 0.0;
  bool have_best = false, have_second = false;
  std::array<BranchJet, 3> all{};
  int n = 0;
  for (int b = 0; b < count; ++b) {
    if (!active[b]) continue;
    const double v = branches[b].value;
    all[n++] = {v, branches[b].dt, branches[b].dxx, branches[b].branch};
    if (!have_best || (take_max ? v > best.value : v < best.value)) {
      if (have_best) {
        second = best.value;
        have_second = true;
      }
      best = branches[b];
      have_best = true;
    } else if (!have_second || (take_max ? v > second : v < second)) {
      second = v;
      have_second = true;
    }
  }
  best.tie_gap = have_second ? tie_gap(best.value, second) : std::numeric_limits<double>::infinity();
  best.candidates = all;
  best.n_candidates = n;
  return best;
}

ComponentJet constant(double v) {
  ComponentJet c;
  c.value = v;
  return c;
}

}  // namespace

ProfileEvaluator::ProfileEvaluator(FrontProfile front, double extrapolation_tol)
    : front_(std::move(front)), tol_(extrapolation_tol) {
  if (front_.orientation < 0) fail(ErrorKind::InvalidArgument, "profile evaluator needs an increasing front");
  if (front_.size() < 8) fail(ErrorKind::InvalidArgument, "profile has too few points");
  const Rates pl = predicted_left(front_);
  const double pr = predicted_right(front_);
  left_phi_ = pl.phi;
  left_psi_ = pl.psi;
  right_ = pr;
  try {
    const TailFit t = fit_tail_rate(front_, TailSide::MinusInfinity);
    left_phi_ = t.fitted_rate;
    dleft_phi_ = t.fitted_rate - pl.phi;
    if (front_.is_system()) {
      left_psi_ = t.fitted_rate_psi;
      dleft_psi_ = t.fitted_rate_psi - pl.psi;
    }
  } catch (const Error&) {
    // Window too narrow or poor fit: keep the predicted rates and take the
    // mismatch with the end slope as the uncertainty.
    dleft_phi_ = front_.dphi.front() / front_.phi.front() - pl.phi;
    if (front_.is_system()) dleft_psi_ = front_.dpsi.front() / front_.psi.front() - pl.psi;
  }
  try {
    const TailFit t = fit_tail_rate(front_, TailSide::PlusInfinity);
    right_ = t.fitted_rate;
    dright_ = t.fitted_rate - pr;
  } catch (const Error&) {
    const double gap = front_.phi_limit() - front_.phi.back();
    dright_ = gap > 0 ? -front_.dphi.back() / gap - pr : 0.0;
  }
}

double ProfileEvaluator::extrapolation_uncertainty(double xi) const {
  const auto& f = front_;
  if (xi < f.xi.front()) {
    const double dx = xi - f.xi.front();
    double u = f.phi.front() * std::abs(std::expm1(dleft_phi_ * dx));
    if (f.is_system()) u = std::max(u, f.psi.front() * std::abs(std::expm1(dleft_psi_ * dx)));
    return u;
  }
  if (xi > f.xi.back()) {
    const double dx = xi - f.xi.back();
    double gap = f.phi_limit() - f.phi.back();
    if (f.is_system()) gap = std::max(gap, f.psi_limit() - f.psi.back());
    return std::abs(gap) * std::abs(std::expm1(dright_ * dx));
  }
  return 0.0;
}

ProfileEvaluator::Jet ProfileEvaluator::operator()(double xi) const {
  const auto& f = front_;
  const bool sys = f.is_system();
  Jet j;
  if (xi < f.xi.front() || xi > f.xi.back()) {
    const double unc = extrapolation_uncertainty(xi);
    if (unc > tol_) {
      std::ostringstream msg;
      msg << "profile extrapolation at xi = " << xi << " has uncertainty " << unc << " > " << tol_;
      fail(ErrorKind::DomainExceeded, msg.str());
    }
    if (xi < f.xi.front()) {
      const double dx = xi - f.xi.front();
      j.phi = f.phi.front() * std::exp(left_phi_ * dx);
      j.dphi = left_phi_ * j.phi;
      if (sys) {
        j.psi = f.psi.front() * std::exp(left_psi_ * dx);
        j.dpsi = left_psi_ * j.psi;
      }
    } else {
      const double e = std::exp(right_ * (xi - f.xi.back()));
      const double gu = f.phi_limit() - f.phi.back();
      j.phi = f.phi_limit() - gu * e;
      j.dphi = -right_ * gu * e;
      if (sys) {
        const double gv = f.psi_limit() - f.psi.back();
        j.psi = f.psi_limit() - gv * e;
        j.dpsi = -right_ * gv * e;
      }
    }
    return j;
  }
  const double h = f.h();
  const auto last = static_cast<std::ptrdiff_t>(f.size()) - 2;
  const auto i = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor((xi - f.xi.front()) / h)), 0, last);
  const double s = (xi - f.xi[i]) / h;
  const auto a = quintic(s, h, f.phi[i], f.dphi[i], f.phi_second(i), f.phi[i + 1], f.dphi[i + 1],
                         f.phi_second(i + 1));
  j.phi = a.value;
  j.dphi = a.slope;
  if (sys) {
    const auto b = quintic(s, h, f.psi[i], f.dpsi[i], f.psi_second(i), f.psi[i + 1], f.dpsi[i + 1],
                           f.psi_second(i + 1));
    j.psi = b.value;
    j.dpsi = b.slope;
  }
  return j;
}

double ProfileEvaluator::phi_second(const Jet& j) const {
  const auto& f = front_;
  if (f.is_system()) return f.c * j.dphi - j.phi * (1.0 - j.phi - f.model.k1 * j.psi);
  const auto& e = f.scalar;
  return (f.c * j.dphi - e.R * j.phi * (e.K - j.phi)) / e.D;
}

double ProfileEvaluator::psi_second(const Jet& j) const {
  const auto& m = front_.model;
  return (front_.c * j.dpsi - m.r * j.psi * (1.0 - j.psi - m.k2 * j.phi)) / m.d;
}

std::string to_string(Family f) {
  return f == Family::FrontFamily ? "FrontFamily" : "ScalarKPPFamily";
}

std::string Selector::str() const {
  return std::to_string(i) + std::to_string(j) + std::to_string(m);
}

Selector Selector::parse(const std::string& s) {
  if (s.size() != 3 || s.find_first_not_of("01") != std::string::npos)
    fail(ErrorKind::InvalidArgument, "selector must be three digits 0/1, e.g. 110");
  return {s[0] - '0', s[1] - '0', s[2] - '0'};
}

std::vector<Selector> all_selectors() {
  std::vector<Selector> out;
  for (int k = 1; k < 8; ++k) out.push_back({(k >> 2) & 1, (k >> 1) & 1, k & 1});
  return out;
}

PairJets SuperSubPair::jets(double x, double t) const {
  check_domain(domain, x, t);
  PairJets p;
  if (family == Family::FrontFamily) {
    const double c = speed_u;
    const auto& ev = *front_u;
    const bool active[3] = {selector.i == 1, selector.j == 1, selector.m == 1};
    ComponentJet ub[3], vb[3];
    const double xis[2] = {x + c * t, -x + c * t};
    for (int b = 0; b < 2; ++b) {
      if (!active[b]) continue;
      const auto j = ev(xis[b]);
      ub[b] = {j.phi, c * j.dphi, ev.phi_second(j), b};
      vb[b] = {j.psi, c * j.dpsi, ev.psi_second(j), b};
    }
    if (active[2]) {
      const auto o = orbit->at(t);
      ub[2] = {o.p, o.dp, 0.0, 2};
      vb[2] = {o.q, o.dq, 0.0, 2};
    }
    p.u_super = constant(1.0);
    p.v_sub = constant(0.0);
    p.u_sub = select(ub, active, 3, true);
    p.v_super = select(vb, active, 3, false);
  } else {
    const bool active[2] = {true, true};
    ComponentJet ub[2], vb[2];
    for (int b = 0; b < 2; ++b) {
      const double sign = b == 0 ? 1.0 : -1.0;
      const auto ju = (*front_u)(sign * x + speed_u * t);
      ub[b] = {ju.phi, speed_u * ju.dphi, front_u->phi_second(ju), b};
      const auto jv = (*front_v)(sign * x + speed_v * t);
      vb[b] = {jv.phi, speed_v * jv.dphi, front_v->phi_second(jv), b};
    }
    p.u_super = constant(1.0);
    p.v_super = constant(1.0);
    p.u_sub = select(ub, active, 2, true);
    p.v_sub = select(vb, active, 2, true);
  }
  return p;
}

PairValues SuperSubPair::values(double x, double t) const {
  const auto j = jets(x, t);
  return {j.u_super.value, j.v_super.value, j.u_sub.value, j.v_sub.value};
}

void SuperSubPair::sample(const std::vector<double>& x, double t, std::vector<double>& u_super,
                          std::vector<double>& v_super, std::vector<double>& u_sub,
                          std::vector<double>& v_sub) const {
  const std::size_t n = x.size();
  u_super.resize(n);
  v_super.resize(n);
  u_sub.resize(n);
  v_sub.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto v = values(x[k], t);
    u_super[k] = v.u_super;
    v_super[k] = v.v_super;
    u_sub[k] = v.u_sub;
    v_sub[k] = v.v_sub;
  }
}

SuperSubPair build_front_family(const FrontProfile& front, std::shared_ptr<const DiffusionFreeOrbit> orbit,
                                Selector selector) {
  if (selector.i == 0 && selector.j == 0 && selector.m == 0)
    fail(ErrorKind::SelectorAllZero, "selector 000: at least one branch must be present");
  for (int s : {selector.i, selector.j, selector.m})
    if (s != 0 && s != 1) fail(ErrorKind::InvalidArgument, "selector digits must be 0 or 1");
  if (!front.is_system()) fail(ErrorKind::InvalidArgument, "front family needs a system front");
  if (selector.m == 1) {
    if (!orbit) fail(ErrorKind::InvalidArgument, "selector with m = 1 needs a diffusion-free orbit");
    const auto& a = front.model;
    const auto& b = orbit->model;
    if (a.k1 != b.k1 || a.k2 != b.k2 || a.r != b.r || a.d != b.d)
      fail(ErrorKind::InvalidArgument, "front and orbit come from different models");
  }
  SuperSubPair p;
  p.family = Family::FrontFamily;
  p.selector = selector;
  p.model = front.model;
  p.front_u = std::make_shared<const ProfileEvaluator>(front.orientation > 0 ? front : reflect(front));
  p.orbit = selector.m == 1 ? std::move(orbit) : nullptr;
  p.speed_u = p.speed_v = front.c;
  p.default_slack = 10.0 * front.residual_norm;
  p.domain = {-200.0, 200.0, -100.0, 100.0};
  if (p.orbit) {
    p.domain.t_lo = p.orbit->t.front();
    p.domain.t_hi = p.orbit->t.back();
  }
  return p;
}

SuperSubPair build_scalar_family(const FrontProfile& front_u, const FrontProfile& front_v) {
  if (front_u.kind != FrontKind::ScalarU || front_v.kind != FrontKind::ScalarV)
    fail(ErrorKind::InvalidArgument, "scalar family needs a ScalarU and a ScalarV front");
  const auto& a = front_u.model;
  const auto& b = front_v.model;
  if (a.k1 != b.k1 || a.k2 != b.k2 || a.r != b.r || a.d != b.d)
    fail(ErrorKind::InvalidArgument, "scalar fronts come from different models");
  const double su = scalar_min_speed(a, ScalarWhich::U_eq), sv = scalar_min_speed(a, ScalarWhich::V_eq);
  if (front_u.c < su - 1e-12 || front_v.c < sv - 1e-12) {
    std::ostringstream msg;
    msg << "scalar speeds (" << front_u.c << ", " << front_v.c << ") below minimal (" << su << ", " << sv << ")";
    fail(ErrorKind::SubminimalSpeed, msg.str());
  }
  SuperSubPair p;
  p.family = Family::ScalarKPPFamily;
  p.selector = {1, 1, 0};
  p.model = a;
  p.front_u = std::make_shared<const ProfileEvaluator>(front_u.orientation > 0 ? front_u : reflect(front_u));
  p.front_v = std::make_shared<const ProfileEvaluator>(front_v.orientation > 0 ? front_v : reflect(front_v));
  p.speed_u = front_u.c;
  p.speed_v = front_v.c;
  p.default_slack = 10.0 * std::max(front_u.residual_norm, front_v.residual_norm);
  p.domain = {-200.0, 200.0, -100.0, 100.0};
  return p;
}

namespace {

struct RowResult {
  WorstPoint super_u{std::numeric_limits<double>::infinity()}, super_v{std::numeric_limits<double>::infinity()};
  WorstPoint sub_u{-std::numeric_limits<double>::infinity()}, sub_v{-std::numeric_limits<double>::infinity()};
  std::size_t points = 0, ridge = 0, skipped = 0, ordering = 0;
};

void take_min(WorstPoint& w, const WorstPoint& c) {
  if (c.residual < w.residual) w = c;
}
void take_max(WorstPoint& w, const WorstPoint& c) {
  if (c.residual > w.residual) w = c;
}

enum class Check { Clean, Ridge, Skipped };

// Residual of one component on its active branch, or on every branch within
// the margin of it. Super residuals must be >= -slack, sub residuals <= slack.
template <class F>
Check check_component(const ComponentJet& j, bool super, double margin, double slack, double x, double t,
                      WorstPoint& worst, F residual) {
  if (j.tie_gap > margin) {
    const WorstPoint w{residual(j.value, j.dt, j.dxx), x, t};
    super ? take_min(worst, w) : take_max(worst, w);
    return Check::Clean;
  }
  WorstPoint local{super ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(), x, t};
  for (int k = 0; k < j.n_candidates; ++k) {
    const auto& c = j.candidates[k];
    if (tie_gap(j.value, c.value) > margin) continue;
    const WorstPoint w{residual(c.value, c.dt, c.dxx), x, t};
    super ? take_min(local, w) : take_max(local, w);
  }
  const bool ok = super ? local.residual >= -slack : local.residual <= slack;
  if (!ok) return Check::Skipped;
  super ? take_min(worst, local) : take_max(worst, local);
  return Check::Ridge;
}

RowResult scan_row(const SuperSubPair& pair, const Lattice& lat, double t, double margin, double slack) {
  RowResult r;
  const auto& m = pair.model;
  const double dx = lat.nx > 1 ? (lat.x_hi - lat.x_lo) / (lat.nx - 1) : 0.0;
  for (int k = 0; k < lat.nx; ++k) {
    const double x = lat.nx > 1 ? lat.x_lo + k * dx : lat.x_lo;
    const auto j = pair.jets(x, t);
    ++r.points;
    if (j.u_sub.value > j.u_super.value || j.v_sub.value > j.v_super.value) ++r.ordering;
    const double vs = j.v_sub.value, vS = j.v_super.value, us = j.u_sub.value, uS = j.u_super.value;
    const Check c[4] = {
        check_component(j.u_super, true, margin, slack, x, t, r.super_u,
                        [&](double u, double ut, double uxx) { return ut - uxx - u * (1 - u - m.k1 * vs); }),
        check_component(j.u_sub, false, margin, slack, x, t, r.sub_u,
                        [&](double u, double ut, double uxx) { return ut - uxx - u * (1 - u - m.k1 * vS); }),
        check_component(j.v_super, true, margin, slack, x, t, r.super_v,
                        [&](double v, double vt, double vxx) {
                          return vt - m.d * vxx - m.r * v * (1 - v - m.k2 * us);
                        }),
        check_component(j.v_sub, false, margin, slack, x, t, r.sub_v,
                        [&](double v, double vt, double vxx) {
                          return vt - m.d * vxx - m.r * v * (1 - v - m.k2 * uS);
                        }),
    };
    bool ridge = false, skipped = false;
    for (Check ck : c) {
      ridge = ridge || ck != Check::Clean;
      skipped = skipped || ck == Check::Skipped;
    }
    r.ridge += ridge;
    r.skipped += skipped;
  }
  return r;
}

}  // namespace

InequalityCertificate verify_inequalities(const SuperSubPair& pair, const Lattice& lat,
                                          const InequalityOptions& opt) {
  if (lat.nx < 1 || lat.nt < 1 || lat.x_hi < lat.x_lo || lat.t_hi < lat.t_lo)
    fail(ErrorKind::InvalidArgument, "lattice needs nx, nt >= 1 and ordered ranges");
  const auto& d = pair.domain;
  if (lat.x_lo < d.x_lo || lat.x_hi > d.x_hi || lat.t_lo < d.t_lo || lat.t_hi > d.t_hi)
    fail(ErrorKind::DomainExceeded, "lattice is not inside the pair domain");

  std::vector<double> times(lat.nt);
  for (int k = 0; k < lat.nt; ++k)
    times[k] = lat.nt > 1 ? lat.t_lo + k * (lat.t_hi - lat.t_lo) / (lat.nt - 1) : lat.t_lo;

  // Rows are split into contiguous blocks; results are reduced in row order.
  unsigned threads = opt.threads > 0 ? static_cast<unsigned>(opt.threads) : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(lat.nt));
  const double slack = opt.slack >= 0 ? opt.slack : pair.default_slack;
  std::vector<RowResult> rows(lat.nt);
  std::vector<std::future<void>> jobs;
  const int block = (lat.nt + static_cast<int>(threads) - 1) / static_cast<int>(threads);
  for (int start = 0; start < lat.nt; start += block) {
    const int stop = std::min(lat.nt, start + block);
    jobs.push_back(std::async(std::launch::async, [&, start, stop] {
      for (int k = start; k < stop; ++k) rows[k] = scan_row(pair, lat, times[k], opt.ridge_margin, slack);
    }));
  }
  for (auto& j : jobs) j.get();

  InequalityCertificate cert;
  cert.lattice = lat;
  cert.ridge_margin = opt.ridge_margin;
  cert.slack = slack;
  RowResult all;
  for (const auto& r : rows) {
    take_min(all.super_u, r.super_u);
    take_min(all.super_v, r.super_v);
    take_max(all.sub_u, r.sub_u);
    take_max(all.sub_v, r.sub_v);
    all.points += r.points;
    all.ridge += r.ridge;
    all.skipped += r.skipped;
    all.ordering += r.ordering;
  }
  // A component skipped at every point has no residual; report it as zero.
  auto finite_or_zero = [](WorstPoint w) {
    if (!std::isfinite(w.residual)) w.residual = 0.0;
    return w;
  };
  cert.worst_super_u = finite_or_zero(all.super_u);
  cert.worst_super_v = finite_or_zero(all.super_v);
  cert.worst_sub_u = finite_or_zero(all.sub_u);
  cert.worst_sub_v = finite_or_zero(all.sub_v);
  cert.points = all.points;
  cert.ridge_points = all.ridge;
  cert.ridge_points_skipped = all.skipped;
  cert.ordering_violations = all.ordering;
  cert.pass = cert.worst_super_u.residual >= -cert.slack && cert.worst_super_v.residual >= -cert.slack &&
              cert.worst_sub_u.residual <= cert.slack && cert.worst_sub_v.residual <= cert.slack &&
              cert.ordering_violations == 0;

  if (!cert.pass && opt.throw_on_violation) {
    std::ostringstream msg;
    msg.precision(6);
    auto line = [&](const char* name, const WorstPoint& w) {
      msg << " " << name << "=" << w.residual << " at (x=" << w.x << ", t=" << w.t << ");";
    };
    msg << "coupled inequalities fail (slack " << cert.slack << "):";
    line("super_u", cert.worst_super_u);
    line("super_v", cert.worst_super_v);
    line("sub_u", cert.worst_sub_u);
    line("sub_v", cert.worst_sub_v);
    msg << " ordering violations " << cert.ordering_violations;
    fail(ErrorKind::InequalityViolated, msg.str());
  }
  return cert;
}

}  // namespace lvfront
