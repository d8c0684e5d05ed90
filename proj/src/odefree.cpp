#include "lvfront/odefree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "lvfront/errors.hpp"

namespace lvfront {
namespace {

using State = std::array<double, 2>;

struct Field {
  double k1, k2, r;

  void operator()(const State& x, State& dx, double /*t*/) const {
    dx[0] = x[0] * (1.0 - x[0] - k1 * x[1]);
    dx[1] = r * x[1] * (1.0 - x[1] - k2 * x[0]);
  }

  // Same field for (log p, log q); gives relative accuracy as p, q -> 0.
  void log_rhs(const State& x, State& dx) const {
    const double p = std::exp(x[0]), q = std::exp(x[1]);
    dx[0] = 1.0 - p - k1 * q;
    dx[1] = r * (1.0 - q - k2 * p);
  }

  // Second time derivatives along the flow.
  State second(double p, double q, double dp, double dq) const {
    return {(1.0 - 2.0 * p - k1 * q) * dp - k1 * p * dq,
            -r * k2 * q * dp + r * (1.0 - 2.0 * q - k2 * p) * dq};
  }
};

// Quintic Hermite on [0, 1] given values, first and second derivatives
// (derivatives already scaled by the interval length).
double quintic(double s, double y0, double d0, double s0, double y1, double d1, double s1) {
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const double h3 = 0.5 * (s3 - 2 * s4 + s5);
  const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double h5 = 10 * s3 - 15 * s4 + 6 * s5;
  return h0 * y0 + h1 * d0 + h2 * s0 + h3 * s1 + h4 * d1 + h5 * y1;
}

double log_logistic(double K, double beta, double rate, double t) {
  const double z = rate * t + std::log(beta);
  return z < 0 ? std::log(K) + z - std::log1p(std::exp(z)) : std::log(K) - std::log1p(std::exp(-z));
}

// Record value >= bound (lower) or value <= bound (upper) in log space.
void record(EnvelopeCheck& c, double t, double log_value, double log_bound, bool lower, double tol) {
  const double margin = lower ? log_value - log_bound : log_bound - log_value;
  if (c.points == 0 || margin < c.worst_margin) c.worst_margin = margin;
  ++c.points;
  if (margin < -tol) {
    if (c.violations == 0) c.first_violation_t = t;
    ++c.violations;
  }
}

}  // namespace

double logistic_envelope(double K, double beta, double rate, double t) {
  return std::exp(log_logistic(K, beta, rate, t));
}

DiffusionFreeOrbit::Point DiffusionFreeOrbit::at(double time) const {
  const double h = dt();
  if (!(time >= t.front() - 1e-12 * h && time <= t.back() + 1e-12 * h)) {
    std::ostringstream msg;
    msg << "orbit evaluated at t = " << time << " outside [" << t.front() << ", " << t.back() << "]";
    fail(ErrorKind::DomainExceeded, msg.str());
  }
  const Field f{model.k1, model.k2, model.r};
  const auto last = static_cast<std::ptrdiff_t>(t.size()) - 2;
  const auto i = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor((time - t.front()) / h)), 0, last);
  const double s = (time - t[i]) / h;
  State d0, d1;
  f({p[i], q[i]}, d0, 0.0);
  f({p[i + 1], q[i + 1]}, d1, 0.0);
  const State a0 = f.second(p[i], q[i], d0[0], d0[1]);
  const State a1 = f.second(p[i + 1], q[i + 1], d1[0], d1[1]);
  Point out;
  out.p = quintic(s, p[i], h * d0[0], h * h * a0[0], p[i + 1], h * d1[0], h * h * a1[0]);
  out.q = quintic(s, q[i], h * d0[1], h * h * a0[1], q[i + 1], h * d1[1], h * h * a1[1]);
  State dx;
  f({out.p, out.q}, dx, 0.0);
  out.dp = dx[0];
  out.dq = dx[1];
  return out;
}

DiffusionFreeOrbit solve_diffusion_free(const ModelParams& model, double theta1, double theta2, double T,
                                        double tol, double grid_step) {
  namespace ode = boost::numeric::odeint;
  model.validate();
  if (!model.weak_competition())
    fail(ErrorKind::InvalidArgument, "diffusion-free orbit requires 0 < k1, k2 < 1");
  if (!(T > 0) || !(tol > 0) || !(grid_step > 0) || grid_step > T)
    fail(ErrorKind::InvalidArgument, "T, tol and grid_step must be positive with grid_step <= T");
  const double us = model.u_star(), vs = model.v_star();
  if (!(theta1 > 0 && theta1 < us && theta2 > 0 && theta2 < vs)) {
    std::ostringstream msg;
    msg << "initial data (" << theta1 << ", " << theta2 << ") not in (0, " << us << ") x (0, " << vs << ")";
    fail(ErrorKind::InitialDataOutOfBox, msg.str());
  }

  DiffusionFreeOrbit o;
  o.model = model;
  o.theta1 = theta1;
  o.theta2 = theta2;
  o.tol = tol;
  const int half = static_cast<int>(std::ceil(T / grid_step));
  const double h = T / half;
  o.T = T;
  o.beta_hat1 = theta1 / (us - theta1);
  o.beta_hat2 = theta2 / (us - theta2);
  o.beta_hat2_corrected = theta2 / (vs - theta2);

  const int n = 2 * half + 1;
  o.t.resize(n);
  o.p.resize(n);
  o.q.resize(n);
  for (int i = 0; i < n; ++i) o.t[i] = (i - half) * h;
  o.t[half] = 0.0;

  const Field field{model.k1, model.k2, model.r};
  auto run = [&](int direction) {
    std::vector<double> times;
    for (int k = 0; k <= half; ++k) times.push_back(direction * k * h);
    State x{std::log(theta1), std::log(theta2)};
    int k = 0;
    auto observe = [&](const State& ls, double time) {
      const State s{std::exp(ls[0]), std::exp(ls[1])};
      if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || s[0] > 2 || s[1] > 2) {
        std::ostringstream msg;
        msg << "diffusion-free orbit left the bounded region at t = " << time;
        fail(ErrorKind::Blowup, msg.str());
      }
      const int idx = half + direction * k++;
      o.p[idx] = s[0];
      o.q[idx] = s[1];
    };
    auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>());
    auto rhs = [&](const State& y, State& dy, double) { field.log_rhs(y, dy); };
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), direction * 0.1 * h, observe);
  };
  run(+1);
  run(-1);

  // Same 100 tol slack as the envelope certification.
  const double slack = 100.0 * tol;
  for (int i = 0; i < n; ++i) {
    if (!(o.p[i] > 0 && o.q[i] > 0 && o.p[i] < us * (1 + slack) && o.q[i] < vs * (1 + slack))) o.in_box = false;
    if (i > 0 && (o.p[i] < o.p[i - 1] * (1 - slack) || o.q[i] < o.q[i - 1] * (1 - slack))) o.monotone = false;
  }
  return o;
}

EnvelopeReport certify_logistic_envelope(const DiffusionFreeOrbit& o) {
  const double us = o.model.u_star(), vs = o.model.v_star();
  const double ltol = 100.0 * o.tol;
  EnvelopeReport rep;
  rep.printed_p_lower.name = "p >= u* logistic (beta_hat1)";
  rep.printed_q_lower.name = "q >= v* logistic (printed beta_hat2)";
  rep.printed_q_lower_corrected.name = "q >= v* logistic (corrected beta_hat2)";
  rep.p_upper.name = "p <= u*";
  rep.q_upper.name = "q <= v*";
  rep.certified_p.name = "p vs u* logistic, lower for t >= 0, upper for t <= 0";
  rep.certified_q.name = "q vs r v* logistic, lower for t >= 0, upper for t <= 0";

  const std::size_t n = o.t.size();
  const std::size_t zero = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = o.t[i];
    const double lp = std::log(o.p[i]), lq = std::log(o.q[i]);
    record(rep.printed_p_lower, t, lp, log_logistic(us, o.beta_hat1, us, t), true, ltol);
    if (o.beta_hat2 > 0)
      record(rep.printed_q_lower, t, lq, log_logistic(vs, o.beta_hat2, vs, t), true, ltol);
    else
      ++rep.printed_q_lower.violations;  // theta2 >= u*: the printed constant is not positive
    record(rep.printed_q_lower_corrected, t, lq, log_logistic(vs, o.beta_hat2_corrected, vs, t), true, ltol);
    record(rep.p_upper, t, lp, std::log(us), false, ltol);
    record(rep.q_upper, t, lq, std::log(vs), false, ltol);
  }
  rep.printed_claim_holds = rep.printed_p_lower.holds() && rep.printed_q_lower.holds() &&
                            rep.p_upper.holds() && rep.q_upper.holds();

  // Walk outward from t = 0 in both directions; the comparison argument needs
  // the hypothesis on the whole interval between 0 and t.
  for (int dir : {+1, -1}) {
    bool p_ok = true, q_ok = true;
    for (std::size_t k = 0;; ++k) {
      const auto i = static_cast<std::ptrdiff_t>(zero) + dir * static_cast<std::ptrdiff_t>(k);
      if (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) break;
      if (dir < 0 && k == 0) continue;
      const double t = o.t[i];
      p_ok = p_ok && o.q[i] <= vs;
      q_ok = q_ok && o.p[i] <= us;
      const bool lower = dir > 0;
      if (p_ok)
        record(rep.certified_p, t, std::log(o.p[i]), log_logistic(us, o.beta_hat1, us, t), lower, ltol);
      else
        ++rep.exempt_points;
      if (q_ok)
        record(rep.certified_q, t, std::log(o.q[i]),
               log_logistic(vs, o.beta_hat2_corrected, o.model.r * vs, t), lower, ltol);
      else
        ++rep.exempt_points;
    }
  }
  rep.backward_constant = std::max(o.p.front(), o.q.front()) * std::exp(std::min(us, vs) * o.T);

  for (const EnvelopeCheck* c : {&rep.certified_p, &rep.certified_q}) {
    if (!c->holds()) {
      std::ostringstream msg;
      msg << std::setprecision(17) << c->name << " violated at t = " << c->first_violation_t
          << " (log margin " << c->worst_margin << ")";
      fail(ErrorKind::EnvelopeViolated, msg.str());
    }
  }
  return rep;
}

std::string orbit_to_csv(const DiffusionFreeOrbit& o) {
  const double us = o.model.u_star(), vs = o.model.v_star();
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# theta1=" << o.theta1 << "\n# theta2=" << o.theta2 << "\n";
  out << "t,p1,q1,lower_env_p,lower_env_q\n";
  for (std::size_t i = 0; i < o.t.size(); ++i) {
    out << o.t[i] << ',' << o.p[i] << ',' << o.q[i] << ',' << logistic_envelope(us, o.beta_hat1, us, o.t[i])
        << ',' << logistic_envelope(vs, o.beta_hat2_corrected, vs, o.t[i]) << '\n';
  }
  return out.str();
}

}  // namespace lvfront
