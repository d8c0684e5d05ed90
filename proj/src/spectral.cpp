#include "lvfront/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lvfront/errors.hpp"

namespace lvfront {

namespace {

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Newton polish of a real root of an ascending-coefficient polynomial. A
// step is kept only if it lowers |p|, which leaves near-double roots alone.
double polish_root(const std::vector<double>& coeffs, double x) {
  auto eval = [&](double t, double& dp) {
    double p = 0.0;
    dp = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
      dp = dp * t + p;
      p = p * t + coeffs[k];
    }
    return p;
  };
  double dp = 0.0;
  double p = eval(x, dp);
  for (int it = 0; it < 6 && p != 0.0 && dp != 0.0; ++it) {
    const double trial = x - p / dp;
    double dp_trial = 0.0;
    const double p_trial = eval(trial, dp_trial);
    if (!std::isfinite(trial) || std::abs(p_trial) >= std::abs(p)) break;
    x = trial;
    p = p_trial;
    dp = dp_trial;
  }
  return x;
}

double poly_eval(const std::array<double, 5>& a, double x) {
  return (((a[4] * x + a[3]) * x + a[2]) * x + a[1]) * x + a[0];
}

// Real roots of the quartic in ascending order; throws SignSplitViolation if
// any root has a significant imaginary part.
std::array<double, 4> real_quartic_roots(const std::array<double, 5>& a, const char* what) {
  std::vector<double> coeffs(a.begin(), a.end());
  auto roots = polynomial_roots(coeffs);
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    const auto z = roots[i];
    // A double real root comes back as a conjugate pair with imaginary part
    // of order sqrt(eps); accept that only when the partner is present.
    double limit = 1e-9 * (1.0 + std::abs(z));
    for (int j = 0; j < 4; ++j) {
      if (j != i && std::abs(roots[j] - std::conj(z)) <= 1e-12 * (1.0 + std::abs(z))) {
        limit = 1e-7 * (1.0 + std::abs(z));
      }
    }
    if (std::abs(z.imag()) > limit) {
      std::ostringstream msg;
      msg << what << ": complex root " << z.real() << "+" << z.imag() << "i";
      fail(ErrorKind::SignSplitViolation, msg.str());
    }
    out[i] = polish_root(coeffs, z.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXd null_space(const Eigen::Matrix4d& a, double tol) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < 4; ++i) {
    if (s(i) > tol) ++rank;
  }
  return svd.matrixV().rightCols(4 - rank);
}

// Orthonormal basis of the column span of a (4 x k) matrix.
Eigen::MatrixXd column_basis(const Eigen::MatrixXd& a, double tol) {
  if (a.cols() == 0) return Eigen::MatrixXd(4, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

}  // namespace

void WaveParams::validate() const {
  model.validate();
  if (!std::isfinite(c)) fail(ErrorKind::InvalidArgument, "wave speed must be finite");
  const double cm = c_min(model);
  if (c < cm - 1e-12) {
    std::ostringstream msg;
    msg << "c=" << c << " below c_min=" << cm;
    fail(ErrorKind::SubminimalSpeed, msg.str());
  }
}

double c_min(const ModelParams& model) { return 2.0 * std::max(1.0, std::sqrt(model.r * model.d)); }

LinearizationMatrix linearize(const WaveParams& wave, BasePoint at) {
  wave.model.validate();
  const auto& p = wave.model;
  const double c = wave.c;
  LinearizationMatrix m;
  m.base_point = at;
  auto& a = m.entries;
  a.setZero();
  a(0, 1) = 1.0;
  a(2, 3) = 1.0;
  a(1, 1) = c;
  a(3, 3) = c / p.d;
  if (at == BasePoint::OriginPoint) {
    a(1, 0) = -1.0;
    a(3, 2) = -p.r / p.d;
  } else {
    if (!p.weak_competition()) {
      fail(ErrorKind::InvalidArgument, "coexistence linearization requires weak competition");
    }
    const double us = p.u_star();
    const double vs = p.v_star();
    a(1, 0) = us;
    a(1, 2) = p.k1 * us;
    a(3, 0) = p.r / p.d * p.k2 * vs;
    a(3, 2) = p.r / p.d * vs;
  }
  return m;
}

OriginEigenvalues origin_eigenvalues(const WaveParams& wave) {
  wave.validate();
  const double c = wave.c;
  const double r = wave.model.r;
  const double d = wave.model.d;
  double disc_u = c * c - 4.0;
  double disc_v = c * c - 4.0 * r * d;
  // c >= c_min up to 1e-12 may leave a tiny negative discriminant.
  if (disc_u < 0.0) {
    if (disc_u < -1e-10) fail(ErrorKind::SubminimalSpeed, "c^2 < 4");
    disc_u = 0.0;
  }
  if (disc_v < 0.0) {
    if (disc_v < -1e-10 * std::max(1.0, r * d)) fail(ErrorKind::SubminimalSpeed, "c^2 < 4rd");
    disc_v = 0.0;
  }
  const double su = std::sqrt(disc_u);
  const double sv = std::sqrt(disc_v);
  OriginEigenvalues ev;
  ev.lambda3 = (c + su) / 2.0;
  // Smaller roots via the product form avoid cancellation.
  ev.lambda4 = 2.0 / (c + su);
  ev.lambda5 = (c + sv) / (2.0 * d);
  ev.lambda6 = 2.0 * r / (c + sv);
  return ev;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
  if (coeffs.size() < 2 || coeffs.back() == 0.0) {
    fail(ErrorKind::InvalidArgument, "polynomial must have positive degree and nonzero lead");
  }
  const int n = static_cast<int>(coeffs.size()) - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -coeffs[i] / coeffs[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "companion eigensolver failed");
  std::vector<std::complex<double>> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

std::array<double, 5> coexistence_quartic(const WaveParams& wave, double rho) {
  const auto& p = wave.model;
  const double c = wave.c;
  const double us = p.u_star();
  const double vs = p.v_star();
  const double rd = p.r / p.d;
  // (l^2 - c l - u*)(l^2 - (c/d) l - (r/d) v*) - rho k1 k2 (r/d) u* v*
  std::array<double, 5> a{};
  a[4] = 1.0;
  a[3] = -(c + c / p.d);
  a[2] = c * c / p.d - us - rd * vs;
  a[1] = c * rd * vs + c / p.d * us;
  a[0] = rd * us * vs - rho * p.k1 * p.k2 * rd * us * vs;
  return a;
}

CoexistenceSpectrum coexistence_eigenvalues(const WaveParams& wave) {
  wave.validate();
  const auto& p = wave.model;
  if (!p.weak_competition()) {
    fail(ErrorKind::InvalidArgument, "coexistence spectrum requires weak competition");
  }
  const auto a = coexistence_quartic(wave);
  const auto roots = real_quartic_roots(a, "coexistence quartic");
  const int negative = static_cast<int>(std::count_if(roots.begin(), roots.end(),
                                                      [](double x) { return x < 0.0; }));
  if (negative != 2 || !(roots[2] > 0.0)) {
    std::ostringstream msg;
    msg << "expected 2 negative + 2 positive roots, got " << roots[0] << ", " << roots[1] << ", "
        << roots[2] << ", " << roots[3];
    fail(ErrorKind::SignSplitViolation, msg.str());
  }
  const double us = p.u_star();
  CoexistenceSpectrum s;
  s.lambda2 = roots[0];
  s.lambda1 = roots[1];
  s.pos_small = roots[2];
  s.pos_large = roots[3];
  auto tau = [&](double l) { return (l * l - wave.c * l - us) / (p.k1 * us); };
  s.tau1 = tau(s.lambda1);
  s.tau2 = tau(s.lambda2);
  s.mu2 = (wave.c - std::sqrt(wave.c * wave.c + 4.0 * us)) / 2.0;
  for (double x : roots) {
    const double scale = std::max(1.0, std::pow(std::abs(x), 4.0));
    s.max_quartic_residual = std::max(s.max_quartic_residual, std::abs(poly_eval(a, x)) / scale);
  }
  s.eigvec1 << 1.0, s.lambda1, s.tau1, s.tau1 * s.lambda1;
  s.eigvec2 << 1.0, s.lambda2, s.tau2, s.tau2 * s.lambda2;
  return s;
}

std::array<double, 4> decoupled_roots(const WaveParams& wave) {
  const auto& p = wave.model;
  const double c = wave.c;
  const double us = p.u_star();
  const double vs = p.v_star();
  const double su = std::sqrt(c * c + 4.0 * us);
  const double sv = std::sqrt(c * c + 4.0 * p.d * p.r * vs);
  return {(c + su) / 2.0, (c - su) / 2.0, (c + sv) / (2.0 * p.d), (c - sv) / (2.0 * p.d)};
}

HomotopyReport homotopy_check(const WaveParams& wave, int rho_steps) {
  wave.validate();
  if (!wave.model.weak_competition()) {
    fail(ErrorKind::InvalidArgument, "homotopy check requires weak competition");
  }
  if (rho_steps < 2) fail(ErrorKind::InvalidArgument, "rho_steps must be at least 2");
  const auto& p = wave.model;
  HomotopyReport report;
  for (int i = 0; i < rho_steps; ++i) {
    const double rho = static_cast<double>(i) / (rho_steps - 1);
    HomotopyStep step;
    step.rho = rho;
    step.det = p.r / p.d * p.u_star() * p.v_star() * (1.0 - rho * p.k1 * p.k2);
    const auto a = coexistence_quartic(wave, rho);
    std::array<double, 4> roots{};
    try {
      roots = real_quartic_roots(a, "homotopy quartic");
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "rho=" << rho << ": " << e.what();
      fail(ErrorKind::HomotopyBreak, msg.str());
    }
    step.roots = roots;
    for (double x : roots) {
      if (x < 0.0) ++step.negative;
      if (x > 0.0) ++step.positive;
    }
    // F_rho(0) is the constant coefficient, equal to det(Lambda(rho)).
    if (!(step.det > 0.0) || !(a[0] > 0.0) || step.negative != 2 || step.positive != 2) {
      std::ostringstream msg;
      msg << "split lost at rho=" << rho << " (det=" << step.det << ", negative=" << step.negative
          << ")";
      fail(ErrorKind::HomotopyBreak, msg.str());
    }
    if (i == 0) {
      auto mu = decoupled_roots(wave);
      std::sort(mu.begin(), mu.end());
      for (int k = 0; k < 4; ++k) {
        report.max_rho0_mismatch =
            std::max(report.max_rho0_mismatch, std::abs(mu[k] - roots[k]) / std::max(1.0, std::abs(mu[k])));
      }
    }
    report.steps.push_back(step);
  }
  // Coincident decoupled roots (e.g. r = d = 1, k1 = k2) are only resolved to ~sqrt(eps).
  report.pass = report.max_rho0_mismatch < 1e-7;
  if (!report.pass) {
    fail(ErrorKind::HomotopyBreak, "rho=0 roots do not match the decoupled closed forms");
  }
  return report;
}

std::string to_string(MultiplicityCase tag) {
  switch (tag) {
    case MultiplicityCase::Simple: return "simple";
    case MultiplicityCase::Double34: return "double_34";
    case MultiplicityCase::Double56: return "double_56";
    case MultiplicityCase::Double35: return "double_35";
    case MultiplicityCase::Double36: return "double_36";
    case MultiplicityCase::Double45: return "double_45";
    case MultiplicityCase::Double46: return "double_46";
    case MultiplicityCase::Pair34_56: return "pair_34_56";
    case MultiplicityCase::Pair35_46: return "pair_35_46";
    case MultiplicityCase::Triple345: return "triple_345";
    case MultiplicityCase::Triple346: return "triple_346";
    case MultiplicityCase::Triple356: return "triple_356";
    case MultiplicityCase::Triple456: return "triple_456";
    case MultiplicityCase::Quadruple: return "quadruple";
  }
  return "?";
}

std::string to_string(TailSide side) {
  return side == TailSide::PlusInfinity ? "PlusInfinity" : "MinusInfinity";
}

namespace {

// Equivalence classes of {3,4,5,6} encoded as a bitmask of equal pairs.
enum Pair : unsigned { P34 = 1, P56 = 2, P35 = 4, P36 = 8, P45 = 16, P46 = 32 };

unsigned close_pairs(const OriginEigenvalues& ev, double tol) {
  unsigned m = 0;
  if (rel_close(ev.lambda3, ev.lambda4, tol)) m |= P34;
  if (rel_close(ev.lambda5, ev.lambda6, tol)) m |= P56;
  if (rel_close(ev.lambda3, ev.lambda5, tol)) m |= P35;
  if (rel_close(ev.lambda3, ev.lambda6, tol)) m |= P36;
  if (rel_close(ev.lambda4, ev.lambda5, tol)) m |= P45;
  if (rel_close(ev.lambda4, ev.lambda6, tol)) m |= P46;
  return m;
}

// Transitive closure of the pair mask.
unsigned close_transitively(unsigned m) {
  std::array<int, 4> parent{0, 1, 2, 3};
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  if (m & P34) unite(0, 1);
  if (m & P56) unite(2, 3);
  if (m & P35) unite(0, 2);
  if (m & P36) unite(0, 3);
  if (m & P45) unite(1, 2);
  if (m & P46) unite(1, 3);
  unsigned out = 0;
  auto same = [&](int a, int b) { return find(a) == find(b); };
  if (same(0, 1)) out |= P34;
  if (same(2, 3)) out |= P56;
  if (same(0, 2)) out |= P35;
  if (same(0, 3)) out |= P36;
  if (same(1, 2)) out |= P45;
  if (same(1, 3)) out |= P46;
  return out;
}

MultiplicityCase case_from_mask(unsigned m) {
  switch (m) {
    case 0: return MultiplicityCase::Simple;
    case P34: return MultiplicityCase::Double34;
    case P56: return MultiplicityCase::Double56;
    case P35: return MultiplicityCase::Double35;
    case P36: return MultiplicityCase::Double36;
    case P45: return MultiplicityCase::Double45;
    case P46: return MultiplicityCase::Double46;
    case P34 | P56: return MultiplicityCase::Pair34_56;
    case P35 | P46: return MultiplicityCase::Pair35_46;
    case P34 | P35 | P45: return MultiplicityCase::Triple345;
    case P34 | P36 | P46: return MultiplicityCase::Triple346;
    case P56 | P35 | P36: return MultiplicityCase::Triple356;
    case P56 | P45 | P46: return MultiplicityCase::Triple456;
    case P34 | P56 | P35 | P36 | P45 | P46: return MultiplicityCase::Quadruple;
    default: break;
  }
  fail(ErrorKind::AmbiguousMultiplicity, "inconsistent coincidence pattern");
}

std::array<double*, 4> slots(OriginEigenvalues& ev) {
  return {&ev.lambda3, &ev.lambda4, &ev.lambda5, &ev.lambda6};
}

// Replace each class of equal eigenvalues by one representative value.
void snap(OriginEigenvalues& ev, unsigned m) {
  auto s = slots(ev);
  const std::array<std::pair<int, int>, 6> pairs{{{0, 1}, {2, 3}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}};
  const std::array<unsigned, 6> bits{P34, P56, P35, P36, P45, P46};
  for (int k = 0; k < 6; ++k) {
    if (m & bits[k]) *s[pairs[k].second] = *s[pairs[k].first];
  }
}

AsymptoticTemplate minus_template(const OriginEigenvalues& ev) {
  AsymptoticTemplate t;
  t.side = TailSide::MinusInfinity;
  if (ev.lambda3 == ev.lambda4) {
    t.terms_phi = {{ev.lambda3, 0, "alpha>0 if beta==0"}, {ev.lambda3, 1, "beta>=0 (term -beta xi e^{lambda xi})"}};
  } else {
    t.terms_phi = {{ev.lambda3, 0, "alpha>0 if beta==0"}, {ev.lambda4, 0, "beta>=0"}};
  }
  if (ev.lambda5 == ev.lambda6) {
    t.terms_psi = {{ev.lambda5, 0, "gamma>0 if sigma==0"}, {ev.lambda5, 1, "sigma>=0 (term -sigma xi e^{lambda xi})"}};
  } else {
    t.terms_psi = {{ev.lambda5, 0, "gamma>0 if sigma==0"}, {ev.lambda6, 0, "sigma>=0"}};
  }
  t.coupling = "none";
  return t;
}

}  // namespace

MultiplicityCase coincidence_pattern(const OriginEigenvalues& ev, double tol) {
  return case_from_mask(close_transitively(close_pairs(ev, tol)));
}

SpectralReport classify_minus_infinity(const WaveParams& wave, double tol) {
  OriginEigenvalues ev = origin_eigenvalues(wave);
  const double c = wave.c;
  const double r = wave.model.r;
  const double d = wave.model.d;

  const bool c_is_2 = rel_close(c, 2.0, tol);
  const bool c_is_2rd = rel_close(c, 2.0 * std::sqrt(r * d), tol);
  const bool dr_one = rel_close(d, 1.0, tol) && rel_close(r, 1.0, tol);
  const bool governed = c_is_2 || c_is_2rd || dr_one;

  const unsigned observed = close_transitively(close_pairs(ev, tol));
  unsigned chosen = 0;
  if (governed) {
    unsigned pred = 0;
    if (c_is_2) pred |= P34;
    if (c_is_2rd) pred |= P56;
    if (dr_one) pred |= P35 | P46;
    if (c_is_2 && rel_close(d, 2.0 - r, tol) && !dr_one) {
      pred |= d > 1.0 ? (P35 | P45) : (P36 | P46);
    }
    if (c_is_2rd && 2.0 * r - 1.0 > 0.0 && rel_close(d, r / (2.0 * r - 1.0), tol) && !dr_one) {
      pred |= d < 1.0 ? (P35 | P36) : (P45 | P46);
    }
    pred = close_transitively(pred);
    if ((observed & ~pred) != 0) {
      std::ostringstream msg;
      msg << "eigenvalues coincide (" << to_string(case_from_mask(observed))
          << ") beyond what the parameter conditions give (" << to_string(case_from_mask(pred))
          << ") at c=" << c << ", r=" << r << ", d=" << d;
      fail(ErrorKind::AmbiguousMultiplicity, msg.str());
    }
    chosen = pred;
    // Snap to the exact common values implied by the conditions.
    if (c_is_2) ev.lambda3 = ev.lambda4 = 1.0;
    if (c_is_2rd) ev.lambda5 = ev.lambda6 = std::sqrt(r / d);
  } else {
    if (observed & (P34 | P56)) {
      std::ostringstream msg;
      msg << "repeated root within a block but c is neither 2 nor 2 sqrt(rd) (c=" << c << ")";
      fail(ErrorKind::AmbiguousMultiplicity, msg.str());
    }
    chosen = observed;
  }
  snap(ev, chosen);

  SpectralReport report;
  report.base_point = BasePoint::OriginPoint;
  report.case_tag = case_from_mask(chosen);
  report.origin = ev;
  report.stable_dim = 0;
  report.unstable_dim = 4;
  report.tau1 = std::nan("");
  report.tau2 = std::nan("");
  report.asymptotic = minus_template(ev);

  std::vector<double> vals{ev.lambda3, ev.lambda4, ev.lambda5, ev.lambda6};
  std::sort(vals.begin(), vals.end());
  for (double v : vals) {
    if (!report.eigenvalues.empty() && report.eigenvalues.back().value == v) {
      ++report.eigenvalues.back().multiplicity;
    } else {
      report.eigenvalues.push_back({v, 1});
    }
  }
  const auto a2 = linearize(wave, BasePoint::OriginPoint);
  for (const auto& e : report.eigenvalues) {
    auto chains = generalized_eigenvector_chains(a2, e.value, e.multiplicity);
    for (auto& ch : chains) {
      report.eigvectors.push_back(ch.front());
      report.generalized_eigvectors.push_back(std::move(ch));
    }
  }
  return report;
}

SpectralReport classify_plus_infinity(const WaveParams& wave) {
  const auto s = coexistence_eigenvalues(wave);
  const auto& p = wave.model;
  SpectralReport report;
  report.base_point = BasePoint::CoexistencePoint;
  report.stable_dim = 2;
  report.unstable_dim = 2;
  report.tau1 = s.tau1;
  report.tau2 = s.tau2;
  report.case_tag = MultiplicityCase::Simple;
  const double us = p.u_star();
  for (double l : {s.lambda2, s.lambda1, s.pos_small, s.pos_large}) {
    report.eigenvalues.push_back({l, 1});
    const double tau = (l * l - wave.c * l - us) / (p.k1 * us);
    Eigen::Vector4d v(1.0, l, tau, tau * l);
    report.eigvectors.push_back(v);
    report.generalized_eigvectors.push_back({v});
  }
  AsymptoticTemplate t;
  t.side = TailSide::PlusInfinity;
  t.terms_phi = {{s.lambda2, 0, "beta>0 (phi = u* - beta e^{lambda2 xi})"}};
  t.terms_psi = {{s.lambda2, 0, "coefficient = tau2 * beta"}};
  std::ostringstream coupling;
  coupling << "shared rate lambda2=" << s.lambda2 << ", psi coefficient = tau2 (" << s.tau2
           << ") x phi coefficient";
  t.coupling = coupling.str();
  report.asymptotic = t;
  return report;
}

std::vector<JordanChain> generalized_eigenvector_chains(const LinearizationMatrix& matrix,
                                                        double lambda,
                                                        int algebraic_multiplicity) {
  if (algebraic_multiplicity < 1 || algebraic_multiplicity > 4) {
    fail(ErrorKind::InvalidArgument, "algebraic multiplicity must be in 1..4");
  }
  const Eigen::Matrix4d n = matrix.entries - lambda * Eigen::Matrix4d::Identity();
  const double scale = std::max(1.0, matrix.entries.norm());

  // Kernels of N, N^2, ... until the generalized eigenspace is reached.
  std::vector<Eigen::MatrixXd> kernels;
  Eigen::Matrix4d power = Eigen::Matrix4d::Identity();
  for (int j = 1; j <= algebraic_multiplicity; ++j) {
    power = power * n;
    const double tol = 1e-7 * std::pow(scale, j);
    kernels.push_back(null_space(power, tol));
    if (kernels.back().cols() >= algebraic_multiplicity) break;
  }
  if (kernels.front().cols() == 0) {
    std::ostringstream msg;
    msg << "lambda=" << lambda << " is not an eigenvalue";
    fail(ErrorKind::NotAnEigenvalue, msg.str());
  }
  if (kernels.back().cols() != algebraic_multiplicity) {
    std::ostringstream msg;
    msg << "generalized eigenspace of lambda=" << lambda << " has dimension "
        << kernels.back().cols() << ", expected " << algebraic_multiplicity;
    fail(ErrorKind::NotAnEigenvalue, msg.str());
  }

  const int levels = static_cast<int>(kernels.size());
  std::vector<JordanChain> chains;
  for (int j = levels; j >= 1; --j) {
    // Span already accounted for at level j: ker N^{j-1} plus the level-j
    // members of longer chains.
    Eigen::MatrixXd w(4, 0);
    if (j >= 2) w = kernels[j - 2];
    for (const auto& ch : chains) {
      if (static_cast<int>(ch.size()) >= j) {
        w.conservativeResize(4, w.cols() + 1);
        w.col(w.cols() - 1) = ch[j - 1];
      }
    }
    const Eigen::MatrixXd wb = column_basis(w, 1e-9);
    Eigen::MatrixXd cand = kernels[j - 1];
    if (wb.cols() > 0) cand -= wb * (wb.transpose() * cand);
    const Eigen::MatrixXd tops = column_basis(cand, 1e-7);
    for (int k = 0; k < tops.cols(); ++k) {
      JordanChain ch(j);
      ch[j - 1] = tops.col(k);
      for (int m = j - 1; m >= 1; --m) ch[m - 1] = n * ch[m];
      chains.push_back(std::move(ch));
    }
  }
  // Longest chains first, as built.
  return chains;
}

}  // namespace lvfront
