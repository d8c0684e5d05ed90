#include "lvfront/suite.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "lvfront/errors.hpp"

namespace lvfront {
namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// (c -+ sqrt(c^2 - 4 a b)) / (2 a) in extended precision, ascending.
std::pair<double, double> quadratic_roots(double a, double c, double b) {
  const long double la = a, lc = c, disc = std::sqrt(std::max(0.0L, lc * lc - 4.0L * la * b));
  return {static_cast<double>((lc - disc) / (2.0L * la)), static_cast<double>((lc + disc) / (2.0L * la))};
}

}  // namespace

WaveParams random_weak_wave(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> k(0.01, 0.99), rd(0.1, 5.0), dc(0.0, 3.0);
  ModelParams m;
  m.k1 = k(rng);
  m.k2 = k(rng);
  m.r = rd(rng);
  m.d = rd(rng);
  return {m, c_min(m) + dc(rng)};
}

SpectralSuiteResult spectral_suite(std::uint64_t seed, int draws) {
  if (draws <= 0) fail(ErrorKind::InvalidArgument, "draws must be positive");
  SpectralSuiteResult res;
  res.seed = seed;
  res.draws = draws;
  std::mt19937_64 rng(seed);
  auto note = [&](const WaveParams& w, const std::string& why) {
    if (res.failures.size() < 10) res.failures.push_back({w, why});
  };
  for (int i = 0; i < draws; ++i) {
    const WaveParams w = random_weak_wave(rng);
    const double c = w.c, r = w.model.r, d = w.model.d;

    Eigen::EigenSolver<Eigen::Matrix4d> es(linearize(w, BasePoint::CoexistencePoint).entries);
    const auto ev = es.eigenvalues();
    int neg = 0, pos = 0;
    for (int j = 0; j < 4; ++j) {
      if (std::abs(ev[j].imag()) > 1e-9 * (1.0 + std::abs(ev[j]))) continue;
      (ev[j].real() < 0 ? neg : pos)++;
    }
    bool ok = neg == 2 && pos == 2;
    try {
      const auto s = coexistence_eigenvalues(w);
      ok = ok && s.tau1 < 0.0 && s.tau2 > 0.0 && s.lambda2 < s.mu2 && s.mu2 < s.lambda1;
    } catch (const Error& e) {
      ok = false;
    }
    if (!ok) {
      ++res.split_failures;
      note(w, "coexistence split");
    }

    const auto o = origin_eigenvalues(w);
    const auto [u_lo, u_hi] = quadratic_roots(1.0, c, 1.0);
    const auto [v_lo, v_hi] = quadratic_roots(d, c, r);
    const double cf = std::max({rel(o.lambda3, u_hi), rel(o.lambda4, u_lo), rel(o.lambda5, v_hi), rel(o.lambda6, v_lo)});
    const double vieta = std::max({rel(o.lambda3 * o.lambda4, 1.0), rel(o.lambda5 * o.lambda6, r / d),
                                   rel(o.lambda3 + o.lambda4, c), rel(o.lambda5 + o.lambda6, c / d)});
    res.max_closed_form_error = std::max(res.max_closed_form_error, cf);
    res.max_vieta_error = std::max(res.max_vieta_error, vieta);
  }
  return res;
}

}  // namespace lvfront
