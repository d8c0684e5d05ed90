#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lvfront/spectral.hpp"

namespace lvfront {

/// Default seed of the randomized suites.
inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Weak-competition draw: k1, k2 in [0.01, 0.99], r, d in [0.1, 5], c in
/// [c_min, c_min + 3].
WaveParams random_weak_wave(std::mt19937_64& rng);

struct SpectralSuiteFailure {
  WaveParams wave;
  std::string reason;
};

struct SpectralSuiteResult {
  std::uint64_t seed = kDefaultSeed;
  int draws = 0;
  /// Coexistence split: 2 negative + 2 positive real eigenvalues of the
  /// linearization (independent eigensolver), tau1 < 0 < tau2 and
  /// lambda2 < mu2 < lambda1.
  int split_failures = 0;
  /// Origin eigenvalues against the quadratic formula in extended precision.
  double max_closed_form_error = 0.0;
  /// Largest relative defect of products 1, r/d and sums c, c/d.
  double max_vieta_error = 0.0;
  std::vector<SpectralSuiteFailure> failures;  ///< first few only
};

SpectralSuiteResult spectral_suite(std::uint64_t seed, int draws);

}  // namespace lvfront
