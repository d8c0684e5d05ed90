#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lvfront/pde.hpp"
#include "lvfront/suite.hpp"

namespace lvfront {

using Json = nlohmann::ordered_json;

/// Everything a CLI run depends on. Persisted next to the outputs; feeding it
/// back reproduces them bit for bit.
struct RunConfig {
  ModelParams model;
  double c = 2.2;
  std::string selector = "110";
  double theta1 = 0.3;  ///< orbit data at t = 0
  double theta2 = 0.3;
  double orbit_T = 40.0;
  /// Scalar family speeds as multiples of the scalar minimal speeds.
  double scalar_speed_factor = 1.1;
  GridSpec front_grid;
  Lattice lattice;
  SchemeConfig scheme;
  std::vector<int> n_list{5, 10, 20, 40};
  double window_start = -2.0;
  double window_end = 10.0;
  double window_interval = 0.5;
  std::filesystem::path output_dir = "lvfront_out";
  std::uint64_t seed = kDefaultSeed;
  int draws = 1000;

  /// Model, speed, selector, grids and scheme. Throws InvalidArgument.
  void validate() const;
};

Json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys throw InvalidArgument.
RunConfig run_config_from_json(const Json& j, RunConfig base = {});

Json to_json(const ModelParams& m);
Json to_json(const OriginEigenvalues& ev);
Json to_json(const CoexistenceSpectrum& s);
Json to_json(const SpectralReport& s);
Json to_json(const HomotopyReport& h);
Json to_json(const SpectralSuiteResult& s);
Json to_json(const TailFit& t);
Json to_json(const TailConstants& t);
Json to_json(const EnvelopeCheck& e);
Json to_json(const EnvelopeReport& e);
Json to_json(const InequalityCertificate& c);
Json to_json(const SandwichCertificate& c);
Json to_json(const DerivativeBounds& b);
/// Gaps, ratios, symmetry, start values and per-start sandwiches; no fields.
Json to_json(const EntireApproximation& a);
Json to_json(const EntirePropertiesReport& r);

/// Long format: t, x, u, v for every snapshot.
std::string snapshots_to_csv(const std::vector<FieldState>& snapshots);
/// Columns t, worst margin.
std::string sandwich_to_csv(const SandwichCertificate& c);

/// Numbers printed with 17 significant digits so that files round-trip.
std::string format_double(double x);

/// Writes to a temporary sibling and renames it into place. Throws Io.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace lvfront
