#include "lvfront/serialize.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unistd.h>

#include "lvfront/errors.hpp"

namespace lvfront {
namespace {

Json margin_json(const SandwichMargin& m) { return {{"margin", m.margin}, {"x", m.x}, {"t", m.t}}; }

Json worst_json(const WorstPoint& w) { return {{"residual", w.residual}, {"x", w.x}, {"t", w.t}}; }

Json property_json(const PropertyResult& p) {
  return {{"index", p.index}, {"passed", p.passed}, {"measured", p.measured}, {"threshold", p.threshold},
          {"detail", p.detail}};
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, where + " must be a JSON object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) fail(ErrorKind::InvalidArgument, "unknown key '" + k + "' in " + where);
}

template <class T>
void take(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("bad value for '") + key + "': " + e.what());
  }
}

Boundary boundary_from(const std::string& s) {
  if (s == "NeumannZero") return Boundary::NeumannZero;
  if (s == "DirichletFromPair") return Boundary::DirichletFromPair;
  fail(ErrorKind::InvalidArgument, "unknown boundary '" + s + "'");
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  WaveParams{model, c}.validate();
  Selector::parse(selector);
  front_grid.validate();
  scheme.validate();
  if (lattice.nx < 2 || lattice.nt < 2 || !(lattice.x_lo < lattice.x_hi) || !(lattice.t_lo < lattice.t_hi))
    fail(ErrorKind::InvalidArgument, "lattice needs at least two points per axis on non-empty ranges");
  if (!(theta1 > 0 && theta2 > 0)) fail(ErrorKind::InvalidArgument, "orbit data must be positive");
  if (!(orbit_T > 0)) fail(ErrorKind::InvalidArgument, "orbit_T must be positive");
  if (!(scalar_speed_factor >= 1.0)) fail(ErrorKind::InvalidArgument, "scalar_speed_factor must be at least 1");
  if (n_list.size() < 2) fail(ErrorKind::InvalidArgument, "n_list needs at least two entries");
  if (!(window_start < window_end) || !(window_interval > 0))
    fail(ErrorKind::InvalidArgument, "bad observation window");
  if (draws <= 0) fail(ErrorKind::InvalidArgument, "draws must be positive");
}

Json to_json(const ModelParams& m) { return {{"k1", m.k1}, {"k2", m.k2}, {"r", m.r}, {"d", m.d}}; }

Json to_json(const RunConfig& cfg) {
  Json j;
  j["model"] = to_json(cfg.model);
  j["c"] = cfg.c;
  j["selector"] = cfg.selector;
  j["theta1"] = cfg.theta1;
  j["theta2"] = cfg.theta2;
  j["orbit_T"] = cfg.orbit_T;
  j["scalar_speed_factor"] = cfg.scalar_speed_factor;
  j["front_grid"] = {{"half_length", cfg.front_grid.half_length},
                     {"n_points", cfg.front_grid.n_points},
                     {"boundary_tol", cfg.front_grid.boundary_tol},
                     {"auto_extend", cfg.front_grid.auto_extend},
                     {"max_newton", cfg.front_grid.max_newton},
                     {"newton_tol", cfg.front_grid.newton_tol}};
  j["lattice"] = {{"x_lo", cfg.lattice.x_lo}, {"x_hi", cfg.lattice.x_hi}, {"nx", cfg.lattice.nx},
                  {"t_lo", cfg.lattice.t_lo}, {"t_hi", cfg.lattice.t_hi}, {"nt", cfg.lattice.nt}};
  const auto& s = cfg.scheme;
  j["scheme"] = {{"x_half_length", s.x_half_length},
                 {"nx", s.nx},
                 {"dt", s.dt},
                 {"t_start", s.t_start},
                 {"t_end", s.t_end},
                 {"boundary", to_string(s.boundary)},
                 {"theta", s.theta},
                 {"heun_reaction", s.heun_reaction},
                 {"snapshot_interval", s.snapshot_interval},
                 {"snapshot_times", s.snapshot_times},
                 {"dt_floor", s.dt_floor},
                 {"check_box", s.check_box}};
  j["n_list"] = cfg.n_list;
  j["window_start"] = cfg.window_start;
  j["window_end"] = cfg.window_end;
  j["window_interval"] = cfg.window_interval;
  j["output_dir"] = cfg.output_dir.string();
  j["seed"] = cfg.seed;
  j["draws"] = cfg.draws;
  return j;
}

RunConfig run_config_from_json(const Json& j, RunConfig cfg) {
  reject_unknown(j,
                 {"model", "c", "selector", "theta1", "theta2", "orbit_T", "scalar_speed_factor", "front_grid", "lattice", "scheme",
                  "n_list", "window_start", "window_end", "window_interval", "output_dir", "seed", "draws"},
                 "config");
  if (j.contains("model")) {
    const auto& m = j["model"];
    reject_unknown(m, {"k1", "k2", "r", "d"}, "model");
    take(m, "k1", cfg.model.k1);
    take(m, "k2", cfg.model.k2);
    take(m, "r", cfg.model.r);
    take(m, "d", cfg.model.d);
  }
  take(j, "c", cfg.c);
  take(j, "selector", cfg.selector);
  take(j, "theta1", cfg.theta1);
  take(j, "theta2", cfg.theta2);
  take(j, "orbit_T", cfg.orbit_T);
  take(j, "scalar_speed_factor", cfg.scalar_speed_factor);
  if (j.contains("front_grid")) {
    const auto& g = j["front_grid"];
    reject_unknown(g, {"half_length", "n_points", "boundary_tol", "auto_extend", "max_newton", "newton_tol"},
                   "front_grid");
    take(g, "half_length", cfg.front_grid.half_length);
    take(g, "n_points", cfg.front_grid.n_points);
    take(g, "boundary_tol", cfg.front_grid.boundary_tol);
    take(g, "auto_extend", cfg.front_grid.auto_extend);
    take(g, "max_newton", cfg.front_grid.max_newton);
    take(g, "newton_tol", cfg.front_grid.newton_tol);
  }
  if (j.contains("lattice")) {
    const auto& l = j["lattice"];
    reject_unknown(l, {"x_lo", "x_hi", "nx", "t_lo", "t_hi", "nt"}, "lattice");
    take(l, "x_lo", cfg.lattice.x_lo);
    take(l, "x_hi", cfg.lattice.x_hi);
    take(l, "nx", cfg.lattice.nx);
    take(l, "t_lo", cfg.lattice.t_lo);
    take(l, "t_hi", cfg.lattice.t_hi);
    take(l, "nt", cfg.lattice.nt);
  }
  if (j.contains("scheme")) {
    const auto& s = j["scheme"];
    reject_unknown(s,
                   {"x_half_length", "nx", "dt", "t_start", "t_end", "boundary", "theta", "heun_reaction",
                    "snapshot_interval", "snapshot_times", "dt_floor", "check_box"},
                   "scheme");
    take(s, "x_half_length", cfg.scheme.x_half_length);
    take(s, "nx", cfg.scheme.nx);
    take(s, "dt", cfg.scheme.dt);
    take(s, "t_start", cfg.scheme.t_start);
    take(s, "t_end", cfg.scheme.t_end);
    if (s.contains("boundary")) {
      std::string b;
      take(s, "boundary", b);
      cfg.scheme.boundary = boundary_from(b);
    }
    take(s, "theta", cfg.scheme.theta);
    take(s, "heun_reaction", cfg.scheme.heun_reaction);
    take(s, "snapshot_interval", cfg.scheme.snapshot_interval);
    take(s, "snapshot_times", cfg.scheme.snapshot_times);
    take(s, "dt_floor", cfg.scheme.dt_floor);
    take(s, "check_box", cfg.scheme.check_box);
  }
  take(j, "n_list", cfg.n_list);
  take(j, "window_start", cfg.window_start);
  take(j, "window_end", cfg.window_end);
  take(j, "window_interval", cfg.window_interval);
  if (j.contains("output_dir")) {
    std::string dir;
    take(j, "output_dir", dir);
    cfg.output_dir = dir;
  }
  take(j, "seed", cfg.seed);
  take(j, "draws", cfg.draws);
  return cfg;
}

Json to_json(const OriginEigenvalues& ev) {
  return {{"lambda3", ev.lambda3}, {"lambda4", ev.lambda4}, {"lambda5", ev.lambda5}, {"lambda6", ev.lambda6}};
}

Json to_json(const CoexistenceSpectrum& s) {
  return {{"lambda1", s.lambda1},     {"lambda2", s.lambda2}, {"pos_small", s.pos_small},
          {"pos_large", s.pos_large}, {"tau1", s.tau1},       {"tau2", s.tau2},
          {"mu2", s.mu2},             {"max_quartic_residual", s.max_quartic_residual}};
}

Json to_json(const SpectralReport& s) {
  Json j;
  j["base_point"] = s.base_point == BasePoint::OriginPoint ? "origin" : "coexistence";
  j["eigenvalues"] = Json::array();
  for (const auto& e : s.eigenvalues) j["eigenvalues"].push_back({{"value", e.value}, {"multiplicity", e.multiplicity}});
  j["stable_dim"] = s.stable_dim;
  j["unstable_dim"] = s.unstable_dim;
  j["tau1"] = s.tau1;
  j["tau2"] = s.tau2;
  j["case"] = to_string(s.case_tag);
  auto terms = [](const std::vector<TemplateTerm>& ts) {
    Json a = Json::array();
    for (const auto& t : ts)
      a.push_back({{"rate", t.rate}, {"degree", t.polynomial_degree}, {"constraint", t.coefficient_sign_constraint}});
    return a;
  };
  j["template"] = {{"side", to_string(s.asymptotic.side)},
                   {"phi", terms(s.asymptotic.terms_phi)},
                   {"psi", terms(s.asymptotic.terms_psi)},
                   {"coupling", s.asymptotic.coupling}};
  return j;
}

Json to_json(const HomotopyReport& h) {
  Json steps = Json::array();
  for (const auto& s : h.steps)
    steps.push_back({{"rho", s.rho}, {"det", s.det}, {"negative", s.negative}, {"positive", s.positive},
                     {"roots", s.roots}});
  return {{"pass", h.pass}, {"max_rho0_mismatch", h.max_rho0_mismatch}, {"steps", steps}};
}

Json to_json(const SpectralSuiteResult& s) {
  Json fails = Json::array();
  for (const auto& f : s.failures) fails.push_back({{"model", to_json(f.wave.model)}, {"c", f.wave.c}, {"reason", f.reason}});
  return {{"seed", s.seed},
          {"draws", s.draws},
          {"split_failures", s.split_failures},
          {"max_closed_form_error", s.max_closed_form_error},
          {"max_vieta_error", s.max_vieta_error},
          {"failures", fails}};
}

Json to_json(const TailFit& t) {
  return {{"side", to_string(t.side)},
          {"fitted_rate", t.fitted_rate},
          {"fitted_rate_psi", t.fitted_rate_psi},
          {"predicted_rate", t.predicted_rate},
          {"predicted_rate_psi", t.predicted_rate_psi},
          {"relative_error", t.relative_error},
          {"window", {t.window.first, t.window.second}},
          {"xi_window", {t.xi_window.first, t.xi_window.second}},
          {"secular_detected", t.secular_detected},
          {"amplitude_ratio", t.amplitude_ratio},
          {"predicted_ratio", t.predicted_ratio},
          {"ratio_error", t.ratio_error},
          {"r_squared", t.r_squared},
          {"log_linear_rate", t.log_linear_rate}};
}

Json to_json(const TailConstants& t) {
  return {{"M1", t.M1},         {"M1_bar", t.M1_bar}, {"M2", t.M2},           {"M2_bar", t.M2_bar},
          {"kappa", t.kappa},   {"M3", t.M3},         {"M3_bar", t.M3_bar},   {"M4", t.M4},
          {"lambda2", t.lambda2}, {"points_checked", t.points_checked}};
}

Json to_json(const EnvelopeCheck& e) {
  return {{"name", e.name},
          {"points", e.points},
          {"violations", e.violations},
          {"worst_margin", e.worst_margin},
          {"first_violation_t", e.first_violation_t},
          {"holds", e.holds()}};
}

Json to_json(const EnvelopeReport& e) {
  return {{"printed_claim_holds", e.printed_claim_holds},
          {"printed_p_lower", to_json(e.printed_p_lower)},
          {"printed_q_lower", to_json(e.printed_q_lower)},
          {"printed_q_lower_corrected", to_json(e.printed_q_lower_corrected)},
          {"p_upper", to_json(e.p_upper)},
          {"q_upper", to_json(e.q_upper)},
          {"certified_p", to_json(e.certified_p)},
          {"certified_q", to_json(e.certified_q)},
          {"exempt_points", e.exempt_points},
          {"backward_constant", e.backward_constant}};
}

Json to_json(const InequalityCertificate& c) {
  return {{"pass", c.pass},
          {"lattice",
           {{"x_lo", c.lattice.x_lo},
            {"x_hi", c.lattice.x_hi},
            {"nx", c.lattice.nx},
            {"t_lo", c.lattice.t_lo},
            {"t_hi", c.lattice.t_hi},
            {"nt", c.lattice.nt}}},
          {"slack", c.slack},
          {"ridge_margin", c.ridge_margin},
          {"points", c.points},
          {"ridge_points", c.ridge_points},
          {"ridge_points_skipped", c.ridge_points_skipped},
          {"ordering_violations", c.ordering_violations},
          {"worst_super_u", worst_json(c.worst_super_u)},
          {"worst_super_v", worst_json(c.worst_super_v)},
          {"worst_sub_u", worst_json(c.worst_sub_u)},
          {"worst_sub_v", worst_json(c.worst_sub_v)}};
}

Json to_json(const SandwichCertificate& c) {
  return {{"pass", c.pass},
          {"epsilon", c.epsilon},
          {"snapshots", c.snapshots},
          {"violations", c.violations},
          {"u_lower", margin_json(c.u_lower)},
          {"u_upper", margin_json(c.u_upper)},
          {"v_lower", margin_json(c.v_lower)},
          {"v_upper", margin_json(c.v_upper)}};
}

Json to_json(const DerivativeBounds& b) {
  return {{"bounded", b.bounded},           {"snapshots_probed", b.snapshots_probed},
          {"max_dt_u", b.max_dt_u},         {"max_dt_v", b.max_dt_v},
          {"max_dx_u", b.max_dx_u},         {"max_dx_v", b.max_dx_v},
          {"max_dxx_u", b.max_dxx_u},       {"max_dxx_v", b.max_dxx_v},
          {"early_max", b.early_max},       {"late_max", b.late_max}};
}

Json to_json(const EntireApproximation& a) {
  Json sand = Json::array();
  for (const auto& s : a.sandwiches) sand.push_back(to_json(s));
  return {{"n_list", a.n_list},
          {"window_times", a.window_times},
          {"cauchy_gaps", a.cauchy_gaps},
          {"gap_ratios", a.gap_ratios},
          {"symmetry_errors", a.symmetry_errors},
          {"sup_v_at_start", a.sup_v_at_start},
          {"sup_v_at_start_super", a.sup_v_at_start_super},
          {"super_sub_limit_gap", a.super_sub_limit_gap},
          {"sandwiches", sand}};
}

Json to_json(const EntirePropertiesReport& r) {
  return {{"all_passed", r.all_passed()},
          {"symmetry", property_json(r.symmetry)},
          {"backward_decay", property_json(r.backward_decay)},
          {"edge_decay", property_json(r.edge_decay)},
          {"final_bounds_u", property_json(r.final_bounds_u)},
          {"final_bounds_v", property_json(r.final_bounds_v)},
          {"envelope_rate", r.envelope_rate},
          {"fitted_rate_sub", r.fitted_rate_sub},
          {"fitted_rate_super", r.fitted_rate_super}};
}

std::string format_double(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string snapshots_to_csv(const std::vector<FieldState>& snaps) {
  std::ostringstream out;
  out << std::setprecision(17) << "t,x,u,v\n";
  for (const auto& s : snaps)
    for (std::size_t i = 0; i < s.x.size(); ++i) out << s.time << ',' << s.x[i] << ',' << s.u[i] << ',' << s.v[i] << '\n';
  return out.str();
}

std::string sandwich_to_csv(const SandwichCertificate& c) {
  std::ostringstream out;
  out << std::setprecision(17) << "t,worst_margin\n";
  for (std::size_t k = 0; k < c.times.size(); ++k) out << c.times[k] << ',' << c.worst_margin_by_time[k] << '\n';
  return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot open " + tmp.string());
    f << content;
    f.flush();
    if (!f) fail(ErrorKind::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::Io, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace lvfront
