#include "lvfront/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lvfront/errors.hpp"

namespace lvfront {
namespace fs = std::filesystem;

namespace {

struct Run {
  Run(std::ostream& o, std::ostream& e) : out(o), err(e) {}
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;
  bool second_order = false;
  bool suite = false;
  std::string front_action = "solve";
  std::string plot_kind = "front";
  std::vector<std::string> artifacts;
  bool require_properties = false;

  fs::path path(const std::string& name) const { return cfg.output_dir / name; }
  void write_json(const std::string& name, const Json& j) const { write_atomic(path(name), j.dump(2) + "\n"); }
};

std::shared_ptr<const DiffusionFreeOrbit> make_orbit(const RunConfig& cfg) {
  return std::make_shared<const DiffusionFreeOrbit>(solve_diffusion_free(cfg.model, cfg.theta1, cfg.theta2, cfg.orbit_T));
}

bool gaps_decrease(const EntireApproximation& a, double floor) {
  for (std::size_t k = 0; k + 1 < a.cauchy_gaps.size(); ++k)
    if (a.cauchy_gaps[k + 1] > a.cauchy_gaps[k] && a.cauchy_gaps[k + 1] > floor) return false;
  return true;
}

EntireOptions entire_options(const RunConfig& cfg) {
  EntireOptions o;
  o.window_start = cfg.window_start;
  o.window_end = cfg.window_end;
  o.window_interval = cfg.window_interval;
  o.throw_on_failure = false;
  return o;
}

int cmd_classify(Run& run) {
  const auto regime = classify_regime(run.cfg.model);
  Json eq = Json::array();
  for (const auto& e : equilibria(run.cfg.model))
    eq.push_back({{"kind", to_string(e.kind)}, {"u", e.u}, {"v", e.v}, {"in_unit_box", e.in_unit_box}});
  run.write_json("classify.json", {{"model", to_json(run.cfg.model)},
                                   {"regime", to_string(regime.tag)},
                                   {"description", regime.description},
                                   {"equilibria", eq}});
  run.out << to_string(regime.tag) << "\n";
  return 0;
}

int cmd_spectral(Run& run) {
  const WaveParams w{run.cfg.model, run.cfg.c};
  Json j;
  j["model"] = to_json(w.model);
  j["c"] = w.c;
  j["c_min"] = c_min(w.model);
  j["origin"] = to_json(origin_eigenvalues(w));
  j["coexistence"] = to_json(coexistence_eigenvalues(w));
  j["minus_infinity"] = to_json(classify_minus_infinity(w));
  j["plus_infinity"] = to_json(classify_plus_infinity(w));
  const auto hom = homotopy_check(w);
  j["homotopy"] = to_json(hom);
  bool pass = hom.pass;
  std::ostringstream line;
  line << "spectral: case " << j["minus_infinity"]["case"].get<std::string>() << ", homotopy "
       << (hom.pass ? "pass" : "FAIL");
  if (run.suite) {
    const auto s = spectral_suite(run.cfg.seed, run.cfg.draws);
    j["suite"] = to_json(s);
    pass = pass && s.split_failures == 0 && s.max_closed_form_error <= 1e-12 && s.max_vieta_error <= 1e-12;
    line << ", suite " << s.split_failures << "/" << s.draws << " split failures, closed-form error "
         << s.max_closed_form_error;
  }
  run.write_json("spectral.json", j);
  run.out << line.str() << "\n";
  return pass ? 0 : 1;
}

int cmd_front(Run& run) {
  if (run.front_action != "solve") fail(ErrorKind::InvalidArgument, "front: unknown action '" + run.front_action + "'");
  const auto front = solve_system_front({run.cfg.model, run.cfg.c}, run.cfg.front_grid);
  write_atomic(run.path("front.csv"), front_to_csv(front));
  Json j;
  j["c"] = front.c;
  j["u_star"] = run.cfg.model.u_star();
  j["v_star"] = run.cfg.model.v_star();
  j["residual_norm"] = front.residual_norm;
  j["newton_iterations"] = front.newton_iterations;
  const auto mid = midpoint_residual(front);
  j["midpoint_residual"] = {{"max", mid.max_residual}, {"xi", mid.worst_xi}};
  const auto be = boundary_errors(front);
  j["boundary_errors"] = {{"left", be.left_error}, {"right", be.right_error}};
  j["min_slope"] = min_slope(front);
  for (auto [key, side] : {std::pair{"plus", TailSide::PlusInfinity}, {"minus", TailSide::MinusInfinity}}) {
    try {
      j[key] = to_json(fit_tail_rate(front, side));
    } catch (const Error& e) {
      j[key] = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    }
  }
  int code = 0;
  try {
    j["constants"] = to_json(estimate_tail_constants(front));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BoundViolated) throw;
    j["constants"] = {{"error", "BoundViolated"}, {"message", e.what()}};
    code = 1;
  }
  run.write_json("tails.json", j);
  run.out << "front: c=" << front.c << " residual " << front.residual_norm << " midpoint " << mid.max_residual
          << (code ? ", tail constants FAIL" : ", tail constants certified") << "\n";
  return code;
}

int cmd_odefree(Run& run) {
  const auto orbit = solve_diffusion_free(run.cfg.model, run.cfg.theta1, run.cfg.theta2, run.cfg.orbit_T);
  write_atomic(run.path("orbit.csv"), orbit_to_csv(orbit));
  Json j;
  j["theta"] = {orbit.theta1, orbit.theta2};
  j["beta_hat1"] = orbit.beta_hat1;
  j["beta_hat2"] = orbit.beta_hat2;
  j["beta_hat2_corrected"] = orbit.beta_hat2_corrected;
  j["monotone"] = orbit.monotone;
  j["in_box"] = orbit.in_box;
  int code = 0;
  try {
    const auto rep = certify_logistic_envelope(orbit);
    j["envelope"] = to_json(rep);
    run.out << "odefree: certified envelopes hold; printed claim " << (rep.printed_claim_holds ? "holds" : "fails")
            << "\n";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EnvelopeViolated) throw;
    j["envelope"] = {{"error", "EnvelopeViolated"}, {"message", e.what()}};
    run.out << "odefree: FAIL " << e.what() << "\n";
    code = 1;
  }
  run.write_json("envelope.json", j);
  return code;
}

int cmd_supersub(Run& run) {
  std::vector<std::string> names;
  if (run.cfg.selector == "all") {
    for (const auto& s : all_selectors()) names.push_back(s.str());
    names.push_back("scalar");
  } else {
    names.push_back(run.cfg.selector);
  }
  InequalityOptions opt;
  opt.throw_on_violation = false;
  Json j = Json::object();
  bool pass = true;
  std::ostringstream line;
  line << "supersub:";
  for (const auto& name : names) {
    const auto pair = build_pair(run.cfg, name);
    const auto cert = verify_inequalities(pair, run.cfg.lattice, opt);
    j[name] = to_json(cert);
    pass = pass && cert.pass;
    line << ' ' << name << (cert.pass ? " pass" : " FAIL");
  }
  run.write_json("inequalities.json", j);
  run.out << line.str() << "\n";
  return pass ? 0 : 1;
}

int cmd_simulate(Run& run, bool probe) {
  const auto pair = build_pair(run.cfg, run.cfg.selector);
  std::vector<FieldState> snaps;
  const auto cert = comparison_harness(pair, run.cfg.model, run.cfg.scheme, false, &snaps);
  if (probe) {
    const auto b = derivative_bound_probe(snaps, run.cfg.model, false);
    run.write_json("probe.json", to_json(b));
    run.out << "probe: " << (b.bounded ? "bounded" : "GROWTH") << " (early " << b.early_max << ", late "
            << b.late_max << ")\n";
    return b.bounded ? 0 : 1;
  }
  write_atomic(run.path("snapshots.csv"), snapshots_to_csv(snaps));
  write_atomic(run.path("sandwich.csv"), sandwich_to_csv(cert));
  run.write_json("sandwich.json", to_json(cert));
  run.out << "simulate: " << cert.snapshots << " snapshots, " << cert.violations << " sandwich violations (eps "
          << cert.epsilon << ")\n";
  return cert.pass ? 0 : 1;
}

int cmd_entire(Run& run, bool properties_only) {
  const auto pair = build_pair(run.cfg, run.cfg.selector);
  const auto opt = entire_options(run.cfg);
  const auto approx = entire_approximation(pair, run.cfg.model, run.cfg.scheme, run.cfg.n_list, opt);
  const auto props = check_entire_properties(approx, pair, run.cfg.model);
  run.write_json("properties.json", to_json(props));
  if (properties_only) {
    run.out << "check42: symmetry " << (props.symmetry.passed ? "pass" : "FAIL") << ", backward decay "
            << (props.backward_decay.passed ? "pass" : "FAIL") << ", edges "
            << (props.edge_decay.passed ? "pass" : "FAIL") << ", final bounds "
            << (props.final_bounds_u.passed && props.final_bounds_v.passed ? "pass" : "FAIL") << "\n";
    return props.all_passed() ? 0 : 1;
  }
  write_atomic(run.path("entire_snapshots.csv"), snapshots_to_csv(approx.snapshots.back()));
  run.write_json("gaps.json", to_json(approx));
  bool sandwiches = true;
  for (const auto& s : approx.sandwiches) sandwiches = sandwiches && s.pass;
  const bool decrease = gaps_decrease(approx, opt.gap_floor);
  run.out << "entire: gaps";
  for (double g : approx.cauchy_gaps) run.out << ' ' << g;
  run.out << (decrease ? " (decreasing)" : " (NOT decreasing)") << (sandwiches ? "" : ", sandwich FAIL") << "\n";
  bool pass = decrease && sandwiches;
  if (run.require_properties) pass = pass && props.all_passed();
  return pass ? 0 : 1;
}

int cmd_plot(Run& run) {
  std::vector<fs::path> paths(run.artifacts.begin(), run.artifacts.end());
  const auto script = emit_plot_script(paths, plot_kind_from(run.plot_kind), run.cfg.output_dir);
  run.out << script.string() << "\n";
  return 0;
}

// Value following --config in either "--config x" or "--config=x" form.
std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_path, std::string& out_dir) {
  sub->add_option("--config", config_path, "JSON run configuration; flags override its keys");
  sub->add_option("--out", out_dir, "output directory (overrides LVFRONT_OUTPUT_DIR and the config)");
  sub->add_option("--k1", cfg.model.k1);
  sub->add_option("--k2", cfg.model.k2);
  sub->add_option("--r", cfg.model.r);
  sub->add_option("--d", cfg.model.d);
  sub->add_option("--c", cfg.c, "wave speed");
  sub->add_option("--seed", cfg.seed);
}

void add_pair_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--selector", cfg.selector, "branch selector such as 110");
  sub->add_option("--theta1", cfg.theta1);
  sub->add_option("--theta2", cfg.theta2);
  sub->add_option("--orbit-T", cfg.orbit_T);
}

void add_scheme_options(CLI::App* sub, Run& run) {
  auto& s = run.cfg.scheme;
  sub->add_option("--L", s.x_half_length, "half length of the spatial domain");
  sub->add_option("--nx", s.nx);
  sub->add_option("--dt", s.dt);
  sub->add_option("--t-start", s.t_start);
  sub->add_option("--t-end", s.t_end);
  sub->add_option("--theta", s.theta, "implicit weight of diffusion");
  sub->add_flag("--second-order", run.second_order, "Crank-Nicolson diffusion with Heun reaction");
}

}  // namespace

SuperSubPair build_pair(const RunConfig& cfg, const std::string& selector) {
  if (selector == "scalar") {
    const double s1 = cfg.scalar_speed_factor * scalar_min_speed(cfg.model, ScalarWhich::U_eq);
    const double s2 = cfg.scalar_speed_factor * scalar_min_speed(cfg.model, ScalarWhich::V_eq);
    return build_scalar_family(solve_scalar_front(cfg.model, ScalarWhich::U_eq, s1, cfg.front_grid),
                               solve_scalar_front(cfg.model, ScalarWhich::V_eq, s2, cfg.front_grid));
  }
  const Selector sel = Selector::parse(selector);
  const auto front = solve_system_front({cfg.model, cfg.c}, cfg.front_grid);
  return build_front_family(front, make_orbit(cfg), sel);
}

std::string to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::Front: return "front";
    case PlotKind::Tail: return "tail";
    case PlotKind::Sandwich: return "sandwich";
  }
  return "?";
}

PlotKind plot_kind_from(const std::string& s) {
  for (PlotKind k : {PlotKind::Front, PlotKind::Tail, PlotKind::Sandwich})
    if (to_string(k) == s) return k;
  fail(ErrorKind::InvalidArgument, "unknown plot kind '" + s + "' (front, tail, sandwich)");
}

fs::path emit_plot_script(const std::vector<fs::path>& artifacts, PlotKind kind, const fs::path& out_dir) {
  auto find = [&](const std::string& name, bool required) -> fs::path {
    for (const auto& a : artifacts)
      if (a.filename() == name) {
        if (!fs::exists(a)) fail(ErrorKind::MissingArtifact, "artifact not found: " + a.string());
        return a;
      }
    if (required) fail(ErrorKind::MissingArtifact, "plot kind " + to_string(kind) + " needs " + name);
    return {};
  };
  for (const auto& a : artifacts)
    if (!fs::exists(a)) fail(ErrorKind::MissingArtifact, "artifact not found: " + a.string());

  std::ostringstream gp;
  gp << "set datafile separator ','\nset key autotitle columnhead\n";
  fs::path anchor;
  switch (kind) {
    case PlotKind::Front: {
      anchor = find("front.csv", true);
      gp << "set xlabel 'xi'\nset title 'front profile'\n"
         << "plot '" << anchor.string() << "' using 1:2 with lines title 'phi', \\\n"
         << "     '' using 1:3 with lines title 'psi'\n";
      break;
    }
    case PlotKind::Tail: {
      anchor = find("front.csv", true);
      const auto tails = Json::parse(read_file(find("tails.json", true)));
      const double us = tails.at("u_star").get<double>();
      const double vs = tails.at("v_star").get<double>();
      auto rate = [&](const char* side, const char* key) {
        const auto& s = tails.at(side);
        return s.contains(key) ? s.at(key).get<double>() : std::nan("");
      };
      gp << "set xlabel 'xi'\nset logscale y\nset format y '%g'\n"
         << "us = " << format_double(us) << "\nvs = " << format_double(vs) << "\n"
         << "lp = " << format_double(rate("plus", "predicted_rate")) << "\n"
         << "lm = " << format_double(rate("minus", "predicted_rate")) << "\n"
         << "lmpsi = " << format_double(rate("minus", "predicted_rate_psi")) << "\n"
         << "set multiplot layout 1,2\n"
         << "set title 'rising side'\nset xrange [0:*]\n"
         << "plot '" << anchor.string() << "' using 1:(us-$2) with lines title 'u* - phi', \\\n"
         << "     '' using 1:(vs-$3) with lines title 'v* - psi', \\\n"
         << "     0.5*us*exp(lp*x) with lines dashtype 2 title 'predicted slope'\n"
         << "set title 'decaying side'\nset xrange [*:0]\n"
         << "plot '" << anchor.string() << "' using 1:2 with lines title 'phi', \\\n"
         << "     '' using 1:3 with lines title 'psi', \\\n"
         << "     0.5*us*exp(lm*x) with lines dashtype 2 title 'predicted phi slope', \\\n"
         << "     0.5*vs*exp(lmpsi*x) with lines dashtype 3 title 'predicted psi slope'\n"
         << "unset multiplot\n";
      break;
    }
    case PlotKind::Sandwich: {
      anchor = find("sandwich.csv", true);
      gp << "set xlabel 't'\nset ylabel 'worst margin'\nset title 'sandwich margin'\n"
         << "plot '" << anchor.string() << "' using 1:2 with linespoints title 'min margin', 0 notitle\n";
      const auto snaps = find("snapshots.csv", false);
      if (!snaps.empty()) {
        gp << "pause -1\nset view map\nset xlabel 't'\nset ylabel 'x'\nset title 'u(x, t)'\n"
           << "splot '" << snaps.string() << "' using 1:2:3 with points palette pointsize 0.3 notitle\n";
      }
      break;
    }
  }
  const fs::path dir = out_dir.empty() ? anchor.parent_path() : out_dir;
  const fs::path script = dir / ("plot_" + to_string(kind) + ".gp");
  write_atomic(script, gp.str());
  return script;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Run run(out, err);
  std::string config_path, out_dir;
  try {
    const std::string cfg_file = find_config(args);
    if (!cfg_file.empty()) run.cfg = run_config_from_json(Json::parse(read_file(cfg_file)));
  } catch (const nlohmann::json::exception& e) {
    err << "error: InvalidArgument: config is not valid JSON: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (const char* env = std::getenv("LVFRONT_OUTPUT_DIR"); env && *env) run.cfg.output_dir = env;

  CLI::App app{"Traveling fronts and entire solutions of the diffusive Lotka-Volterra competition system"};
  app.require_subcommand(1);
  auto* classify = app.add_subcommand("classify", "competition regime of (k1, k2)");
  auto* spectral = app.add_subcommand("spectral", "eigenvalues, multiplicity case and homotopy check");
  auto* front = app.add_subcommand("front", "solve the system front, fit tails, certify tail constants");
  auto* odefree = app.add_subcommand("odefree", "diffusion-free orbit and logistic envelopes");
  auto* supersub = app.add_subcommand("supersub", "verify the super-/sub-solution inequalities");
  auto* simulate = app.add_subcommand("simulate", "PDE run from the sub-solution with sandwich check");
  auto* entire = app.add_subcommand("entire", "backward starts and their Cauchy gaps");
  auto* check42 = app.add_subcommand("check42", "symmetry, backward decay, edge decay and final bounds");
  auto* probe = app.add_subcommand("probe", "derivative bounds along a PDE run");
  auto* plot = app.add_subcommand("plot", "emit a gnuplot script for saved artifacts");
  for (auto* sub : {classify, spectral, front, odefree, supersub, simulate, entire, check42, probe, plot})
    add_common(sub, run.cfg, config_path, out_dir);

  spectral->add_flag("--suite", run.suite, "run the randomized split suite");
  spectral->add_option("--draws", run.cfg.draws);
  front->add_option("action", run.front_action, "solve (default)");
  front->add_option("--half-length", run.cfg.front_grid.half_length);
  front->add_option("--points", run.cfg.front_grid.n_points);
  odefree->add_option("--theta1", run.cfg.theta1);
  odefree->add_option("--theta2", run.cfg.theta2);
  odefree->add_option("--T", run.cfg.orbit_T);
  add_pair_options(supersub, run.cfg);
  supersub->add_option("--lattice-nx", run.cfg.lattice.nx);
  supersub->add_option("--lattice-nt", run.cfg.lattice.nt);
  supersub->add_option("--x-range", run.cfg.lattice.x_hi, "lattice covers [-x, x]");
  supersub->add_option("--t-range", run.cfg.lattice.t_hi, "lattice covers [-t, t]");
  for (auto* sub : {simulate, entire, check42, probe}) {
    add_pair_options(sub, run.cfg);
    add_scheme_options(sub, run);
  }
  for (auto* sub : {entire, check42}) {
    sub->add_option("--n", run.cfg.n_list, "backward start times, e.g. 5,10,20")->delimiter(',');
    sub->add_option("--window-start", run.cfg.window_start);
    sub->add_option("--window-end", run.cfg.window_end);
    sub->add_option("--window-interval", run.cfg.window_interval);
  }
  entire->add_flag("--require-properties", run.require_properties, "also fail when a property check fails");
  plot->add_option("--kind", run.plot_kind, "front, tail or sandwich");
  plot->add_option("--artifacts", run.artifacts, "comma-separated artifact paths")->delimiter(',')->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return 2;
  }
  if (!out_dir.empty()) run.cfg.output_dir = out_dir;
  if (supersub->parsed()) {
    run.cfg.lattice.x_lo = -run.cfg.lattice.x_hi;
    run.cfg.lattice.t_lo = -run.cfg.lattice.t_hi;
  }
  if (run.second_order) {
    run.cfg.scheme.theta = 0.5;
    run.cfg.scheme.heun_reaction = true;
  }

  try {
    if (!(supersub->parsed() && (run.cfg.selector == "all" || run.cfg.selector == "scalar"))) {
      run.cfg.validate();
    } else {
      RunConfig probe_cfg = run.cfg;
      probe_cfg.selector = "110";
      probe_cfg.validate();
    }
    std::error_code ec;
    fs::create_directories(run.cfg.output_dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + run.cfg.output_dir.string() + ": " + ec.message());
    run.write_json("run_config.json", to_json(run.cfg));

    if (classify->parsed()) return cmd_classify(run);
    if (spectral->parsed()) return cmd_spectral(run);
    if (front->parsed()) return cmd_front(run);
    if (odefree->parsed()) return cmd_odefree(run);
    if (supersub->parsed()) return cmd_supersub(run);
    if (simulate->parsed()) return cmd_simulate(run, false);
    if (probe->parsed()) return cmd_simulate(run, true);
    if (entire->parsed()) return cmd_entire(run, false);
    if (check42->parsed()) return cmd_entire(run, true);
    if (plot->parsed()) return cmd_plot(run);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args, out, err);
}

}  // namespace lvfront
