#include "ermakov/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "ermakov/errors.hpp"
#include "ermakov/invariants.hpp"
#include "ermakov/linearize.hpp"
#include "ermakov/poisson.hpp"
#include "ermakov/verify.hpp"

namespace ermakov::cli {

using ojson = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

void write_json(const RunConfig& cfg, const std::string& name, const ojson& report) {
  write_file(cfg.out_dir, name, report.dump(2) + "\n");
}

std::string csv_line(std::initializer_list<double> values) {
  std::string line;
  bool first = true;
  for (double v : values) {
    if (!first) line += ',';
    line += format_double(v);
    first = false;
  }
  line += '\n';
  return line;
}

ojson conventions_json(const Conventions& c) {
  ojson j;
  j["lambda_lower"] = c.lambda_lower;
  j["c2_lower"] = c.c2_lower;
  j["c2_branch"] = c.c2_branch;
  return j;
}

ojson report_header(const RunConfig& cfg, const std::string& command) {
  ojson j;
  j["command"] = command;
  j["config_hash"] = cfg.hash;
  j["seed"] = cfg.verification.seed;
  j["conventions"] = conventions_json(conventions_for(C2Options{}));
  ojson sys;
  sys["class"] = cfg.system_class;
  for (const auto& [k, v] : cfg.expressions) sys[k] = v;
  j["system"] = sys;
  return j;
}

ojson state_json(double t, const PhaseState& s) {
  ojson j;
  j["t"] = t;
  j["r"] = s.r();
  j["theta"] = s.theta();
  j["u"] = s.u();
  j["v"] = s.v();
  return j;
}

ojson integrator_json(const IntegratorOptions& o, const StepStats& stats) {
  ojson j;
  j["method"] = o.method == Method::RK4 ? "rk4" : "dopri45";
  if (o.method == Method::RK4) {
    j["dt"] = o.dt;
  } else {
    j["rtol"] = o.rtol;
    j["atol"] = o.atol;
  }
  j["accepted_steps"] = stats.accepted;
  j["rejected_steps"] = stats.rejected;
  j["rhs_evals"] = stats.rhs_evals;
  return j;
}

const Potential* potential_of(const SystemSpec& spec) {
  if (const auto* pp = std::get_if<PseudoPotential>(&spec.kind)) return &pp->V;
  return nullptr;
}

MatrixField tampered(MatrixField base) {
  MatrixField out;
  out.tag = MatrixClass::Custom;
  out.eval = [base = std::move(base)](const Vec4& x, double t) {
    SkewMatrix4 J = base(x, t);
    J.set(kU, kV, J(kU, kV) + 0.1 * x[kR]);
    return J;
  };
  return out;
}

class ShiftedPhi final : public FuncHandle::Impl {
 public:
  explicit ShiftedPhi(FuncHandle base) : base_(std::move(base)) {}
  double value(const FuncArgs& a) const override { return base_(a) + 0.1 * a.r; }
  std::string describe() const override { return base_.describe() + " + 0.1*r"; }

 private:
  FuncHandle base_;
};

ojson sweep_json(const SweepResult& result, const std::vector<SampledState>& states,
                 double tolerance) {
  ojson j;
  j["max"] = result.max;
  j["argmax"] = result.argmax;
  j["tolerance"] = tolerance;
  j["pass"] = result.max < tolerance;
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    ojson row = state_json(states[i].t, states[i].state);
    ojson comps = ojson::array();
    for (std::size_t k = 0; k < result.rows[i].width; ++k) comps.push_back(result.rows[i].components[k]);
    row["residuals"] = comps;
    row["value"] = result.rows[i].value;
    rows.push_back(row);
  }
  j["states"] = rows;
  return j;
}

double tolerance_of(const RunConfig& cfg, const std::string& name) {
  return cfg.verification.tolerances.at(name);
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const SystemSpec& spec = cfg.spec;
  const Potential* V = potential_of(spec);
  ojson report = report_header(cfg, "simulate");
  try {
    const Trajectory traj = integrate(spec, cfg.s0, cfg.t0, cfg.t1, cfg.integrator);
    std::vector<NamedQuantity> quantities;
    quantities.push_back({"I", [&](double, const PhaseState& s) {
                            return ermakov_invariant(spec.G(), s);
                          }});
    if (V) {
      C2Options c2;
      c2.floors = spec.floors;
      quantities.push_back({"C1", [&, V](double t, const PhaseState& s) {
                              return casimir_C1(*V, s, t, spec.floors);
                            }});
      quantities.push_back({"C2", [&, V, c2](double t, const PhaseState& s) {
                              return casimir_C2(*V, s, t, c2);
                            }});
    }
    std::string csv = V ? "t,r,theta,u,v,I,C1,C2\n" : "t,r,theta,u,v,I\n";
    for (const Sample& smp : traj.samples) {
      const PhaseState& s = smp.state;
      std::string line = format_double(smp.t);
      for (double x : {s.r(), s.theta(), s.u(), s.v()}) line += "," + format_double(x);
      for (const auto& q : quantities) line += "," + format_double(q.fn(smp.t, s));
      csv += line + "\n";
    }
    write_file(cfg.out_dir, "trajectory.csv", csv);

    const DriftReport d = drift(traj, quantities);
    report["integrator"] = integrator_json(cfg.integrator, traj.stats);
    report["initial_state"] = state_json(cfg.t0, cfg.s0);
    report["final_state"] = state_json(traj.samples.back().t, traj.samples.back().state);
    ojson entries = ojson::array();
    bool pass = true;
    for (const auto& e : d.entries) {
      ojson je;
      je["name"] = e.name;
      je["initial"] = e.initial;
      je["max_drift"] = e.max_drift;
      je["time_of_max"] = e.time_of_max;
      entries.push_back(je);
      if (cfg.simulate.drift_tolerance && !(e.max_drift < *cfg.simulate.drift_tolerance)) pass = false;
    }
    report["drift"] = entries;
    if (cfg.simulate.drift_tolerance) report["drift_tolerance"] = *cfg.simulate.drift_tolerance;
    report["pass"] = pass;
    write_json(cfg, "drift.json", report);
    log << "simulate: " << traj.samples.size() << " samples, " << (pass ? "pass" : "FAIL") << "\n";
    return pass ? kExitPass : kExitNumeric;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    report["pass"] = false;
    report["error"] = e.what();
    write_json(cfg, "drift.json", report);
    log << "simulate failed: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int cmd_verify(const RunConfig& cfg, const VerifyFlags& flags, std::ostream& log) {
  const std::string suite = flags.suite.value_or(cfg.verification.suite);
  const SystemSpec& spec = cfg.spec;
  const bool class2 = spec.system_class() == SystemClass::ClassII;

  std::optional<Potential> casimir_V;
  if (suite == "casimir") {
    if (cfg.verification.casimir_potential) {
      casimir_V = Potential::from_expr(parse(*cfg.verification.casimir_potential));
    } else if (const Potential* V = potential_of(spec)) {
      casimir_V = *V;
    } else {
      throw ConfigError("casimir suite needs a pseudo_potential system or verification.casimir_potential");
    }
  } else if (suite == "consistency") {
    if (!class2) throw ConfigError("consistency suite needs a class2 system");
  } else if (suite != "jacobi" && suite != "flow" && suite != "determinant") {
    throw ConfigError("unknown suite '" + suite + "' (jacobi, flow, casimir, consistency, determinant)");
  }

  ojson report = report_header(cfg, "verify");
  report["suite"] = suite;
  report["samples"] = cfg.verification.samples;
  report["debug_tamper"] = flags.debug_tamper;
  const std::string file = "verify_" + suite + ".json";
  try {
    const auto states = sample_states(cfg.verification.samples, cfg.verification.seed,
                                      cfg.verification.sampling);
    MatrixField field = field_for(spec);
    if (flags.debug_tamper) field = tampered(field);
    bool pass = true;

    if (suite == "jacobi") {
      const double tol = tolerance_of(cfg, "jacobi");
      const SweepResult r = jacobi_sweep(field, states, cfg.verification.fd_step);
      report["fd_step"] = cfg.verification.fd_step;
      report["result"] = sweep_json(r, states, tol);
      pass = r.max < tol;
    } else if (suite == "flow") {
      const double tol = tolerance_of(cfg, "flow");
      const SweepResult r = flow_sweep(spec, field, states);
      report["result"] = sweep_json(r, states, tol);
      pass = r.max < tol;
    } else if (suite == "casimir") {
      const double tol = tolerance_of(cfg, "casimir");
      const Potential V = *casimir_V;
      const Floors floors = spec.floors;
      C2Options c2;
      c2.floors = floors;
      const SweepResult r1 = casimir_sweep(
          field, [&](const PhaseState& s, double t) { return grad_casimir_C1(V, s, t, floors); },
          states);
      const SweepResult r2 = casimir_sweep(
          field, [&](const PhaseState& s, double t) { return grad_casimir_C2(V, s, t, c2); },
          states);
      report["C1"] = sweep_json(r1, states, tol);
      report["C2"] = sweep_json(r2, states, tol);
      pass = r1.max < tol && r2.max < tol;
    } else if (suite == "consistency") {
      const double tol = tolerance_of(cfg, "consistency");
      const auto& c2 = std::get<ClassII>(spec.kind);
      FuncHandle phi = cfg.verification.consistency_phi
                           ? FuncHandle::from_expr(parse(*cfg.verification.consistency_phi))
                           : c2.phi;
      if (flags.debug_tamper) phi = FuncHandle::from_impl(std::make_shared<ShiftedPhi>(phi));
      const SweepResult r = consistency_sweep(c2.psi, phi, states, spec.floors);
      report["result"] = sweep_json(r, states, tol);
      pass = r.max < tol;
    } else {
      if (class2) {
        const double tol = tolerance_of(cfg, "determinant");
        const FuncHandle psi = std::get<ClassII>(spec.kind).psi;
        const bool published = cfg.verification.determinant_reference == "published";
        auto reference = [&](bool use_published) -> ScalarFn {
          if (use_published) {
            return [psi](const PhaseState& s, double t) { return class2_determinant_published(psi, s, t); };
          }
          return [psi](const PhaseState& s, double t) { return class2_determinant_pfaffian(psi, s, t); };
        };
        const SweepResult r = determinant_sweep(field, reference(published), states);
        const SweepResult alt = determinant_sweep(field, reference(!published), states);
        report["reference"] = cfg.verification.determinant_reference;
        report["reference_formula"] =
            published ? "(u^2*psi/r^4)*(2*u/v^2+psi)" : "u^2*psi^2/r^4";
        report["result"] = sweep_json(r, states, tol);
        ojson other;
        other["reference"] = published ? "pfaffian" : "published";
        other["max"] = alt.max;
        report["alternative"] = other;
        pass = r.max < tol;
      } else {
        const double tol = tolerance_of(cfg, "degeneracy");
        const SweepResult r = degeneracy_sweep(field, states);
        report["reference"] = "det/|J|_F^4";
        report["result"] = sweep_json(r, states, tol);
        pass = r.max < tol;
      }
    }
    report["pass"] = pass;
    write_json(cfg, file, report);
    log << "verify " << suite << ": " << (pass ? "pass" : "FAIL") << "\n";
    return pass ? kExitPass : kExitNumeric;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    report["pass"] = false;
    report["error"] = e.what();
    write_json(cfg, file, report);
    log << "verify " << suite << " failed: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int cmd_orbit(const RunConfig& cfg, std::ostream& log) {
  const Potential* V = potential_of(cfg.spec);
  if (!V || !V->singular_oscillator) {
    throw ConfigError("orbit needs a pseudo_potential system with V = 1/(2*rbar^2)");
  }
  ojson report = report_header(cfg, "orbit");
  try {
    const SystemSpec& spec = cfg.spec;
    C2Options c2opt;
    c2opt.floors = spec.floors;
    const double c1 = casimir_C1(*V, cfg.s0, cfg.t0, spec.floors);
    const double c2 = casimir_C2(*V, cfg.s0, cfg.t0, c1, c2opt);
    const double I = ermakov_invariant(spec.G(), cfg.s0);
    report["C1"] = c1;
    report["C2"] = c2;
    report["I"] = I;
    const Trajectory traj = integrate(spec, cfg.s0, cfg.t0, cfg.t1, cfg.integrator);
    double orbit_error = 0.0;
    for (const Sample& s : traj.samples) {
      orbit_error = std::max(orbit_error,
                             std::fabs(s.state.r() - spiral_radius(c1, c2, s.state.theta())));
    }
    report["integrator"] = integrator_json(cfg.integrator, traj.stats);
    report["max_orbit_error"] = orbit_error;
    bool pass = orbit_error < cfg.orbit.tolerance;

    const double theta0 = cfg.s0.theta();
    const double theta1 = cfg.orbit.theta_end.value_or(traj.samples.back().state.theta());
    ojson tq;
    tq["theta0"] = theta0;
    tq["theta1"] = theta1;
    try {
      const double simulated = traj.time_at_theta(theta1) - cfg.t0;
      const double quadrature = elapsed_time(
          [c1, c2](double th) { return spiral_radius(c1, c2, th); }, spec.G(), I, theta0, theta1);
      tq["simulated"] = simulated;
      tq["quadrature"] = quadrature;
      report["max_time_quadrature_error"] = std::fabs(simulated - quadrature);
      pass = pass && std::fabs(simulated - quadrature) < cfg.orbit.time_tolerance;
    } catch (const PreconditionError& e) {
      if (cfg.orbit.theta_end) throw;
      tq["skipped"] = e.what();
      report["max_time_quadrature_error"] = nullptr;
    }
    report["time_quadrature"] = tq;
    report["tolerance"] = cfg.orbit.tolerance;
    report["time_tolerance"] = cfg.orbit.time_tolerance;
    report["pass"] = pass;
    write_json(cfg, "orbit.json", report);
    log << "orbit: C1 = " << format_double(c1) << ", C2 = " << format_double(c2) << ", "
        << (pass ? "pass" : "FAIL") << "\n";
    return pass ? kExitPass : kExitNumeric;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    report["pass"] = false;
    report["error"] = e.what();
    write_json(cfg, "orbit.json", report);
    log << "orbit failed: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int cmd_linearize(const RunConfig& cfg, std::ostream& log) {
  const SystemSpec& spec = cfg.spec;
  const LinearizeConfig& lc = cfg.linearize;
  ojson report = report_header(cfg, "linearize");
  try {
    const FuncHandle phi = spec.phi();
    const Trajectory traj = integrate(spec, cfg.s0, cfg.t0, cfg.t1, cfg.integrator);
    const OrbitCurve curve = to_orbit_curve(traj);
    std::string csv = "theta,rbar,abar\n";
    for (const auto& p : curve.points) csv += csv_line({p.theta, p.rbar, p.abar});
    write_file(cfg.out_dir, "orbit_curve.csv", csv);

    const double t_param = lc.t_param.value_or(cfg.t0);
    const OrbitPoint& first = curve.points.front();
    const double theta_end = curve.points.back().theta;
    const OrbitCurve chr = integrate_characteristic(phi, first.rbar, first.abar, first.theta,
                                                    theta_end, t_param, cfg.integrator);
    const double match = orbit_match(curve, chr);
    report["integrator"] = integrator_json(cfg.integrator, traj.stats);
    report["theta_range"] = ojson::array({first.theta, theta_end});
    report["t_param"] = t_param;
    report["orbit_match"] = match;
    report["tolerance"] = lc.tolerance;
    bool pass = match < lc.tolerance;

    const double theta_aff = lc.theta.value_or(first.theta);
    const AffinityResult aff = affinity_test(phi, theta_aff, t_param, lc.rbar_range,
                                             lc.abar_range, lc.grid, lc.affinity_threshold);
    ojson ja;
    ja["theta"] = theta_aff;
    ja["rbar_range"] = ojson::array({lc.rbar_range.lo, lc.rbar_range.hi});
    ja["abar_range"] = ojson::array({lc.abar_range.lo, lc.abar_range.hi});
    ja["grid"] = lc.grid;
    ja["threshold"] = lc.affinity_threshold;
    ja["affine"] = aff.affine;
    ja["A"] = aff.A;
    ja["B"] = aff.B;
    ja["C"] = aff.C;
    ja["residual"] = aff.residual;
    if (aff.affine) {
      const OrbitCurve lin = integrate_affine(aff.A, aff.B, aff.C, first.rbar, first.abar,
                                              first.theta, theta_end, cfg.integrator);
      const double err = orbit_match(chr, lin);
      ja["linear_reproduction_error"] = err;
      pass = pass && err < lc.tolerance;
    }
    report["affinity"] = ja;
    report["pass"] = pass;
    write_json(cfg, "linearize.json", report);
    log << "linearize: orbit_match = " << format_double(match)
        << ", affine = " << (aff.affine ? "true" : "false") << ", " << (pass ? "pass" : "FAIL")
        << "\n";
    return pass ? kExitPass : kExitNumeric;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    report["pass"] = false;
    report["error"] = e.what();
    write_json(cfg, "linearize.json", report);
    log << "linearize failed: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poisson structures and invariants of Ermakov systems"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  VerifyFlags vflags;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "verification seed");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "integrate and write trajectory.csv, drift.json");
  CLI::App* verify = app.add_subcommand("verify", "residual sweep over seeded states");
  CLI::App* orbit = app.add_subcommand("orbit", "spiral orbit and time quadrature checks");
  CLI::App* linearize = app.add_subcommand("linearize", "orbit curve, characteristics, affinity");
  for (CLI::App* sub : {simulate, verify, orbit, linearize}) common(sub);
  verify->add_option("--suite", vflags.suite, "jacobi|flow|casimir|consistency|determinant");
  verify->add_flag("--debug-tamper", vflags.debug_tamper, "perturb J34 to exercise failure paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) cfg.verification.seed = *seed;
    if (simulate->parsed()) return cmd_simulate(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, vflags, out);
    if (orbit->parsed()) return cmd_orbit(cfg, out);
    return cmd_linearize(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace ermakov::cli
