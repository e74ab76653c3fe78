#include "ermakov/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ermakov/errors.hpp"
#include "ermakov/expr.hpp"
#include "ermakov/func_handle.hpp"

namespace ermakov::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing '" + key + "' in " + where);
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::optional<double> optional_number(const json& obj, const std::string& key,
                                      const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj, key, where);
}

double positive(double x, const std::string& what) {
  if (!(x > 0.0)) throw ConfigError(what + " must be positive");
  return x;
}

std::string text_or(const json& obj, const std::string& key, const std::string& fallback,
                    const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("'" + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

std::size_t count_or(const json& obj, const std::string& key, std::size_t fallback,
                     const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("'" + key + "' in " + where + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

Range range_or(const json& obj, const std::string& key, Range fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("'" + key + "' in " + where + " must be [lo, hi]");
  }
  Range r{v[0].get<double>(), v[1].get<double>()};
  if (!(r.hi > r.lo)) throw ConfigError("'" + key + "' in " + where + " must have lo < hi");
  return r;
}

Expr parse_field(const std::string& text, const std::string& role) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ConfigError("system." + role + " = \"" + text + "\": " + e.what());
  }
}

Floors parse_floors(const json& doc) {
  Floors f;
  if (!doc.contains("floors")) return f;
  const json& o = doc.at("floors");
  reject_unknown(o, "floors", {"v_min", "u_min", "r_min"});
  f.v_min = positive(number_or(o, "v_min", f.v_min, "floors"), "floors.v_min");
  f.u_min = positive(number_or(o, "u_min", f.u_min, "floors"), "floors.u_min");
  f.r_min = positive(number_or(o, "r_min", f.r_min, "floors"), "floors.r_min");
  return f;
}

void parse_system(const json& doc, RunConfig& cfg, const Floors& floors) {
  if (!doc.contains("system")) throw ConfigError("missing 'system'");
  const json& o = doc.at("system");
  reject_unknown(o, "system",
                 {"class", "G", "F", "phi", "V", "psi", "chi", "lambda0", "quad_tol"});
  cfg.system_class = text_or(o, "class", "", "system");
  auto expr = [&](const std::string& key, const std::string& fallback) {
    const std::string text = text_or(o, key, fallback, "system");
    if (text.empty()) throw ConfigError("system." + key + " is required for " + cfg.system_class);
    cfg.expressions[key] = text;
    return parse_field(text, key);
  };
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (o.contains(k)) throw ConfigError(std::string("system.") + k + " does not apply to " +
                                           cfg.system_class);
    }
  };
  if (cfg.system_class == "class1") {
    forbid({"V", "psi", "chi", "lambda0", "quad_tol"});
    const Expr G = expr("G", "0");
    const Expr F = expr("F", "0");
    const Expr phi = expr("phi", "");
    cfg.spec = SystemSpec::class1(G, FuncHandle::from_expr(phi), F, floors);
  } else if (cfg.system_class == "class2") {
    forbid({"V", "phi"});
    const Expr G = expr("G", "0");
    const Expr F = expr("F", "0");
    const Expr psi = expr("psi", "");
    const Expr chi = expr("chi", "0");
    require_variables(chi, {var::r, var::theta, var::t}, "chi");
    const double lambda0 = number_or(o, "lambda0", 0.0, "system");
    const double tol = positive(number_or(o, "quad_tol", 1e-12, "system"), "system.quad_tol");
    cfg.spec = SystemSpec::class2(G, FuncHandle::from_expr(psi), chi, F, lambda0, tol, floors);
  } else if (cfg.system_class == "pseudo_potential") {
    forbid({"F", "phi", "psi", "chi", "lambda0", "quad_tol"});
    const Expr G = expr("G", "0");
    const Expr V = expr("V", "");
    cfg.spec = SystemSpec::pseudo_potential(G, V, floors);
  } else {
    throw ConfigError("system.class must be class1, class2 or pseudo_potential");
  }
  require_variables(cfg.spec.G(), {var::theta}, "G");
  require_variables(cfg.spec.F(), {var::theta}, "F");
}

PhaseState parse_state(const json& doc) {
  if (!doc.contains("initial_state")) throw ConfigError("missing 'initial_state'");
  const json& o = doc.at("initial_state");
  const std::string where = "initial_state";
  try {
    if (o.contains("cartesian")) {
      reject_unknown(o, where, {"cartesian"});
      const json& c = o.at("cartesian");
      reject_unknown(c, "initial_state.cartesian", {"x", "y", "xdot", "ydot"});
      return polar_from_cartesian(number(c, "x", where), number(c, "y", where),
                                  number(c, "xdot", where), number(c, "ydot", where));
    }
    reject_unknown(o, where, {"r", "theta", "u", "v"});
    return PhaseState(number(o, "r", where), number(o, "theta", where), number(o, "u", where),
                      number(o, "v", where));
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("initial_state: ") + e.what());
  }
}

IntegratorOptions parse_integrator(const json& doc) {
  IntegratorOptions opt;
  if (!doc.contains("integrator")) return opt;
  const json& o = doc.at("integrator");
  const std::string where = "integrator";
  reject_unknown(o, where, {"method", "dt", "rtol", "atol", "h_max", "max_steps"});
  const std::string method = text_or(o, "method", "dopri45", where);
  if (method == "dopri45") {
    opt.method = Method::DormandPrince45;
  } else if (method == "rk4") {
    opt.method = Method::RK4;
  } else {
    throw ConfigError("integrator.method must be dopri45 or rk4");
  }
  opt.dt = positive(number_or(o, "dt", opt.dt, where), "integrator.dt");
  opt.rtol = positive(number_or(o, "rtol", opt.rtol, where), "integrator.rtol");
  opt.atol = positive(number_or(o, "atol", opt.atol, where), "integrator.atol");
  opt.h_max = positive(number_or(o, "h_max", opt.h_max, where), "integrator.h_max");
  opt.max_steps = count_or(o, "max_steps", opt.max_steps, where);
  if (opt.max_steps == 0) throw ConfigError("integrator.max_steps must be positive");
  return opt;
}

VerifyConfig parse_verification(const json& doc) {
  VerifyConfig v;
  if (!doc.contains("verification")) return v;
  const json& o = doc.at("verification");
  const std::string where = "verification";
  reject_unknown(o, where,
                 {"suite", "samples", "seed", "fd_step", "tolerances", "sampling",
                  "determinant_reference", "casimir_potential", "consistency_phi"});
  v.suite = text_or(o, "suite", v.suite, where);
  v.samples = count_or(o, "samples", v.samples, where);
  if (o.contains("seed")) {
    if (!o.at("seed").is_number_unsigned()) throw ConfigError("verification.seed must be a non-negative integer");
    v.seed = o.at("seed").get<std::uint64_t>();
  }
  v.fd_step = positive(number_or(o, "fd_step", v.fd_step, where), "verification.fd_step");
  if (o.contains("tolerances")) {
    const json& t = o.at("tolerances");
    std::set<std::string> names;
    for (const auto& [k, _] : v.tolerances) names.insert(k);
    reject_unknown(t, "verification.tolerances", names);
    for (const auto& [k, val] : t.items()) {
      v.tolerances[k] = positive(number(t, k, "verification.tolerances"), "verification.tolerances." + k);
    }
  }
  if (o.contains("sampling")) {
    const json& s = o.at("sampling");
    const std::string w = "verification.sampling";
    reject_unknown(s, w, {"r", "theta", "u_abs_max", "u_floor", "v", "t", "branch"});
    SamplingBox& b = v.sampling;
    const Range r = range_or(s, "r", {b.r_lo, b.r_hi}, w);
    const Range th = range_or(s, "theta", {b.theta_lo, b.theta_hi}, w);
    const Range vv = range_or(s, "v", {b.v_lo, b.v_hi}, w);
    const Range tt = range_or(s, "t", {b.t_lo, b.t_hi}, w);
    if (!(r.lo > 0.0)) throw ConfigError("verification.sampling.r must be positive");
    if (!(vv.lo > 0.0)) throw ConfigError("verification.sampling.v is a magnitude range and must be positive");
    b.r_lo = r.lo;
    b.r_hi = r.hi;
    b.theta_lo = th.lo;
    b.theta_hi = th.hi;
    b.v_lo = vv.lo;
    b.v_hi = vv.hi;
    b.t_lo = tt.lo;
    b.t_hi = tt.hi;
    b.u_abs_max = positive(number_or(s, "u_abs_max", b.u_abs_max, w), w + ".u_abs_max");
    b.u_floor = number_or(s, "u_floor", b.u_floor, w);
    if (b.u_floor < 0.0 || !(b.u_floor < b.u_abs_max)) {
      throw ConfigError("verification.sampling.u_floor must lie in [0, u_abs_max)");
    }
    const double branch = number_or(s, "branch", 0.0, w);
    if (branch != 0.0 && branch != 1.0 && branch != -1.0) {
      throw ConfigError("verification.sampling.branch must be -1, 0 or 1");
    }
    b.branch = static_cast<int>(branch);
  }
  v.determinant_reference = text_or(o, "determinant_reference", v.determinant_reference, where);
  if (v.determinant_reference != "published" && v.determinant_reference != "pfaffian") {
    throw ConfigError("verification.determinant_reference must be published or pfaffian");
  }
  if (o.contains("casimir_potential")) {
    v.casimir_potential = text_or(o, "casimir_potential", "", where);
    parse_field(*v.casimir_potential, "casimir_potential");
  }
  if (o.contains("consistency_phi")) {
    v.consistency_phi = text_or(o, "consistency_phi", "", where);
    parse_field(*v.consistency_phi, "consistency_phi");
  }
  return v;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const json& document) {
  if (!document.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(document, "config",
                 {"system", "floors", "initial_state", "time", "integrator", "verification",
                  "simulate", "orbit", "linearize", "output"});
  RunConfig cfg;
  cfg.document = document;
  cfg.hash = fnv1a_hex(document.dump());
  const Floors floors = parse_floors(document);
  parse_system(document, cfg, floors);
  cfg.s0 = parse_state(document);

  if (document.contains("time")) {
    const json& t = document.at("time");
    reject_unknown(t, "time", {"t0", "t1"});
    cfg.t0 = number_or(t, "t0", 0.0, "time");
    cfg.t1 = number(t, "t1", "time");
  }
  if (!(cfg.t1 > cfg.t0)) throw ConfigError("time.t1 must exceed time.t0");

  cfg.integrator = parse_integrator(document);
  cfg.verification = parse_verification(document);

  if (document.contains("simulate")) {
    const json& o = document.at("simulate");
    reject_unknown(o, "simulate", {"drift_tolerance"});
    cfg.simulate.drift_tolerance = optional_number(o, "drift_tolerance", "simulate");
    if (cfg.simulate.drift_tolerance) positive(*cfg.simulate.drift_tolerance, "simulate.drift_tolerance");
  }
  if (document.contains("orbit")) {
    const json& o = document.at("orbit");
    reject_unknown(o, "orbit", {"tolerance", "time_tolerance", "theta_end"});
    cfg.orbit.tolerance = positive(number_or(o, "tolerance", cfg.orbit.tolerance, "orbit"), "orbit.tolerance");
    cfg.orbit.time_tolerance = positive(number_or(o, "time_tolerance", cfg.orbit.time_tolerance, "orbit"),
                                        "orbit.time_tolerance");
    cfg.orbit.theta_end = optional_number(o, "theta_end", "orbit");
  }
  if (document.contains("linearize")) {
    const json& o = document.at("linearize");
    const std::string w = "linearize";
    reject_unknown(o, w,
                   {"tolerance", "theta", "t_param", "rbar_range", "abar_range", "grid",
                    "affinity_threshold"});
    LinearizeConfig& l = cfg.linearize;
    l.tolerance = positive(number_or(o, "tolerance", l.tolerance, w), "linearize.tolerance");
    l.theta = optional_number(o, "theta", w);
    l.t_param = optional_number(o, "t_param", w);
    l.rbar_range = range_or(o, "rbar_range", l.rbar_range, w);
    if (!(l.rbar_range.lo > 0.0)) throw ConfigError("linearize.rbar_range must be positive");
    l.abar_range = range_or(o, "abar_range", l.abar_range, w);
    l.grid = count_or(o, "grid", l.grid, w);
    if (l.grid < 6) throw ConfigError("linearize.grid must be at least 6");
    l.affinity_threshold = positive(number_or(o, "affinity_threshold", l.affinity_threshold, w),
                                    "linearize.affinity_threshold");
  }
  if (document.contains("output")) {
    const json& o = document.at("output");
    reject_unknown(o, "output", {"dir"});
    cfg.out_dir = text_or(o, "dir", cfg.out_dir, "output");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

}  // namespace ermakov::cli
