#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "ermakov/integrate.hpp"
#include "ermakov/linearize.hpp"
#include "ermakov/sampling.hpp"
#include "ermakov/state.hpp"
#include "ermakov/systems.hpp"
#include "json.hpp"

namespace ermakov::cli {

struct VerifyConfig {
  std::string suite = "jacobi";
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  double fd_step = 1e-5;
  std::map<std::string, double> tolerances = {
      {"jacobi", 1e-6},      {"flow", 1e-10},        {"casimir", 1e-7},
      {"consistency", 1e-7}, {"determinant", 1e-8},  {"degeneracy", 1e-10},
  };
  SamplingBox sampling;
  /// "published" or "pfaffian"
  std::string determinant_reference = "published";
  /// Pseudo potential whose Casimir gradients are tested (defaults to the system's V).
  std::optional<std::string> casimir_potential;
  /// Replaces the constructed class-II phi in the consistency suite.
  std::optional<std::string> consistency_phi;
};

struct SimulateConfig {
  std::optional<double> drift_tolerance;
};

struct OrbitConfig {
  double tolerance = 1e-6;
  double time_tolerance = 1e-5;
  std::optional<double> theta_end;
};

struct LinearizeConfig {
  double tolerance = 1e-6;
  std::optional<double> theta;    // affinity test angle, default theta0
  std::optional<double> t_param;  // frozen time, default t0
  Range rbar_range{0.5, 2.0};
  Range abar_range{-1.0, 1.0};
  std::size_t grid = 8;
  double affinity_threshold = 1e-8;
};

struct RunConfig {
  nlohmann::json document;  // as loaded, keys sorted
  std::string hash;         // FNV-1a 64 of document.dump(), hex
  std::string system_class; // "class1", "class2", "pseudo_potential"
  std::map<std::string, std::string> expressions;  // as written in the config
  SystemSpec spec;
  PhaseState s0{1.0, 0.0, 0.0, 1.0};
  double t0 = 0.0;
  double t1 = 1.0;
  IntegratorOptions integrator;
  VerifyConfig verification;
  SimulateConfig simulate;
  OrbitConfig orbit;
  LinearizeConfig linearize;
  std::string out_dir = ".";
};

/// Throws ConfigError (or ParseError for bad expressions).
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace ermakov::cli
