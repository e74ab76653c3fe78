#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "ermakov/cli/config.hpp"

namespace ermakov::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitConfig = 2;

struct VerifyFlags {
  std::optional<std::string> suite;
  bool debug_tamper = false;  // perturbs J34 by 0.1 r
};

/// Writes trajectory.csv and drift.json.
int cmd_simulate(const RunConfig& config, std::ostream& log);
/// Writes verify_<suite>.json.
int cmd_verify(const RunConfig& config, const VerifyFlags& flags, std::ostream& log);
/// Writes orbit.json and orbit_trajectory.csv.
int cmd_orbit(const RunConfig& config, std::ostream& log);
/// Writes orbit_curve.csv and linearize.json.
int cmd_linearize(const RunConfig& config, std::ostream& log);

/// Full command-line entry point.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// %.17g
std::string format_double(double x);

}  // namespace ermakov::cli
