#pragma once

#include "steklov/perturbation.hpp"
#include "steklov/radial_model.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace steklov {

enum class Command { forward, perturb, reconstruct, muntz, sweep, ks_check };

std::string to_string(Command c);
Command parse_command(const std::string& name);

/// Effective configuration of one run. Every field has a default; a JSON
/// object overrides any subset of them.
struct RunConfig {
  Command command = Command::forward;
  int d = 3;
  double delta = 0.0;
  double T = 2.0;
  int K = 16;
  int M = 256;
  ClosedForm base;
  std::vector<double> coeffs;
  std::optional<GeometricTail> tail;
  std::string route;             // forward: ode | laplace | closed_form; empty picks a default
  double x_max = 12.0;           // ODE truncation
  double tolerance = 1e-10;      // ODE step-halving tolerance
  std::vector<double> scales{1e-1, 1e-2, 1e-3, 1e-4};
  int K_max = 8192;
  double B = 1.0;
  int n = 10;                    // muntz degree
  std::string output;            // empty writes to the default stream
  unsigned precision = 256;      // bits
  int workers = 1;
  long long seed = 0;
};

/// Reads a configuration from JSON, starting from `defaults`. Unknown keys are
/// rejected so that misspelled parameters do not pass silently.
RunConfig config_from_json(const nlohmann::json& j, RunConfig defaults = {});
nlohmann::json config_to_json(const RunConfig& cfg);

/// Checks every precondition of the selected command without computing anything.
void validate_config(const RunConfig& cfg);

/// Executes the command. Results go to cfg.output (or `out` when empty), errors
/// to `err`. Returns 0 on success, 2 on validation failure, 3 on numerical failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace steklov
