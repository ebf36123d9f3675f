#pragma once

// Declarative run configuration read from JSON. The schema is documented in
// docs/config.md; unknown keys anywhere in the tree are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "earnshaw/casimir.hpp"
#include "earnshaw/classical.hpp"
#include "earnshaw/stability.hpp"

namespace earnshaw::config {

struct SweepSpec {
  std::string target;
  Vec3 direction = Vec3::UnitZ();
  std::vector<double> offsets;
  bool force = false;
};

struct PlatesSpec {
  materials::Medium plate1;
  materials::Medium plate2;
  std::vector<double> gaps;
  double tol = 1e-8;
};

struct McSpec {
  std::string target;
  classical::McOptions options;
  bool quadrature = true;  ///< also report the quadrature finite-difference reference
  double fd_step = 0.05;
  classical::QuadratureOptions quadrature_options;
};

struct RunConfig {
  std::string length_unit = "L";
  materials::Medium medium;  ///< shared by the sphere configuration and the plates
  double tau = 0.0;
  std::optional<casimir::Configuration> casimir;
  casimir::EnergyOptions energy;
  stability::StabilityOptions stability;
  bool decomposition = true;
  std::vector<std::string> targets;  ///< objects for force/stability; empty means all
  std::optional<SweepSpec> sweep;
  std::optional<PlatesSpec> plates;
  std::optional<classical::ClassicalConfig> classical;
  std::optional<McSpec> mc;
  std::uint64_t seed = 1;
  std::string output = "-";
};

/// Parses and validates. Throws ValidationError (schema, values) or
/// GeometryError (overlaps, non-positive gaps, swept configurations).
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace earnshaw::config
