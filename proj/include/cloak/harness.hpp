// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cloak/geometry.hpp"
#include "cloak/types.hpp"

namespace cloak::harness {

using geometry::CoatingSpec;

// ---------------------------------------------------------------------------
// Declarative scenario configuration (strict JSON on disk).
// ---------------------------------------------------------------------------

struct SourceConfig {
  std::string type;  // point-dipole | shell-current | non-radiating-synthetic
  std::vector<Real> location{0, 0, 0};
  std::vector<Real> moment{0, 0, 1};
  Real radius = 0.5;
  int l = 1;
  int m = 0;
  Real amplitude = 1.0;
  Real support_radius = 0.6;
  int count = 1;  // replicated with randomized parameters when > 1
};

struct CheckConfig {
  std::string name;
  Real threshold = 0.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  CoatingSpec spec = CoatingSpec::single_ball();
  std::string equation = "helmholtz";  // helmholtz | maxwell-ball | maxwell-cylinder
  int l_max = 10;
  int n_max = 5;
  std::vector<Real> beta_over_k{0.0, 0.3, 0.9};
  std::vector<Real> k_grid{0.5, 1.0, 2.0, 5.0};
  std::vector<SourceConfig> sources;
  std::string variant = "virtual-surface";  // | physical-lining | shs | pec
  Real integrator_rel = 1e-12;
  Real verdict_tol = 1e-8;
  Real seed_radius = 1e-8;
  Real pec_standoff = 0.05;
  unsigned rng_seed = 20260810;
  std::vector<CheckConfig> checks;
  std::string output_dir = ".";
  std::vector<std::string> formats{"tsv"};

  void validate() const;
};

/// Strict parse: unknown keys are errors; missing keys keep defaults.
ScenarioConfig parse_config(const std::string& json_text);
std::string serialize_config(const ScenarioConfig& config);

// ---------------------------------------------------------------------------
// Report bundle.
// ---------------------------------------------------------------------------

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  Real measured = 0.0;
  Real threshold = 0.0;
  std::string detail;
};

struct ReportBundle {
  std::string scenario;
  std::vector<Table> tables;
  std::vector<CheckResult> checks;
  std::vector<std::string> cell_errors;  ///< isolated per-cell failures
  std::string provenance;                ///< config hash + solver settings
};

/// Runs the scenario over its declared grids; deterministic given the config;
/// per-cell failures are recorded, never abort the bundle.
ReportBundle run_scenario(const ScenarioConfig& config, int jobs = 1);

/// Re-runs the scenario per sweep value of one parameter and reports the
/// discrepancy-vs-parameter curve with a monotonicity flag.
struct ConvergenceCurve {
  std::string parameter;
  std::vector<Real> values;
  std::vector<Real> discrepancies;
  bool monotone = false;
};
ConvergenceCurve convergence_study(const ScenarioConfig& config,
                                   const std::string& parameter,
                                   const std::vector<Real>& values);

/// Writes tables (delimiter-separated + JSON schema sidecars) and a summary;
/// byte-stable for identical bundles. Returns the file paths written.
std::vector<std::string> export_bundle(const ReportBundle& bundle,
                                       const std::string& dir,
                                       const std::vector<std::string>& formats);

// ---------------------------------------------------------------------------
// Bundled canonical scenarios (one per acceptance criterion).
// ---------------------------------------------------------------------------

struct BundledScenario {
  std::string name;
  std::string description;
  std::string config_json;
};
const std::vector<BundledScenario>& bundled_scenarios();
std::optional<ScenarioConfig> find_bundled(const std::string& name);

/// Deterministic FNV-1a hash of the canonical serialized config.
std::string config_hash(const ScenarioConfig& config);

/// Fixed-precision number formatting used by all exports ("%.12e").
std::string fmt(Real v);
std::string fmt(Complex v);  // "re,im" pair is split by callers; this joins

}  // namespace cloak::harness
