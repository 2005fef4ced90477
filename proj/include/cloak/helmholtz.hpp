// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cloak/media.hpp"
#include "cloak/types.hpp"

namespace cloak::helmholtz {

using geometry::Branch;
using geometry::CoatingSpec;

// ---------------------------------------------------------------------------
// Radial Sturm-Liouville reduction: (p u')' + (k^2 w - l(l+1) q) u = w f.
// ---------------------------------------------------------------------------

struct RadialCoefficients {
  std::function<Real(Real)> p;  ///< radial flux weight |g|^{1/2} g^{rr} r^2
  std::function<Real(Real)> w;  ///< volume weight |g|^{1/2} r^2
  std::function<Real(Real)> q;  ///< tangential weight multiplying l(l+1)
  Branch branch = Branch::ExteriorN1;
};

/// Coefficients assembled from the coating media on the requested branch.
/// Unsupported (non-radially-symmetric) specs are rejected upstream by
/// CoatingSpec::validate; all catalogued kinds are symmetric.
RadialCoefficients radial_coefficients(const CoatingSpec& spec, Branch branch);

/// Homogeneous-ball reference coefficients (p, w, q) = (r^2, r^2, 1).
RadialCoefficients reference_coefficients();

// ---------------------------------------------------------------------------
// Modes.
// ---------------------------------------------------------------------------

enum class SeedKind {
  PullbackRegular,  ///< analytic pullback ansatz j_l(k rho(r)) near Sigma
  UnitDirichlet     ///< (u, phi) = (1, 0): degenerate-Neumann lining seed
};

struct ModeSample {
  Real r = 0.0;
  Real u = 0.0;
  Real phi = 0.0;  ///< metric flux p u' = |g|^{1/2} g^{rr} r^2 u'
};

struct RadialMode {
  int l = 0;
  Real k = 0.0;
  Branch branch = Branch::ExteriorN1;
  std::vector<ModeSample> samples;  ///< r strictly increasing
  Real seed_radius_offset = 0.0;    ///< (r - a) at the seed
  SeedKind seed = SeedKind::PullbackRegular;
  Real ode_residual = 0.0;  ///< sup of the flux-balance residual, normalized

  const ModeSample& at_outer() const { return samples.back(); }
  Real max_abs_u() const;
  Real max_abs_phi() const;
};

struct SolveOptions {
  Real seed_radius = 1e-8;  ///< offset from Sigma where integration starts
  Real rel_tol = 1e-12;
  Real abs_tol = 1e-300;  ///< pure relative control; modes span many decades
  int near_samples = 49;  ///< log-spaced samples in the boundary layer
  int bulk_samples = 129;
};

/// Integrates the exterior singular mode ODE from Sigma out to the boundary.
/// Throws ToleranceError on integrator failure.
RadialMode solve_exterior_mode(const CoatingSpec& spec, int l, Real k,
                               SeedKind seed = SeedKind::PullbackRegular,
                               const SolveOptions& opts = {});

/// Interior branch of the double coating (the blown-up round manifold),
/// integrated from the regular center out to Sigma^-.
RadialMode solve_interior_mode(const CoatingSpec& spec, int l, Real k,
                               const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Boundary spectral data.
// ---------------------------------------------------------------------------

enum class NormalKind { MetricConormal, EuclideanNormal };

struct DtnEntry {
  int l = 0;
  Real k = 0.0;
  Real lambda = 0.0;
  bool dirichlet_resonance = false;  ///< u(R) vanished; excluded from spectrum
};

/// Metric-normal logarithmic derivative of the mode at the outer boundary.
/// With the metric-unit conormal the cloaked and homogeneous values are
/// directly comparable (the Euclidean radial derivative differs by the
/// boundary metric stretch).
DtnEntry dtn_eigenvalue(const CoatingSpec& spec, const RadialMode& mode,
                        NormalKind normal = NormalKind::MetricConormal);

/// Analytic homogeneous reference Lambda = k j_l'(kR) / j_l(kR).
DtnEntry reference_dtn(int l, Real k, Real outer_radius,
                       NormalKind normal = NormalKind::MetricConormal);

// ---------------------------------------------------------------------------
// Energy accounting near Sigma.
// ---------------------------------------------------------------------------

enum class EnergyVerdict { Finite, Divergent };

struct EnergyReport {
  /// (delta_i, Dirichlet integral over a < r - a < delta_i), outermost first;
  /// integrals start at the sampling floor recorded below.
  std::vector<std::pair<Real, Real>> shell_integrals;
  Real l2_weighted = 0.0;
  Real floor = 0.0;  ///< innermost (r - a) reachable by the data
  EnergyVerdict verdict = EnergyVerdict::Finite;
};

/// Shell Dirichlet integrals of a callable mode profile (u, u') for degree l.
EnergyReport energy_near_sigma(const RadialCoefficients& coeffs, int l,
                               const std::function<Real(Real)>& u,
                               const std::function<Real(Real)>& du,
                               const std::vector<Real>& shells, Real floor = 1e-8,
                               Real sigma_radius = 1.0);

/// Shell Dirichlet integrals of a solved mode (interpolates its samples).
EnergyReport energy_near_sigma(const CoatingSpec& spec, const RadialMode& mode,
                               const std::vector<Real>& shells);

// ---------------------------------------------------------------------------
// Interior problems (single coating).
// ---------------------------------------------------------------------------

struct ShellSource {
  Real radius = 0.5;     ///< support radius, must respect the gap to Sigma
  Real flux_jump = 1.0;  ///< jump of the metric flux across the shell
};

struct InteriorSolution {
  RadialMode mode;
  bool resonance = false;        ///< |j_l'(ka)| below threshold: nonunique
  bool compatible = true;        ///< solvable despite resonance
  Real neumann_flux_at_a = 0.0;  ///< |phi(a^-)|, zero by construction off resonance
};

/// Solves (Delta + k^2) u = f on the interior ball with the hidden Neumann
/// condition at Sigma^-, f a thin shell source (empty optional = homogeneous).
InteriorSolution interior_neumann_solve(const CoatingSpec& spec, int l, Real k,
                                        const std::optional<ShellSource>& source,
                                        const SolveOptions& opts = {});

struct OverdeterminedResult {
  Real residual = 0.0;  ///< |d_nu u(a)| of the trace-c interior solution
  bool infinite_obstruction = false;  ///< Dirichlet resonance at Sigma
  bool spatial_h1_exists = false;     ///< residual below 1e-8 |c| k
};

/// Obstruction to a spatial-H1 solution: unique interior solution with
/// u(a) = c, regular at the origin, evaluated for its Neumann data at a.
OverdeterminedResult overdetermined_residual(Real k, int l, Real c,
                                             const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Cauchy-data comparison (the invisibility table).
// ---------------------------------------------------------------------------

enum class ScenarioVariant { VirtualSurface, PhysicalNeumannLining };

struct CauchyRow {
  int l = 0;
  Real k = 0.0;
  Real lambda_cloaked = 0.0;
  Real lambda_reference = 0.0;
  Real rel_discrepancy = 0.0;
  bool resonance = false;
  std::string error;  ///< nonempty when the cell failed; neighbors unaffected
};

struct CauchyMatchReport {
  std::vector<CauchyRow> rows;
  Real max_rel_discrepancy = 0.0;
  ScenarioVariant variant = ScenarioVariant::VirtualSurface;
  /// Interior-branch resonances encountered (double coating); informational,
  /// never coupled to the exterior rows.
  std::vector<std::pair<int, Real>> interior_resonances;
};

CauchyMatchReport cauchy_match_report(const CoatingSpec& spec, int l_max,
                                      const std::vector<Real>& k_grid,
                                      ScenarioVariant variant,
                                      const SolveOptions& opts = {});

}  // namespace cloak::helmholtz
