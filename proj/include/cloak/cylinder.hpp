// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cloak/media.hpp"
#include "cloak/types.hpp"

namespace cloak::cylinder {

using geometry::CoatingSpec;

/// Fields carry e^{i n theta + i beta z}; the state vector of the radial
/// system is x = (E_z, r E_theta, H_z, r H_theta) in the orthonormal
/// cylindrical frame. For k^2 > beta^2 the transverse wavenumber gamma is
/// real positive; evanescent beta "> k" rides the positive imaginary axis.
struct CylMode {
  int n = 0;
  Real beta = 0.0;
  Real k = 1.0;
  Complex gamma{};
  struct Sample {
    Real r;
    Vec4c state;
  };
  std::vector<Sample> samples;
};

enum class Lining {
  Shs,            ///< soft-and-hard condition at Sigma: E_theta = H_theta = 0
  Pec,            ///< perfect conductor at a finite standoff from Sigma
  VacuumControl,  ///< no coating, no obstacle: nothing scatters
};

struct ScatteringEntry {
  int n = 0;
  Real beta = 0.0;
  Real k = 1.0;
  Complex gamma{};
  /// Reflection matrix: columns = incident channel (TM, TE), rows = outgoing
  /// channel amplitude relative to a unit regular incident wave.
  Mat2c reflection = Mat2c::Zero();
  Real max_abs_reflection = 0.0;
  Real unitarity_defect = 0.0;  ///< || S* S - I || with S = I + 2 R
  std::vector<CylMode> modes;   ///< the two interior basis solutions
};

struct CylSolveOptions {
  Real seed_radius = 1e-6;    ///< SHS seed offset from Sigma
  Real pec_standoff = 0.05;   ///< PEC lining sits at r = a + standoff
  Real rel_tol = 1e-12;
  bool keep_modes = false;
};

/// Scattering of the coated cylinder with the SHS lining at Sigma: the two
/// admissible near-Sigma solutions are integrated through the singular media
/// and matched at the outer boundary to regular + outgoing cylindrical waves.
ScatteringEntry solve_cyl_mode_shs(int n, Real beta, Real k,
                                   const CylSolveOptions& opts = {});

/// Control experiment: a perfectly conducting lining at a finite standoff
/// inside the coating (the exact-Sigma PEC limit is degenerate; see the PEC
/// reference below). Reflection is generically nonzero.
ScatteringEntry solve_cyl_mode_pec(int n, Real beta, Real k,
                                   const CylSolveOptions& opts = {});

/// Uncoated vacuum annulus with no obstacle: reflection vanishes.
ScatteringEntry solve_cyl_mode_vacuum(int n, Real beta, Real k,
                                      const CylSolveOptions& opts = {});

/// Closed-form reference for the PEC control: by the pullback equivalence it
/// equals free-space scattering off a PEC cylinder of radius
/// rho_c = map_inverse(a + standoff):
///   R_TM = -J_n / H1_n, R_TE = -J_n' / H1_n' at gamma rho_c (no coupling).
Mat2c pec_reference_reflection(int n, Complex gamma, Real rho_c);

// ---------------------------------------------------------------------------
// Axis traces and induced surface sources (double-coating matching).
// ---------------------------------------------------------------------------

struct AxisTraces {
  std::vector<Real> z;
  std::vector<Complex> be1, bh1;  ///< axial E and H along gamma_1 in M_1
  std::vector<Complex> be2, bh2;  ///< along gamma_2 in M_2
};

struct TraceMatchVerdict {
  bool finite_energy_compatible = false;
  Real sup_e_mismatch = 0.0;
  Real sup_h_mismatch = 0.0;
};

/// Thm-7.1-style matching: the two axial traces must agree pointwise in z.
TraceMatchVerdict axis_trace_match(const AxisTraces& traces, Real tol);

struct SurfaceSources {
  std::vector<Complex> s_e, s_h;  ///< per-z amplitudes of the Sigma-supported sheets
  Real sup_e = 0.0, sup_h = 0.0;
};

/// Distributional sheet sources induced on Sigma when the axis traces do not
/// match: amplitudes equal the tangential trace jumps per mode.
SurfaceSources induced_surface_sources(const AxisTraces& mismatch);

// ---------------------------------------------------------------------------
// Boundary-layer diagnostics.
// ---------------------------------------------------------------------------

struct AngularTraceLimit {
  Real slope = 0.0;          ///< log-log slope of |eta . E| vs dist(., Sigma)
  Complex zeta_e_limit{};    ///< extrapolated axial E at Sigma
  Complex zeta_h_limit{};
  Real zeta_e_gap = 0.0;     ///< |E_z(nearest) - limit| relative
  bool degenerate = false;   ///< zero field, slope undefined
};

/// Fits the angular-component decay of a solved mode toward Sigma and
/// extrapolates the axial components to their finite limits.
AngularTraceLimit cyl_angular_trace_limit(const CylMode& mode, Real cloak_radius);

}  // namespace cloak::cylinder
