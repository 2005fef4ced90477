// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "cloak/geometry.hpp"
#include "cloak/types.hpp"

namespace cloak::media {

using geometry::Branch;
using geometry::CoatingSpec;

/// Covariant symmetric metric at a point, Cartesian frame.
struct MetricTensor {
  Mat3 g = Mat3::Identity();

  explicit MetricTensor(const Mat3& m);
  MetricTensor() = default;

  bool positive_definite() const;
  Real det() const { return g.determinant(); }
};

/// Contravariant symmetric material density sigma^{jk} (= eps = mu), weight +1.
struct MaterialTensor {
  Mat3 sigma = Mat3::Identity();

  explicit MaterialTensor(const Mat3& m);
  MaterialTensor() = default;

  bool positive_definite() const;
  /// Eigenvalue bounds; on the nonsingular side they must sit in [c1, c2].
  std::pair<Real, Real> eigen_bounds() const;
};

// ---------------------------------------------------------------------------
// Pointwise tensor algebra (templated on scalar, Eigen expressions in/out).
// ---------------------------------------------------------------------------

/// Pushforward of a (+1)-density tensor: (1/det DF) DF sigma DF^T.
/// Throws SingularMapError when detDF == 0.
template <typename S>
Mat3T<S> pushforward_density(const Mat3T<S>& sigma, const Mat3T<S>& DF, S detDF) {
  if (detDF == S(0)) throw SingularMapError("pushforward_density: det DF == 0");
  return (DF * sigma * DF.transpose() / detDF).eval();
}

MaterialTensor pushforward_tensor(const MaterialTensor& sigma, const Mat3& DF, Real detDF);

/// sigma^{jk} = |g|^{1/2} g^{jk}. Domain error unless g is SPD.
MaterialTensor metric_to_material(const MetricTensor& g);
/// Inverse correspondence in three dimensions: g^{jk} = sigma^{jk} / det sigma
/// (equivalently |g| = (det sigma)^2); round-trips with metric_to_material.
MetricTensor material_to_metric(const MaterialTensor& sigma);

/// Hodge star of a 1-form against metric g; 2-form returned as the
/// antisymmetric coefficient matrix B_{pq} of (1/2) B_{pq} dx^p ^ dx^q.
Mat3 hodge_star_1form(const MetricTensor& g, const Vec3& e);
/// Hodge star of a 2-form back onto 1-forms (so that star2(star1(E)) = E).
Vec3 hodge_star_2form(const MetricTensor& g, const Mat3& b);

// ---------------------------------------------------------------------------
// Cloak media sampling.
// ---------------------------------------------------------------------------

struct CloakMedia {
  MetricTensor metric;
  MaterialTensor material;  ///< eps = mu; one object by construction.
  Branch branch = Branch::ExteriorN1;
  bool precision_warning = false;  ///< sampled closer than 1e-10 to Sigma
};

/// Metric and material density of the coated construction at the Cartesian
/// point x. Exterior points carry the pushforward of the base Euclidean
/// metric by the coating map; double-coating interiors carry the blown-up
/// round metric; single-coating ball interiors are Euclidean.
/// Points on Sigma raise SingularSurfaceError.
CloakMedia sample_cloak_media(const CoatingSpec& spec, const Vec3& x);

/// Metric/material frame eigenvalues along the radial direction, cheap form
/// used by the radial mode solvers: (A, B) with metric = A^2 dr^2 + B^2 dw^2
/// (cylinder: A^2 dr^2 + B^2 dtheta^2 + dz^2). Parametrized by the distance
/// to Sigma so the degenerate factors keep full relative precision in the
/// boundary layer: exterior t = r - a, interior t = a - r.
struct RadialFrame {
  Real A = 1.0;  ///< radial metric stretch
  Real B = 1.0;  ///< tangential metric scale (circumferential radius)
  Branch branch = Branch::ExteriorN1;
};
RadialFrame radial_frame(const CoatingSpec& spec, Branch branch, Real sigma_offset);

/// |g|^{1/2} g^{ij} in Fermi coordinates (omega, tau) at metric distance tau
/// from Sigma, reported as the pair (flux_tau, flux_omega) of the normal and
/// tangential coefficient scales. Lipschitz across Sigma for double coatings.
struct FermiFlux {
  Real normal = 0.0;      ///< |g|^{1/2} g^{tau tau}
  Real tangential = 0.0;  ///< |g|^{1/2} g^{omega omega} (unit-sphere scale)
};
FermiFlux fermi_flux(const CoatingSpec& spec, Branch branch, Real tau);

// ---------------------------------------------------------------------------
// Degeneracy diagnostics near Sigma.
// ---------------------------------------------------------------------------

struct DegeneracyReport {
  Real fitted_exponent_tangential = 0.0;
  std::pair<Real, Real> fitted_constant_range{0.0, 0.0};
  Real radial_eigenvalue = 0.0;
  Real det_sqrt_exponent = 0.0;
  Real flux_bound = 0.0;  ///< sup |g^{ij} nu_i| over the sampled layer
  int samples = 0;
};

struct DegeneracyDiagnostics {
  DegeneracyReport exterior;
  std::optional<DegeneracyReport> interior;  ///< present for double coatings
};

/// Fits |g|^{1/2} ~ C (r-a)^p over >= 20 logarithmically spaced radii on each
/// side of Sigma present in the construction.
DegeneracyDiagnostics degeneracy_diagnostics(const CoatingSpec& spec);

}  // namespace cloak::media
