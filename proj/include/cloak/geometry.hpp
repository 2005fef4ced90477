// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

#include "cloak/errors.hpp"
#include "cloak/types.hpp"

namespace cloak::geometry {

enum class CoatKind { SingleBall, DoubleBall, SingleCylinderShs, DoubleCylinder };
enum class StretchKind { CanonicalLinear, AppendixSmooth };
enum class InteriorKind { EuclideanBall, RoundSphere, ProductS2xR, None };

/// Which side of the degenerate surface Sigma a point sits on.
enum class Branch { ExteriorN1, InteriorN2 };

const char* to_string(CoatKind k);
const char* to_string(StretchKind s);
const char* to_string(InteriorKind i);

/// Declarative description of one coating construction: a ball or infinite
/// cylinder of outer radius R whose cloaked core of radius a is produced by
/// blowing up the center point (ball) or axis (cylinder) of a virgin copy of
/// the domain, optionally gluing a compact interior on the far side.
struct CoatingSpec {
  CoatKind kind = CoatKind::SingleBall;
  Real outer_radius = 2.0;  ///< R, observation boundary.
  Real cloak_radius = 1.0;  ///< a, radius of Sigma.
  StretchKind stretch = StretchKind::CanonicalLinear;
  InteriorKind interior = InteriorKind::EuclideanBall;

  /// Throws ConfigError when radii, stretch, or interior choices are
  /// inconsistent (e.g. a double coating with a flat interior).
  void validate() const;

  bool is_ball() const {
    return kind == CoatKind::SingleBall || kind == CoatKind::DoubleBall;
  }
  bool is_cylinder() const { return !is_ball(); }
  bool is_double() const {
    return kind == CoatKind::DoubleBall || kind == CoatKind::DoubleCylinder;
  }

  static CoatingSpec single_ball();
  static CoatingSpec double_ball();
  static CoatingSpec single_cylinder_shs();
  static CoatingSpec double_cylinder();
};

/// Appendix stretch profile f on [0, 3a]: f = tau/2 + a for tau <= a/2,
/// f = tau for tau >= 2a, quintic Hermite blend in between (C^2, monotone).
Real stretch_appendix(Real tau, Real a);
Real stretch_appendix_derivative(Real tau, Real a);

/// Radial action of the coating map F: rho in the virgin domain maps to the
/// physical radius r in the coated one; the outer boundary stays fixed and
/// rho -> 0+ sweeps r onto the cloak surface.
struct RadialMap {
  std::function<Real(Real)> forward;     ///< rho -> r, domain (0, R].
  std::function<Real(Real)> inverse;     ///< r -> rho, domain (a, R].
  std::function<Real(Real)> derivative;  ///< rho -> dr/drho.
};

RadialMap make_radial_map(const CoatingSpec& spec);

/// rho -> r. Domain error outside (0, R].
Real map_forward(const CoatingSpec& spec, Real rho);
/// r -> rho. SingularSurfaceError for r <= a.
Real map_inverse(const CoatingSpec& spec, Real r);
/// d rho / d r at physical radius r (exterior branch).
Real map_inverse_derivative(const CoatingSpec& spec, Real r);

/// Cancellation-free forms in the boundary-layer coordinate t = r - a.
/// These keep full relative precision arbitrarily close to Sigma, where
/// computing r - a from r would lose digits.
Real map_inverse_from_offset(const CoatingSpec& spec, Real t);
Real map_inverse_derivative_from_offset(const CoatingSpec& spec, Real t);

struct JacobianResult {
  Mat3 matrix = Mat3::Identity();  ///< D(F^{-1}) at x, Cartesian components.
  Real det = 1.0;
  Branch branch = Branch::ExteriorN1;
};

/// Jacobian of the inverse coating map at the physical point x. The exterior
/// branch is exact in Cartesian components. For double-coating interiors the
/// matrix is the frame-diagonal radial action of exp^{-1} (radial factor 1,
/// tangential sin(pi r)/(pi r)), which is all downstream media assembly uses.
/// Points on Sigma raise SingularSurfaceError.
JacobianResult jacobian(const CoatingSpec& spec, const Vec3& x);

}  // namespace cloak::geometry
