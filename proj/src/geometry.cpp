// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#include "cloak/geometry.hpp"

#include <cmath>
#include <sstream>

namespace cloak::geometry {

const char* to_string(CoatKind k) {
  switch (k) {
    case CoatKind::SingleBall: return "single-ball";
    case CoatKind::DoubleBall: return "double-ball";
    case CoatKind::SingleCylinderShs: return "single-cylinder-shs";
    case CoatKind::DoubleCylinder: return "double-cylinder";
  }
  return "?";
}

const char* to_string(StretchKind s) {
  return s == StretchKind::CanonicalLinear ? "canonical-linear" : "appendix-smooth";
}

const char* to_string(InteriorKind i) {
  switch (i) {
    case InteriorKind::EuclideanBall: return "euclidean-ball";
    case InteriorKind::RoundSphere: return "round-3-sphere-radius-1/pi";
    case InteriorKind::ProductS2xR: return "product-S2xR";
    case InteriorKind::None: return "none";
  }
  return "?";
}

void CoatingSpec::validate() const {
  const bool dbl = is_double();
  const bool ok = cloak_radius > 0.0 && outer_radius > 0.0 &&
                  cloak_radius < outer_radius &&
                  (stretch != StretchKind::AppendixSmooth ||
                   outer_radius > 2.0 * cloak_radius) &&
                  (dbl || interior == InteriorKind::EuclideanBall ||
                   interior == InteriorKind::None) &&
                  (kind != CoatKind::DoubleBall || interior == InteriorKind::RoundSphere) &&
                  (kind != CoatKind::DoubleCylinder ||
                   interior == InteriorKind::ProductS2xR);
  if (ok) return;
  std::ostringstream bad;
  if (!(cloak_radius > 0.0)) bad << "cloak_radius must be positive; ";
  if (!(outer_radius > 0.0)) bad << "outer_radius must be positive; ";
  if (!(cloak_radius < outer_radius)) bad << "cloak_radius must be < outer_radius; ";
  if (stretch == StretchKind::AppendixSmooth && !(outer_radius > 2.0 * cloak_radius))
    bad << "appendix-smooth requires outer_radius > 2*cloak_radius; ";
  if (!dbl && !(interior == InteriorKind::EuclideanBall || interior == InteriorKind::None))
    bad << "single coating requires a nonsingular interior (euclidean-ball or none); ";
  if (kind == CoatKind::DoubleBall && interior != InteriorKind::RoundSphere)
    bad << "double-ball requires the round-3-sphere interior; ";
  if (kind == CoatKind::DoubleCylinder && interior != InteriorKind::ProductS2xR)
    bad << "double-cylinder requires the product-S2xR interior; ";
  throw ConfigError("CoatingSpec: " + bad.str());
}

CoatingSpec CoatingSpec::single_ball() {
  return {CoatKind::SingleBall, 2.0, 1.0, StretchKind::CanonicalLinear,
          InteriorKind::EuclideanBall};
}
CoatingSpec CoatingSpec::double_ball() {
  return {CoatKind::DoubleBall, 2.0, 1.0, StretchKind::CanonicalLinear,
          InteriorKind::RoundSphere};
}
CoatingSpec CoatingSpec::single_cylinder_shs() {
  return {CoatKind::SingleCylinderShs, 2.0, 1.0, StretchKind::CanonicalLinear,
          InteriorKind::None};
}
CoatingSpec CoatingSpec::double_cylinder() {
  return {CoatKind::DoubleCylinder, 2.0, 1.0, StretchKind::CanonicalLinear,
          InteriorKind::ProductS2xR};
}

namespace {

// Quintic Hermite blend on [a/2, 2a] joining tau/2 + a to tau with two
// matched derivatives at both ends. Monotonicity is checked in tests.
Real blend(Real tau, Real a, int deriv) {
  const Real t0 = 0.5 * a, t1 = 2.0 * a, w = t1 - t0;
  const Real t = (tau - t0) / w;
  const Real v0 = 0.5 * t0 + a, d0 = 0.5 * w;  // value/scaled slope at left
  const Real v1 = t1, d1 = 1.0 * w;
  const Real t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  if (deriv == 0) {
    const Real h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const Real h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const Real h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    const Real h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    return v0 * h00 + d0 * h10 + v1 * h01 + d1 * h11;
  }
  const Real g00 = (-30.0 * t2 + 60.0 * t3 - 30.0 * t4) / w;
  const Real g10 = (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4) / w;
  const Real g01 = (30.0 * t2 - 60.0 * t3 + 30.0 * t4) / w;
  const Real g11 = (-12.0 * t2 + 28.0 * t3 - 15.0 * t4) / w;
  return v0 * g00 + d0 * g10 + v1 * g01 + d1 * g11;
}

}  // namespace

Real stretch_appendix(Real tau, Real a) {
  if (!(a > 0.0)) throw std::domain_error("stretch_appendix: a must be positive");
  if (tau < 0.0 || tau > 3.0 * a)
    throw std::domain_error("stretch_appendix: tau outside [0, 3a]");
  if (tau <= 0.5 * a) return 0.5 * tau + a;
  if (tau >= 2.0 * a) return tau;
  return blend(tau, a, 0);
}

Real stretch_appendix_derivative(Real tau, Real a) {
  if (tau < 0.0 || tau > 3.0 * a)
    throw std::domain_error("stretch_appendix_derivative: tau outside [0, 3a]");
  if (tau <= 0.5 * a) return 0.5;
  if (tau >= 2.0 * a) return 1.0;
  return blend(tau, a, 1);
}

namespace {

Real forward_impl(const CoatingSpec& s, Real rho) {
  if (s.stretch == StretchKind::CanonicalLinear)
    return s.cloak_radius + rho * (s.outer_radius - s.cloak_radius) / s.outer_radius;
  if (rho >= 2.0 * s.cloak_radius) return rho;  // identity past the stretch zone
  return stretch_appendix(rho, s.cloak_radius);
}

Real forward_deriv_impl(const CoatingSpec& s, Real rho) {
  if (s.stretch == StretchKind::CanonicalLinear)
    return (s.outer_radius - s.cloak_radius) / s.outer_radius;
  if (rho >= 2.0 * s.cloak_radius) return 1.0;
  return stretch_appendix_derivative(rho, s.cloak_radius);
}

Real inverse_impl(const CoatingSpec& s, Real r) {
  if (s.stretch == StretchKind::CanonicalLinear)
    return s.outer_radius * (r - s.cloak_radius) / (s.outer_radius - s.cloak_radius);
  const Real a = s.cloak_radius;
  if (r >= 2.0 * a) return r;
  if (r <= 1.25 * a) return 2.0 * (r - a);  // inverse of tau/2 + a
  // Monotone quintic segment: bisection + Newton polish.
  Real lo = 0.5 * a, hi = 2.0 * a;
  for (int it = 0; it < 100; ++it) {
    const Real mid = 0.5 * (lo + hi);
    if (stretch_appendix(mid, a) < r)
      lo = mid;
    else
      hi = mid;
  }
  Real rho = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it)
    rho -= (stretch_appendix(rho, a) - r) / stretch_appendix_derivative(rho, a);
  return rho;
}

}  // namespace

Real map_forward(const CoatingSpec& spec, Real rho) {
  spec.validate();
  if (!(rho > 0.0) || rho > spec.outer_radius * (1.0 + 1e-14))
    throw std::domain_error("map_forward: rho outside (0, R]");
  return forward_impl(spec, std::min(rho, spec.outer_radius));
}

Real map_inverse(const CoatingSpec& spec, Real r) {
  spec.validate();
  if (r <= spec.cloak_radius)
    throw SingularSurfaceError("map_inverse: point on or inside Sigma");
  if (r > spec.outer_radius * (1.0 + 1e-14))
    throw std::domain_error("map_inverse: r outside (a, R]");
  return inverse_impl(spec, std::min(r, spec.outer_radius));
}

Real map_inverse_derivative(const CoatingSpec& spec, Real r) {
  const Real rho = map_inverse(spec, r);
  return 1.0 / forward_deriv_impl(spec, rho);
}

Real map_inverse_from_offset(const CoatingSpec& spec, Real t) {
  const Real a = spec.cloak_radius, R = spec.outer_radius;
  if (!(t > 0.0) || t > (R - a) * (1.0 + 1e-12))
    throw SingularSurfaceError("map_inverse_from_offset: offset outside (0, R-a]");
  t = std::min(t, R - a);
  if (spec.stretch == StretchKind::CanonicalLinear) return R * t / (R - a);
  if (t <= 0.125 * a) return 2.0 * t;  // f = tau/2 + a near Sigma
  return inverse_impl(spec, a + t);
}

Real map_inverse_derivative_from_offset(const CoatingSpec& spec, Real t) {
  const Real a = spec.cloak_radius, R = spec.outer_radius;
  if (spec.stretch == StretchKind::CanonicalLinear) {
    if (!(t > 0.0)) throw SingularSurfaceError("map_inverse_derivative_from_offset");
    return R / (R - a);
  }
  const Real rho = map_inverse_from_offset(spec, t);
  return 1.0 / forward_deriv_impl(spec, rho);
}

RadialMap make_radial_map(const CoatingSpec& spec) {
  spec.validate();
  RadialMap m;
  m.forward = [spec](Real rho) { return map_forward(spec, rho); };
  m.inverse = [spec](Real r) { return map_inverse(spec, r); };
  m.derivative = [spec](Real rho) {
    if (!(rho > 0.0) || rho > spec.outer_radius * (1.0 + 1e-14))
      throw std::domain_error("RadialMap::derivative: rho outside (0, R]");
    return forward_deriv_impl(spec, rho);
  };
  return m;
}

namespace {

Real sinc_pi(Real r) {  // sin(pi r) / (pi r), smooth at 0
  if (std::abs(r) < 1e-8) {
    const Real z = kPi * r;
    return 1.0 - z * z / 6.0;
  }
  return std::sin(kPi * r) / (kPi * r);
}

}  // namespace

JacobianResult jacobian(const CoatingSpec& spec, const Vec3& x) {
  spec.validate();
  const Real a = spec.cloak_radius;
  JacobianResult out;

  if (spec.is_ball()) {
    const Real r = x.norm();
    if (std::abs(r - a) < 1e-14) throw SingularSurfaceError("jacobian: point on Sigma");
    if (r > a) {
      const Real rho = map_inverse(spec, r);
      const Real drho_dr = map_inverse_derivative(spec, r);
      const Vec3 n = x / r;
      const Mat3 P = n * n.transpose();
      out.matrix = drho_dr * P + (rho / r) * (Mat3::Identity() - P);
      out.det = drho_dr * (rho / r) * (rho / r);
      out.branch = Branch::ExteriorN1;
      return out;
    }
    out.branch = Branch::InteriorN2;
    if (!spec.is_double()) return out;  // F_2 = identity on the flat interior
    const Real t = sinc_pi(r / a);
    if (r < 1e-14) {
      out.matrix = Mat3::Identity();
      out.det = 1.0;
      return out;
    }
    const Vec3 n = x / r;
    const Mat3 P = n * n.transpose();
    out.matrix = P + t * (Mat3::Identity() - P);
    out.det = t * t;
    return out;
  }

  // Cylinder: radial action in the cross-section, axis untouched.
  const Real r = std::hypot(x[0], x[1]);
  if (std::abs(r - a) < 1e-14) throw SingularSurfaceError("jacobian: point on Sigma");
  const Vec3 er = (r > 0.0) ? Vec3(x[0] / r, x[1] / r, 0.0) : Vec3(1, 0, 0);
  const Vec3 et(-er[1], er[0], 0.0);
  const Vec3 ez(0, 0, 1);
  if (r > a) {
    const Real rho = map_inverse(spec, r);
    const Real drho_dr = map_inverse_derivative(spec, r);
    out.matrix = drho_dr * er * er.transpose() + (rho / r) * et * et.transpose() +
                 ez * ez.transpose();
    out.det = drho_dr * (rho / r);
    out.branch = Branch::ExteriorN1;
    return out;
  }
  out.branch = Branch::InteriorN2;
  if (!spec.is_double()) return out;
  const Real t = sinc_pi(r / a);
  out.matrix = er * er.transpose() + t * et * et.transpose() + ez * ez.transpose();
  out.det = t;
  return out;
}

}  // namespace cloak::geometry
