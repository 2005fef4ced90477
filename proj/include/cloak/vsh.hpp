// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cloak/types.hpp"

namespace cloak::vsh {

/// Orthonormal complex spherical harmonic Y_lm(theta, phi), Condon-Shortley.
Complex ylm(int l, int m, Real theta, Real phi);

/// Angular basis at a direction: Y, and the normalized tangential vector
/// harmonics Psi = r grad_S Y / sqrt(l(l+1)) and Phi = rhat x Psi, returned
/// as Cartesian complex vectors. Stable at the poles.
struct AngularBasis {
  Complex Y{};
  Vec3c psi = Vec3c::Zero();
  Vec3c phi = Vec3c::Zero();
  Vec3 rhat = Vec3::UnitZ();
};
AngularBasis angular_basis(int l, int m, Real theta, Real phi);

enum class WaveKind { Regular, Outgoing };

/// Vector spherical wave functions for wavenumber k at Cartesian x:
///   M_lm = z_l(kr) Phi_lm,
///   N_lm = -(1/k) curl M_lm
///        = sqrt(l(l+1)) (z_l(kr)/(kr)) Y rhat + (z_l/(kr) + z_l') Psi,
/// with z_l = j_l (Regular) or h_l^(1) (Outgoing). They satisfy
/// curl M = -k N and curl N = -k M, so E = a M + b N solves Maxwell.
Vec3c wave_M(int l, int m, WaveKind kind, Real k, const Vec3& x);
Vec3c wave_N(int l, int m, WaveKind kind, Real k, const Vec3& x);

/// Product quadrature on the unit sphere, exact for harmonics up to degree
/// 2 n_theta - 1: Gauss-Legendre in cos(theta) x uniform in phi.
struct SphereQuad {
  struct Node {
    Real theta;
    Real phi;
    Real weight;  ///< includes sin(theta) d(theta) d(phi)
    Vec3 dir;
  };
  std::vector<Node> nodes;
};
SphereQuad sphere_quadrature(int n_theta, int n_phi);

/// Projection of a tangential field sampled at the quadrature nodes of a
/// sphere of radius r onto the Psi/Phi harmonics: returns the coefficients
/// c = integral F . conj(basis) dOmega.
struct TangentialProjection {
  Complex onto_psi{};
  Complex onto_phi{};
};
TangentialProjection project_tangential(const SphereQuad& quad,
                                        const std::vector<Vec3c>& field, int l, int m);

}  // namespace cloak::vsh
