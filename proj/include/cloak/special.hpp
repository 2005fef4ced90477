// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cloak/types.hpp"

namespace cloak::special {

// ---------------------------------------------------------------------------
// Spherical Bessel functions and Riccati forms.
// ---------------------------------------------------------------------------

/// j_l(x), regular at the origin. Small arguments use the leading series.
Real sph_j(int l, Real x);
/// y_l(x), singular at the origin.
Real sph_y(int l, Real x);
/// d/dx j_l(x).
Real sph_j_prime(int l, Real x);
/// d/dx y_l(x).
Real sph_y_prime(int l, Real x);

/// Riccati-Bessel psi_l(x) = x j_l(x) and derivative.
Real riccati_psi(int l, Real x);
Real riccati_psi_prime(int l, Real x);
/// Riccati-Hankel xi_l(x) = x (j_l + i y_l)(x) and derivative (outgoing).
Complex riccati_xi(int l, Real x);
Complex riccati_xi_prime(int l, Real x);

// ---------------------------------------------------------------------------
// Cylindrical Bessel functions for transverse wavenumbers gamma that are
// either real positive (propagating) or purely imaginary with positive
// imaginary part (evanescent). The imaginary branch is expressed through
// modified Bessel functions.
// ---------------------------------------------------------------------------

/// Transverse wavenumber gamma = sqrt(k^2 - beta^2) on the principal branch:
/// real positive when k^2 > beta^2, positive imaginary otherwise.
Complex transverse_gamma(Real k, Real beta);

/// J_n(gamma rho) for gamma as produced by transverse_gamma, rho > 0.
Complex cyl_j(int n, Complex gamma, Real rho);
/// d/d(arg) J_n at arg = gamma rho.
Complex cyl_j_prime(int n, Complex gamma, Real rho);
/// Outgoing H^{(1)}_n(gamma rho) (decaying K_n branch when evanescent).
Complex cyl_h1(int n, Complex gamma, Real rho);
Complex cyl_h1_prime(int n, Complex gamma, Real rho);

// ---------------------------------------------------------------------------
// Root finding and fitting utilities.
// ---------------------------------------------------------------------------

/// Bisection refined by Newton steps on a bracketed root; |f| driven to ftol.
Real find_root(const std::function<Real(Real)>& f, Real lo, Real hi, Real xtol = 1e-14);

/// First positive root of d/dx j_l(x) beyond x0 (Neumann radial eigenvalue).
Real sph_j_prime_root(int l, Real x0 = 1e-3);

/// Least-squares slope and intercept of y against x.
struct LineFit {
  Real slope = 0.0;
  Real intercept = 0.0;
};
LineFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y);

/// Log-log power-law fit y ~ C x^p; returns {p, log C}.
LineFit fit_loglog(const std::vector<Real>& x, const std::vector<Real>& y);

/// Gauss-Legendre nodes/weights on [a, b].
struct Quadrature {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};
Quadrature gauss_legendre(int n, Real a, Real b);

/// Integrate f over [a, b] with composite Gauss-Legendre panels.
Real integrate(const std::function<Real(Real)>& f, Real a, Real b, int panels = 8,
               int order = 16);

}  // namespace cloak::special
