// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#include "cloak/vsh.hpp"

#include <cmath>
#include <stdexcept>

#include "cloak/special.hpp"

namespace cloak::vsh {

namespace {

// Normalized associated Legendre Pbar_l^m(cos theta) with Condon-Shortley
// phase, orthonormalized for Y_lm = Pbar e^{im phi}. Also the sin-divided
// form s_l^m = Pbar / sin(theta) (finite at the poles for m >= 1) and the
// theta-derivative, both needed for the tangential harmonics.
struct LegendreSet {
  Real pbar;    // Pbar_l^m
  Real sbar;    // Pbar_l^m / sin theta   (m >= 1 only)
  Real dtheta;  // d Pbar_l^m / d theta
};

Real pbar_start(int m) {  // Pbar_mm / sin^m(theta)
  Real c = std::sqrt(1.0 / (4.0 * kPi));
  for (int i = 1; i <= m; ++i) c *= -std::sqrt((2.0 * i + 1.0) / (2.0 * i));
  return c;
}

// Upward recurrence in l at fixed m for f_l = Pbar_l^m (the sin-divided
// variant obeys the same recurrence).
Real recur(int l, int m, Real x, Real fmm, Real* fl_minus_1 = nullptr) {
  if (l == m) {
    if (fl_minus_1) *fl_minus_1 = 0.0;
    return fmm;
  }
  Real prev = fmm;
  Real cur = std::sqrt(2.0 * m + 3.0) * x * fmm;
  for (int ll = m + 2; ll <= l; ++ll) {
    const Real ll2 = static_cast<Real>(ll) * ll;
    const Real alm = std::sqrt((4.0 * ll2 - 1.0) / (ll2 - m * m));
    const Real blm = std::sqrt(((2.0 * ll + 1.0) * ((ll - 1.0) * (ll - 1.0) - m * m)) /
                               ((2.0 * ll - 3.0) * (ll2 - m * m)));
    const Real next = alm * x * cur - blm * prev;
    prev = cur;
    cur = next;
  }
  if (fl_minus_1) *fl_minus_1 = prev;
  return cur;
}

LegendreSet legendre_set(int l, int m, Real theta) {
  if (m < 0 || m > l) throw std::invalid_argument("legendre_set: need 0 <= m <= l");
  const Real x = std::cos(theta), s = std::sin(theta);
  LegendreSet out{};
  if (m == 0) {
    out.pbar = recur(l, 0, x, pbar_start(0));
    out.sbar = 0.0;
    // d/dtheta Pbar_l0 = sqrt(l(l+1)) Pbar_l1 (CS phase inside Pbar_l1).
    if (l == 0) {
      out.dtheta = 0.0;
    } else {
      const Real p_l1 = recur(l, 1, x, pbar_start(1) * s);
      out.dtheta = std::sqrt(static_cast<Real>(l) * (l + 1)) * p_l1;
    }
    return out;
  }
  const Real smm = pbar_start(m) * std::pow(s, m - 1);  // Pbar_mm / sin
  Real s_lm1;
  out.sbar = recur(l, m, x, smm, &s_lm1);
  out.pbar = out.sbar * s;
  // d/dtheta Pbar_lm = l cos(theta) s_lm - sqrt((2l+1)(l-m)(l+m)/(2l-1)) s_{l-1,m}
  const Real cfac =
      (l > m) ? std::sqrt((2.0 * l + 1.0) * (l - m) * (l + m) / (2.0 * l - 1.0)) : 0.0;
  out.dtheta = l * x * out.sbar - cfac * s_lm1;
  return out;
}

}  // namespace

Complex ylm(int l, int m, Real theta, Real phi) {
  const int ma = std::abs(m);
  if (ma > l) throw std::invalid_argument("ylm: |m| > l");
  const auto ls = legendre_set(l, ma, theta);
  Complex v = ls.pbar * std::exp(Complex(0.0, ma * phi));
  if (m < 0) v = static_cast<Real>((ma % 2) ? -1 : 1) * std::conj(v);
  return v;
}

AngularBasis angular_basis(int l, int m, Real theta, Real phi) {
  const int ma = std::abs(m);
  if (ma > l) throw std::invalid_argument("angular_basis: |m| > l");
  const auto ls = legendre_set(l, ma, theta);
  const Real ct = std::cos(theta), st = std::sin(theta);
  const Real cp = std::cos(phi), sp = std::sin(phi);
  const Vec3 rhat(st * cp, st * sp, ct);
  const Vec3 that(ct * cp, ct * sp, -st);
  const Vec3 phat(-sp, cp, 0.0);

  // tau = d Pbar/dtheta, pi = m Pbar / sin theta, both finite at the poles.
  Real tau = ls.dtheta;
  Real pi_ = ma * ls.sbar;
  Real pb = ls.pbar;
  Complex phase = std::exp(Complex(0.0, ma * phi));
  if (m < 0) {
    const Real sgn = (ma % 2) ? -1.0 : 1.0;
    phase = std::conj(phase);
    tau *= sgn;
    pb *= sgn;
    pi_ *= -sgn;  // the (i m) factor flips sign under conjugation
  }

  AngularBasis out;
  out.rhat = rhat;
  out.Y = pb * phase;
  if (l == 0) return out;
  const Real lam = std::sqrt(static_cast<Real>(l) * (l + 1));
  for (int c = 0; c < 3; ++c) {
    out.psi[c] = (tau * that[c] + kImag * pi_ * phat[c]) * phase / lam;
    out.phi[c] = (tau * phat[c] - kImag * pi_ * that[c]) * phase / lam;
  }
  return out;
}

namespace {

void radial_factors(int l, WaveKind kind, Real x, Complex* z_over_x, Complex* dz_plus) {
  // z_l(x)/x and z_l(x)/x + z_l'(x), stable for small x in the regular case.
  if (kind == WaveKind::Regular) {
    if (x < 1e-8) {
      Real df = 1.0;
      for (int i = 2 * l + 1; i > 1; i -= 2) df *= i;
      const Real jx = std::pow(x, l - 1) / df;  // j_l(x)/x, l >= 1 at x -> 0
      *z_over_x = (l >= 1) ? jx : 1.0;
      *dz_plus = (l + 1.0) * ((l >= 1) ? jx : 0.0);
      return;
    }
    const Real j = special::sph_j(l, x);
    *z_over_x = j / x;
    *dz_plus = j / x + special::sph_j_prime(l, x);
    return;
  }
  const Complex h(special::sph_j(l, x), special::sph_y(l, x));
  const Complex hp(special::sph_j_prime(l, x), special::sph_y_prime(l, x));
  *z_over_x = h / x;
  *dz_plus = h / x + hp;
}

std::pair<Real, Real> angles_of(const Vec3& x) {
  const Real r = x.norm();
  const Real theta = (r > 0) ? std::acos(std::clamp(x[2] / r, -1.0, 1.0)) : 0.0;
  const Real phi = std::atan2(x[1], x[0]);
  return {theta, phi};
}

}  // namespace

Vec3c wave_M(int l, int m, WaveKind kind, Real k, const Vec3& x) {
  const Real r = x.norm();
  const auto [theta, phi] = angles_of(x);
  const auto b = angular_basis(l, m, theta, phi);
  Complex z;
  if (kind == WaveKind::Regular) {
    z = Complex(special::sph_j(l, k * r), 0.0);
  } else {
    z = Complex(special::sph_j(l, k * r), special::sph_y(l, k * r));
  }
  return (z * b.phi).eval();
}

Vec3c wave_N(int l, int m, WaveKind kind, Real k, const Vec3& x) {
  const Real r = x.norm();
  const auto [theta, phi] = angles_of(x);
  const auto b = angular_basis(l, m, theta, phi);
  Complex z_over_x, dz_plus;
  radial_factors(l, kind, k * r, &z_over_x, &dz_plus);
  const Real lam = std::sqrt(static_cast<Real>(l) * (l + 1));
  Vec3c out;
  for (int c = 0; c < 3; ++c)
    out[c] = lam * z_over_x * b.Y * Complex(b.rhat[c], 0.0) + dz_plus * b.psi[c];
  return out;
}

SphereQuad sphere_quadrature(int n_theta, int n_phi) {
  SphereQuad q;
  const auto gl = special::gauss_legendre(n_theta, -1.0, 1.0);
  q.nodes.reserve(static_cast<size_t>(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const Real ct = gl.nodes[i];
    const Real theta = std::acos(std::clamp(ct, -1.0, 1.0));
    const Real st = std::sin(theta);
    for (int j = 0; j < n_phi; ++j) {
      const Real phi = 2.0 * kPi * j / n_phi;
      SphereQuad::Node n;
      n.theta = theta;
      n.phi = phi;
      n.weight = gl.weights[i] * 2.0 * kPi / n_phi;
      n.dir = Vec3(st * std::cos(phi), st * std::sin(phi), ct);
      q.nodes.push_back(n);
    }
  }
  return q;
}

TangentialProjection project_tangential(const SphereQuad& quad,
                                        const std::vector<Vec3c>& field, int l, int m) {
  if (field.size() != quad.nodes.size())
    throw std::invalid_argument("project_tangential: field/node size mismatch");
  Complex cpsi{}, cphi{};
  for (size_t i = 0; i < field.size(); ++i) {
    const auto& n = quad.nodes[i];
    const auto b = angular_basis(l, m, n.theta, n.phi);
    for (int c = 0; c < 3; ++c) {
      cpsi += n.weight * field[i][c] * std::conj(b.psi[c]);
      cphi += n.weight * field[i][c] * std::conj(b.phi[c]);
    }
  }
  return {cpsi, cphi};
}

}  // namespace cloak::vsh
