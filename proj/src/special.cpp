// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#include "cloak/special.hpp"

#include <cmath>
#include <stdexcept>

#include "cloak/errors.hpp"

namespace cloak::special {

namespace {

Real dfact(int n) {  // (2l+1)!! style double factorial, n >= -1
  Real r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

// Leading series of j_l for small argument, enough terms for |x| < 0.5.
Real sph_j_series(int l, Real x) {
  const Real x2 = 0.5 * x * x;
  Real term = 1.0;
  Real sum = 1.0;
  for (int s = 1; s <= 12; ++s) {
    term *= -x2 / (s * (2.0 * (l + s) + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::pow(x, l) / dfact(2 * l + 1) * sum;
}

}  // namespace

Real sph_j(int l, Real x) {
  if (x < 0.0) throw std::domain_error("sph_j: negative argument");
  if (x < 0.5) return sph_j_series(l, x);
  return std::sph_bessel(static_cast<unsigned>(l), x);
}

Real sph_y(int l, Real x) {
  if (x <= 0.0) throw std::domain_error("sph_y: non-positive argument");
  return std::sph_neumann(static_cast<unsigned>(l), x);
}

Real sph_j_prime(int l, Real x) {
  if (l == 0) {
    if (x < 0.5) {
      // -j_1(x) via series
      return -sph_j(1, x);
    }
    return -sph_j(1, x);
  }
  // j_l' = j_{l-1} - (l+1)/x j_l ; for tiny x use series of both terms.
  if (x < 1e-30) return (l == 1) ? 1.0 / 3.0 : 0.0;
  return sph_j(l - 1, x) - (l + 1) / x * sph_j(l, x);
}

Real sph_y_prime(int l, Real x) {
  if (l == 0) return -sph_y(1, x);
  return sph_y(l - 1, x) - (l + 1) / x * sph_y(l, x);
}

Real riccati_psi(int l, Real x) { return x * sph_j(l, x); }

Real riccati_psi_prime(int l, Real x) { return sph_j(l, x) + x * sph_j_prime(l, x); }

Complex riccati_xi(int l, Real x) {
  return Complex(riccati_psi(l, x), x * sph_y(l, x));
}

Complex riccati_xi_prime(int l, Real x) {
  return Complex(riccati_psi_prime(l, x), sph_y(l, x) + x * sph_y_prime(l, x));
}

Complex transverse_gamma(Real k, Real beta) {
  const Real d = k * k - beta * beta;
  if (d > 0.0) return Complex(std::sqrt(d), 0.0);
  if (d < 0.0) return Complex(0.0, std::sqrt(-d));
  throw BranchError("transverse_gamma: cutoff k^2 == beta^2");
}

namespace {

Complex ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

bool imaginary_branch(Complex gamma) { return gamma.real() == 0.0; }

}  // namespace

Complex cyl_j(int n, Complex gamma, Real rho) {
  const int na = std::abs(n);
  Complex v;
  if (imaginary_branch(gamma)) {
    // J_n(i y) = i^n I_n(y)
    const Real y = gamma.imag() * rho;
    v = ipow(na) * std::cyl_bessel_i(static_cast<Real>(na), y);
  } else {
    v = Complex(std::cyl_bessel_j(static_cast<Real>(na), gamma.real() * rho), 0.0);
  }
  if (n < 0 && (na % 2) != 0) v = -v;  // J_{-n} = (-1)^n J_n
  return v;
}

Complex cyl_h1(int n, Complex gamma, Real rho) {
  const int na = std::abs(n);
  Complex v;
  if (imaginary_branch(gamma)) {
    // H^{(1)}_n(i y) = (2/pi) i^{-(n+1)} K_n(y)
    const Real y = gamma.imag() * rho;
    v = 2.0 / kPi * ipow(-(na + 1)) * std::cyl_bessel_k(static_cast<Real>(na), y);
  } else {
    const Real x = gamma.real() * rho;
    v = Complex(std::cyl_bessel_j(static_cast<Real>(na), x),
                std::cyl_neumann(static_cast<Real>(na), x));
  }
  if (n < 0 && (na % 2) != 0) v = -v;  // H_{-n} = (-1)^n H_n
  return v;
}

Complex cyl_j_prime(int n, Complex gamma, Real rho) {
  if (n == 0) return -cyl_j(1, gamma, rho);
  return 0.5 * (cyl_j(n - 1, gamma, rho) - cyl_j(n + 1, gamma, rho));
}

Complex cyl_h1_prime(int n, Complex gamma, Real rho) {
  if (n == 0) return -cyl_h1(1, gamma, rho);
  return 0.5 * (cyl_h1(n - 1, gamma, rho) - cyl_h1(n + 1, gamma, rho));
}

Real find_root(const std::function<Real(Real)>& f, Real lo, Real hi, Real xtol) {
  Real flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::invalid_argument("find_root: root not bracketed");
  for (int it = 0; it < 200 && (hi - lo) > xtol; ++it) {
    const Real mid = 0.5 * (lo + hi);
    const Real fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  // Polish with a few Newton steps using a centered difference slope.
  Real x = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const Real h = std::max(1e-7, 1e-7 * std::abs(x));
    const Real d = (f(x + h) - f(x - h)) / (2.0 * h);
    if (d == 0.0) break;
    const Real step = f(x) / d;
    x -= step;
    if (std::abs(step) < xtol) break;
  }
  return x;
}

Real sph_j_prime_root(int l, Real x0) {
  auto f = [l](Real x) { return sph_j_prime(l, x); };
  // March until a sign change is seen, then bisect.
  Real a = x0, fa = f(a);
  const Real h = 0.05;
  for (Real b = a + h; b < 60.0; b += h) {
    const Real fb = f(b);
    if (fa * fb <= 0.0) return find_root(f, a, b);
    a = b;
    fa = fb;
  }
  throw std::runtime_error("sph_j_prime_root: no root before x = 60");
}

LineFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need matching samples, >= 2");
  const auto n = static_cast<Real>(x.size());
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

LineFit fit_loglog(const std::vector<Real>& x, const std::vector<Real>& y) {
  std::vector<Real> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw std::domain_error("fit_loglog: samples must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

Quadrature gauss_legendre(int n, Real a, Real b) {
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // Newton iteration on Legendre polynomials, standard construction.
  for (int i = 0; i < n; ++i) {
    Real x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    Real pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const Real p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const Real dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = 0.5 * (b - a) * (-x) + 0.5 * (a + b);
    q.weights[i] = (b - a) / ((1.0 - x * x) * pp * pp);
  }
  return q;
}

Real integrate(const std::function<Real(Real)>& f, Real a, Real b, int panels, int order) {
  Real total = 0.0;
  const Real h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const auto q = gauss_legendre(order, a + p * h, a + (p + 1) * h);
    for (int i = 0; i < order; ++i) total += q.weights[i] * f(q.nodes[i]);
  }
  return total;
}

}  // namespace cloak::special
