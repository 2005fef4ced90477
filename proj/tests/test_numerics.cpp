// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cloak/ode.hpp"
#include "cloak/special.hpp"

using namespace cloak;
namespace sp = cloak::special;

TEST_CASE("spherical bessel closed forms") {
  // j0 = sin x / x, j1 = sin x / x^2 - cos x / x
  for (Real x : {0.3, 1.0, 2.0, 7.5}) {
    CHECK(sp::sph_j(0, x) == doctest::Approx(std::sin(x) / x).epsilon(1e-13));
    CHECK(sp::sph_j(1, x) ==
          doctest::Approx(std::sin(x) / (x * x) - std::cos(x) / x).epsilon(1e-12));
    CHECK(sp::sph_y(0, x) == doctest::Approx(-std::cos(x) / x).epsilon(1e-13));
  }
  // Small-argument series branch against the closed form.
  for (Real x : {1e-9, 1e-6, 1e-3, 0.4}) {
    CHECK(rel_diff(sp::sph_j(0, x), x < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x) < 1e-12);
  }
  // Derivative identity j_l' = j_{l-1} - (l+1)/x j_l against finite differences.
  for (int l : {0, 1, 4, 10}) {
    const Real x = 1.7, h = 1e-6;
    const Real fd = (sp::sph_j(l, x + h) - sp::sph_j(l, x - h)) / (2 * h);
    CHECK(sp::sph_j_prime(l, x) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("riccati bessel and wronskian") {
  for (int l : {0, 1, 3, 6}) {
    for (Real x : {0.7, 1.0, 2.0, 4.0}) {
      const Complex w = sp::riccati_psi(l, x) * sp::riccati_xi_prime(l, x) -
                        sp::riccati_psi_prime(l, x) * sp::riccati_xi(l, x);
      CHECK(std::abs(w - Complex(0.0, 1.0)) < 1e-12);  // psi xi' - psi' xi = i
    }
  }
}

TEST_CASE("cylindrical bessel wrappers, both branches") {
  const Complex g_re(0.9, 0.0);
  for (int n : {0, 1, 3, -2}) {
    const Real rho = 1.3;
    CHECK(std::abs(sp::cyl_j(n, g_re, rho) -
                   Complex(std::cyl_bessel_j(std::abs(n), 0.9 * rho) *
                           ((n < 0 && n % 2 != 0) ? -1.0 : 1.0))) < 1e-13);
  }
  // Evanescent branch: check that J and H1 solve Bessel's ODE at imaginary
  // argument via the Wronskian J H1' - J' H1 = 2i / (pi x).
  const Complex g_im(0.0, 0.8);
  for (int n : {0, 1, 2}) {
    const Real rho = 1.1;
    const Complex x = g_im * rho;
    const Complex w = sp::cyl_j(n, g_im, rho) * sp::cyl_h1_prime(n, g_im, rho) -
                      sp::cyl_j_prime(n, g_im, rho) * sp::cyl_h1(n, g_im, rho);
    CHECK(std::abs(w - 2.0 * kImag / (kPi * x)) < 1e-12);
  }
}

TEST_CASE("root finding: first neumann eigenvalues") {
  CHECK(sp::sph_j_prime_root(0) == doctest::Approx(4.493409457909064).epsilon(1e-10));
  CHECK(sp::sph_j_prime_root(1) == doctest::Approx(2.081575978).epsilon(1e-8));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto q = sp::gauss_legendre(8, -1.0, 3.0);
  Real s = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    const Real x = q.nodes[i];
    s += q.weights[i] * (5 * x * x * x * x * x - x * x + 2);
  }
  // exact: int_{-1}^{3} (5x^5 - x^2 + 2) dx = (3^6-1)*5/6 - (27+1)/3 + 8
  const Real exact = (729.0 - 1.0) * 5.0 / 6.0 - 28.0 / 3.0 + 8.0;
  CHECK(s == doctest::Approx(exact).epsilon(1e-14));
  CHECK(sp::integrate([](Real x) { return std::exp(-x); }, 0.0, 2.0) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("ode: dopri5 reproduces bessel to tight tolerance") {
  // y'' + (1 - n^2/x^2) y = 0 for the riccati function psi_1.
  using S2 = Eigen::Matrix<Real, 2, 1>;
  auto rhs = [](Real x, const S2& y) {
    return S2{y[1], -(1.0 - 2.0 / (x * x)) * y[0]};
  };
  const Real x0 = 0.5, x1 = 11.0;
  S2 y{sp::riccati_psi(1, x0), sp::riccati_psi_prime(1, x0)};
  ode::Options opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;
  const S2 yend = ode::integrate(rhs, y, x0, x1, opt);
  CHECK(rel_diff(yend[0], sp::riccati_psi(1, x1)) < 1e-10);
  CHECK(rel_diff(yend[1], sp::riccati_psi_prime(1, x1)) < 1e-10);
  // Backward integration returns to the start.
  const S2 yback = ode::integrate(rhs, yend, x1, x0, opt);
  CHECK(rel_diff(yback[0], y[0]) < 1e-10);
}

TEST_CASE("ode: complex state") {
  using S1 = Eigen::Matrix<Complex, 1, 1>;
  auto rhs = [](Real, const S1& y) { return S1{kImag * y[0]}; };
  S1 y{Complex(1.0, 0.0)};
  const S1 res = ode::integrate(rhs, y, 0.0, kPi, ode::Options{1e-12, 1e-14});
  CHECK(std::abs(res[0] - Complex(-1.0, 0.0)) < 1e-10);
}

TEST_CASE("loglog fit recovers exponents") {
  std::vector<Real> x, y;
  for (Real d = 1e-5; d < 1e-2; d *= 2.0) {
    x.push_back(d);
    y.push_back(3.7 * d * d);
  }
  const auto f = sp::fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.7).epsilon(1e-10));
}
