// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cloak/helmholtz.hpp"
#include "cloak/ode.hpp"
#include "cloak/special.hpp"

using namespace cloak;
using namespace cloak::helmholtz;
using geometry::Branch;
using geometry::CoatingSpec;
namespace sp = cloak::special;

TEST_CASE("radial coefficients: homogeneous ball and cloak closed forms") {
  const auto ref = reference_coefficients();
  CHECK(ref.p(1.3) == doctest::Approx(1.69));
  CHECK(ref.w(1.3) == doctest::Approx(1.69));
  CHECK(ref.q(1.3) == doctest::Approx(1.0));

  // Single-ball exterior: p = rho^2 / A = 2 (r-1)^2, w = 8 (r-1)^2, q = 2.
  const auto spec = CoatingSpec::single_ball();
  const auto c = radial_coefficients(spec, Branch::ExteriorN1);
  for (Real r : {1.001, 1.25, 1.5, 1.9}) {
    const Real t = r - 1.0;
    CHECK(rel_diff(c.p(r), 2.0 * t * t) < 1e-12);
    CHECK(rel_diff(c.w(r), 8.0 * t * t) < 1e-12);
    CHECK(rel_diff(c.q(r), 2.0) < 1e-12);
  }
}

TEST_CASE("radial coefficients agree with direct assembly from sampled media") {
  // Oracle: p = sigma_rr r^2, w = |g|^{1/2} r^2, q = sigma_tt from the media
  // tensors sampled pointwise (Cartesian), at 50 radii.
  for (auto spec : {CoatingSpec::single_ball(), CoatingSpec::double_ball()}) {
    const auto c = radial_coefficients(spec, Branch::ExteriorN1);
    for (int i = 0; i < 50; ++i) {
      const Real r = 1.0 + 1e-3 + (1.0 - 2e-3) * i / 49.0;
      const auto cm = media::sample_cloak_media(spec, Vec3(0, 0, r));
      const Real sig_rad = cm.material.sigma(2, 2);
      const Real sig_tan = cm.material.sigma(0, 0);
      const Real detsqrt = std::sqrt(cm.metric.det());
      CHECK(rel_diff(c.p(r), sig_rad * r * r) < 1e-10);
      CHECK(rel_diff(c.w(r), detsqrt * r * r) < 1e-10);
      CHECK(rel_diff(c.q(r), sig_tan) < 1e-10);
    }
  }
  // Interior branch of the double coating, same assembly.
  const auto spec = CoatingSpec::double_ball();
  const auto ci = radial_coefficients(spec, Branch::InteriorN2);
  for (Real r : {0.15, 0.5, 0.85, 0.999}) {
    const auto cm = media::sample_cloak_media(spec, Vec3(0, 0, r));
    CHECK(rel_diff(ci.p(r), cm.material.sigma(2, 2) * r * r) < 1e-10);
    CHECK(rel_diff(ci.q(r), cm.material.sigma(0, 0)) < 1e-10);
  }
}

TEST_CASE("exterior mode equals the pullback of the free radial solution") {
  const auto spec = CoatingSpec::single_ball();
  for (int l : {0, 1, 3, 7}) {
    for (Real k : {0.5, 1.0, 2.0}) {
      const auto mode = solve_exterior_mode(spec, l, k);
      CHECK(mode.ode_residual < 1e-9);
      // Normalize both profiles at the outer boundary before comparing.
      const Real scale = mode.at_outer().u / sp::sph_j(l, 2.0 * k);
      for (const auto& s : mode.samples) {
        const Real rho = 2.0 * (s.r - 1.0);
        const Real expected = sp::sph_j(l, k * rho) * scale;
        CHECK(std::abs(s.u - expected) <=
              1e-9 * std::max(std::abs(expected), mode.max_abs_u() * 1e-6));
        // Metric flux equals the invariant free-space flux k rho^2 j_l'.
        const Real phi_expected = k * rho * rho * sp::sph_j_prime(l, k * rho) * scale;
        CHECK(std::abs(s.phi - phi_expected) <=
              1e-8 * std::max({std::abs(phi_expected), mode.max_abs_phi() * 1e-6, 1e-30}));
      }
    }
  }
}

TEST_CASE("exterior mode l=0 closed forms at the boundary") {
  const auto spec = CoatingSpec::single_ball();
  const auto mode = solve_exterior_mode(spec, 0, 1.0);
  const Real scale = mode.at_outer().u / sp::sph_j(0, 2.0);
  CHECK(rel_diff(mode.at_outer().u, sp::sph_j(0, 2.0) * scale) < 1e-8);
  CHECK(rel_diff(mode.at_outer().phi, 4.0 * sp::sph_j_prime(0, 2.0) * scale) < 1e-8);
}

TEST_CASE("hidden neumann: metric flux vanishes toward Sigma") {
  const auto spec = CoatingSpec::single_ball();
  for (int l : {0, 1, 5}) {
    const auto mode = solve_exterior_mode(spec, l, 1.0);
    // Find the sample nearest r = 1 + 1e-6.
    Real phi_near = 0.0, best = 1e9;
    for (const auto& s : mode.samples) {
      if (std::abs(s.r - (1.0 + 1e-6)) < best) {
        best = std::abs(s.r - (1.0 + 1e-6));
        phi_near = s.phi;
      }
    }
    CHECK(std::abs(phi_near) < 1e-4 * mode.max_abs_phi());
  }
}

TEST_CASE("k -> 0 regression: solution tends to a constant") {
  const auto spec = CoatingSpec::single_ball();
  const auto mode = solve_exterior_mode(spec, 0, 1e-4);
  Real dev = 0.0;
  for (const auto& s : mode.samples)
    dev = std::max(dev, std::abs(s.u - mode.at_outer().u));
  CHECK(dev < 1e-7 * std::abs(mode.at_outer().u));
}

TEST_CASE("dtn eigenvalue: reference closed forms and cloak equality") {
  // Homogeneous reference, l = 0, k = 1: Lambda = k j0'(2k) / j0(2k).
  const auto ref = reference_dtn(0, 1.0, 2.0);
  const Real expect = 1.0 * sp::sph_j_prime(0, 2.0) / sp::sph_j(0, 2.0);
  CHECK(ref.lambda == doctest::Approx(expect).epsilon(1e-12));
  CHECK(ref.lambda == doctest::Approx(-0.957657).epsilon(1e-4));

  const auto spec = CoatingSpec::single_ball();
  const auto mode = solve_exterior_mode(spec, 0, 1.0);
  const auto dtn = dtn_eigenvalue(spec, mode);
  CHECK(rel_diff(dtn.lambda, ref.lambda) < 1e-6);

  // Euclidean-normal alternative differs by the boundary metric stretch 2.
  const auto dtn_e = dtn_eigenvalue(spec, mode, NormalKind::EuclideanNormal);
  CHECK(rel_diff(dtn_e.lambda, 2.0 * ref.lambda) < 1e-6);

  // Harmonic limit: k -> 0, l = 1 gives Lambda -> l / R = 0.5.
  const auto mode1 = solve_exterior_mode(spec, 1, 1e-5);
  const auto dtn1 = dtn_eigenvalue(spec, mode1);
  CHECK(std::abs(dtn1.lambda - 0.5) < 1e-6);
}

TEST_CASE("dtn symmetry: lagrange identity conserves the bilinear pairing") {
  // For two solutions u, v of the same mode ODE, p (u v' - v u') is constant.
  const auto spec = CoatingSpec::single_ball();
  const auto coeffs = radial_coefficients(spec, Branch::ExteriorN1);
  const int l = 2;
  const Real k = 1.3, lam = l * (l + 1.0);
  using S2 = Eigen::Matrix<Real, 2, 1>;
  auto rhs = [&](Real r, const S2& y) {
    return S2{y[1] / coeffs.p(r), (lam * coeffs.q(r) - k * k * coeffs.w(r)) * y[0]};
  };
  ode::Options oo{1e-12, 1e-16, 1e-6, 20000000};
  // Independent solutions seeded mid-shell.
  S2 ua{1.0, 0.3}, va{-0.2, 1.0};
  // Wronskian-like pairing W = u phi_v - v phi_u at r0 and after transport.
  const Real r0 = 1.4, r1 = 1.95;
  const S2 ub = ode::integrate(rhs, ua, r0, r1, oo);
  const S2 vb = ode::integrate(rhs, va, r0, r1, oo);
  const Real w0 = ua[0] * va[1] - va[0] * ua[1];
  const Real w1 = ub[0] * vb[1] - vb[0] * ub[1];
  CHECK(rel_diff(w1, w0) < 1e-9);
}

TEST_CASE("energy near Sigma: pullback finite, inverse-distance divergent") {
  const auto spec = CoatingSpec::single_ball();
  const std::vector<Real> shells{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};

  const auto mode = solve_exterior_mode(spec, 1, 1.0);
  const auto rep = energy_near_sigma(spec, mode, shells);
  CHECK(rep.verdict == EnergyVerdict::Finite);
  // Shell integrals decrease with shrinking delta.
  for (size_t i = 1; i < rep.shell_integrals.size(); ++i)
    CHECK(rep.shell_integrals[i].second <= rep.shell_integrals[i - 1].second * (1 + 1e-12));

  const auto coeffs = radial_coefficients(spec, Branch::ExteriorN1);
  // u = 1/(r-1): the pullback of the singular branch; Dirichlet form diverges
  // like the integral of (r-1)^{-2}. Oracle: direct quadrature (below).
  auto u_div = [](Real r) { return 1.0 / (r - 1.0); };
  auto du_div = [](Real r) { return -1.0 / ((r - 1.0) * (r - 1.0)); };
  const auto rep_div = energy_near_sigma(coeffs, 0, u_div, du_div, shells, 1e-8);
  CHECK(rep_div.verdict == EnergyVerdict::Divergent);

  // u = log(r-1) has p u'^2 = 2 (r-1)^2 (r-1)^{-2} = 2: the weighted Dirichlet
  // integral CONVERGES for the ball coating. Quadrature oracle on the shell
  // (1e-6, 1e-2): integral of 2/r^2 dr, a finite number.
  auto u_log = [](Real r) { return std::log(r - 1.0); };
  auto du_log = [](Real r) { return 1.0 / (r - 1.0); };
  const auto rep_log = energy_near_sigma(coeffs, 0, u_log, du_log, shells, 1e-8);
  CHECK(rep_log.verdict == EnergyVerdict::Finite);
  const Real oracle = sp::integrate(
      [&](Real s) {
        const Real r = 1.0 + std::exp(s);
        return coeffs.p(r) * du_log(r) * du_log(r) * std::exp(s);
      },
      std::log(1e-8), std::log(1e-2), 16, 16);
  CHECK(rel_diff(rep_log.shell_integrals.front().second, oracle) < 1e-6);

  // Zero mode: all integrals vanish, verdict finite.
  const auto rep0 = energy_near_sigma(
      coeffs, 0, [](Real) { return 0.0; }, [](Real) { return 0.0; }, shells, 1e-8);
  CHECK(rep0.verdict == EnergyVerdict::Finite);
  CHECK(rep0.l2_weighted == doctest::Approx(0.0));
}

TEST_CASE("interior neumann solve") {
  const auto spec = CoatingSpec::single_ball();

  // f = 0, non-resonant k: unique solution is zero.
  const auto sol0 = interior_neumann_solve(spec, 0, 1.0, std::nullopt);
  CHECK_FALSE(sol0.resonance);
  CHECK(sol0.mode.max_abs_u() == doctest::Approx(0.0));

  // l = 1 first Neumann resonance at ka ~ 2.0816 (root-finding oracle).
  const Real kres = sp::sph_j_prime_root(1);
  CHECK(kres == doctest::Approx(2.0816).epsilon(1e-4));
  const auto solres = interior_neumann_solve(spec, 1, kres, std::nullopt);
  CHECK(solres.resonance);

  // Shell source at r = 0.5, l = 0, k = 1: Neumann flux vanishes at a and the
  // solution matches the variation-of-parameters Bessel oracle.
  const ShellSource src{0.5, 1.0};
  const auto sol = interior_neumann_solve(spec, 0, 1.0, src);
  CHECK(sol.neumann_flux_at_a < 1e-10 * sol.mode.max_abs_phi());
  CHECK_FALSE(sol.resonance);

  // Oracle: u = alpha j0(kr) inside, u = betar z(r) outside where
  // z = j0(kr) y0'(ka) - y0(kr) j0'(ka) satisfies z'(a) = 0.
  const Real k = 1.0, a = 1.0, r0 = 0.5;
  auto z = [&](Real r) {
    return sp::sph_j(0, k * r) * sp::sph_y_prime(0, k * a) -
           sp::sph_y(0, k * r) * sp::sph_j_prime(0, k * a);
  };
  auto zp = [&](Real r) {
    return k * (sp::sph_j_prime(0, k * r) * sp::sph_y_prime(0, k * a) -
                sp::sph_y_prime(0, k * r) * sp::sph_j_prime(0, k * a));
  };
  // Continuity alpha j = beta z; flux jump p (beta z' - alpha k j') = s.
  const Real j_r0 = sp::sph_j(0, k * r0), jp_r0 = k * sp::sph_j_prime(0, k * r0);
  const Real det = r0 * r0 * (zp(r0) * j_r0 - z(r0) * jp_r0);
  const Real beta = src.flux_jump * j_r0 / det;
  const Real alpha = beta * z(r0) / j_r0;
  for (const auto& s : sol.mode.samples) {
    const Real expected = (s.r < r0) ? alpha * sp::sph_j(0, k * s.r) : beta * z(s.r);
    CHECK(std::abs(s.u - expected) < 1e-8 * std::max(1.0, sol.mode.max_abs_u()));
  }
}

TEST_CASE("overdetermined residual (no spatial H1 solution generically)") {
  // Generic k: residual = |k j0'(k) / j0(k)| > 0.
  for (Real k : {1.0, 2.0, 3.0}) {
    const auto res = overdetermined_residual(k, 0, 1.0);
    const Real oracle = std::abs(k * sp::sph_j_prime(0, k) / sp::sph_j(0, k));
    CHECK(rel_diff(res.residual, oracle) < 1e-8);
    CHECK(res.residual > 1e-8 * k);
    CHECK_FALSE(res.spatial_h1_exists);
  }
  // At the Neumann eigenvalue of the ball the obstruction vanishes.
  const Real kstar = sp::sph_j_prime_root(0);
  CHECK(kstar == doctest::Approx(4.4934).epsilon(1e-4));
  const auto res = overdetermined_residual(kstar, 0, 1.0);
  CHECK(res.residual < 1e-8);
  CHECK(res.spatial_h1_exists);

  // c = 0: trivial solution.
  const auto res0 = overdetermined_residual(1.0, 0, 0.0);
  CHECK(res0.residual == doctest::Approx(0.0));
  CHECK(res0.spatial_h1_exists);
}

TEST_CASE("cauchy match: single and double coating tables") {
  const std::vector<Real> kgrid{0.5, 1.0, 2.0};
  const auto rep_s = cauchy_match_report(CoatingSpec::single_ball(), 6, kgrid,
                                         ScenarioVariant::VirtualSurface);
  CHECK(rep_s.max_rel_discrepancy < 1e-6);
  for (const auto& row : rep_s.rows) CHECK(row.error.empty());

  const auto rep_d = cauchy_match_report(CoatingSpec::double_ball(), 6, kgrid,
                                         ScenarioVariant::VirtualSurface);
  CHECK(rep_d.max_rel_discrepancy < 1e-6);

  // Physical-lining variant produces the same table entrywise to 1e-10.
  const auto rep_l = cauchy_match_report(CoatingSpec::double_ball(), 6, kgrid,
                                         ScenarioVariant::PhysicalNeumannLining);
  REQUIRE(rep_l.rows.size() == rep_d.rows.size());
  for (size_t i = 0; i < rep_d.rows.size(); ++i) {
    CHECK(std::abs(rep_l.rows[i].lambda_cloaked - rep_d.rows[i].lambda_cloaked) <
          1e-10 * std::max(1.0, std::abs(rep_d.rows[i].lambda_cloaked)));
  }
}

TEST_CASE("seed independence: richardson over seed radii") {
  const auto spec = CoatingSpec::single_ball();
  Real lam_prev = 0.0;
  std::vector<Real> lams;
  for (Real eps : {1e-6, 1e-7, 1e-8}) {
    SolveOptions opts;
    opts.seed_radius = eps;
    const auto mode = solve_exterior_mode(spec, 2, 1.0, SeedKind::PullbackRegular, opts);
    lams.push_back(dtn_eigenvalue(spec, mode).lambda);
  }
  (void)lam_prev;
  CHECK(std::abs(lams[0] - lams[2]) < 1e-9);
  CHECK(std::abs(lams[1] - lams[2]) < 1e-9);
}

TEST_CASE("resonance bookkeeping: interior resonances leave the table alone") {
  const auto spec = CoatingSpec::single_ball();
  const Real kres = sp::sph_j_prime_root(1);  // interior Neumann eigenvalue
  const std::vector<Real> kgrid{kres};
  const auto rep = cauchy_match_report(spec, 3, kgrid, ScenarioVariant::VirtualSurface);
  CHECK(rep.max_rel_discrepancy < 1e-6);  // exterior table unaffected
  const auto sol = interior_neumann_solve(spec, 1, kres, std::nullopt);
  CHECK(sol.resonance);
}
