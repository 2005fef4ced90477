// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cloak/media.hpp"

using namespace cloak;
using namespace cloak::media;
using geometry::Branch;
using geometry::CoatingSpec;

namespace {

std::mt19937 rng(20260810);

Mat3 random_spd() {
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
  return m * m.transpose() + 0.3 * Mat3::Identity();
}

Mat3 random_invertible() {
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  while (true) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
    if (std::abs(m.determinant()) > 0.1) return m;
  }
}

}  // namespace

TEST_CASE("pushforward: identity, brute-force triple sum, composition") {
  const MaterialTensor id{Mat3::Identity()};
  const auto same = pushforward_tensor(id, Mat3::Identity(), 1.0);
  CHECK((same.sigma - Mat3::Identity()).norm() < 1e-15);

  for (int trial = 0; trial < 50; ++trial) {
    const Mat3 sigma = random_spd();
    const Mat3 DF = random_invertible();
    const Real det = DF.determinant();
    const auto fast = pushforward_density<Real>(sigma, DF, det);
    Mat3 slow = Mat3::Zero();
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) slow(j, k) += DF(j, p) * DF(k, q) * sigma(p, q) / det;
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12 * slow.cwiseAbs().maxCoeff());
  }

  // Covariance under composition.
  for (int trial = 0; trial < 30; ++trial) {
    const Mat3 sigma = random_spd();
    const Mat3 F1 = random_invertible(), F2 = random_invertible();
    const Mat3 once = pushforward_density<Real>(sigma, Mat3(F2 * F1), (F2 * F1).determinant());
    const Mat3 twice = pushforward_density<Real>(
        pushforward_density<Real>(sigma, F1, F1.determinant()), F2, F2.determinant());
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-10 * once.cwiseAbs().maxCoeff());
  }

  CHECK_THROWS_AS(pushforward_tensor(id, Mat3::Zero(), 0.0), SingularMapError);
}

TEST_CASE("metric <-> material correspondence") {
  const auto id = metric_to_material(MetricTensor{Mat3::Identity()});
  CHECK((id.sigma - Mat3::Identity()).norm() < 1e-15);

  for (int trial = 0; trial < 100; ++trial) {
    const MetricTensor g{random_spd()};
    const auto back = material_to_metric(metric_to_material(g));
    CHECK((back.g - g.g).cwiseAbs().maxCoeff() < 1e-10 * g.g.cwiseAbs().maxCoeff());
  }

  Mat3 notspd = Mat3::Identity();
  notspd(2, 2) = -1.0;
  CHECK_THROWS_AS(metric_to_material(MetricTensor{notspd}), std::domain_error);
}

TEST_CASE("hodge star: euclidean axes and double application") {
  const MetricTensor ge{Mat3::Identity()};
  // *dx1 = dx2 ^ dx3
  const Mat3 b1 = hodge_star_1form(ge, Vec3(1, 0, 0));
  CHECK(b1(1, 2) == doctest::Approx(1.0));
  CHECK(b1(2, 1) == doctest::Approx(-1.0));
  CHECK(std::abs(b1(0, 1)) + std::abs(b1(0, 2)) < 1e-15);
  // *dx2 = -dx1 ^ dx3
  const Mat3 b2 = hodge_star_1form(ge, Vec3(0, 1, 0));
  CHECK(b2(0, 2) == doctest::Approx(-1.0));

  for (int trial = 0; trial < 50; ++trial) {
    const MetricTensor g{random_spd()};
    std::uniform_real_distribution<Real> u(-1.0, 1.0);
    const Vec3 e(u(rng), u(rng), u(rng));
    const Vec3 back = hodge_star_2form(g, hodge_star_1form(g, e));
    CHECK((back - e).norm() < 1e-12 * std::max(e.norm(), 1.0));
  }
}

TEST_CASE("cloak media: exterior closed forms") {
  const auto spec = CoatingSpec::single_ball();
  // r = 1.5: radial metric eigenvalue 4, tangential tau^2/r^2 with tau = 1.
  const auto cm = sample_cloak_media(spec, Vec3(0, 0, 1.5));
  CHECK(cm.branch == Branch::ExteriorN1);
  CHECK(cm.metric.g(2, 2) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(cm.metric.g(0, 0) == doctest::Approx(1.0 / (1.5 * 1.5)).epsilon(1e-12));
  // Material: tangential 2, radial 2 (r-1)^2 / r^2.
  CHECK(cm.material.sigma(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cm.material.sigma(2, 2) ==
        doctest::Approx(2.0 * 0.25 / (1.5 * 1.5)).epsilon(1e-12));
  // det(sigma) = |g|^{1/2} ~ C (r-1)^2: the determinant of the material
  // tensor carries the same quadratic degeneracy as the metric density.
  CHECK(rel_diff(cm.material.sigma.determinant(), std::sqrt(cm.metric.det())) < 1e-12);
  const Real C1 = 8.0 / (1.5 * 1.5);
  CHECK(rel_diff(std::sqrt(cm.metric.det()), C1 * 0.25) < 1e-12);

  CHECK_THROWS_AS(sample_cloak_media(spec, Vec3(1.0, 0, 0)), SingularSurfaceError);
}

TEST_CASE("cloak media: pushforward route agrees with closed form") {
  // The sampled exterior media must equal the pushforward of the Euclidean
  // material by the coating map, computed through the jacobian machinery.
  for (auto spec : {CoatingSpec::single_ball(), CoatingSpec::double_ball(),
                    CoatingSpec::single_cylinder_shs()}) {
    for (Real r : {1.05, 1.2, 1.7, 1.999}) {
      const Vec3 x = spec.is_ball() ? Vec3(0.6 * r, 0.48 * r, 0.64 * r).normalized() * r
                                    : Vec3(r * 0.6, r * 0.8, 0.3);
      const auto j = geometry::jacobian(spec, x);
      // jacobian returns D(F^{-1}); the pushforward uses DF = (DF^{-1})^{-1}.
      const Mat3 DF = j.matrix.inverse();
      const auto pushed =
          pushforward_density<Real>(Mat3::Identity(), DF, DF.determinant());
      const auto cm = sample_cloak_media(spec, x);
      CHECK((pushed - cm.material.sigma).cwiseAbs().maxCoeff() < 1e-11);
    }
    // Deep in the layer the generic Cartesian route is ill-conditioned;
    // along an axis everything is diagonal and the agreement is exact.
    const Real r = 1.0 + 1e-3;
    const Vec3 x = spec.is_ball() ? Vec3(0, 0, r) : Vec3(r, 0, 0);
    const auto j = geometry::jacobian(spec, x);
    const Mat3 DF = j.matrix.inverse();
    const auto pushed = pushforward_density<Real>(Mat3::Identity(), DF, DF.determinant());
    const auto cm = sample_cloak_media(spec, x);
    CHECK((pushed - cm.material.sigma).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("cloak media: double-ball interior regular at the center image") {
  const auto spec = CoatingSpec::double_ball();
  const auto cm0 = sample_cloak_media(spec, Vec3(1e-13, 0, 0));
  CHECK(cm0.metric.positive_definite());
  CHECK((cm0.metric.g - Mat3::Identity()).norm() < 1e-9);
  // Conformality: eps = mu is one object by construction; sanity positive.
  const auto cm = sample_cloak_media(spec, Vec3(0.3, 0.2, 0.1));
  CHECK(cm.material.positive_definite());
}

TEST_CASE("near-Sigma sampling floor raises a precision flag") {
  const auto spec = CoatingSpec::single_ball();
  CHECK(sample_cloak_media(spec, Vec3(0, 0, 1.0 + 1e-11)).precision_warning);
  CHECK_FALSE(sample_cloak_media(spec, Vec3(0, 0, 1.0 + 1e-9)).precision_warning);
}

TEST_CASE("fermi flux is lipschitz-matched across Sigma (double coatings)") {
  for (auto spec : {CoatingSpec::double_ball(), CoatingSpec::double_cylinder()}) {
    const Real tau = 1e-4;
    const auto fe = fermi_flux(spec, Branch::ExteriorN1, tau);
    const auto fi = fermi_flux(spec, Branch::InteriorN2, tau);
    CHECK(std::abs(fe.normal - fi.normal) < 1e-4);
    CHECK(std::abs(fe.tangential - fi.tangential) < 1e-12);
    // Radial flux coefficient in Cartesian form also extends continuously:
    // one-sided limits at distance 1e-7 differ by < 1e-6.
    const Real d = 1e-7;
    const Vec3 xe = spec.is_ball() ? Vec3(0, 0, 1.0 + d) : Vec3(1.0 + d, 0, 0);
    const Vec3 xi = spec.is_ball() ? Vec3(0, 0, 1.0 - d) : Vec3(1.0 - d, 0, 0);
    const auto se = sample_cloak_media(spec, xe);
    const auto si = sample_cloak_media(spec, xi);
    const Real fluxe = spec.is_ball() ? se.material.sigma(2, 2) : se.material.sigma(0, 0);
    const Real fluxi = spec.is_ball() ? si.material.sigma(2, 2) : si.material.sigma(0, 0);
    CHECK(std::abs(fluxe - fluxi) < 1e-6);
  }
}

TEST_CASE("degeneracy diagnostics") {
  // Single ball: determinant exponent 2, radial eigenvalue 4.
  const auto ds = degeneracy_diagnostics(CoatingSpec::single_ball());
  CHECK(std::abs(ds.exterior.det_sqrt_exponent - 2.0) < 0.05);
  CHECK(std::abs(ds.exterior.fitted_exponent_tangential - 2.0) < 0.05);
  CHECK(std::abs(ds.exterior.radial_eigenvalue - 4.0) < 1e-9);
  CHECK(ds.exterior.fitted_constant_range.first > 0.0);
  CHECK_FALSE(ds.interior.has_value());

  // Double ball: both sides exponent 2, interior flux bound finite.
  const auto dd = degeneracy_diagnostics(CoatingSpec::double_ball());
  CHECK(std::abs(dd.exterior.det_sqrt_exponent - 2.0) < 0.05);
  REQUIRE(dd.interior.has_value());
  CHECK(std::abs(dd.interior->det_sqrt_exponent - 2.0) < 0.05);
  CHECK(std::abs(dd.interior->fitted_exponent_tangential - 2.0) < 0.05);
  CHECK(dd.interior->flux_bound > 0.0);
  CHECK(dd.interior->flux_bound < 10.0);
  CHECK(std::abs(dd.interior->radial_eigenvalue - 1.0) < 1e-9);

  // Cylinder: angular eigenvalue scales as distance^2 as well.
  const auto dc = degeneracy_diagnostics(CoatingSpec::single_cylinder_shs());
  CHECK(std::abs(dc.exterior.fitted_exponent_tangential - 2.0) < 0.05);
  CHECK(std::abs(dc.exterior.radial_eigenvalue - 4.0) < 1e-9);
}
