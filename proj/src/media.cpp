// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#include "cloak/media.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "cloak/ode.hpp"
#include "cloak/special.hpp"

namespace cloak::media {

namespace {

Mat3 symmetrized(const Mat3& m, const char* who) {
  const Real scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
  if (((m - m.transpose()).cwiseAbs().maxCoeff()) > 1e-14 * scale)
    throw std::domain_error(std::string(who) + ": components not symmetric");
  return 0.5 * (m + m.transpose());
}

bool spd(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

Real sinc_pi(Real r) {
  if (std::abs(r) < 1e-8) {
    const Real z = kPi * r;
    return 1.0 - z * z / 6.0;
  }
  return std::sin(kPi * r) / (kPi * r);
}

constexpr int kLeviCivita[3][3][3] = {
    {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
    {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};

}  // namespace

MetricTensor::MetricTensor(const Mat3& m) : g(symmetrized(m, "MetricTensor")) {}
bool MetricTensor::positive_definite() const { return spd(g); }

MaterialTensor::MaterialTensor(const Mat3& m) : sigma(symmetrized(m, "MaterialTensor")) {}
bool MaterialTensor::positive_definite() const { return spd(sigma); }

std::pair<Real, Real> MaterialTensor::eigen_bounds() const {
  Eigen::SelfAdjointEigenSolver<Mat3> es(sigma, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

MaterialTensor pushforward_tensor(const MaterialTensor& sigma, const Mat3& DF, Real detDF) {
  return MaterialTensor(pushforward_density<Real>(sigma.sigma, DF, detDF));
}

MaterialTensor metric_to_material(const MetricTensor& g) {
  if (!g.positive_definite())
    throw std::domain_error("metric_to_material: metric not positive definite");
  const Real det = g.det();
  return MaterialTensor(std::sqrt(det) * g.g.inverse());
}

MetricTensor material_to_metric(const MaterialTensor& sigma) {
  if (!sigma.positive_definite())
    throw std::domain_error("material_to_metric: tensor not positive definite");
  const Real det = sigma.sigma.determinant();
  const Mat3 g_inv = sigma.sigma / det;
  return MetricTensor(g_inv.inverse());
}

Mat3 hodge_star_1form(const MetricTensor& g, const Vec3& e) {
  if (!g.positive_definite())
    throw std::domain_error("hodge_star_1form: metric not positive definite");
  const Real sqrtdet = std::sqrt(g.det());
  const Vec3 raised = sqrtdet * (g.g.inverse() * e);  // |g|^{1/2} g^{jl} E_j
  Mat3 b = Mat3::Zero();
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int l = 0; l < 3; ++l) b(p, q) += raised[l] * kLeviCivita[l][p][q];
  return b;  // B_{pq} of (1/2) B_{pq} dx^p ^ dx^q
}

Vec3 hodge_star_2form(const MetricTensor& g, const Mat3& b) {
  if (!g.positive_definite())
    throw std::domain_error("hodge_star_2form: metric not positive definite");
  const Real sqrtdet = std::sqrt(g.det());
  Vec3 lowered = Vec3::Zero();  // (1/2) s^{lpq} B_{pq}
  for (int l = 0; l < 3; ++l)
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) lowered[l] += 0.5 * kLeviCivita[l][p][q] * b(p, q);
  return (g.g * lowered) / sqrtdet;
}

RadialFrame radial_frame(const CoatingSpec& spec, Branch branch, Real sigma_offset) {
  const Real a = spec.cloak_radius;
  RadialFrame f;
  f.branch = branch;
  if (branch == Branch::ExteriorN1) {
    f.A = geometry::map_inverse_derivative_from_offset(spec, sigma_offset);
    f.B = geometry::map_inverse_from_offset(spec, sigma_offset);
    return f;
  }
  if (!spec.is_double()) {
    f.A = 1.0;
    f.B = a - sigma_offset;  // flat interior, B = r
    return f;
  }
  // Blown-up round metric: B(r) = a sin(pi r / a) / pi is symmetric in
  // r <-> a - r, so the offset form is exact at the Sigma end.
  f.A = 1.0;
  f.B = a * std::sin(kPi * sigma_offset / a) / kPi;
  return f;
}

CloakMedia sample_cloak_media(const CoatingSpec& spec, const Vec3& x) {
  spec.validate();
  const Real a = spec.cloak_radius;
  const Real r = spec.is_ball() ? x.norm() : std::hypot(x[0], x[1]);
  if (std::abs(r - a) < 1e-14)
    throw SingularSurfaceError("sample_cloak_media: point on Sigma");
  if (r < a && spec.interior == geometry::InteriorKind::None)
    throw std::domain_error("sample_cloak_media: interior is an obstacle, no media there");

  CloakMedia out;
  out.branch = (r > a) ? Branch::ExteriorN1 : Branch::InteriorN2;
  out.precision_warning = std::abs(r - a) < 1e-10;

  Mat3 g;
  if (spec.is_ball()) {
    const Vec3 n = (r > 0.0) ? Vec3(x / r) : Vec3(0, 0, 1);
    const Mat3 P = n * n.transpose();
    if (out.branch == Branch::ExteriorN1) {
      const RadialFrame f = radial_frame(spec, out.branch, r - a);
      g = f.A * f.A * P + (f.B / r) * (f.B / r) * (Mat3::Identity() - P);
    } else if (!spec.is_double()) {
      g = Mat3::Identity();
    } else {
      const Real t = sinc_pi(r / a);
      g = P + t * t * (Mat3::Identity() - P);
      if (r < 1e-14) g = Mat3::Identity();
    }
  } else {
    const Vec3 er = (r > 0.0) ? Vec3(x[0] / r, x[1] / r, 0.0) : Vec3(1, 0, 0);
    const Vec3 et(-er[1], er[0], 0.0);
    const Vec3 ez(0, 0, 1);
    Real ar = 1.0, bt = 1.0;
    if (out.branch == Branch::ExteriorN1) {
      const RadialFrame f = radial_frame(spec, out.branch, r - a);
      ar = f.A * f.A;
      bt = (f.B / r) * (f.B / r);
    } else if (spec.is_double()) {
      const Real t = sinc_pi(r / a);
      bt = t * t;
    }
    g = ar * er * er.transpose() + bt * et * et.transpose() + ez * ez.transpose();
  }

  out.metric = MetricTensor(g);
  out.material = metric_to_material(out.metric);
  return out;
}

FermiFlux fermi_flux(const CoatingSpec& spec, Branch branch, Real tau) {
  spec.validate();
  if (!(tau > 0.0)) throw std::domain_error("fermi_flux: tau must be positive");
  const Real a = spec.cloak_radius;
  FermiFlux f;
  if (branch == Branch::ExteriorN1) {
    // Metric distance tau corresponds to boundary-layer offset t with
    // dt/dtau = 1/A(t); constant A for the canonical-linear family.
    Real t;
    if (spec.stretch == geometry::StretchKind::CanonicalLinear) {
      t = tau * (spec.outer_radius - a) / spec.outer_radius;
    } else {
      const Real tau0 = 1e-13;
      t = ode::integrate(
          [&](Real, const Eigen::Matrix<Real, 1, 1>& y) {
            const RadialFrame fr = radial_frame(spec, Branch::ExteriorN1, y[0]);
            return Eigen::Matrix<Real, 1, 1>{1.0 / fr.A};
          },
          Eigen::Matrix<Real, 1, 1>{0.5 * tau0}, tau0, tau)[0];
    }
    const RadialFrame fr = radial_frame(spec, Branch::ExteriorN1, t);
    // In (omega, tau) the metric is dtau^2 + B^2 domega^2 (+ dz^2, cylinder).
    f.normal = spec.is_ball() ? fr.B * fr.B : fr.B;  // |g|^{1/2} g^{tau tau}
    f.tangential = 1.0;  // |g|^{1/2} g^{ww}, unit-sphere scale
    return f;
  }
  if (!spec.is_double())
    throw std::domain_error("fermi_flux: single coating has no degenerate interior side");
  if (!(tau < a)) throw std::domain_error("fermi_flux: tau beyond the interior");
  const RadialFrame fr = radial_frame(spec, Branch::InteriorN2, tau);
  f.normal = spec.is_ball() ? fr.B * fr.B : fr.B;
  f.tangential = 1.0;
  return f;
}

namespace {

DegeneracyReport fit_side(const CoatingSpec& spec, Branch branch) {
  const Real a = spec.cloak_radius;
  const int n = 24;
  const auto offsets = ode::geomspace(1e-5, 1e-2, n);
  std::vector<Real> dist, detsqrt, tang;
  DegeneracyReport rep;
  rep.samples = n;
  Real cmin = 1e300, cmax = -1e300, flux = 0.0, radial = 0.0;
  for (Real d : offsets) {
    const Real r = (branch == Branch::ExteriorN1) ? a + d : a - d;
    const Vec3 x = spec.is_ball() ? Vec3(0, 0, r) : Vec3(r, 0, 0);
    const CloakMedia cm = sample_cloak_media(spec, x);
    Eigen::SelfAdjointEigenSolver<Mat3> es(cm.metric.g);
    const auto ev = es.eigenvalues();
    // Radial eigenvalue = the isolated one bounded below; tangential = smallest.
    const Real ev_rad = ev.maxCoeff();
    const Real ev_tan = ev.minCoeff();
    radial = ev_rad;
    dist.push_back(d);
    detsqrt.push_back(std::sqrt(cm.metric.det()));
    tang.push_back(ev_tan);
    const Real c = ev_tan / (d * d);
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    // Unit metric conormal of the sphere r = const: nu = A dr.
    const Real A = std::sqrt(ev_rad);
    const Vec3 nu = A * (spec.is_ball() ? Vec3(0, 0, 1) : Vec3(1, 0, 0));
    flux = std::max(flux, (cm.metric.g.inverse() * nu).norm());
  }
  rep.det_sqrt_exponent = special::fit_loglog(dist, detsqrt).slope;
  rep.fitted_exponent_tangential = special::fit_loglog(dist, tang).slope;
  rep.fitted_constant_range = {cmin, cmax};
  rep.radial_eigenvalue = radial;
  rep.flux_bound = flux;
  return rep;
}

}  // namespace

DegeneracyDiagnostics degeneracy_diagnostics(const CoatingSpec& spec) {
  spec.validate();
  DegeneracyDiagnostics d;
  d.exterior = fit_side(spec, Branch::ExteriorN1);
  if (spec.is_double()) d.interior = fit_side(spec, Branch::InteriorN2);
  return d;
}

}  // namespace cloak::media
