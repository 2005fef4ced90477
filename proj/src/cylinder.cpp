// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#include "cloak/cylinder.hpp"

#include <algorithm>
#include <cmath>

#include "cloak/ode.hpp"
#include "cloak/special.hpp"

namespace cloak::cylinder {

namespace sp = cloak::special;

namespace {

// Diagonal material eigenvalues of the coated cylinder in the orthonormal
// cylindrical frame, offset form: sig_r = B/(A r), sig_th = A r / B,
// sig_z = A B / r, with r = a + t. Vacuum when vac is set.
struct CylMedia {
  const CoatingSpec* spec;
  bool vac = false;
  struct Vals {
    Real sr, sth, sz, r;
  };
  Vals at(Real t) const {
    const Real a = spec->cloak_radius;
    const Real r = vac ? t : a + t;  // vacuum control runs in plain radius
    if (vac) return {1.0, 1.0, 1.0, r};
    const auto f = media::radial_frame(*spec, geometry::Branch::ExteriorN1, t);
    return {f.B / (f.A * r), f.A * r / f.B, f.A * f.B / r, r};
  }
};

// x = (E_z, r E_theta, H_z, r H_theta), first-order system in t:
//  x1' = (i/k) [ (beta^2/sr - k^2 sth) x4 / r - (n beta/(r sr)) x3 ]
//  x2' = (i/k) [ (n beta / sr) x4 / r + (k^2 r sz - n^2/(r sr)) x3 ]
//  x3' = (i/k) [ (n beta/(r sr)) x1 + (k^2 sth - beta^2/sr) x2 / r ]
//  x4' = (i/k) [ (n^2/(r sr) - k^2 r sz) x1 - (n beta / sr) x2 / r ]
struct CylRhs {
  CylMedia media;
  int n;
  Real beta;
  Real k;
  Vec4c operator()(Real t, const Vec4c& x) const {
    const auto m = media.at(t);
    const Real r = m.r;
    const Complex ik = kImag / k;
    const Real nb = n * beta;
    Vec4c d;
    d[0] = ik * ((beta * beta / m.sr - k * k * m.sth) * x[3] / r -
                 nb / (r * m.sr) * x[2]);
    d[1] = ik * (nb / m.sr * x[3] / r + (k * k * r * m.sz - Real(n) * n / (r * m.sr)) * x[2]);
    d[2] = ik * (nb / (r * m.sr) * x[0] + (k * k * m.sth - beta * beta / m.sr) * x[1] / r);
    d[3] = ik * ((Real(n) * n / (r * m.sr) - k * k * r * m.sz) * x[0] - nb / m.sr * x[1] / r);
    return d;
  }
};

enum class Channel { TM, TE };
enum class Radial { Regular, Outgoing };

// Free-space channel states at radius rho (used for seeds and matching):
//  TM: (Z, -n beta Z / gamma^2, 0, (i k / gamma) rho dZ)
//  TE: (0, -(i k / gamma) rho dZ, Z, -n beta Z / gamma^2)
Vec4c vacuum_state(Channel ch, Radial kind, int n, Real beta, Real k, Complex gamma,
                   Real rho) {
  const Complex Z = (kind == Radial::Regular) ? sp::cyl_j(n, gamma, rho)
                                              : sp::cyl_h1(n, gamma, rho);
  const Complex dZ = (kind == Radial::Regular) ? sp::cyl_j_prime(n, gamma, rho)
                                               : sp::cyl_h1_prime(n, gamma, rho);
  const Complex g2 = gamma * gamma;
  Vec4c x = Vec4c::Zero();
  if (ch == Channel::TM) {
    x[0] = Z;
    x[1] = -Real(n) * beta * Z / g2;
    x[3] = (kImag * k / gamma) * rho * dZ;
  } else {
    x[1] = -(kImag * k / gamma) * rho * dZ;
    x[2] = Z;
    x[3] = -Real(n) * beta * Z / g2;
  }
  return x;
}

ScatteringEntry solve_generic(int n, Real beta, Real k, Lining lining,
                              const CylSolveOptions& opts) {
  const auto spec = CoatingSpec::single_cylinder_shs();
  const Real a = spec.cloak_radius, R = spec.outer_radius;
  ScatteringEntry out;
  out.n = n;
  out.beta = beta;
  out.k = k;
  out.gamma = sp::transverse_gamma(k, beta);

  const bool vacuum = lining == Lining::VacuumControl;
  CylRhs rhs{{&spec, vacuum}, n, beta, k};

  // Two independent seeds spanning the admissible subspace at the lining.
  Real t0;
  std::array<Vec4c, 2> seeds;
  if (lining == Lining::Shs) {
    // The SHS condition eta.E = eta.H = 0 selects the pullback-regular
    // branch; the two surviving degrees of freedom are the TM/TE channels.
    t0 = opts.seed_radius;
    const Real rho0 = geometry::map_inverse_from_offset(spec, t0);
    seeds[0] = vacuum_state(Channel::TM, Radial::Regular, n, beta, k, out.gamma, rho0);
    seeds[1] = vacuum_state(Channel::TE, Radial::Regular, n, beta, k, out.gamma, rho0);
  } else if (lining == Lining::Pec) {
    // nu x E = 0 at the lining: E_z = E_theta = 0, H components free.
    t0 = opts.pec_standoff;
    seeds[0] = Vec4c(0, 0, 1, 0);
    seeds[1] = Vec4c(0, 0, 0, 1);
  } else {
    // Vacuum annulus [1, 2], regular channel states at the inner radius.
    t0 = a;
    seeds[0] = vacuum_state(Channel::TM, Radial::Regular, n, beta, k, out.gamma, t0);
    seeds[1] = vacuum_state(Channel::TE, Radial::Regular, n, beta, k, out.gamma, t0);
  }

  const Real t1 = vacuum ? R : (R - a);
  ode::Options oo;
  oo.rel_tol = opts.rel_tol;
  oo.abs_tol = 1e-16;
  oo.initial_step = 0.1 * std::min(t0, 0.05);

  std::array<Vec4c, 2> at_boundary;
  for (int s = 0; s < 2; ++s) {
    Vec4c y = seeds[s];
    Real norm = 0.0;
    for (int c = 0; c < 4; ++c) norm = std::max(norm, std::abs(y[c]));
    if (norm > 0.0) y /= norm;
    if (opts.keep_modes) {
      CylMode mode;
      mode.n = n;
      mode.beta = beta;
      mode.k = k;
      mode.gamma = out.gamma;
      std::vector<Real> ts;
      for (Real t : ode::geomspace(t0, 0.5 * (t1 - t0) + t0, 33)) ts.push_back(t);
      for (Real t : ode::linspace(0.5 * (t1 - t0) + t0, t1, 17))
        if (t > ts.back()) ts.push_back(t);
      y = ode::integrate_sampled<Vec4c>(
          rhs, y, ts,
          [&](Real t, const Vec4c& v) {
            mode.samples.push_back({vacuum ? t : a + t, v});
          },
          oo);
      out.modes.push_back(std::move(mode));
    } else {
      y = ode::integrate(rhs, y, t0, t1, oo);
    }
    at_boundary[s] = y;
  }

  // Match at r = R: alpha1 s1 + alpha2 s2 - R_TM out_TM - R_TE out_TE = inc.
  const Real rhoR = R;  // boundary fixed by the map
  Eigen::Matrix<Complex, 4, 4> M;
  M.col(0) = at_boundary[0];
  M.col(1) = at_boundary[1];
  M.col(2) = -vacuum_state(Channel::TM, Radial::Outgoing, n, beta, k, out.gamma, rhoR);
  M.col(3) = -vacuum_state(Channel::TE, Radial::Outgoing, n, beta, k, out.gamma, rhoR);
  const auto lu = M.fullPivLu();
  for (int inc = 0; inc < 2; ++inc) {
    const Vec4c b = vacuum_state(inc == 0 ? Channel::TM : Channel::TE, Radial::Regular,
                                 n, beta, k, out.gamma, rhoR);
    const Vec4c sol = lu.solve(b);
    out.reflection(0, inc) = sol[2];
    out.reflection(1, inc) = sol[3];
  }
  out.max_abs_reflection = out.reflection.cwiseAbs().maxCoeff();
  const Mat2c S = Mat2c::Identity() + 2.0 * out.reflection;
  out.unitarity_defect = (S.adjoint() * S - Mat2c::Identity()).norm();
  return out;
}

}  // namespace

ScatteringEntry solve_cyl_mode_shs(int n, Real beta, Real k, const CylSolveOptions& opts) {
  return solve_generic(n, beta, k, Lining::Shs, opts);
}

ScatteringEntry solve_cyl_mode_pec(int n, Real beta, Real k, const CylSolveOptions& opts) {
  return solve_generic(n, beta, k, Lining::Pec, opts);
}

ScatteringEntry solve_cyl_mode_vacuum(int n, Real beta, Real k,
                                      const CylSolveOptions& opts) {
  return solve_generic(n, beta, k, Lining::VacuumControl, opts);
}

Mat2c pec_reference_reflection(int n, Complex gamma, Real rho_c) {
  Mat2c r = Mat2c::Zero();
  r(0, 0) = -sp::cyl_j(n, gamma, rho_c) / sp::cyl_h1(n, gamma, rho_c);
  r(1, 1) = -sp::cyl_j_prime(n, gamma, rho_c) / sp::cyl_h1_prime(n, gamma, rho_c);
  return r;
}

TraceMatchVerdict axis_trace_match(const AxisTraces& traces, Real tol) {
  if (traces.z.empty() || traces.be1.size() != traces.z.size() ||
      traces.be2.size() != traces.z.size() || traces.bh1.size() != traces.z.size() ||
      traces.bh2.size() != traces.z.size())
    throw std::invalid_argument("axis_trace_match: traces need a common z grid");
  TraceMatchVerdict v;
  for (size_t i = 0; i < traces.z.size(); ++i) {
    v.sup_e_mismatch = std::max(v.sup_e_mismatch, std::abs(traces.be1[i] - traces.be2[i]));
    v.sup_h_mismatch = std::max(v.sup_h_mismatch, std::abs(traces.bh1[i] - traces.bh2[i]));
  }
  v.finite_energy_compatible = v.sup_e_mismatch < tol && v.sup_h_mismatch < tol;
  return v;
}

SurfaceSources induced_surface_sources(const AxisTraces& mismatch) {
  SurfaceSources s;
  s.s_e.reserve(mismatch.z.size());
  s.s_h.reserve(mismatch.z.size());
  for (size_t i = 0; i < mismatch.z.size(); ++i) {
    // Sheet amplitudes are the tangential trace jumps nu x [b zeta] per mode;
    // |nu x zeta| = 1 on the cylinder, so the jump itself is the amplitude.
    const Complex je = mismatch.be1[i] - mismatch.be2[i];
    const Complex jh = mismatch.bh1[i] - mismatch.bh2[i];
    s.s_e.push_back(je);
    s.s_h.push_back(jh);
    s.sup_e = std::max(s.sup_e, std::abs(je));
    s.sup_h = std::max(s.sup_h, std::abs(jh));
  }
  return s;
}

AngularTraceLimit cyl_angular_trace_limit(const CylMode& mode, Real cloak_radius) {
  AngularTraceLimit out;
  std::vector<Real> d, v;
  Real field_scale = 0.0;
  for (const auto& s : mode.samples)
    for (int c = 0; c < 4; ++c) field_scale = std::max(field_scale, std::abs(s.state[c]));
  if (field_scale == 0.0) {
    out.degenerate = true;
    return out;
  }
  auto nearest = [&](Real target) {
    size_t best = 0;
    Real bd = 1e300;
    for (size_t i = 0; i < mode.samples.size(); ++i) {
      const Real dd = std::abs(mode.samples[i].r - cloak_radius - target);
      if (dd < bd) {
        bd = dd;
        best = i;
      }
    }
    return best;
  };
  for (Real t : {1e-2, 1e-3, 1e-4}) {
    const auto& s = mode.samples[nearest(t)];
    const Real etheta = std::abs(s.state[1]) / s.r;  // eta . E
    if (etheta == 0.0) {
      out.degenerate = true;
      return out;
    }
    d.push_back(s.r - cloak_radius);
    v.push_back(etheta);
  }
  out.slope = sp::fit_loglog(d, v).slope;

  // Extrapolate the axial components linearly in the offset to Sigma.
  const auto& s1 = mode.samples[nearest(1e-4)];
  const auto& s2 = mode.samples[nearest(1e-5)];
  const Real t1 = s1.r - cloak_radius, t2 = s2.r - cloak_radius;
  out.zeta_e_limit = s2.state[0] + (s1.state[0] - s2.state[0]) * (0.0 - t2) / (t1 - t2);
  out.zeta_h_limit = s2.state[2] + (s1.state[2] - s2.state[2]) * (0.0 - t2) / (t1 - t2);
  const auto& sn = mode.samples[nearest(1e-6)];
  out.zeta_e_gap = std::abs(sn.state[0] - out.zeta_e_limit) /
                   std::max(std::abs(out.zeta_e_limit), 1e-12 * field_scale);
  return out;
}

}  // namespace cloak::cylinder
