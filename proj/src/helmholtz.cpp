// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#include "cloak/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cloak/ode.hpp"
#include "cloak/special.hpp"

namespace cloak::helmholtz {

namespace {

using State = Eigen::Matrix<Real, 2, 1>;  // (u, phi)

// Sturm-Liouville coefficients in the boundary-layer coordinate
// t = distance to Sigma; full relative precision down to t ~ 1e-300.
struct OffsetCoeffs {
  const CoatingSpec* spec;
  Branch branch;
  Real p(Real t) const {
    const auto f = media::radial_frame(*spec, branch, t);
    return f.B * f.B / f.A;
  }
  Real w(Real t) const {
    const auto f = media::radial_frame(*spec, branch, t);
    return f.A * f.B * f.B;
  }
  Real q(Real t) const { return media::radial_frame(*spec, branch, t).A; }
};

// RHS in t for the exterior branch (r = a + t, dr = dt).
struct OffsetRhs {
  OffsetCoeffs c;
  Real lam;
  Real k2;
  Real sign = 1.0;  // -1 when t decreases as r increases (interior branch)
  State operator()(Real t, const State& y) const {
    State d;
    d[0] = sign * y[1] / c.p(t);
    d[1] = sign * (lam * c.q(t) - k2 * c.w(t)) * y[0];
    return d;
  }
};

// Same check in s = log t; never reconstitutes r, so no cancellation.
State rk4_log(const OffsetRhs& rhs, State y, Real s0, Real s1, int n) {
  auto rhs_s = [&](Real s, const State& v) -> State {
    const Real t = std::exp(s);
    return (t * rhs(t, v)).eval();
  };
  for (int i = 0; i < n; ++i) {
    const Real s = s0 + (s1 - s0) * i / n;
    const Real h = s0 + (s1 - s0) * (i + 1) / n - s;
    const State k1 = rhs_s(s, y);
    const State k2 = rhs_s(s + 0.5 * h, y + 0.5 * h * k1);
    const State k3 = rhs_s(s + 0.5 * h, y + 0.5 * h * k2);
    const State k4 = rhs_s(s + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

std::vector<Real> sample_offsets(Real span, const SolveOptions& opts) {
  const Real near_edge = std::min(1e-2, 0.1 * span);
  std::vector<Real> ts;
  if (opts.seed_radius < near_edge) {
    ts = ode::geomspace(opts.seed_radius, near_edge, opts.near_samples);
  } else {
    ts.push_back(opts.seed_radius);
  }
  const auto bulk = ode::linspace(near_edge, span, opts.bulk_samples);
  for (size_t i = 1; i < bulk.size(); ++i) ts.push_back(bulk[i]);
  return ts;
}

// Replays segments of the stored solution with fixed-step RK4 (a different
// scheme than the production integrator) and reports the worst endpoint
// mismatch relative to the local solution scale.
Real check_residual(const OffsetRhs& rhs, const std::vector<ModeSample>& smp,
                    const std::vector<Real>& offsets, int l) {
  Real worst = 0.0;
  // Components more than twelve decades below their global scale are noise
  // floors, not signal; measure mismatches against that floor.
  Real gu = 0.0, gphi = 0.0;
  for (const auto& s : smp) {
    gu = std::max(gu, std::abs(s.u));
    gphi = std::max(gphi, std::abs(s.phi));
  }
  std::vector<std::pair<size_t, size_t>> segs;
  size_t i = 0;
  while (i + 1 < smp.size() && offsets[i + 1] < 1.1e-2) {
    size_t j = i;
    while (j + 1 < smp.size() && offsets[j + 1] < 10.5 * offsets[i]) ++j;
    if (j == i) break;
    segs.emplace_back(i, j);
    i = j;
  }
  const size_t bulk0 = i;
  const size_t nbulk = smp.size() - 1 - bulk0;
  for (int b = 0; b < 8 && nbulk > 0; ++b) {
    const size_t s0 = bulk0 + (nbulk * b) / 8;
    const size_t s1 = bulk0 + (nbulk * (b + 1)) / 8;
    if (s1 > s0) segs.emplace_back(s0, s1);
  }
  for (auto [s0, s1] : segs) {
    const State y0{smp[s0].u, smp[s0].phi};
    // Replay in s = log t throughout: the power-law dynamics ~ t^l have
    // bounded local frequency there, so a step count scaled with l keeps the
    // replay well below the 1e-9 reporting threshold.
    const int n = std::min(65536, 4096 * (l + 2));
    const State y1 = rk4_log(rhs, y0, std::log(offsets[s0]), std::log(offsets[s1]), n);
    const Real su =
        std::max({std::abs(smp[s0].u), std::abs(smp[s1].u), 1e-12 * gu, 1e-290});
    const Real sp =
        std::max({std::abs(smp[s0].phi), std::abs(smp[s1].phi), 1e-12 * gphi, 1e-290});
    worst = std::max(worst, std::abs(y1[0] - smp[s1].u) / su);
    worst = std::max(worst, std::abs(y1[1] - smp[s1].phi) / sp);
  }
  return worst;
}

}  // namespace

Real RadialMode::max_abs_u() const {
  Real m = 0.0;
  for (const auto& s : samples) m = std::max(m, std::abs(s.u));
  return m;
}
Real RadialMode::max_abs_phi() const {
  Real m = 0.0;
  for (const auto& s : samples) m = std::max(m, std::abs(s.phi));
  return m;
}

RadialCoefficients radial_coefficients(const CoatingSpec& spec, Branch branch) {
  spec.validate();
  if (!spec.is_ball())
    throw std::invalid_argument(
        "radial_coefficients: scalar mode reduction is defined on ball kinds");
  if (branch == Branch::InteriorN2 && spec.interior == geometry::InteriorKind::None)
    throw std::invalid_argument("radial_coefficients: no interior branch");
  const Real a = spec.cloak_radius;
  RadialCoefficients c;
  c.branch = branch;
  auto offset = [a, branch](Real r) {
    return branch == Branch::ExteriorN1 ? r - a : a - r;
  };
  c.p = [spec, branch, offset](Real r) {
    const auto f = media::radial_frame(spec, branch, offset(r));
    return f.B * f.B / f.A;
  };
  c.w = [spec, branch, offset](Real r) {
    const auto f = media::radial_frame(spec, branch, offset(r));
    return f.A * f.B * f.B;
  };
  c.q = [spec, branch, offset](Real r) {
    return media::radial_frame(spec, branch, offset(r)).A;
  };
  return c;
}

RadialCoefficients reference_coefficients() {
  RadialCoefficients c;
  c.p = [](Real r) { return r * r; };
  c.w = [](Real r) { return r * r; };
  c.q = [](Real) { return 1.0; };
  return c;
}

RadialMode solve_exterior_mode(const CoatingSpec& spec, int l, Real k, SeedKind seed,
                               const SolveOptions& opts) {
  spec.validate();
  if (!(k > 0.0)) throw std::domain_error("solve_exterior_mode: k must be positive");
  if (l < 0) throw std::domain_error("solve_exterior_mode: l must be >= 0");
  const Real a = spec.cloak_radius;
  const auto offsets = sample_offsets(spec.outer_radius - a, opts);

  State y0;
  if (seed == SeedKind::PullbackRegular) {
    const Real rho0 = geometry::map_inverse_from_offset(spec, offsets.front());
    y0 = State{special::sph_j(l, k * rho0),
               k * rho0 * rho0 * special::sph_j_prime(l, k * rho0)};
  } else {
    y0 = State{1.0, 0.0};
  }
  const Real norm = std::max(std::abs(y0[0]), std::abs(y0[1]));
  if (norm > 0.0) y0 /= norm;

  OffsetRhs rhs{{&spec, Branch::ExteriorN1}, static_cast<Real>(l) * (l + 1), k * k, 1.0};
  ode::Options oo;
  oo.rel_tol = opts.rel_tol;
  oo.abs_tol = 1e-16;
  oo.initial_step = 0.1 * offsets.front();

  RadialMode mode;
  mode.l = l;
  mode.k = k;
  mode.branch = Branch::ExteriorN1;
  mode.seed = seed;
  mode.seed_radius_offset = offsets.front();
  mode.samples.reserve(offsets.size());
  ode::integrate_sampled<State>(
      rhs, y0, offsets,
      [&](Real t, const State& y) {
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
          throw ToleranceError("solve_exterior_mode: state overflow");
        mode.samples.push_back({a + t, y[0], y[1]});
      },
      oo);
  mode.ode_residual = check_residual(rhs, mode.samples, offsets, l);
  return mode;
}

RadialMode solve_interior_mode(const CoatingSpec& spec, int l, Real k,
                               const SolveOptions& opts) {
  spec.validate();
  if (!spec.is_double())
    throw std::invalid_argument("solve_interior_mode: needs a double coating");
  const Real a = spec.cloak_radius;

  // Offsets from Sigma, decreasing radius toward the regular center image.
  const Real t_center = a * (1.0 - 1e-6);  // r_in = 1e-6 a
  std::vector<Real> offsets;
  for (Real t : ode::geomspace(opts.seed_radius, t_center, 49)) offsets.push_back(t);
  std::reverse(offsets.begin(), offsets.end());  // integrate center -> Sigma

  const Real r_in = a - t_center;
  State y0 = (l == 0) ? State{1.0, 0.0}
                      : State{std::pow(r_in, l), l * std::pow(r_in, l + 1)};
  const Real norm = std::max(std::abs(y0[0]), std::abs(y0[1]));
  if (norm > 0.0) y0 /= norm;

  OffsetRhs rhs{{&spec, Branch::InteriorN2}, static_cast<Real>(l) * (l + 1), k * k, -1.0};
  ode::Options oo;
  oo.rel_tol = opts.rel_tol;
  oo.abs_tol = 1e-16;
  oo.initial_step = 0.1 * r_in;

  RadialMode mode;
  mode.l = l;
  mode.k = k;
  mode.branch = Branch::InteriorN2;
  mode.seed_radius_offset = r_in;
  ode::integrate_sampled<State>(
      rhs, y0, offsets,
      [&](Real t, const State& y) { mode.samples.push_back({a - t, y[0], y[1]}); }, oo);
  return mode;
}

DtnEntry dtn_eigenvalue(const CoatingSpec& spec, const RadialMode& mode,
                        NormalKind normal) {
  const auto& outer = mode.at_outer();
  DtnEntry e;
  e.l = mode.l;
  e.k = mode.k;
  if (std::abs(outer.u) < 1e-10 * mode.max_abs_u()) {
    e.dirichlet_resonance = true;
    return e;
  }
  const auto f =
      media::radial_frame(spec, Branch::ExteriorN1, spec.outer_radius - spec.cloak_radius);
  const Real p_outer = f.B * f.B / f.A;
  const Real denom = (normal == NormalKind::MetricConormal) ? f.A * p_outer : p_outer;
  e.lambda = outer.phi / (denom * outer.u);
  return e;
}

DtnEntry reference_dtn(int l, Real k, Real outer_radius, NormalKind) {
  DtnEntry e;
  e.l = l;
  e.k = k;
  const Real x = k * outer_radius;
  const Real j = special::sph_j(l, x);
  if (std::abs(j) < 1e-12) {
    e.dirichlet_resonance = true;
    return e;
  }
  e.lambda = k * special::sph_j_prime(l, x) / j;
  return e;
}

EnergyReport energy_near_sigma(const RadialCoefficients& coeffs, int l,
                               const std::function<Real(Real)>& u,
                               const std::function<Real(Real)>& du,
                               const std::vector<Real>& shells, Real floor,
                               Real sigma_radius) {
  if (shells.size() < 2) throw std::invalid_argument("energy_near_sigma: need >= 2 shells");
  std::vector<Real> d(shells);
  std::sort(d.begin(), d.end(), std::greater<Real>());
  const Real lam = static_cast<Real>(l) * (l + 1);
  const bool interior = coeffs.branch == Branch::InteriorN2;
  const Real a = sigma_radius;

  EnergyReport rep;
  rep.floor = floor;
  auto f = [&](Real r) {
    const Real dd = du(r);
    return coeffs.p(r) * dd * dd + lam * coeffs.q(r) * u(r) * u(r);
  };
  auto fl2 = [&](Real r) {
    const Real v = u(r);
    return coeffs.w(r) * v * v;
  };
  // Shell integrals in log-offset from Sigma to resolve the layer.
  auto shell_integral = [&](Real lo, Real hi, const std::function<Real(Real)>& g) {
    return special::integrate(
        [&](Real ls) {
          const Real s = std::exp(ls);
          const Real r = interior ? (a - s) : (a + s);
          return g(r) * s;
        },
        std::log(lo), std::log(hi), 12, 12);
  };

  const Real dmax = d.front();
  const Real cumulative_from_floor = shell_integral(floor, dmax, f);
  rep.l2_weighted = shell_integral(floor, dmax, fl2);

  std::vector<Real> pieces;  // between consecutive shells, outermost first
  for (size_t i = 0; i + 1 < d.size(); ++i)
    pieces.push_back(shell_integral(d[i + 1], d[i], f));

  for (Real delta : d)
    rep.shell_integrals.emplace_back(
        delta, shell_integral(std::min(floor, delta * 0.999), delta, f));

  // Convergence: the inter-shell pieces must decay toward Sigma and their
  // geometric tail estimate must be negligible against the total (relative
  // Cauchy criterion 1e-4). Growing pieces signal divergence.
  const Real total = std::max(cumulative_from_floor, 0.0);
  rep.verdict = EnergyVerdict::Finite;
  if (!pieces.empty() && total > 0.0) {
    const Real last = std::abs(pieces.back());
    Real ratio = 1.0;
    if (pieces.size() >= 2 && std::abs(pieces[pieces.size() - 2]) > 0.0)
      ratio = last / std::abs(pieces[pieces.size() - 2]);
    if (ratio >= 1.0) {
      rep.verdict = EnergyVerdict::Divergent;
    } else {
      const Real tail = last * ratio / (1.0 - std::min(ratio, 0.99));
      if (tail > 1e-4 * total) rep.verdict = EnergyVerdict::Divergent;
    }
  }
  return rep;
}

EnergyReport energy_near_sigma(const CoatingSpec& spec, const RadialMode& mode,
                               const std::vector<Real>& shells) {
  const auto coeffs = radial_coefficients(spec, mode.branch);
  const auto& smp = mode.samples;
  auto locate = [&](Real r) -> std::pair<size_t, Real> {
    auto it = std::lower_bound(smp.begin(), smp.end(), r,
                               [](const ModeSample& s, Real v) { return s.r < v; });
    size_t i = std::clamp<size_t>(it - smp.begin(), 1, smp.size() - 1);
    const Real t = (r - smp[i - 1].r) / (smp[i].r - smp[i - 1].r);
    return {i, t};
  };
  auto u = [&, locate](Real r) {
    auto [i, t] = locate(r);
    return (1.0 - t) * smp[i - 1].u + t * smp[i].u;
  };
  auto du = [&, locate, coeffs](Real r) {
    auto [i, t] = locate(r);
    const Real phi = (1.0 - t) * smp[i - 1].phi + t * smp[i].phi;
    return phi / coeffs.p(r);
  };
  const Real a = spec.cloak_radius;
  Real floor = mode.branch == Branch::InteriorN2 ? (a - smp.back().r)
                                                 : (smp.front().r - a);
  floor = std::max(floor, 1e-12);
  return energy_near_sigma(coeffs, mode.l, u, du, shells, floor, a);
}

InteriorSolution interior_neumann_solve(const CoatingSpec& spec, int l, Real k,
                                        const std::optional<ShellSource>& source,
                                        const SolveOptions& opts) {
  spec.validate();
  if (spec.kind != geometry::CoatKind::SingleBall)
    throw std::invalid_argument("interior_neumann_solve: single-ball spec required");
  const Real a = spec.cloak_radius;
  if (source && !(source->radius > 0.0 && source->radius < a - 0.05))
    throw std::domain_error("interior_neumann_solve: source must keep a gap to Sigma");

  const auto coeffs = reference_coefficients();  // flat interior
  const Real lam = static_cast<Real>(l) * (l + 1);
  auto rhs = [&](Real r, const State& y) {
    return State{y[1] / coeffs.p(r), (lam * coeffs.q(r) - k * k * coeffs.w(r)) * y[0]};
  };
  ode::Options oo;
  oo.rel_tol = opts.rel_tol;
  oo.abs_tol = 1e-16;
  const Real r_in = 1e-6;
  oo.initial_step = 0.1 * r_in;

  auto regular_seed = [&]() {
    return (l == 0) ? State{1.0, 0.0} : State{std::pow(r_in, l), l * std::pow(r_in, l + 1)};
  };

  InteriorSolution out;
  out.resonance = std::abs(special::sph_j_prime(l, k * a)) < 1e-8;

  // Particular-solution grid (also used for the homogeneous run so the two
  // can be combined pointwise, no interpolation).
  const Real r0 = source ? source->radius : 0.5 * a;
  std::vector<Real> inner, outer;
  for (Real d : ode::geomspace(r_in, r0, 49)) inner.push_back(d);
  for (Real d : ode::geomspace(r0, a, 49)) outer.push_back(d);
  std::vector<Real> grid = inner;
  grid.insert(grid.end(), outer.begin() + 1, outer.end());
  std::vector<ModeSample> hom;
  ode::integrate_sampled<State>(
      rhs, regular_seed(), grid,
      [&](Real r, const State& y) { hom.push_back({r, y[0], y[1]}); }, oo);

  if (!source) {
    out.mode.l = l;
    out.mode.k = k;
    out.mode.branch = Branch::InteriorN2;
    if (out.resonance) {
      out.compatible = true;  // eigenfunction family; report it
      out.mode.samples = hom;
    } else {
      for (Real r : grid) out.mode.samples.push_back({r, 0.0, 0.0});
    }
    out.neumann_flux_at_a = std::abs(out.mode.samples.back().phi);
    return out;
  }

  // Particular solution: regular branch up to the shell, flux jump, onward.
  std::vector<ModeSample> part;
  State y = regular_seed();
  y = ode::integrate_sampled<State>(
      rhs, y, inner, [&](Real r, const State& s) { part.push_back({r, s[0], s[1]}); }, oo);
  y[1] += source->flux_jump;
  part.pop_back();
  ode::integrate_sampled<State>(
      rhs, y, outer, [&](Real r, const State& s) { part.push_back({r, s[0], s[1]}); }, oo);

  const Real phi_hom_a = hom.back().phi;
  const Real phi_part_a = part.back().phi;
  Real hom_scale = 0.0;
  for (const auto& s : hom) hom_scale = std::max(hom_scale, std::abs(s.phi));

  Real c = 0.0;
  if (std::abs(phi_hom_a) > 1e-12 * std::max(hom_scale, 1.0)) {
    c = -phi_part_a / phi_hom_a;
  } else {
    out.resonance = true;
    Real part_scale = 0.0;
    for (const auto& s : part) part_scale = std::max(part_scale, std::abs(s.phi));
    out.compatible = std::abs(phi_part_a) < 1e-8 * std::max(part_scale, 1.0);
  }

  out.mode.l = l;
  out.mode.k = k;
  out.mode.branch = Branch::InteriorN2;
  // Both runs sampled the same grid; combine pointwise.
  for (size_t i = 0; i < part.size(); ++i)
    out.mode.samples.push_back(
        {part[i].r, part[i].u + c * hom[i].u, part[i].phi + c * hom[i].phi});
  out.neumann_flux_at_a = std::abs(out.mode.samples.back().phi);
  return out;
}

OverdeterminedResult overdetermined_residual(Real k, int l, Real c,
                                             const SolveOptions& opts) {
  if (!(k > 0.0)) throw std::domain_error("overdetermined_residual: k must be positive");
  OverdeterminedResult out;
  if (c == 0.0) {
    out.spatial_h1_exists = true;
    return out;
  }
  const Real a = 1.0;
  const auto coeffs = reference_coefficients();
  const Real lam = static_cast<Real>(l) * (l + 1);
  auto rhs = [&](Real r, const State& y) {
    return State{y[1] / coeffs.p(r), (lam * coeffs.q(r) - k * k * coeffs.w(r)) * y[0]};
  };
  ode::Options oo;
  oo.rel_tol = opts.rel_tol;
  oo.abs_tol = 1e-16;
  const Real r_in = 1e-6;
  oo.initial_step = 0.1 * r_in;
  State y = (l == 0) ? State{1.0, 0.0} : State{std::pow(r_in, l), l * std::pow(r_in, l + 1)};
  Real umax = 0.0;
  const auto grid = ode::geomspace(r_in, a, 65);
  State end = ode::integrate_sampled<State>(
      rhs, y, grid, [&](Real, const State& s) { umax = std::max(umax, std::abs(s[0])); },
      oo);
  if (std::abs(end[0]) < 1e-12 * umax) {
    out.infinite_obstruction = true;
    out.residual = std::numeric_limits<Real>::infinity();
    return out;
  }
  out.residual = std::abs(c * end[1] / (a * a * end[0]));
  out.spatial_h1_exists = out.residual < 1e-8 * std::abs(c) * k;
  return out;
}

CauchyMatchReport cauchy_match_report(const CoatingSpec& spec, int l_max,
                                      const std::vector<Real>& k_grid,
                                      ScenarioVariant variant, const SolveOptions& opts) {
  spec.validate();
  CauchyMatchReport rep;
  rep.variant = variant;
  const SeedKind seed = (variant == ScenarioVariant::VirtualSurface)
                            ? SeedKind::PullbackRegular
                            : SeedKind::UnitDirichlet;
  for (Real k : k_grid) {
    for (int l = 0; l <= l_max; ++l) {
      CauchyRow row;
      row.l = l;
      row.k = k;
      try {
        const auto ref = reference_dtn(l, k, spec.outer_radius);
        if (ref.dirichlet_resonance) {
          row.resonance = true;
          rep.rows.push_back(row);
          continue;
        }
        const auto mode = solve_exterior_mode(spec, l, k, seed, opts);
        const auto dtn = dtn_eigenvalue(spec, mode);
        if (dtn.dirichlet_resonance) {
          row.resonance = true;
          rep.rows.push_back(row);
          continue;
        }
        row.lambda_cloaked = dtn.lambda;
        row.lambda_reference = ref.lambda;
        row.rel_discrepancy = rel_diff(dtn.lambda, ref.lambda);
        rep.max_rel_discrepancy = std::max(rep.max_rel_discrepancy, row.rel_discrepancy);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rep.rows.push_back(row);
    }
    if (spec.is_double() && spec.is_ball()) {
      // Interior channel: closed-manifold resonances show up as a vanishing
      // flux limit at Sigma^- of the center-regular solution. Informational;
      // they never touch the exterior rows.
      for (int l = 0; l <= std::min(l_max, 2); ++l) {
        const auto im = solve_interior_mode(spec, l, k, opts);
        const Real phimax = im.max_abs_phi();
        if (phimax > 0.0 && std::abs(im.samples.back().phi) < 1e-3 * phimax)
          rep.interior_resonances.emplace_back(l, k);
      }
    }
  }
  return rep;
}

}  // namespace cloak::helmholtz
