// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "cloak/errors.hpp"
#include "cloak/types.hpp"

namespace cloak::ode {

struct Options {
  Real rel_tol = 1e-12;
  Real abs_tol = 1e-14;
  Real initial_step = 0.0;  // 0 => heuristic
  long max_steps = 20'000'000;
};

namespace detail {
inline Real comp_abs(Real v) { return std::abs(v); }
inline Real comp_abs(const Complex& v) { return std::abs(v); }
}  // namespace detail

/// Adaptive Dormand-Prince 5(4) for small dense states (Eigen fixed vectors,
/// real or complex scalar). Integrates dy/dt = rhs(t, y) from t0 to t1;
/// t1 < t0 integrates backwards.
template <typename State, typename Rhs>
State integrate(const Rhs& rhs, State y, Real t0, Real t1, const Options& opt = {}) {
  static constexpr Real c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr Real a21 = 1.0 / 5;
  static constexpr Real a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr Real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr Real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
  static constexpr Real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr Real b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr Real e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (t1 == t0) return y;
  const Real dir = (t1 > t0) ? 1.0 : -1.0;
  Real t = t0;
  Real span = std::abs(t1 - t0);
  Real h = opt.initial_step > 0.0 ? opt.initial_step : std::min(1e-4 * span, 1e-6 + 1e-3 * std::abs(t0));
  if (h <= 0.0) h = 1e-8;

  State k1 = rhs(t, y);
  for (long step = 0; step < opt.max_steps; ++step) {
    if (dir * (t + dir * h - t1) > 0.0) h = std::abs(t1 - t);
    if (h < 1e-15 * (std::abs(t) + 1.0))
      throw ToleranceError("ode::integrate: step size underflow");
    const Real hd = dir * h;

    State k2 = rhs(t + c2 * hd, y + hd * (a21 * k1));
    State k3 = rhs(t + c3 * hd, y + hd * (a31 * k1 + a32 * k2));
    State k4 = rhs(t + c4 * hd, y + hd * (a41 * k1 + a42 * k2 + a43 * k3));
    State k5 = rhs(t + c5 * hd, y + hd * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    State k6 = rhs(t + hd, y + hd * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    State ynew = y + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    State k7 = rhs(t + hd, ynew);
    State err = hd * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    Real enorm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const Real scale =
          opt.abs_tol + opt.rel_tol * std::max(detail::comp_abs(y[i]), detail::comp_abs(ynew[i]));
      enorm = std::max(enorm, detail::comp_abs(err[i]) / scale);
    }

    if (enorm <= 1.0) {
      t += hd;
      y = ynew;
      k1 = k7;  // FSAL
      if (dir * (t - t1) >= 0.0) return y;
    }
    const Real factor = (enorm > 0.0) ? 0.9 * std::pow(enorm, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  throw ToleranceError("ode::integrate: max step count exceeded");
}

/// Integrate while recording the state at the given monotone sample points
/// (first sample must equal t0). Returns the state at samples.back().
template <typename State, typename Rhs>
State integrate_sampled(const Rhs& rhs, State y, const std::vector<Real>& samples,
                        const std::function<void(Real, const State&)>& observe,
                        const Options& opt = {}) {
  if (samples.size() < 2) throw std::invalid_argument("integrate_sampled: need >= 2 samples");
  observe(samples.front(), y);
  for (size_t i = 0; i + 1 < samples.size(); ++i) {
    y = integrate(rhs, y, samples[i], samples[i + 1], opt);
    observe(samples[i + 1], y);
  }
  return y;
}

/// Geometrically spaced offsets d in [d0, d1] (inclusive), n points.
inline std::vector<Real> geomspace(Real d0, Real d1, int n) {
  std::vector<Real> v(n);
  const Real f = std::log(d1 / d0) / (n - 1);
  for (int i = 0; i < n; ++i) v[i] = d0 * std::exp(f * i);
  v.front() = d0;
  v.back() = d1;
  return v;
}

inline std::vector<Real> linspace(Real a, Real b, int n) {
  std::vector<Real> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace cloak::ode
