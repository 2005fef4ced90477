// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/Dense>

namespace cloak {

using Real = double;
using Complex = std::complex<Real>;

template <typename T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

using Vec3 = Vec3T<Real>;
using Mat3 = Mat3T<Real>;
using Vec3c = Vec3T<Complex>;
using Mat3c = Mat3T<Complex>;

using Vec2c = Eigen::Matrix<Complex, 2, 1>;
using Mat2c = Eigen::Matrix<Complex, 2, 2>;
using Vec4c = Eigen::Matrix<Complex, 4, 1>;
using Mat4c = Eigen::Matrix<Complex, 4, 4>;

constexpr Real kPi = 3.14159265358979323846264338327950288;

inline constexpr Complex kImag{0.0, 1.0};

/// Relative difference |a-b| / max(|b|, floor).
inline Real rel_diff(Real a, Real b, Real floor = 1e-300) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}
inline Real rel_diff(Complex a, Complex b, Real floor = 1e-300) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

}  // namespace cloak
