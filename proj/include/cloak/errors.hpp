// Copyright 2026 The cloakverify authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cloak {

/// A query landed on or inside the degenerate surface Sigma.
class SingularSurfaceError : public std::domain_error {
 public:
  explicit SingularSurfaceError(const std::string& what) : std::domain_error(what) {}
};

/// Map or tensor operation hit a non-invertible configuration.
class SingularMapError : public std::domain_error {
 public:
  explicit SingularMapError(const std::string& what) : std::domain_error(what) {}
};

/// Adaptive integration could not meet the requested tolerances.
class ToleranceError : public std::runtime_error {
 public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

/// Mode parameters sit on a branch cut (e.g. transverse cutoff gamma = 0).
class BranchError : public std::domain_error {
 public:
  explicit BranchError(const std::string& what) : std::domain_error(what) {}
};

/// Two independently computed criteria that must agree did not.
class InternalConsistencyError : public std::logic_error {
 public:
  explicit InternalConsistencyError(const std::string& what) : std::logic_error(what) {}
};

/// Scenario configuration failed validation; lists offending fields.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cloak
