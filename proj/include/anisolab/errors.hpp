// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace anisolab {

/// Base class for all library errors. Every throwing precondition in the
/// library raises a subclass of this, so callers can catch one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidDimension : Error {
  using Error::Error;
};

struct SideMismatch : Error {
  using Error::Error;
};

struct NonPositiveWeight : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct SingularResolvent : Error {
  using Error::Error;
};

struct DegenerateGrid : Error {
  using Error::Error;
};

struct GridTouchesAxis : Error {
  using Error::Error;
};

struct ZeroDenominator : Error {
  using Error::Error;
};

struct ZeroField : Error {
  using Error::Error;
};

struct ResidualTooLarge : Error {
  using Error::Error;
};

struct MaxIterations : Error {
  using Error::Error;
};

struct ParameterOutOfRange : Error {
  using Error::Error;
};

struct ConfigInvalid : Error {
  using Error::Error;
};

/// Raised when the perturbation iteration cannot contract. Carries the
/// estimated contraction factor and, when the doubling search succeeds,
/// the smallest spectral shift for which the factor drops below 0.9.
struct NotContractive : Error {
  double rho = 0.0;
  std::optional<double> suggested_lambda;

  NotContractive(const std::string& what, double rho_estimate,
                 std::optional<double> lambda_suggestion)
      : Error(what), rho(rho_estimate), suggested_lambda(lambda_suggestion) {}
};

}  // namespace anisolab
