// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rzero {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, out-of-range index, bad tolerance.
struct InvalidInput : Error {
  using Error::Error;
};

/// A standing assumption on the family fails non-removably (e.g. the
/// coefficient functions vanish on a whole subinterval).
struct DegenerateFamily : Error {
  using Error::Error;
};

/// W_{f1,f2}(t) is singular where the envelope construction needs it.
struct SingularWronskian : Error {
  using Error::Error;
};

/// f1(t) = 0 where a tangent slope -f2/f1 is requested.
struct VerticalTangent : Error {
  using Error::Error;
};

/// The inflection set of the envelope appears to contain an interval.
struct DegenerateGamma : Error {
  using Error::Error;
};

/// Region classification requested on an interval with inflection points;
/// the caller should split the interval at them first.
struct GammaNonEmpty : Error {
  using Error::Error;
};

/// Adaptive quadrature exceeded its panel budget without converging.
struct QuadratureFailure : Error {
  using Error::Error;
};

/// A radial density whose radius weight cannot be normalized.
struct InvalidDensity : Error {
  using Error::Error;
};

/// An identically-zero sample equation (measure-zero event).
struct DegenerateSample : Error {
  using Error::Error;
};

/// Job / family / density JSON that does not match the schema.
struct SchemaError : Error {
  using Error::Error;
};

}  // namespace rzero
