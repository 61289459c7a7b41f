#pragma once

#include <stdexcept>
#include <string>

namespace infocorr {

/// Inputs that should have matching alphabet shapes do not.
struct ShapeMismatch : std::invalid_argument {
  explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A probability vector or matrix fails the normalization check.
struct NotNormalized : std::invalid_argument {
  explicit NotNormalized(const std::string& what) : std::invalid_argument(what) {}
};

/// A scalar argument lies outside the domain of a closed-form expression.
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// The perturbed distribution places mass outside the reference support.
struct UnsupportedSupport : std::invalid_argument {
  explicit UnsupportedSupport(const std::string& what) : std::invalid_argument(what) {}
};

/// A decomposition does not reproduce the target joint distribution.
struct InconsistentDecomposition : std::invalid_argument {
  explicit InconsistentDecomposition(const std::string& what) : std::invalid_argument(what) {}
};

/// An exact enumeration would exceed the configured cell cap.
struct EnumerationCapExceeded : std::runtime_error {
  explicit EnumerationCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// A text record could not be parsed into a valid object.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace infocorr
