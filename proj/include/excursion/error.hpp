// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace excursion {

/// Base class for all library errors. `field()` names the offending input
/// (a dotted config path such as "domain.radius") when one is known.
class Error : public std::runtime_error {
public:
    Error(const std::string& message, std::string field = {})
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Invalid input: bad parameters, mismatched manifolds, unsupported shapes.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Point on a coordinate singularity of its chart (e.g. a sphere pole).
class DegenerateChartError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Numerical failure, e.g. covariance factorization aborted after maximal jitter.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace excursion
