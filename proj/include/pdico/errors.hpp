#pragma once

#include <stdexcept>
#include <string>

namespace pdico {

/// Error taxonomy used across the library. The CLI maps these onto exit
/// codes: usage/parse -> 2, numeric/capability -> 3. Verification failures
/// are reported through VerifyReport, not exceptions.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Grid point outside the range an operator can evaluate on.
class index_error : public error {
public:
    using error::error;
};

/// Mismatched shapes/dimensions between arguments.
class dimension_error : public error {
public:
    using error::error;
};

/// Malformed problem file / CSV input.
class parse_error : public error {
public:
    using error::error;
};

/// Operation not supported for the given variant or size.
class capability_error : public error {
public:
    using error::error;
};

/// Numeric breakdown (tiny pivots, singular systems).
class conditioning_error : public error {
public:
    using error::error;
};

/// Requested sup is +infinity where a finite value is required.
class unbounded_error : public error {
public:
    using error::error;
};

/// Control or state violates the inclusion / boundary constraints.
class feasibility_error : public error {
public:
    using error::error;
};

/// A documented operation precondition does not hold.
class precondition_error : public error {
public:
    using error::error;
};

/// Required input (e.g. a multiplier field) missing or unrecoverable.
class input_error : public error {
public:
    using error::error;
};

/// Adjoint/multiplier field violates its boundary-zero requirements.
class boundary_error : public error {
public:
    using error::error;
};

} // namespace pdico
