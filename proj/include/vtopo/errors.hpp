#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vtopo {

// Base of every error the library throws. `kind()` is a stable,
// machine-readable class name; the CLI prints it verbatim on failure so
// scripts can branch on it without parsing prose.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Malformed input (bad magic, bad header token, unsupported maxval, ...).
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("ParseError", msg) {}
};

// Input ended before the declared payload was complete.
struct TruncatedError : Error {
    explicit TruncatedError(const std::string& msg) : Error("TruncatedError", msg) {}
};

// A coordinate falls outside the raster.
struct BoundsError : Error {
    explicit BoundsError(const std::string& msg) : Error("BoundsError", msg) {}
};

// Two rasters (or a vector and a weight matrix) disagree on dimensions.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error("ShapeError", msg) {}
};

// A documented precondition on the call itself was violated
// (e.g. a pixel passed as an endpoint is not one).
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error("ContractError", msg) {}
};

// A numeric argument is outside its valid domain.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("DomainError", msg) {}
};

// An operation that needs at least one element received none.
struct EmptyInputError : Error {
    explicit EmptyInputError(const std::string& msg) : Error("EmptyInputError", msg) {}
};

// Two dataset directories could not be matched file-for-file.
struct PairingError : Error {
    explicit PairingError(const std::string& msg) : Error("PairingError", msg) {}
};

} // namespace vtopo
