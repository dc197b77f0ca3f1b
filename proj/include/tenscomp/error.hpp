#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tenscomp {

/// Two operands that must share a shape do not.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Elementwise division hit a zero divisor.
class ZeroDivisorError : public std::domain_error {
public:
    ZeroDivisorError(std::vector<std::size_t> index, const std::string& what)
        : std::domain_error(what), index_(std::move(index)) {}

    /// Multi-index of the offending divisor entry (0-based).
    const std::vector<std::size_t>& index() const noexcept { return index_; }

private:
    std::vector<std::size_t> index_;
};

/// Inverse DFT of a tensor whose tubes are not conjugate-symmetric.
class SymmetryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SvdError : public std::runtime_error {
public:
    SvdError(std::size_t slice, const std::string& what)
        : std::runtime_error(what), slice_(slice) {}
    std::size_t slice() const noexcept { return slice_; }

private:
    std::size_t slice_;
};

/// A NaN or Inf showed up in the solver state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t iteration, const std::string& what)
        : std::runtime_error(what), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

enum class FormatErrorKind {
    bad_magic,
    bad_header,
    truncated,
    extent_overflow,
    size_mismatch,
    bad_value,
};

const char* to_string(FormatErrorKind kind) noexcept;

/// Malformed tensor file. `offset()` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
public:
    FormatError(FormatErrorKind kind, std::uint64_t offset, const std::string& detail);

    FormatErrorKind kind() const noexcept { return kind_; }
    std::uint64_t offset() const noexcept { return offset_; }

private:
    FormatErrorKind kind_;
    std::uint64_t offset_;
};

}  // namespace tenscomp
