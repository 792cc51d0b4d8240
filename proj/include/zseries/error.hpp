#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zseries {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the offending token.
class parse_error : public error {
public:
    enum class kind { syntax, unknown_identifier, arity, multiple_variables };

    parse_error(kind k, std::size_t offset, std::string const& message)
        : error("parse error at byte " + std::to_string(offset) + ": " + message), kind_(k), offset_(offset)
    {
    }

    [[nodiscard]] kind error_kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    kind kind_;
    std::size_t offset_;
};

/// A term or expression could not be evaluated: out-of-domain index,
/// negative magnitude, non-finite intermediate, ...
class eval_error : public error {
public:
    using error::error;
};

/// Invalid arguments or inconsistent definitions (bad windows, bad series files).
class usage_error : public error {
public:
    using error::error;
};

/// No envelope parameter could be certified on the grid.
class certification_error : public error {
public:
    using error::error;
};

/// The oracle could not reach its tolerance.
class oracle_error : public error {
public:
    using error::error;
};

} // namespace zseries
