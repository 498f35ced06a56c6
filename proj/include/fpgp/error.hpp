#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpgp {

// Variable index outside the input vector handed to an evaluator.
class ArityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed text input. `position` is a byte offset for prefix formulas and
// a 1-based line number for line-oriented files (see `unit`).
class ParseError : public std::runtime_error {
public:
    enum class Unit { Byte, Line };

    ParseError(const std::string& what, std::size_t position, Unit unit)
        : std::runtime_error(what), position_(position), unit_(unit) {}

    std::size_t position() const noexcept { return position_; }
    Unit unit() const noexcept { return unit_; }

private:
    std::size_t position_;
    Unit unit_;
};

// Unsupported or truncated image file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A candidate carries a minutia kind the template has no formula for.
class MissingFormulaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fpgp
