#pragma once

#include "quadsurf/pencil.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quadsurf {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, std::string expected, std::string found);

    std::size_t position() const { return position_; }
    const std::string &expected() const { return expected_; }
    const std::string &found() const { return found_; }

private:
    std::size_t position_;
    std::string expected_;
    std::string found_;
};

// A monomial of total degree other than two, or a nonzero constant term.
class DegreeError : public ParseError {
public:
    using ParseError::ParseError;
};

// The P or Q component of a pair is absent or out of order.
class MissingComponent : public ParseError {
public:
    using ParseError::ParseError;
};

// Grammar (whitespace insignificant):
//   expression  := sign* term (sign+ term)*
//   term        := coefficient ['*'] monomial | coefficient | monomial
//   monomial    := factor ('*' factor)*
//   factor      := var ['^' integer]
//   coefficient := integer ['/' positive-integer]
//   var         := 'x1' | 'x2' | 'x3'
// Every term must have degree two; a constant term is accepted only when it
// is zero, so "0" denotes the zero form.
QuadraticForm parse_form(std::string_view text);

// "P = <expression>; Q = <expression>" with an optional trailing ';'.
QuadPair parse_pair(std::string_view text);

// One pair per line; '#' starts a comment; blank lines are skipped. Error
// positions are byte offsets into `contents`.
std::vector<QuadPair> parse_pair_file(std::string_view contents);

// Canonical order x1^2, x2^2, x3^2, x1*x2, x1*x3, x2*x3; coefficient 1 is
// omitted and the zero form prints as "0".
std::string format_form(const QuadraticForm &form);
std::string format_pair(const QuadPair &pair);

}  // namespace quadsurf
