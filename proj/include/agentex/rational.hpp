#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace agentex {

/// Exact rational number used for every position, length, energy and potential.
using Rational = mpq_class;

/// Parses "p/q", "p" or a finite decimal such as "2.5". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

inline Rational half(const Rational& value) { return Rational(value / 2); }

inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline const Rational& min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }

}  // namespace agentex
