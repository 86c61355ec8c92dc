#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace qml {

// All scalar arithmetic in this project is exact. Floating point is not used
// anywhere in the computational core.
using Rational = mpq_class;
using Integer = mpz_class;

struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an internal consistency check fails (a bug, not bad input).
struct engine_bug : std::logic_error {
    explicit engine_bug(const std::string& msg) : std::logic_error(msg) {}
};

// Parses "p", "-p" or "p/q" with arbitrary-precision parts.
Rational parse_rational(const std::string& s);

std::string to_string(const Rational& r);

// Checked narrowing used when exact big-integer counts feed fixed-width
// report fields.
long to_long(const Integer& z);

Integer binomial(long n, long k);

}  // namespace qml
