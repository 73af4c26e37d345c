#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bcc {

// Exact rational scalar. GMP keeps values canonical (lowest terms,
// positive denominator) as long as they are built through these helpers
// or through arithmetic on already-canonical values.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Parses "num", "num/den", or a plain decimal like "-1.25".
Rational parse_rational(const std::string& text);

// Canonical "num" or "num/den" form.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational squared(const Rational& r) { return r * r; }

}  // namespace bcc
