#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tcid {

/// Exact probability carrier. GMP keeps values in canonical reduced form.
using Rational = mpq_class;

/// Parses "p/q" or "p" into a canonical rational. Throws FormatError.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" rendering ("p" when the denominator is 1).
std::string format_rational(const Rational& r);

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

}  // namespace tcid
