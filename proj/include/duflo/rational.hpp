#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <string>

#include "duflo/errors.hpp"

namespace duflo {

/// Exact rational scalar. Always stored reduced with positive denominator
/// (the backend canonicalizes on every operation).
using Scalar = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Integer factorial(int n) {
    Integer r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

inline Integer binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Integer r = 1;
    for (int i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);
    }
    return r;
}

/// Parses "3", "-3", "3/4", "-3/4". Whitespace is not accepted.
inline Scalar parse_scalar(const std::string& text) {
    if (text.empty()) throw parse_error("empty rational literal");
    std::size_t pos = 0;
    if (text[0] == '+' || text[0] == '-') pos = 1;
    bool seen_digit = false;
    bool seen_slash = false;
    for (std::size_t i = pos; i < text.size(); ++i) {
        char ch = text[i];
        if (ch >= '0' && ch <= '9') {
            seen_digit = true;
        } else if (ch == '/' && !seen_slash && seen_digit && i + 1 < text.size()) {
            seen_slash = true;
        } else {
            throw parse_error("bad rational literal: '" + text + "'");
        }
    }
    if (!seen_digit) throw parse_error("bad rational literal: '" + text + "'");
    try {
        Scalar value(text);
        return value;
    } catch (const std::exception&) {
        throw parse_error("bad rational literal: '" + text + "'");
    }
}

/// Renders as "n" or "n/d".
inline std::string scalar_str(const Scalar& value) {
    std::ostringstream os;
    os << value;
    return os.str();
}

} // namespace duflo
