#include "tcid/rational.hpp"

#include "tcid/error.hpp"

#include <cctype>

namespace tcid {

Rational parse_rational(std::string_view text) {
    auto valid_integer = [](std::string_view s, bool allow_sign) {
        if (s.empty()) return false;
        std::size_t i = 0;
        if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    const auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
    if (!valid_integer(num, true) || (slash != std::string_view::npos && !valid_integer(den, false)))
        throw FormatError("malformed rational '" + std::string(text) + "'");

    std::string canonical_num(num.front() == '+' ? num.substr(1) : num);
    mpz_class n(canonical_num, 10);
    mpz_class d(slash == std::string_view::npos ? std::string("1") : std::string(den), 10);
    if (d == 0) throw FormatError("zero denominator in '" + std::string(text) + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string format_rational(const Rational& r) {
    return r.get_str();
}

}  // namespace tcid
