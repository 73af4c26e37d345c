#include "bcc/rational.hpp"

#include <cctype>

namespace bcc {

namespace {

bool valid_integer(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

// Always base 10; a leading '+' and leading zeros would otherwise trip
// GMP's prefix detection.
mpz_class parse_integer(std::string s) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s.erase(s.begin());
    }
    while (s.size() > 1 && s[0] == '0') s.erase(s.begin());
    mpz_class v(s, 10);
    return neg ? mpz_class(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::string s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) throw std::invalid_argument("rational: empty string");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!valid_integer(num) || !valid_integer(den))
            throw std::invalid_argument("rational: bad fraction '" + text + "'");
        Rational r(parse_integer(num), parse_integer(den));
        if (r.get_den() == 0)
            throw std::invalid_argument("rational: zero denominator in '" + text + "'");
        r.canonicalize();
        return r;
    }

    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string whole = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        bool neg = !whole.empty() && whole[0] == '-';
        if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole = whole.substr(1);
        if (whole.empty()) whole = "0";
        if (frac.empty() || !valid_integer(whole) || !valid_integer(frac))
            throw std::invalid_argument("rational: bad decimal '" + text + "'");
        mpz_class scaled = parse_integer(whole + frac);
        mpz_class den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        Rational r(scaled, den);
        r.canonicalize();
        if (neg) r = -r;
        return r;
    }

    if (!valid_integer(s)) throw std::invalid_argument("rational: bad integer '" + text + "'");
    return Rational(parse_integer(s));
}

}  // namespace bcc
