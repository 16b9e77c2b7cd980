#include "agentex/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace agentex {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

std::string strip_plus(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  return std::string(s);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-')
      throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
    mpz_class n(strip_plus(num), 10), d(strip_plus(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    std::string digits = strip_plus(whole);
    if (negative) digits.erase(0, 1);
    if (digits.empty()) digits = "0";
    if (!is_integer_literal(digits) || frac.empty() || !is_integer_literal(frac) || frac[0] == '-' ||
        frac[0] == '+')
      throw std::invalid_argument("malformed decimal literal '" + std::string(text) + "'");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    Rational r(mpz_class(digits + std::string(frac), 10), scale);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }

  if (!is_integer_literal(text))
    throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
  return Rational(mpz_class(strip_plus(text), 10));
}

std::string to_string(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

}  // namespace agentex
