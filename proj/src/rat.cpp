#include "rfm/rat.hpp"

#include <cctype>
#include <ostream>

namespace rfm {

Rat Rat::parse(const std::string& s) {
  // Accept: [+-]digits[/digits] with a positive denominator. mpq_class's own
  // parser is laxer (accepts whitespace, bases), so validate first.
  auto bad = [&]() -> std::domain_error {
    return std::domain_error("Rat: cannot parse '" + s + "'");
  };
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t num_start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == num_start) throw bad();
  if (i < s.size()) {
    if (s[i] != '/') throw bad();
    ++i;
    std::size_t den_start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == den_start || i != s.size()) throw bad();
    // All-zero denominator check happens below via sign of den.
  }
  mpq_class q;
  // mpq does not accept a leading '+'.
  const std::string t = s[0] == '+' ? s.substr(1) : s;
  if (q.set_str(t, 10) != 0) throw bad();
  if (q.get_den() == 0) throw std::domain_error("Rat: zero denominator in '" + s + "'");
  q.canonicalize();
  return Rat(q);
}

std::string Rat::str() const { return v_.get_str(); }

std::ostream& operator<<(std::ostream& os, const Rat& r) {
  return os << r.v_;
}

Rat dot(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  Rat s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace rfm
