#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "toprec/errors.hpp"

namespace toprec {

/// Exact rational number, always canonical (lowest terms, positive
/// denominator).
using Scalar = mpq_class;
using Integer = mpz_class;

inline Scalar frac(long num, long den = 1) {
  if (den == 0) throw PreconditionError("frac: zero denominator");
  Scalar q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "p/q" or "p".
inline Scalar parse_scalar(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  if (!s.empty() && s.front() == '+') s.erase(s.begin());
  if (s.empty()) throw ParseError("empty scalar literal");
  Scalar q;
  if (q.set_str(s, 10) != 0) throw ParseError("malformed scalar literal '" + std::string(text) + "'");
  if (q.get_den() == 0) throw ParseError("zero denominator in scalar literal '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

/// Serializes as "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Scalar& q) { return q.get_str(); }

inline bool is_integer(const Scalar& q) { return q.get_den() == 1; }

inline Scalar pow(const Scalar& base, int exponent) {
  if (exponent < 0) {
    if (base == 0) throw PreconditionError("pow: zero to a negative power");
    Scalar inv = 1 / base;
    return pow(inv, -exponent);
  }
  Scalar result = 1;
  Scalar b = base;
  unsigned e = static_cast<unsigned>(exponent);
  while (e) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1u;
  }
  return result;
}

inline Scalar binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Scalar(r);
}

/// Generalized binomial C(a, k) for integer a of any sign.
inline Scalar binomial_signed(long a, long k) {
  if (k < 0) return 0;
  Scalar r = 1;
  for (long i = 0; i < k; ++i) {
    r *= Scalar(a - i);
    r /= Scalar(i + 1);
  }
  return r;
}

/// Exact rational square root, if one exists.
inline bool rational_sqrt(const Scalar& q, Scalar& out) {
  if (q < 0) return false;
  Integer n = q.get_num(), d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  Integer rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  out = Scalar(rn, rd);
  out.canonicalize();
  return true;
}

}  // namespace toprec
