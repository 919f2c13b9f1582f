#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/polynomial.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

/// Scales p to a primitive integer polynomial with positive leading
/// coefficient.
inline std::vector<Integer> primitive_integer_coefficients(const Poly& p) {
  Integer l = 1;
  for (const auto& c : p.coefficients()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> v;
  Integer g = 0;
  for (const auto& c : p.coefficients()) {
    Integer x = c.get_num() * (l / c.get_den());
    v.push_back(x);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  }
  if (g != 0)
    for (auto& x : v) x /= g;
  if (!v.empty() && v.back() < 0)
    for (auto& x : v) x = -x;
  return v;
}

inline Poly squarefree_part(const Poly& p) {
  if (p.degree() <= 0) return p;
  return p.exact_divide(gcd_rational(p, p.derivative())).monic();
}

namespace detail {

inline void positive_divisors(Integer n, std::vector<Integer>& out) {
  n = abs(n);
  std::vector<std::pair<Integer, int>> factors;
  for (Integer d = 2; d * d <= n; ++d) {
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    if (e) factors.push_back({d, e});
  }
  if (n > 1) factors.push_back({n, 1});
  out = {Integer(1)};
  for (const auto& [prime, e] : factors) {
    const std::size_t base = out.size();
    Integer pw = 1;
    for (int k = 1; k <= e; ++k) {
      pw *= prime;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pw);
    }
  }
}

/// Durand-Kerner approximations of all complex roots.
inline std::vector<std::complex<long double>> numeric_roots(const Poly& p) {
  const int n = p.degree();
  std::vector<std::complex<long double>> a(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) a[static_cast<std::size_t>(k)] = static_cast<long double>(Scalar(p.coefficient(k) / p.leading()).get_d());
  auto eval = [&](std::complex<long double> z) {
    std::complex<long double> acc = 0;
    for (int k = n; k >= 0; --k) acc = acc * z + a[static_cast<std::size_t>(k)];
    return acc;
  };
  long double radius = 1;
  for (int k = 0; k < n; ++k) radius = std::max(radius, 1 + std::abs(a[static_cast<std::size_t>(k)]));
  std::vector<std::complex<long double>> z(static_cast<std::size_t>(n));
  const std::complex<long double> seed(0.4L, 0.9L);
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = std::pow(seed, k) * (radius / 2);
  for (int iter = 0; iter < 2000; ++iter) {
    long double shift = 0;
    for (int i = 0; i < n; ++i) {
      std::complex<long double> den = 1;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
      if (std::abs(den) == 0) den = 1e-30L;
      const auto delta = eval(z[static_cast<std::size_t>(i)]) / den;
      z[static_cast<std::size_t>(i)] -= delta;
      shift = std::max(shift, std::abs(delta) / (1 + std::abs(z[static_cast<std::size_t>(i)])));
    }
    if (shift < 1e-17L) break;
  }
  return z;
}

inline bool small_enough_to_enumerate(const Integer& n) { return abs(n) < Integer(1000000000000L); }

}  // namespace detail

/// All distinct rational roots of p (p nonzero), ascending, together with
/// whatever squarefree factor remains after removing them. A remainder of
/// positive degree means p has irrational (or complex) roots.
struct RationalRootResult {
  std::vector<Scalar> roots;
  Poly remainder;
};

inline RationalRootResult rational_roots(const Poly& p) {
  if (p.is_zero()) throw PreconditionError("rational_roots: zero polynomial");
  Poly q = squarefree_part(p);
  std::set<Scalar> found;
  auto take = [&](const Scalar& r) {
    if (found.count(r) || !is_zero(q(r))) return;
    found.insert(r);
    q = q.exact_divide(Poly::linear_factor(r));
  };
  if (q.degree() >= 1 && is_zero(q.coefficient(0))) take(0);

  while (q.degree() >= 1) {
    const std::size_t before = found.size();
    const auto ints = primitive_integer_coefficients(q);
    const Integer& a0 = ints.front();
    const Integer& an = ints.back();
    if (q.degree() == 1) {
      take(-q.coefficient(0) / q.coefficient(1));
    } else if (detail::small_enough_to_enumerate(a0) && detail::small_enough_to_enumerate(an)) {
      std::vector<Integer> ps, qs;
      detail::positive_divisors(a0, ps);
      detail::positive_divisors(an, qs);
      for (const auto& num : ps)
        for (const auto& den : qs)
          for (int sign : {1, -1}) {
            Scalar r(num * sign, den);
            r.canonicalize();
            take(r);
          }
      break;
    } else {
      const long double scale = static_cast<long double>(an.get_d());
      for (const auto& z : detail::numeric_roots(q)) {
        if (std::abs(z.imag()) > 1e-6L * (1 + std::abs(z.real()))) continue;
        const long double v = z.real() * scale;
        for (long double cand : {std::floor(v), std::ceil(v)}) {
          Integer num(std::to_string(static_cast<long long>(cand)));
          Scalar r(num, an);
          r.canonicalize();
          take(r);
        }
      }
    }
    if (found.size() == before) break;
  }
  return {std::vector<Scalar>(found.begin(), found.end()), q};
}

/// Best rational approximations of x by continued fractions, up to a
/// denominator bound.
inline std::vector<Scalar> rational_candidates(long double x, long max_den = 1000000) {
  std::vector<Scalar> out;
  Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  long double r = x;
  for (int i = 0; i < 40; ++i) {
    const long double a = std::floor(r);
    const Integer ai(std::to_string(static_cast<long long>(a)));
    const Integer h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    Scalar q(h2, k2);
    q.canonicalize();
    out.push_back(q);
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const long double frac_part = r - a;
    if (std::abs(frac_part) < 1e-15L) break;
    r = 1 / frac_part;
  }
  return out;
}

}  // namespace toprec
