#pragma once

#include <algorithm>
#include <optional>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

inline bool is_zero(const Scalar& q) { return sgn(q) == 0; }

namespace detail {
template <typename R>
bool coeff_is_zero(const R& c) {
  return is_zero(c);
}
}  // namespace detail

/// Dense univariate polynomial, coefficients stored lowest degree first.
///
/// `R` is any commutative ring constructible from `int` with an `is_zero`
/// overload reachable by lookup. Division, gcd and root-related members only
/// instantiate for fields.
template <typename R = Scalar>
class Polynomial {
 public:
  Polynomial() = default;

  explicit Polynomial(std::vector<R> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

  Polynomial(std::initializer_list<R> coefficients) : coeffs_(coefficients) { trim(); }

  static Polynomial constant(const R& c) { return Polynomial(std::vector<R>{c}); }

  static Polynomial monomial(const R& c, int degree) {
    std::vector<R> v(static_cast<std::size_t>(degree) + 1, R(0));
    v.back() = c;
    return Polynomial(std::move(v));
  }

  /// The identity polynomial z.
  static Polynomial identity() { return monomial(R(1), 1); }

  /// The linear factor (z - root).
  static Polynomial linear_factor(const R& root) { return Polynomial(std::vector<R>{-root, R(1)}); }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<R>& coefficients() const { return coeffs_; }

  R coefficient(int k) const {
    if (k < 0 || k > degree()) return R(0);
    return coeffs_[static_cast<std::size_t>(k)];
  }

  R leading() const { return is_zero() ? R(0) : coeffs_.back(); }

  /// Lowest power with nonzero coefficient; -1 for the zero polynomial.
  int valuation() const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (!is_zero_coeff(coeffs_[i])) return static_cast<int>(i);
    return -1;
  }

  R operator()(const R& z) const { return evaluate(z); }

  /// Horner evaluation in any ring `T` that accepts `T * R` and `T + R`.
  template <typename T>
  T evaluate(const T& z) const {
    T acc = T(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + T(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<R> v(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) v[i - 1] = coeffs_[i] * R(static_cast<int>(i));
    return Polynomial(std::move(v));
  }

  /// p(z + shift), by repeated synthetic division.
  Polynomial taylor_shift(const R& shift) const {
    std::vector<R> c = coeffs_;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = n - 1; j > i; --j) c[j - 1] = c[j - 1] + shift * c[j];
    return Polynomial(std::move(c));
  }

  /// z^n p(1/z) with n = degree(); n may be forced larger.
  Polynomial reversed(int n) const {
    std::vector<R> v(static_cast<std::size_t>(n) + 1, R(0));
    for (int k = 0; k <= degree(); ++k) v[static_cast<std::size_t>(n - k)] = coeffs_[static_cast<std::size_t>(k)];
    return Polynomial(std::move(v));
  }

  /// p(q(z)).
  Polynomial compose(const Polynomial& q) const {
    Polynomial acc;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * q + constant(*it);
    return acc;
  }

  Polynomial pow(int e) const {
    if (e < 0) throw PreconditionError("Polynomial::pow: negative exponent");
    Polynomial result = constant(R(1)), base = *this;
    while (e) {
      if (e & 1) result = result * base;
      base = base * base;
      e >>= 1;
    }
    return result;
  }

  Polynomial operator-() const {
    std::vector<R> v = coeffs_;
    for (auto& c : v) c = -c;
    return Polynomial(std::move(v));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<R> v(std::max(a.coeffs_.size(), b.coeffs_.size()), R(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) v[i] = a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) v[i] = v[i] + b.coeffs_[i];
    return Polynomial(std::move(v));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<R> v(a.coeffs_.size() + b.coeffs_.size() - 1, R(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (is_zero_coeff(a.coeffs_[i])) continue;
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] = v[i + j] + a.coeffs_[i] * b.coeffs_[j];
    }
    return Polynomial(std::move(v));
  }

  friend Polynomial operator*(const R& c, const Polynomial& p) {
    std::vector<R> v = p.coeffs_;
    for (auto& x : v) x = c * x;
    return Polynomial(std::move(v));
  }

  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.coeffs_.size() != b.coeffs_.size()) return false;
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      if (!is_zero_coeff(a.coeffs_[i] - b.coeffs_[i])) return false;
    return true;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  // ---- field-only members -------------------------------------------------

  /// Euclidean division: *this = q * divisor + r with deg r < deg divisor.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw PreconditionError("Polynomial::divmod: division by zero polynomial");
    if (degree() < divisor.degree()) return {Polynomial(), *this};
    std::vector<R> rem = coeffs_;
    std::vector<R> quot(static_cast<std::size_t>(degree() - divisor.degree()) + 1, R(0));
    const R lead_inv = R(1) / divisor.leading();
    const int dd = divisor.degree();
    for (int k = degree(); k >= dd; --k) {
      const R c = rem[static_cast<std::size_t>(k)] * lead_inv;
      quot[static_cast<std::size_t>(k - dd)] = c;
      if (is_zero_coeff(c)) continue;
      for (int j = 0; j <= dd; ++j)
        rem[static_cast<std::size_t>(k - dd + j)] = rem[static_cast<std::size_t>(k - dd + j)] - c * divisor.coeffs_[static_cast<std::size_t>(j)];
    }
    rem.resize(static_cast<std::size_t>(dd));
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
  }

  Polynomial monic() const {
    if (is_zero()) return {};
    const R inv = R(1) / leading();
    return inv * *this;
  }

  /// Exact quotient; throws if the division leaves a remainder.
  Polynomial exact_divide(const Polynomial& divisor) const {
    auto [q, r] = divmod(divisor);
    if (!r.is_zero()) throw ComputationError("Polynomial::exact_divide: nonzero remainder");
    return q;
  }

  friend Polynomial gcd(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
      Polynomial r = a.divmod(b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

 private:
  static bool is_zero_coeff(const R& c) { return detail::coeff_is_zero(c); }

  void trim() {
    while (!coeffs_.empty() && is_zero_coeff(coeffs_.back())) coeffs_.pop_back();
  }

  std::vector<R> coeffs_;
};

using Poly = Polynomial<Scalar>;

namespace detail {

/// Integer coefficients of the primitive part of p (p nonzero).
inline std::vector<Integer> primitive_part(const Poly& p) {
  Integer l = 1, g = 0;
  for (const auto& c : p.coefficients()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> v;
  v.reserve(p.coefficients().size());
  for (const auto& c : p.coefficients()) {
    v.push_back(c.get_num() * (l / c.get_den()));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.back().get_mpz_t());
  }
  for (auto& x : v) x /= g;
  return v;
}

/// True if b divides a over the integers (b primitive).
inline bool divides_exactly(const std::vector<Integer>& b, std::vector<Integer> a) {
  const std::size_t nb = b.size();
  if (a.size() < nb) return false;
  for (std::size_t k = a.size(); k-- >= nb;) {
    if (a[k] == 0) continue;
    if (!mpz_divisible_p(a[k].get_mpz_t(), b.back().get_mpz_t())) return false;
    const Integer q = a[k] / b.back();
    for (std::size_t j = 0; j < nb; ++j) a[k - nb + 1 + j] -= q * b[j];
  }
  for (std::size_t k = 0; k + 1 < nb; ++k)
    if (a[k] != 0) return false;
  return true;
}

/// Heuristic gcd by evaluation at a large integer; empty result if the
/// heuristic gives up.
inline std::optional<Poly> gcd_heuristic(const Poly& pa, const Poly& pb) {
  const auto A = primitive_part(pa), B = primitive_part(pb);
  auto norm = [](const std::vector<Integer>& v) {
    Integer m = 0;
    for (const auto& x : v) m = std::max<Integer>(m, abs(x));
    return m;
  };
  Integer xi = 2 * std::min(norm(A), norm(B)) + 29;
  auto eval = [&](const std::vector<Integer>& v) {
    Integer acc = 0;
    for (auto it = v.rbegin(); it != v.rend(); ++it) acc = acc * xi + *it;
    return acc;
  };
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (mpz_sizeinbase(xi.get_mpz_t(), 2) * std::max(A.size(), B.size()) > 4000000) break;
    Integer g;
    const Integer ea = eval(A), eb = eval(B);
    mpz_gcd(g.get_mpz_t(), ea.get_mpz_t(), eb.get_mpz_t());
    std::vector<Integer> G;
    const Integer half = xi / 2;
    while (g != 0) {
      Integer r;
      mpz_fdiv_r(r.get_mpz_t(), g.get_mpz_t(), xi.get_mpz_t());
      if (r > half) r -= xi;
      G.push_back(r);
      g = (g - r) / xi;
    }
    if (!G.empty()) {
      Integer c = 0;
      for (const auto& x : G) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), x.get_mpz_t());
      for (auto& x : G) x /= c;
      if (G.back() < 0)
        for (auto& x : G) x = -x;
      if (divides_exactly(G, A) && divides_exactly(G, B)) {
        std::vector<Scalar> q(G.begin(), G.end());
        return Poly(std::move(q)).monic();
      }
    }
    xi = xi * 73794 / 27011;
  }
  return std::nullopt;
}

}  // namespace detail

/// Monic gcd over the rationals.
inline Poly gcd_rational(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.degree() == 0 || b.degree() == 0) return Poly::constant(1);
  if (auto g = detail::gcd_heuristic(a, b)) return *g;
  return gcd(a, b);
}

inline std::string to_string(const Poly& p, const std::string& var = "z") {
  if (p.is_zero()) return "0";
  std::string out;
  for (int k = p.degree(); k >= 0; --k) {
    const Scalar c = p.coefficient(k);
    if (is_zero(c)) continue;
    if (!out.empty()) out += sgn(c) > 0 ? " + " : " - ";
    else if (sgn(c) < 0) out += "-";
    const Scalar a = abs(c);
    if (k == 0 || a != 1) out += to_string(a);
    if (k > 0) out += std::string(a != 1 ? "*" : "") + var + (k > 1 ? "^" + std::to_string(k) : "");
  }
  return out;
}

}  // namespace toprec
