#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/polynomial.hpp"
#include "toprec/rational_function.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

/// A point of the Riemann sphere: a rational number or infinity.
struct Point {
  bool infinite = false;
  Scalar value = 0;

  static Point infinity() { return Point{true, 0}; }
  static Point at(const Scalar& v) { return Point{false, v}; }

  std::string to_string() const { return infinite ? "inf" : toprec::to_string(value); }

  friend bool operator==(const Point& a, const Point& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
};

inline Point parse_point(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return Point::infinity();
  return Point::at(parse_scalar(text));
}

/// Truncation marker for series known to every order (finite Laurent
/// polynomials).
inline constexpr int kExactOrder = std::numeric_limits<int>::max() / 4;

/// Truncated Laurent series sum_{k >= lowest} c_k e^k in a local coordinate
/// e at `center` (e = z - a, or e = 1/z at infinity). Coefficients are known
/// exactly through `truncation_order()` inclusive; stored coefficients past
/// the vector's end and up to the truncation are zero.
class LaurentSeries {
 public:
  LaurentSeries() : LaurentSeries(Point::at(0), 0, {}, kExactOrder) {}

  LaurentSeries(Point center, int lowest, std::vector<Scalar> coefficients, int truncation)
      : center_(std::move(center)), lowest_(lowest), truncation_(std::min(truncation, kExactOrder)), c_(std::move(coefficients)) {
    if (truncation_ < lowest_ - 1) truncation_ = lowest_ - 1;
    const long keep = static_cast<long>(truncation_) - lowest_ + 1;
    if (static_cast<long>(c_.size()) > keep) c_.resize(static_cast<std::size_t>(std::max(0L, keep)));
    while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
  }

  /// c * e^k, exact.
  static LaurentSeries monomial(Point center, const Scalar& c, int k) {
    return LaurentSeries(std::move(center), k, {c}, kExactOrder);
  }

  /// The zero series known through `truncation`.
  static LaurentSeries zero(Point center, int truncation) {
    return LaurentSeries(std::move(center), truncation + 1, {}, truncation);
  }

  /// Exact series for a polynomial in the local coordinate.
  static LaurentSeries from_polynomial(Point center, const Poly& p, int shift = 0) {
    return LaurentSeries(std::move(center), shift, p.coefficients(), kExactOrder);
  }

  const Point& center() const { return center_; }
  int lowest_order() const { return lowest_; }
  int truncation_order() const { return truncation_; }
  bool is_exact() const { return truncation_ >= kExactOrder; }

  /// Highest index with a stored (possibly zero) coefficient.
  int stored_top() const { return lowest_ + static_cast<int>(c_.size()) - 1; }

  Scalar coefficient(int k) const {
    if (k > truncation_) {
      throw ComputationError("LaurentSeries: coefficient " + std::to_string(k) + " requested beyond truncation order " +
                             std::to_string(truncation_));
    }
    if (k < lowest_ || k > stored_top()) return 0;
    return c_[static_cast<std::size_t>(k - lowest_)];
  }

  /// Index of the first nonzero coefficient. Throws when every known
  /// coefficient vanishes (the valuation is not determined).
  int valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!is_zero(c_[i])) return lowest_ + static_cast<int>(i);
    throw ComputationError("LaurentSeries: valuation undetermined (all known coefficients vanish)");
  }

  bool is_known_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Scalar& s) { return is_zero(s); });
  }

  LaurentSeries truncated(int order) const {
    return LaurentSeries(center_, lowest_, c_, std::min(order, truncation_));
  }

  LaurentSeries operator-() const {
    std::vector<Scalar> v = c_;
    for (auto& x : v) x = -x;
    return LaurentSeries(center_, lowest_, std::move(v), truncation_);
  }

  friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    check_center(a, b);
    const int lo = std::min(a.lowest_, b.lowest_);
    const int t = std::min(a.truncation_, b.truncation_);
    const int top = std::min(t, std::max(a.stored_top(), b.stored_top()));
    std::vector<Scalar> v(static_cast<std::size_t>(std::max(0, top - lo + 1)));
    for (int k = lo; k <= top; ++k) v[static_cast<std::size_t>(k - lo)] = a.raw(k) + b.raw(k);
    return LaurentSeries(a.center_, lo, std::move(v), t);
  }

  friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (-b); }

  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    check_center(a, b);
    const int lo = a.lowest_ + b.lowest_;
    const int t = std::min(sat_add(a.truncation_, b.lowest_), sat_add(b.truncation_, a.lowest_));
    const int top = std::min(t, a.stored_top() + b.stored_top());
    std::vector<Scalar> v(static_cast<std::size_t>(std::max(0, top - lo + 1)));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (is_zero(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size() && static_cast<int>(i + j) <= top - lo; ++j)
        v[i + j] += a.c_[i] * b.c_[j];
    }
    return LaurentSeries(a.center_, lo, std::move(v), t);
  }

  friend LaurentSeries operator*(const Scalar& s, const LaurentSeries& a) {
    std::vector<Scalar> v = a.c_;
    for (auto& x : v) x *= s;
    return LaurentSeries(a.center_, a.lowest_, std::move(v), a.truncation_);
  }

  LaurentSeries& operator+=(const LaurentSeries& o) { return *this = *this + o; }
  LaurentSeries& operator*=(const LaurentSeries& o) { return *this = *this * o; }

  /// Multiplicative inverse. Exact inputs with more than one term have an
  /// infinite inverse, so `max_order` must then bound the result.
  LaurentSeries inverse(int max_order = kExactOrder) const {
    const int v = valuation();
    const Scalar a0 = coefficient(v);
    int t = is_exact() ? kExactOrder : truncation_ - 2 * v;
    const int nz = static_cast<int>(std::count_if(c_.begin(), c_.end(), [](const Scalar& s) { return !is_zero(s); }));
    if (t >= kExactOrder && nz == 1) return monomial(center_, 1 / a0, -v);
    t = std::min(t, max_order);
    if (t >= kExactOrder) throw PreconditionError("LaurentSeries::inverse: an explicit order is required for this exact series");
    const int len = t + v + 1;
    std::vector<Scalar> b(static_cast<std::size_t>(std::max(0, len)));
    const Scalar inv0 = 1 / a0;
    for (int n = 0; n < len; ++n) {
      Scalar acc = n == 0 ? Scalar(1) : Scalar(0);
      for (int i = 1; i <= n; ++i) {
        const Scalar ai = raw(v + i);
        if (!is_zero(ai)) acc -= ai * b[static_cast<std::size_t>(n - i)];
      }
      b[static_cast<std::size_t>(n)] = acc * inv0;
    }
    return LaurentSeries(center_, -v, std::move(b), t);
  }

  LaurentSeries pow(int e, int max_order = kExactOrder) const {
    if (e < 0) return inverse(max_order == kExactOrder ? kExactOrder : max_order - e * std::max(0, valuation())).pow(-e, max_order);
    LaurentSeries result = monomial(center_, 1, 0);
    LaurentSeries base = *this;
    while (e) {
      if (e & 1) result = (result * base).truncated(max_order);
      e >>= 1;
      if (e) base = (base * base).truncated(max_order);
    }
    return result;
  }

  LaurentSeries derivative() const {
    std::vector<Scalar> v(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] = c_[i] * (lowest_ + static_cast<int>(i));
    return LaurentSeries(center_, lowest_ - 1, std::move(v), truncation_ >= kExactOrder ? kExactOrder : truncation_ - 1);
  }

  /// Term-by-term primitive with zero constant of integration.
  LaurentSeries integral() const {
    if (lowest_ <= -1 && -1 <= stored_top() && !is_zero(coefficient(-1)))
      throw PreconditionError("LaurentSeries::integral: nonzero residue (logarithmic term)");
    std::vector<Scalar> v(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const int k = lowest_ + static_cast<int>(i);
      v[i] = k == -1 ? Scalar(0) : Scalar(c_[i] / (k + 1));
    }
    return LaurentSeries(center_, lowest_ + 1, std::move(v), truncation_ >= kExactOrder ? kExactOrder : truncation_ + 1);
  }

  /// f(inner) for an inner series of positive valuation; the result lives in
  /// the inner series' coordinate and is bounded by `max_order`.
  LaurentSeries compose(const LaurentSeries& inner, int max_order = kExactOrder) const {
    const int vg = inner.valuation();
    if (vg < 1) throw PreconditionError("LaurentSeries::compose: inner series must vanish at the center");
    int t = is_exact() ? kExactOrder : sat_mul(vg, truncation_ + 1) - 1;
    t = std::min(t, max_order);
    if (c_.empty()) return zero(inner.center(), t);
    LaurentSeries acc = zero(inner.center(), t);
    LaurentSeries power = inner.pow(lowest_, t);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (!is_zero(c_[i])) acc = (acc + c_[i] * power).truncated(t);
      if (i + 1 < c_.size()) power = (power * inner).truncated(t);
    }
    return acc;
  }

  friend bool operator==(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.center_ != b.center_) return false;
    const int t = std::min(a.truncation_, b.truncation_);
    const int top = std::min(t, std::max(a.stored_top(), b.stored_top()));
    for (int k = std::min(a.lowest_, b.lowest_); k <= top; ++k)
      if (a.raw(k) != b.raw(k)) return false;
    return true;
  }

 private:
  Scalar raw(int k) const {
    if (k < lowest_ || k > stored_top()) return 0;
    return c_[static_cast<std::size_t>(k - lowest_)];
  }

  static int sat_add(int a, int b) {
    if (a >= kExactOrder || b >= kExactOrder) return kExactOrder;
    return std::min(a + b, kExactOrder);
  }
  static int sat_mul(int a, int b) {
    if (b >= kExactOrder) return kExactOrder;
    const long r = static_cast<long>(a) * b;
    return static_cast<int>(std::min<long>(r, kExactOrder));
  }

  static void check_center(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.center_ != b.center_) throw PreconditionError("LaurentSeries: mismatched expansion points");
  }

  Point center_;
  int lowest_;
  int truncation_;
  std::vector<Scalar> c_;
};

namespace detail {

/// Series of e^shift * n(e)/d(e) through `order`, given d(0) != 0 after
/// removing powers of e.
inline LaurentSeries expand_quotient(const Point& center, const Poly& n, const Poly& d, int shift, int order) {
  const int vn = n.valuation();
  const int vd = d.valuation();
  const int lowest = shift + vn - vd;
  if (order < lowest && lowest > 0) return LaurentSeries::zero(center, order);
  if (order < lowest) {
    throw PreconditionError("laurent_expand: order " + std::to_string(order) + " below the pole order (" +
                            std::to_string(-lowest) + ") at " + center.to_string());
  }
  std::vector<Scalar> nv(n.coefficients().begin() + vn, n.coefficients().end());
  std::vector<Scalar> dv(d.coefficients().begin() + vd, d.coefficients().end());
  LaurentSeries ns(center, 0, std::move(nv), kExactOrder);
  LaurentSeries ds(center, 0, std::move(dv), kExactOrder);
  const int rel = order - lowest;
  LaurentSeries q = (ns * ds.inverse(rel)).truncated(rel);
  std::vector<Scalar> out(static_cast<std::size_t>(rel + 1));
  for (int k = 0; k <= rel; ++k) out[static_cast<std::size_t>(k)] = q.coefficient(k);
  return LaurentSeries(center, lowest, std::move(out), order);
}

}  // namespace detail

/// Pole order of f at a finite point (negative values are zero orders).
inline int pole_order(const RationalFunction& f, const Point& a) {
  if (f.is_zero()) throw PreconditionError("pole_order: zero function");
  if (a.infinite) return f.degree_at_infinity();
  return f.den().taylor_shift(a.value).valuation() - f.num().taylor_shift(a.value).valuation();
}

/// Laurent expansion of f about a, exact through (z - a)^order (or
/// (1/z)^order at infinity).
inline LaurentSeries laurent_expand(const RationalFunction& f, const Point& a, int order) {
  if (f.is_zero()) return LaurentSeries::zero(a, order);
  if (a.infinite) {
    const int dn = f.num().degree(), dd = f.den().degree();
    return detail::expand_quotient(a, f.num().reversed(dn), f.den().reversed(dd), dd - dn, order);
  }
  return detail::expand_quotient(a, f.num().taylor_shift(a.value), f.den().taylor_shift(a.value), 0, order);
}

/// Coefficient of (z - a)^{-1} of f at the finite point a.
inline Scalar residue_at(const RationalFunction& f, const Scalar& a) {
  if (f.is_zero()) return 0;
  const Point p = Point::at(a);
  if (pole_order(f, p) <= 0) return 0;
  return laurent_expand(f, p, -1).coefficient(-1);
}

}  // namespace toprec

namespace toprec {

/// Compositional inverse of u = f(w) (valuation exactly 1) through u^order.
/// The result is a series in u centered at `u_center`.
inline LaurentSeries revert(const LaurentSeries& f, const Point& u_center, int order) {
  if (f.valuation() != 1) throw PreconditionError("revert: series must have valuation exactly 1");
  if (f.truncation_order() < order) throw ComputationError("revert: input precision below requested order");
  const Scalar a1 = f.coefficient(1);
  const LaurentSeries u = LaurentSeries::monomial(u_center, 1, 1);
  const LaurentSeries higher = (f - LaurentSeries::monomial(f.center(), a1, 1)).truncated(order);
  LaurentSeries g = ((1 / a1) * u).truncated(order);
  for (int it = 1; it < order; ++it) g = ((1 / a1) * (u - higher.compose(g, order))).truncated(order);
  return g;
}

}  // namespace toprec
