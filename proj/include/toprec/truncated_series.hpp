#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/polynomial.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

/// Power series sum_{k=0}^{order} c_k s^k + O(s^{order+1}) in a named formal
/// parameter.
class TruncatedSeries {
 public:
  TruncatedSeries() = default;

  TruncatedSeries(std::string parameter, std::vector<Scalar> coefficients, int order)
      : param_(std::move(parameter)), order_(order), c_(std::move(coefficients)) {
    if (order_ < 0) throw PreconditionError("TruncatedSeries: negative truncation order");
    c_.resize(static_cast<std::size_t>(order_) + 1, Scalar(0));
  }

  static TruncatedSeries constant(std::string parameter, const Scalar& c, int order) {
    return TruncatedSeries(std::move(parameter), {c}, order);
  }
  static TruncatedSeries monomial(std::string parameter, const Scalar& c, int k, int order) {
    std::vector<Scalar> v(static_cast<std::size_t>(std::max(k, 0)) + 1, Scalar(0));
    if (k <= order) v[static_cast<std::size_t>(k)] = c;
    return TruncatedSeries(std::move(parameter), std::move(v), order);
  }

  const std::string& parameter() const { return param_; }
  int order() const { return order_; }
  const std::vector<Scalar>& coefficients() const { return c_; }

  Scalar coefficient(int k) const {
    if (k < 0) return 0;
    if (k > order_) throw ComputationError("TruncatedSeries: coefficient beyond truncation order");
    return c_[static_cast<std::size_t>(k)];
  }

  /// Index of the first nonzero coefficient, or order()+1 if all vanish.
  int valuation() const {
    for (int k = 0; k <= order_; ++k)
      if (!is_zero(c_[static_cast<std::size_t>(k)])) return k;
    return order_ + 1;
  }

  TruncatedSeries with_order(int order) const {
    std::vector<Scalar> v(c_.begin(), c_.begin() + std::min<std::size_t>(c_.size(), static_cast<std::size_t>(order) + 1));
    return TruncatedSeries(param_, std::move(v), order);
  }

  /// Divides by s^k; the order drops by k.
  TruncatedSeries shift_down(int k) const {
    if (valuation() < k) throw PreconditionError("TruncatedSeries::shift_down: series not divisible by s^k");
    if (order_ - k < 0) throw ComputationError("TruncatedSeries::shift_down: precision exhausted");
    return TruncatedSeries(param_, std::vector<Scalar>(c_.begin() + k, c_.end()), order_ - k);
  }

  TruncatedSeries shift_up(int k) const {
    std::vector<Scalar> v(static_cast<std::size_t>(k), Scalar(0));
    v.insert(v.end(), c_.begin(), c_.end());
    return TruncatedSeries(param_, std::move(v), order_);
  }

  TruncatedSeries operator-() const {
    std::vector<Scalar> v = c_;
    for (auto& x : v) x = -x;
    return TruncatedSeries(param_, std::move(v), order_);
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    check(a, b);
    const int t = std::min(a.order_, b.order_);
    std::vector<Scalar> v(static_cast<std::size_t>(t) + 1);
    for (int k = 0; k <= t; ++k) v[static_cast<std::size_t>(k)] = a.c_[static_cast<std::size_t>(k)] + b.c_[static_cast<std::size_t>(k)];
    return TruncatedSeries(a.param_, std::move(v), t);
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-b); }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    check(a, b);
    const int t = std::min(a.order_, b.order_);
    std::vector<Scalar> v(static_cast<std::size_t>(t) + 1, Scalar(0));
    for (int i = 0; i <= t; ++i) {
      if (is_zero(a.c_[static_cast<std::size_t>(i)])) continue;
      for (int j = 0; i + j <= t; ++j) v[static_cast<std::size_t>(i + j)] += a.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j)];
    }
    return TruncatedSeries(a.param_, std::move(v), t);
  }

  friend TruncatedSeries operator*(const Scalar& s, const TruncatedSeries& a) {
    std::vector<Scalar> v = a.c_;
    for (auto& x : v) x *= s;
    return TruncatedSeries(a.param_, std::move(v), a.order_);
  }
  friend TruncatedSeries operator+(const TruncatedSeries& a, const Scalar& s) {
    TruncatedSeries r = a;
    r.c_[0] += s;
    return r;
  }

  TruncatedSeries inverse() const {
    if (is_zero(c_[0])) throw PreconditionError("TruncatedSeries::inverse: constant term not invertible");
    std::vector<Scalar> b(c_.size(), Scalar(0));
    const Scalar inv0 = 1 / c_[0];
    b[0] = inv0;
    for (int n = 1; n <= order_; ++n) {
      Scalar acc = 0;
      for (int i = 1; i <= n; ++i) acc -= c_[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(n - i)];
      b[static_cast<std::size_t>(n)] = acc * inv0;
    }
    return TruncatedSeries(param_, std::move(b), order_);
  }

  friend TruncatedSeries operator/(const TruncatedSeries& a, const TruncatedSeries& b) { return a * b.inverse(); }

  TruncatedSeries pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    TruncatedSeries r = constant(param_, 1, order_), base = *this;
    while (e) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  /// Square root with the given rational root of the constant term.
  TruncatedSeries sqrt() const {
    Scalar r0;
    if (!rational_sqrt(c_[0], r0) || is_zero(r0))
      throw ComputationError("TruncatedSeries::sqrt: constant term is not a nonzero rational square");
    std::vector<Scalar> r(c_.size(), Scalar(0));
    r[0] = r0;
    for (int n = 1; n <= order_; ++n) {
      Scalar acc = c_[static_cast<std::size_t>(n)];
      for (int i = 1; i < n; ++i) acc -= r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(n - i)];
      r[static_cast<std::size_t>(n)] = acc / (2 * r0);
    }
    return TruncatedSeries(param_, std::move(r), order_);
  }

  /// p(this) for a polynomial with rational coefficients.
  TruncatedSeries apply(const Poly& p) const {
    TruncatedSeries acc = constant(param_, 0, order_);
    for (int k = p.degree(); k >= 0; --k) acc = acc * *this + p.coefficient(k);
    return acc;
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.param_ == b.param_ && a.order_ == b.order_ && a.c_ == b.c_;
  }

 private:
  static void check(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.param_ != b.param_) throw PreconditionError("TruncatedSeries: mismatched formal parameters");
  }

  std::string param_ = "s";
  int order_ = 0;
  std::vector<Scalar> c_{Scalar(0)};
};

inline std::string to_string(const TruncatedSeries& s) {
  std::string out;
  for (int k = 0; k <= s.order(); ++k) {
    const Scalar c = s.coefficient(k);
    if (is_zero(c)) continue;
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c) + ")" + (k ? "*" + s.parameter() + "^" + std::to_string(k) : "");
  }
  return (out.empty() ? "0" : out) + " + O(" + s.parameter() + "^" + std::to_string(s.order() + 1) + ")";
}

}  // namespace toprec
