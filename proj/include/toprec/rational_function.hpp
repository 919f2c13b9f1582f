#pragma once

#include <string>
#include <utility>

#include "toprec/errors.hpp"
#include "toprec/polynomial.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

/// Quotient num/den of univariate polynomials over the rationals, kept in
/// canonical form: no common factor, monic denominator.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(Poly::constant(1)) {}

  RationalFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  explicit RationalFunction(Poly num) : num_(std::move(num)), den_(Poly::constant(1)) {}

  static RationalFunction constant(const Scalar& c) { return RationalFunction(Poly::constant(c)); }
  static RationalFunction identity() { return RationalFunction(Poly::identity()); }

  /// (z - a)^k for any integer k.
  static RationalFunction power_of_linear(const Scalar& a, int k) {
    Poly lin = Poly::linear_factor(a);
    if (k >= 0) return RationalFunction(lin.pow(k));
    return RationalFunction(Poly::constant(1), lin.pow(-k));
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }
  bool is_constant() const { return is_polynomial() && num_.degree() <= 0; }

  /// deg num - deg den; the order of the pole at infinity (negative: zero).
  int degree_at_infinity() const { return num_.degree() - den_.degree(); }

  Scalar operator()(const Scalar& z) const {
    const Scalar d = den_(z);
    if (toprec::is_zero(d)) throw PreconditionError("RationalFunction: evaluation at a pole z = " + to_string(z));
    return num_(z) / d;
  }

  bool has_pole_at(const Scalar& z) const { return toprec::is_zero(den_(z)); }

  RationalFunction derivative() const {
    return RationalFunction(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
  }

  /// f(g(z)).
  RationalFunction compose(const RationalFunction& g) const {
    // Homogenize: f = N/D with n = max(deg N, deg D);
    // N(P/Q) / D(P/Q) = (sum a_i P^i Q^(n-i)) / (sum b_i P^i Q^(n-i)).
    const int n = std::max(num_.degree(), den_.degree());
    auto homog = [&](const Poly& p) {
      Poly acc;
      for (int i = 0; i <= p.degree(); ++i) {
        const Scalar& c = p.coefficients()[static_cast<std::size_t>(i)];
        if (toprec::is_zero(c)) continue;
        acc += c * (g.num_.pow(i) * g.den_.pow(n - i));
      }
      return acc;
    };
    Poly d = homog(den_);
    if (d.is_zero()) throw PreconditionError("RationalFunction::compose: composition has identically zero denominator");
    return RationalFunction(homog(num_), d);
  }

  RationalFunction pow(int e) const {
    if (e >= 0) return RationalFunction(num_.pow(e), den_.pow(e));
    if (is_zero()) throw PreconditionError("RationalFunction::pow: zero to a negative power");
    return RationalFunction(den_.pow(-e), num_.pow(-e));
  }

  RationalFunction operator-() const { return RationalFunction(-num_, den_, Canonical{}); }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw PreconditionError("RationalFunction: division by zero function");
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend RationalFunction operator*(const Scalar& c, const RationalFunction& f) {
    return RationalFunction(c * f.num_, f.den_);
  }

  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

 private:
  struct Canonical {};
  RationalFunction(Poly num, Poly den, Canonical) : num_(std::move(num)), den_(std::move(den)) {}

  void normalize() {
    if (den_.is_zero()) throw PreconditionError("RationalFunction: zero denominator");
    if (num_.is_zero()) {
      den_ = Poly::constant(1);
      return;
    }
    if (den_.degree() > 0) {
      Poly g = gcd_rational(num_, den_);
      if (g.degree() > 0) {
        num_ = num_.exact_divide(g);
        den_ = den_.exact_divide(g);
      }
    }
    const Scalar lead = den_.leading();
    if (lead != 1) {
      const Scalar inv = 1 / lead;
      num_ = inv * num_;
      den_ = inv * den_;
    }
  }

  Poly num_;
  Poly den_;
};

inline std::string to_string(const RationalFunction& f, const std::string& var = "z") {
  if (f.is_polynomial()) return to_string(f.num(), var);
  return "(" + to_string(f.num(), var) + ")/(" + to_string(f.den(), var) + ")";
}

}  // namespace toprec
