#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/polynomial.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

/// Sparse polynomial in a fixed number of variables x_1..x_nvars.
class MPoly {
 public:
  using Exponent = std::vector<int>;

  explicit MPoly(int nvars = 0) : nvars_(nvars) {}

  static MPoly constant(int nvars, const Scalar& c) {
    MPoly p(nvars);
    if (!toprec::is_zero(c)) p.terms_[Exponent(static_cast<std::size_t>(nvars), 0)] = c;
    return p;
  }

  /// The variable x_{index}, 0-based.
  static MPoly variable(int nvars, int index) {
    if (index < 0 || index >= nvars) throw PreconditionError("MPoly::variable: index out of range");
    MPoly p(nvars);
    Exponent e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(index)] = 1;
    p.terms_[e] = 1;
    return p;
  }

  int nvars() const { return nvars_; }
  const std::map<Exponent, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Scalar coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  int degree_in(int var) const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<std::size_t>(var)]);
    return d;
  }

  MPoly operator-() const {
    MPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }

  friend MPoly operator+(const MPoly& a, const MPoly& b) {
    check(a, b);
    MPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }
  friend MPoly operator-(const MPoly& a, const MPoly& b) { return a + (-b); }

  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    check(a, b);
    MPoly r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  friend MPoly operator*(const Scalar& s, const MPoly& a) {
    MPoly r(a.nvars_);
    if (toprec::is_zero(s)) return r;
    for (const auto& [e, c] : a.terms_) r.terms_[e] = s * c;
    return r;
  }

  MPoly& operator+=(const MPoly& o) { return *this = *this + o; }
  MPoly& operator-=(const MPoly& o) { return *this = *this - o; }
  MPoly& operator*=(const MPoly& o) { return *this = *this * o; }

  friend bool operator==(const MPoly& a, const MPoly& b) { return a.nvars_ == b.nvars_ && a.terms_ == b.terms_; }
  friend bool operator!=(const MPoly& a, const MPoly& b) { return !(a == b); }

  MPoly pow(int k) const {
    if (k < 0) throw PreconditionError("MPoly::pow: negative exponent");
    MPoly r = constant(nvars_, 1), base = *this;
    while (k) {
      if (k & 1) r = r * base;
      base = base * base;
      k >>= 1;
    }
    return r;
  }

  Scalar evaluate(const std::vector<Scalar>& point) const {
    if (static_cast<int>(point.size()) != nvars_) throw PreconditionError("MPoly::evaluate: wrong number of values");
    Scalar acc = 0;
    for (const auto& [e, c] : terms_) {
      Scalar t = c;
      for (std::size_t i = 0; i < e.size(); ++i) t *= toprec::pow(point[i], e[i]);
      acc += t;
    }
    return acc;
  }

  MPoly partial(int var) const {
    MPoly r(nvars_);
    for (const auto& [e, c] : terms_) {
      const int k = e[static_cast<std::size_t>(var)];
      if (k == 0) continue;
      Exponent f = e;
      f[static_cast<std::size_t>(var)] = k - 1;
      r.add_term(f, c * k);
    }
    return r;
  }

  /// Evaluation in any commutative ring T; `embed` maps a Scalar into T.
  template <typename T, typename Embed>
  T evaluate_in(const std::vector<T>& point, const T& one, Embed embed) const {
    if (static_cast<int>(point.size()) != nvars_) throw PreconditionError("MPoly::evaluate_in: wrong number of values");
    std::vector<std::vector<T>> powers(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) powers[i].push_back(one);
    T acc = embed(Scalar(0));
    for (const auto& [e, c] : terms_) {
      T t = embed(c);
      for (std::size_t i = 0; i < e.size(); ++i) {
        while (static_cast<int>(powers[i].size()) <= e[i]) powers[i].push_back(powers[i].back() * point[i]);
        if (e[i]) t = t * powers[i][static_cast<std::size_t>(e[i])];
      }
      acc = acc + t;
    }
    return acc;
  }

  /// Univariate view when only variable `var` occurs.
  Poly to_univariate(int var) const {
    std::vector<Scalar> v(static_cast<std::size_t>(std::max(0, degree_in(var) + 1)), Scalar(0));
    for (const auto& [e, c] : terms_) {
      for (std::size_t i = 0; i < e.size(); ++i)
        if (static_cast<int>(i) != var && e[i] != 0) throw PreconditionError("MPoly::to_univariate: other variables present");
      v[static_cast<std::size_t>(e[static_cast<std::size_t>(var)])] += c;
    }
    return Poly(std::move(v));
  }

 private:
  void add_term(const Exponent& e, const Scalar& c) {
    if (toprec::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (toprec::is_zero(it->second)) terms_.erase(it);
    }
  }

  static void check(const MPoly& a, const MPoly& b) {
    if (a.nvars_ != b.nvars_) throw PreconditionError("MPoly: mismatched variable counts");
  }

  int nvars_;
  std::map<Exponent, Scalar> terms_;
};

/// p(q) for univariate p and multivariate q.
inline MPoly compose(const Poly& p, const MPoly& q) {
  MPoly acc(q.nvars());
  for (int k = p.degree(); k >= 0; --k) acc = acc * q + MPoly::constant(q.nvars(), p.coefficient(k));
  return acc;
}

inline std::string to_string(const MPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    if (!out.empty()) out += sgn(c) > 0 ? " + " : " - ";
    else if (sgn(c) < 0) out += "-";
    const Scalar a = abs(c);
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i]) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1) + (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
    }
    if (mono.empty()) out += to_string(a);
    else out += (a != 1 ? to_string(a) + "*" : "") + mono;
  }
  return out;
}

}  // namespace toprec
