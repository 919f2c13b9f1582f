#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "toprec/engine.hpp"
#include "toprec/errors.hpp"
#include "toprec/laurent_series.hpp"
#include "toprec/roots.hpp"
#include "toprec/spectral_curve.hpp"

namespace toprec {

/// Outcome of the loop-equation check at (h, n): the remainder P_n^(h) as a
/// polynomial in x (variables of J frozen at sample points).
struct LoopResidual {
  int h = 0;
  int n = 0;
  bool is_polynomial = false;
  int degree_bound = 0;   // d - 1
  Poly polynomial;        // valid when is_polynomial
  RationalFunction raw;   // residual as a function of the curve coordinate
  std::vector<Scalar> sample_points;
  std::vector<Scalar> poles;         // rational poles of raw, when not polynomial
  std::vector<Scalar> pole_images;   // x at those poles
  std::string detail;

  bool pass() const { return is_polynomial && polynomial.degree() <= degree_bound; }
};

namespace detail {

/// Rational sample points away from branch points, poles of x and each
/// other's conjugates, with distinct x-values.
inline std::vector<Scalar> loop_sample_points(const SpectralCurve& c, int count) {
  std::vector<Scalar> out;
  std::vector<Scalar> xs;
  for (long num = 2; static_cast<int>(out.size()) < count; ++num) {
    for (long den : {3L, 5L, 7L}) {
      if (static_cast<int>(out.size()) >= count) break;
      Scalar z = frac(num % 2 ? -num : num, den);
      if (std::find(c.branch_points().begin(), c.branch_points().end(), z) != c.branch_points().end()) continue;
      if (c.x().has_pole_at(z) || c.sigma().has_pole_at(z) || c.y().has_pole_at(z) || is_zero(c.dx()(z))) continue;
      const Scalar xv = c.x()(z);
      if (std::find(xs.begin(), xs.end(), xv) != xs.end()) continue;
      out.push_back(z);
      xs.push_back(xv);
    }
  }
  return out;
}

class LoopAssembler {
 public:
  LoopAssembler(Engine& e, std::vector<Scalar> pts) : e_(e), c_(e.curve()), pts_(std::move(pts)) {
    z_ = RationalFunction::identity();
    for (const auto& p : pts_) {
      xj_.push_back(c_.x()(p));
      dxj_.push_back(c_.dx()(p));
    }
  }

  /// W_k^(g)(x(z), x(z_j) for j in idx) as a rational function of z.
  const RationalFunction& W(int g, int k, const std::vector<int>& idx) {
    auto key = std::make_pair(g, idx);
    auto it = w_cache_.find(key);
    if (it == w_cache_.end()) it = w_cache_.emplace(key, compute_W(g, k, idx)).first;
    return it->second;
  }

  RationalFunction compute_W(int g, int k, const std::vector<int>& idx) {
    const Multidifferential& w = e_.omega(g, k);
    if (w.kind() == DiffKind::Ydx) return c_.y();
    std::vector<Scalar> others;
    Scalar jac = 1;
    for (int j : idx) {
      others.push_back(pts_[static_cast<std::size_t>(j)]);
      jac *= dxj_[static_cast<std::size_t>(j)];
    }
    RationalFunction r = (1 / jac) * (w.restrict_first(others) / c_.dx());
    if (w.kind() == DiffKind::Bergman) r -= (c_.x() - RationalFunction::constant(xj_[static_cast<std::size_t>(idx[0])])).pow(-2);
    return r;
  }

  /// W_k^(g)(x, x, x_j...) with both first variables at z.
  RationalFunction diagonal(int g, int k, const std::vector<int>& idx) {
    const Multidifferential& w = e_.omega(g, k);
    if (w.kind() == DiffKind::Bergman) {
      // -{x, z} / (6 x'^2)
      const RationalFunction d1 = c_.dx(), d2 = d1.derivative(), d3 = d2.derivative();
      const RationalFunction schwarz = d3 / d1 - Scalar(3, 2) * (d2 / d1).pow(2);
      return Scalar(-1, 6) * (schwarz / d1.pow(2));
    }
    std::map<std::vector<int>, Scalar> grouped;
    Scalar jac = 1;
    for (int j : idx) jac *= dxj_[static_cast<std::size_t>(j)];
    for (const auto& [key, coeff] : w.terms()) {
      Scalar t = coeff;
      for (std::size_t i = 2; i < key.size(); ++i)
        t *= toprec::pow(pts_[static_cast<std::size_t>(idx[i - 2])] - w.branch_points()[static_cast<std::size_t>(key[i].branch)], -key[i].order);
      std::vector<int> e(w.branch_points().size(), 0);
      e[static_cast<std::size_t>(key[0].branch)] += key[0].order;
      e[static_cast<std::size_t>(key[1].branch)] += key[1].order;
      grouped[e] += t;
    }
    const RationalFunction acc = sum_over_branches(w.branch_points(), grouped);
    return (1 / jac) * (acc / c_.dx().pow(2));
  }

  /// d/dx_j [(G(x) - G(x_j)) / (x - x_j)] with G = W_n^(h)(., J \ {x_j}).
  RationalFunction derivative_term(int h, int n, int j) {
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
      if (i != j) rest.push_back(i);
    const RationalFunction G = W(h, n, rest);
    const Scalar& zj = pts_[static_cast<std::size_t>(j)];
    const Scalar g0 = G(zj);
    const Scalar g1 = G.derivative()(zj) / dxj_[static_cast<std::size_t>(j)];
    const RationalFunction dxv = c_.x() - RationalFunction::constant(xj_[static_cast<std::size_t>(j)]);
    return (G - RationalFunction::constant(g0) - g1 * dxv) / dxv.pow(2);
  }

 private:
  Engine& e_;
  const SpectralCurve& c_;
  std::vector<Scalar> pts_;
  std::vector<Scalar> xj_, dxj_;
  RationalFunction z_;
  std::map<std::pair<int, std::vector<int>>, RationalFunction> w_cache_;
};

/// Sum of signed quotients num_i / den_i over their least common denominator,
/// normalized once at the end.
class FractionSum {
 public:
  void add(const Poly& num, const Poly& den) {
    if (num.is_zero()) return;
    terms_.emplace_back(num, den);
  }
  void add(const RationalFunction& f, const Scalar& sign = 1) { add(sign * f.num(), f.den()); }
  void add_product(const RationalFunction& a, const RationalFunction& b, const Scalar& sign) {
    add(sign * (a.num() * b.num()), a.den() * b.den());
  }

  RationalFunction total() const {
    Poly D = Poly::constant(1);
    for (const auto& [num, den] : terms_) {
      const Poly g = gcd_rational(D, den);
      D = D * den.exact_divide(g);
    }
    Poly N;
    for (const auto& [num, den] : terms_) N += num * D.exact_divide(den);
    return RationalFunction(N, D);
  }

 private:
  std::vector<std::pair<Poly, Poly>> terms_;
};

/// If r = p(x(z)) for a polynomial p, returns p.
inline std::optional<Poly> as_polynomial_in_x(const SpectralCurve& c, const RationalFunction& r) {
  if (r.is_zero()) return Poly();
  const Point& pole = c.physical_pole();
  const int po = std::max(0, pole_order(r, pole));
  const LaurentSeries w = inverse_x_at_pole(c, po + 2);
  const LaurentSeries rw = laurent_expand(r, pole, po + 2);
  const LaurentSeries ru = rw.compose(w, 1);
  std::vector<Scalar> coeffs(static_cast<std::size_t>(po) + 1);
  for (int k = 0; k <= po; ++k) coeffs[static_cast<std::size_t>(k)] = ru.coefficient(-k);
  Poly p(coeffs);
  RationalFunction px;
  for (int k = p.degree(); k >= 0; --k) px = px * c.x() + RationalFunction::constant(p.coefficient(k));
  if (r - px == RationalFunction()) return p;
  return std::nullopt;
}

}  // namespace detail

/// Checks y(z) + y(sigma(z)) = V'(x(z)) and the t normalization.
inline void check_curve_matches_potential(const SpectralCurve& c, const Poly& V, const Scalar& t) {
  const RationalFunction lhs = c.y() + c.y().compose(c.sigma());
  RationalFunction rhs;
  const Poly dV = V.derivative();
  for (int k = dV.degree(); k >= 0; --k) rhs = rhs * c.x() + RationalFunction::constant(dV.coefficient(k));
  if (lhs != rhs) throw PreconditionError("loop_equation_residual: curve does not match the potential (y + y o sigma != V'(x))");
  if (!c.t() || *c.t() != t) throw PreconditionError("loop_equation_residual: curve t differs from the model t");
}

/// Assembles V'(x) W_{n+1}^(h)(x, J) minus every right-hand-side term of the
/// loop equation except P_n^(h)(x, J), with J frozen at rational sample points,
/// and tests whether the remainder is a polynomial in x of degree <= d - 1.
inline LoopResidual loop_equation_residual(Engine& engine, const Poly& V, const Scalar& t, int h, int n) {
  if (h < 0 || n < 0) throw PreconditionError("loop_equation_residual: need h >= 0 and n >= 0");
  const SpectralCurve& c = engine.curve();
  check_curve_matches_potential(c, V, t);
  const int d = V.derivative().degree();
  LoopResidual res;
  res.h = h;
  res.n = n;
  res.degree_bound = d - 1;
  res.sample_points = detail::loop_sample_points(c, n);
  detail::LoopAssembler A(engine, res.sample_points);

  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;

  RationalFunction vx;
  const Poly dV = V.derivative();
  for (int k = dV.degree(); k >= 0; --k) vx = vx * c.x() + RationalFunction::constant(dV.coefficient(k));

  detail::FractionSum sum;
  sum.add_product(vx, A.W(h, n + 1, all), 1);
  if (h >= 1) sum.add(A.diagonal(h - 1, n + 2, all), -1);
  for (int m = 0; m <= h; ++m)
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> in, out;
      for (int i = 0; i < n; ++i) (mask >> i & 1u ? in : out).push_back(i);
      sum.add_product(A.W(m, 1 + static_cast<int>(in.size()), in), A.W(h - m, 1 + static_cast<int>(out.size()), out), -1);
    }
  for (int j = 0; j < n; ++j) sum.add(A.derivative_term(h, n, j), -1);
  const RationalFunction r = sum.total();
  res.raw = r;

  if (auto p = detail::as_polynomial_in_x(c, r)) {
    res.is_polynomial = true;
    res.polynomial = *p;
    if (p->degree() > res.degree_bound)
      res.detail = "residual has degree " + std::to_string(p->degree()) + " in x, expected <= " + std::to_string(res.degree_bound);
    return res;
  }
  const auto rr = rational_roots(r.den());
  res.poles = rr.roots;
  for (const Scalar& z : res.poles) {
    if (c.x().has_pole_at(z)) continue;
    res.pole_images.push_back(c.x()(z));
  }
  res.detail = "residual is not a polynomial in x; " + std::to_string(res.poles.size()) + " rational pole(s) in z";
  if (rr.remainder.degree() > 0) res.detail += " plus irrational poles";
  return res;
}

}  // namespace toprec
