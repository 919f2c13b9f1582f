#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/laurent_series.hpp"
#include "toprec/partial_fractions.hpp"
#include "toprec/rational_function.hpp"
#include "toprec/roots.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

/// Unvalidated curve description as supplied by a user or a builder.
struct CurveSpec {
  RationalFunction x;
  RationalFunction y;
  RationalFunction sigma;
  Point physical_pole = Point::infinity();
  std::optional<Scalar> t;
  std::optional<std::vector<Scalar>> branch_points;
};

/// Finite zeros of dx/dz. Each must be rational and simple.
inline std::vector<Scalar> find_branch_points(const RationalFunction& x) {
  if (x.is_constant()) throw PreconditionError("find_branch_points: x is constant");
  const Poly num = x.derivative().num();
  if (num.degree() <= 0) return {};
  auto [roots, rest] = rational_roots(num);
  for (const Scalar& a : roots) {
    if (root_multiplicity(num, a) > 1)
      throw ValidationError("simple-branch-points", "dx has a zero of order " + std::to_string(root_multiplicity(num, a)) +
                                                        " at z = " + to_string(a));
  }
  if (rest.degree() > 0) {
    if (gcd_rational(gcd_rational(num, num.derivative()), rest).degree() > 0)
      throw ValidationError("simple-branch-points", "dx has a repeated irrational zero");
    throw ValidationError("rational-branch-points", "dx has zeros outside the rationals (factor " + to_string(rest) +
                                                        "); re-parameterize the curve");
  }
  return roots;
}

/// Local ingredients of the recursion kernel at a branch point a:
/// Laurent data of 1/((y(z') - y(sigma(z'))) x'(z')) and the Taylor series of
/// sigma(z'), both in e = z' - a.
struct KernelData {
  Scalar a;
  LaurentSeries factor;
  LaurentSeries sigma;
  int order = 0;
};

/// Genus-0 spectral curve (x, y, sigma) with validated invariants.
class SpectralCurve {
 public:
  /// Checks every invariant exactly; throws ValidationError naming the
  /// first one violated.
  static SpectralCurve validate(const CurveSpec& spec) {
    const RationalFunction id = RationalFunction::identity();
    if (spec.x.is_constant()) throw ValidationError("x-nonconstant", "x is constant");
    RationalFunction ss;
    try {
      ss = spec.sigma.compose(spec.sigma);
    } catch (const PreconditionError&) {
      throw ValidationError("sigma-involution", "sigma(sigma(z)) is undefined");
    }
    if (ss != id) throw ValidationError("sigma-involution", "sigma(sigma(z)) = " + to_string(ss) + ", expected z");
    RationalFunction xs = spec.x.compose(spec.sigma);
    if (xs != spec.x) throw ValidationError("sigma-preserves-x", "x(sigma(z)) = " + to_string(xs) + " differs from x(z)");
    RationalFunction dy = spec.y - spec.y.compose(spec.sigma);
    if (dy.is_zero()) throw ValidationError("y-not-sigma-invariant", "y(z) - y(sigma(z)) vanishes identically");

    std::vector<Scalar> bps = find_branch_points(spec.x);
    if (spec.branch_points) {
      std::vector<Scalar> given = *spec.branch_points;
      std::sort(given.begin(), given.end());
      if (given != bps) throw ValidationError("branch-points", "declared branch points differ from the zeros of dx");
    }
    for (const Scalar& a : bps) {
      if (spec.sigma.has_pole_at(a) || spec.sigma(a) != a)
        throw ValidationError("sigma-fixes-branch-points", "sigma does not fix the branch point " + to_string(a));
    }

    const Point& p = spec.physical_pole;
    const int xpole = pole_order(spec.x, p);
    if (xpole < 1) throw ValidationError("physical-pole", "x has no pole at " + p.to_string());
    if (spec.t) {
      if (xpole != 1)
        throw ValidationError("physical-pole-simple", "x has a pole of order " + std::to_string(xpole) + " at " + p.to_string());
      const RationalFunction yx = spec.y * spec.x;
      Scalar lim = 0;
      if (!yx.is_zero()) {
        if (pole_order(yx, p) > 0) throw ValidationError("t-normalization", "y*x diverges at the physical pole");
        lim = laurent_expand(yx, p, 0).coefficient(0);
      }
      if (lim != *spec.t)
        throw ValidationError("t-normalization", "y*x tends to " + to_string(lim) + " at the physical pole, declared t = " + to_string(*spec.t));
    }

    SpectralCurve c;
    c.x_ = spec.x;
    c.y_ = spec.y;
    c.sigma_ = spec.sigma;
    c.pole_ = p;
    c.t_ = spec.t;
    c.bps_ = std::move(bps);
    c.dx_ = spec.x.derivative();
    c.ydx_ = spec.y * c.dx_;
    c.dy_ = std::move(dy);
    return c;
  }

  const RationalFunction& x() const { return x_; }
  const RationalFunction& y() const { return y_; }
  const RationalFunction& sigma() const { return sigma_; }
  const RationalFunction& dx() const { return dx_; }
  /// y(z) x'(z), the density of y dx.
  const RationalFunction& ydx() const { return ydx_; }
  /// y(z) - y(sigma(z)).
  const RationalFunction& y_difference() const { return dy_; }
  const std::vector<Scalar>& branch_points() const { return bps_; }
  const Point& physical_pole() const { return pole_; }
  const std::optional<Scalar>& t() const { return t_; }

  std::size_t branch_index(const Scalar& a) const {
    auto it = std::find(bps_.begin(), bps_.end(), a);
    if (it == bps_.end()) throw PreconditionError("not a branch point: " + to_string(a));
    return static_cast<std::size_t>(it - bps_.begin());
  }

  CurveSpec spec() const { return CurveSpec{x_, y_, sigma_, pole_, t_, bps_}; }

 private:
  SpectralCurve() = default;

  RationalFunction x_, y_, sigma_, dx_, ydx_, dy_;
  Point pole_;
  std::optional<Scalar> t_;
  std::vector<Scalar> bps_;
};

inline SpectralCurve validate_curve(const CurveSpec& spec) { return SpectralCurve::validate(spec); }

/// Kernel ingredients at a, with the factor known through (z'-a)^order.
inline KernelData kernel_data(const SpectralCurve& curve, const Scalar& a, int order) {
  curve.branch_index(a);
  if (order < 0) throw PreconditionError("kernel_data: negative order");
  const RationalFunction f = curve.y_difference() * curve.dx();
  if (f.is_zero()) throw ComputationError("kernel_data: (y - y o sigma) x' vanishes identically");
  const RationalFunction inv = RationalFunction::constant(1) / f;
  const Point pa = Point::at(a);
  return KernelData{a, laurent_expand(inv, pa, order), laurent_expand(curve.sigma(), pa, order), order};
}

/// Taylor series at a of the primitive of y x' vanishing at a, through
/// (z-a)^order.
inline LaurentSeries primitive_phi_series(const SpectralCurve& curve, const Scalar& a, int order) {
  const Point pa = Point::at(a);
  const RationalFunction& w = curve.ydx();
  if (w.is_zero()) return LaurentSeries::zero(pa, order);
  if (pole_order(w, pa) > 0) throw PreconditionError("primitive_phi_series: y dx has a pole at " + to_string(a));
  return laurent_expand(w, pa, order - 1).integral();
}

/// Local coordinate series w(u) at the physical pole, u = 1/x, where w is
/// z - p (finite pole) or 1/z (pole at infinity). Requires a simple pole.
inline LaurentSeries inverse_x_at_pole(const SpectralCurve& curve, int order) {
  const Point& p = curve.physical_pole();
  if (pole_order(curve.x(), p) != 1) throw PreconditionError("x pole at the physical pole is not simple");
  const RationalFunction u = RationalFunction::constant(1) / curve.x();
  return revert(laurent_expand(u, p, order), Point::infinity(), order);
}

struct PoleExpansion {
  LaurentSeries y_series;  // y as a series in u = 1/x
  Scalar t;                // coefficient of u
};

inline PoleExpansion ydx_expansion_at_pole(const SpectralCurve& curve, int order) {
  const LaurentSeries w = inverse_x_at_pole(curve, order);
  if (curve.y().is_zero()) return {LaurentSeries::zero(Point::infinity(), order), Scalar(0)};
  const Point& p = curve.physical_pole();
  const int po = pole_order(curve.y(), p);
  LaurentSeries yw = laurent_expand(curve.y(), p, order);
  LaurentSeries yu = yw.compose(w, order + std::max(0, po));
  yu = yu.truncated(order);
  return {yu, yu.truncation_order() >= 1 ? yu.coefficient(1) : Scalar(0)};
}

}  // namespace toprec
