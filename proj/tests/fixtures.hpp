#pragma once

#include <initializer_list>
#include <vector>

#include "toprec/rational_function.hpp"
#include "toprec/spectral_curve.hpp"

namespace fixtures {

using namespace toprec;

inline Poly P(std::initializer_list<Scalar> c) { return Poly(std::vector<Scalar>(c)); }
inline RationalFunction R(Poly n, Poly d = Poly::constant(1)) { return RationalFunction(std::move(n), std::move(d)); }

inline const RationalFunction& inv_z() {
  static const RationalFunction f = R(P({1}), P({0, 1}));
  return f;
}

// x = z + 1/z, y = t/z, sigma = 1/z.
inline CurveSpec gaussian_spec(const Scalar& t = 1) {
  return CurveSpec{R(P({1, 0, 1}), P({0, 1})), R(P({t}), P({0, 1})), inv_z(), Point::infinity(), t, {}};
}
inline SpectralCurve gaussian() { return validate_curve(gaussian_spec()); }

// x = z^2, y = z, sigma = -z.
inline CurveSpec airy_spec() { return CurveSpec{R(P({0, 0, 1})), R(P({0, 1})), R(P({0, -1})), Point::infinity(), {}, {}}; }
inline SpectralCurve airy() { return validate_curve(airy_spec()); }

// V = x^2/2 + x^4/48, t = 5/4: x = z + 1/z, y = (5/4)/z + (1/12)/z^3.
inline Poly quartic_potential() { return P({0, 0, frac(1, 2), 0, frac(1, 48)}); }
inline CurveSpec quartic_spec() {
  return CurveSpec{R(P({1, 0, 1}), P({0, 1})), R(P({frac(1, 12), 0, frac(5, 4)}), P({0, 0, 0, 1})), inv_z(), Point::infinity(), frac(5, 4), {}};
}
inline SpectralCurve quartic() { return validate_curve(quartic_spec()); }

}  // namespace fixtures
