#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/multivariate.hpp"
#include "toprec/polynomial.hpp"
#include "toprec/roots.hpp"
#include "toprec/spectral_curve.hpp"
#include "toprec/truncated_series.hpp"

namespace toprec {

/// Formal 't Hooft parameter t = s^power, expanded through s^order.
struct SeriesSpec {
  std::string param = "s";
  int power = 1;
  int order = 8;
};

/// One-matrix model with potential V and a single filled cut.
struct OneMatrixModel {
  Poly V;
  std::variant<Scalar, SeriesSpec> t = Scalar(1);
  std::optional<Scalar> saddle;  // the saddle carrying the cut; nearest to 0 by default
};

/// Zhukovsky ansatz x = alpha + gamma (z + 1/z): V'(x(z)) = u_0 + sum_k u_k (z^k + z^-k)
/// with u_k = gamma^k U_k(alpha, g2), g2 = gamma^2. Variables: 0 -> alpha, 1 -> g2.
struct ZhukovskyCoefficients {
  std::vector<MPoly> U;  // U[0..d]
  MPoly F1;              // U_0, must vanish
  MPoly F2;              // g2 U_1, must equal t
};

inline ZhukovskyCoefficients zhukovsky_coefficients(const Poly& V) {
  const Poly dV = V.derivative();
  const int d = dV.degree();
  if (d < 1) throw PreconditionError("one_cut_curve: deg V' must be >= 1");
  // c_j(alpha) = V'^{(j)}(alpha) / j!
  std::vector<MPoly> c;
  Poly der = dV;
  Scalar fact = 1;
  const MPoly alpha = MPoly::variable(2, 0), g2 = MPoly::variable(2, 1);
  for (int j = 0; j <= d; ++j) {
    if (j > 0) {
      der = der.derivative();
      fact *= j;
    }
    c.push_back(compose((1 / fact) * der, alpha));
  }
  ZhukovskyCoefficients z;
  for (int k = 0; k <= d; ++k) {
    MPoly u(2);
    for (int j = k; j <= d; j += 2) u += binomial(j, (j - k) / 2) * (c[static_cast<std::size_t>(j)] * g2.pow((j - k) / 2));
    z.U.push_back(u);
  }
  z.F1 = z.U[0];
  z.F2 = g2 * z.U[1];
  return z;
}

namespace detail {

inline long double to_ld(const Scalar& q) { return static_cast<long double>(q.get_d()); }

inline long double eval_ld(const MPoly& p, long double a, long double g) {
  return p.evaluate_in<long double>({a, g}, 1.0L, [](const Scalar& q) { return to_ld(q); });
}

/// Saddle of V carrying the cut: the declared one, else the real critical
/// point nearest 0 with V'' != 0.
inline long double choose_saddle(const OneMatrixModel& m) {
  if (m.saddle) return to_ld(*m.saddle);
  const Poly dV = m.V.derivative();
  const Poly d2 = dV.derivative();
  if (dV.degree() == 1) return to_ld(-dV.coefficient(0) / dV.coefficient(1));
  long double best = 0;
  bool found = false;
  for (const auto& r : numeric_roots(dV)) {
    if (std::abs(r.imag()) > 1e-9L) continue;
    const long double x = r.real();
    if (std::abs(eval_ld(compose(d2, MPoly::variable(2, 0)), x, 0)) < 1e-12L) continue;
    if (!found || std::abs(x) < std::abs(best)) best = x, found = true;
  }
  if (!found) throw ComputationError("one_cut_curve: V has no nondegenerate real saddle");
  return best;
}

inline Scalar exact_saddle(const OneMatrixModel& m) {
  if (m.saddle) {
    if (!is_zero(m.V.derivative()(*m.saddle))) throw PreconditionError("one_cut_curve: declared saddle is not a critical point of V");
    return *m.saddle;
  }
  const auto rr = rational_roots(m.V.derivative());
  std::optional<Scalar> best;
  for (const auto& r : rr.roots) {
    if (is_zero(m.V.derivative().derivative()(r))) continue;
    if (!best || abs(r) < abs(*best)) best = r;
  }
  if (!best) throw ComputationError("one_cut_curve: series mode needs a rational nondegenerate saddle");
  return *best;
}

}  // namespace detail

/// Exact one-cut curve for rational t. The endpoint equations are solved
/// numerically by continuation from the saddle, then every candidate
/// rational reconstruction is verified exactly.
inline SpectralCurve one_cut_curve(const OneMatrixModel& m) {
  if (!std::holds_alternative<Scalar>(m.t)) throw PreconditionError("one_cut_curve: exact mode needs a rational t");
  Scalar t = std::get<Scalar>(m.t);
  t.canonicalize();
  if (is_zero(t)) throw PreconditionError("one_cut_curve: t must be nonzero");
  const ZhukovskyCoefficients zc = zhukovsky_coefficients(m.V);
  const MPoly F1a = zc.F1.partial(0), F1g = zc.F1.partial(1), F2a = zc.F2.partial(0), F2g = zc.F2.partial(1);

  long double a = detail::choose_saddle(m), g = 0;
  const long double tt = detail::to_ld(t);
  auto newton = [&](long double target, int iters) {
    for (int it = 0; it < iters; ++it) {
      const long double r1 = detail::eval_ld(zc.F1, a, g), r2 = detail::eval_ld(zc.F2, a, g) - target;
      const long double j11 = detail::eval_ld(F1a, a, g), j12 = detail::eval_ld(F1g, a, g);
      const long double j21 = detail::eval_ld(F2a, a, g), j22 = detail::eval_ld(F2g, a, g);
      const long double det = j11 * j22 - j12 * j21;
      if (std::abs(det) < 1e-300L || !std::isfinite(det)) throw ComputationError("one_cut_curve: singular endpoint equations (multi-cut or degenerate potential?)");
      a -= (j22 * r1 - j12 * r2) / det;
      g -= (-j21 * r1 + j11 * r2) / det;
    }
  };
  const int steps = 400;
  for (int s = 1; s <= steps; ++s) newton(tt * s / steps, 8);
  newton(tt, 30);
  if (!std::isfinite(a) || !std::isfinite(g) || std::abs(detail::eval_ld(zc.F2, a, g) - tt) > 1e-9L * (1 + std::abs(tt)) ||
      std::abs(detail::eval_ld(zc.F1, a, g)) > 1e-9L)
    throw ComputationError("one_cut_curve: endpoint equations did not converge (normalization conditions inconsistent: multi-cut?)");

  std::optional<std::pair<Scalar, Scalar>> sol;
  for (const Scalar& ca : rational_candidates(a))
    for (const Scalar& cg : rational_candidates(g)) {
      if (sol) break;
      if (is_zero(zc.F1.evaluate({ca, cg})) && zc.F2.evaluate({ca, cg}) == t) sol = {ca, cg};
    }
  if (!sol)
    throw ComputationError("one_cut_curve: no rational solution of the endpoint equations (alpha ~ " + std::to_string(static_cast<double>(a)) +
                           ", gamma^2 ~ " + std::to_string(static_cast<double>(g)) + ")");
  const auto [alpha, g2] = *sol;
  Scalar gamma;
  if (!rational_sqrt(g2, gamma) || is_zero(gamma))
    throw ComputationError("one_cut_curve: gamma^2 = " + to_string(g2) + " is not a rational square; rescale the model");

  const int d = m.V.derivative().degree();
  std::vector<Scalar> ynum(static_cast<std::size_t>(d) + 1, Scalar(0));  // y = sum_k u_k z^{-k} = (sum u_k z^{d-k}) / z^d
  for (int k = 1; k <= d; ++k) ynum[static_cast<std::size_t>(d - k)] = toprec::pow(gamma, k) * zc.U[static_cast<std::size_t>(k)].evaluate({alpha, g2});
  CurveSpec spec;
  spec.x = RationalFunction(Poly({gamma, alpha, gamma}), Poly::monomial(1, 1));
  spec.y = RationalFunction(Poly(ynum), Poly::monomial(1, d));
  spec.sigma = RationalFunction(Poly::constant(1), Poly::monomial(1, 1));
  spec.physical_pole = Point::infinity();
  spec.t = t;
  return SpectralCurve::validate(spec);
}

/// Series-mode output: endpoint parameters as power series in s with t = s^m.
struct OneCutSeries {
  SeriesSpec spec;
  TruncatedSeries alpha;
  TruncatedSeries g2;
  std::optional<TruncatedSeries> gamma;  // present when sqrt(g2) is a series in s
  std::vector<TruncatedSeries> y_coefficients;  // u_k, k = 1..d (with gamma)
  int newton_iterations = 0;
};

namespace detail {

inline TruncatedSeries eval_series(const MPoly& p, const TruncatedSeries& a, const TruncatedSeries& g) {
  const std::string& s = a.parameter();
  const int K = std::min(a.order(), g.order());
  return p.evaluate_in<TruncatedSeries>({a, g}, TruncatedSeries::constant(s, 1, K),
                                        [&](const Scalar& q) { return TruncatedSeries::constant(s, q, K); });
}

}  // namespace detail

inline OneCutSeries one_cut_series(const OneMatrixModel& m) {
  if (!std::holds_alternative<SeriesSpec>(m.t)) throw PreconditionError("one_cut_series: series mode needs a series specification");
  const SeriesSpec sp = std::get<SeriesSpec>(m.t);
  if (sp.power < 1 || sp.order < sp.power) throw PreconditionError("one_cut_series: need power >= 1 and order >= power");
  const ZhukovskyCoefficients zc = zhukovsky_coefficients(m.V);
  const Scalar xi = detail::exact_saddle(m);
  const Scalar j11 = zc.F1.partial(0).evaluate({xi, 0}), j12 = zc.F1.partial(1).evaluate({xi, 0});
  const Scalar j21 = zc.F2.partial(0).evaluate({xi, 0}), j22 = zc.F2.partial(1).evaluate({xi, 0});
  const Scalar det = j11 * j22 - j12 * j21;
  if (is_zero(det)) throw ComputationError("one_cut_series: degenerate saddle (singular Jacobian)");

  const int K = sp.order;
  TruncatedSeries a = TruncatedSeries::constant(sp.param, xi, K), g = TruncatedSeries::constant(sp.param, 0, K);
  const TruncatedSeries target = TruncatedSeries::monomial(sp.param, 1, sp.power, K);
  int it = 0;
  for (;; ++it) {
    const TruncatedSeries r1 = detail::eval_series(zc.F1, a, g), r2 = detail::eval_series(zc.F2, a, g) - target;
    if (r1.valuation() > K && r2.valuation() > K) break;
    if (it > K + 2) throw ComputationError("one_cut_series: Newton iteration not contracting (check the substitution t = s^m)");
    a = a - (1 / det) * (j22 * r1 - j12 * r2);
    g = g - (1 / det) * (j11 * r2 - j21 * r1);
  }
  OneCutSeries out{sp, a, g, std::nullopt, {}, it};
  const int v = g.valuation();
  if (v <= K && v % 2 == 0) {
    try {
      out.gamma = g.shift_down(v).sqrt().shift_up(v / 2).with_order(K - v / 2);
    } catch (const ComputationError&) {
    }
  }
  if (out.gamma) {
    const TruncatedSeries gam = *out.gamma;
    const TruncatedSeries aa = a.with_order(gam.order()), gg = g.with_order(gam.order());
    for (std::size_t k = 1; k < zc.U.size(); ++k)
      out.y_coefficients.push_back(gam.pow(static_cast<int>(k)) * detail::eval_series(zc.U[k], aa, gg));
  }
  return out;
}

/// Planar moments <Tr M^j>^(0) (in the W_1^(0) normalization) of the series
/// curve: coefficient of z^{-1} in x^j y x'.
inline std::vector<TruncatedSeries> planar_moments(const OneCutSeries& c, int jmax) {
  if (!c.gamma) throw ComputationError("planar_moments: gamma is not a power series in the chosen parameter");
  const TruncatedSeries& gam = *c.gamma;
  const int K = gam.order();
  const std::string& s = gam.parameter();
  using LP = std::map<int, TruncatedSeries>;
  auto mul = [&](const LP& p, const LP& q) {
    LP r;
    for (const auto& [i, a] : p)
      for (const auto& [j, b] : q) {
        auto it = r.find(i + j);
        if (it == r.end()) r.emplace(i + j, a * b);
        else it->second = it->second + a * b;
      }
    return r;
  };
  const LP x{{-1, gam}, {0, c.alpha.with_order(K)}, {1, gam}};
  LP yx;  // y x'
  {
    LP y;
    for (std::size_t k = 0; k < c.y_coefficients.size(); ++k) y.emplace(-static_cast<int>(k) - 1, c.y_coefficients[k]);
    yx = mul(y, LP{{0, gam}, {-2, -gam}});
  }
  std::vector<TruncatedSeries> out;
  LP cur = yx;
  for (int j = 0; j <= jmax; ++j) {
    auto it = cur.find(-1);
    out.push_back(it == cur.end() ? TruncatedSeries::constant(s, 0, K) : it->second);
    cur = mul(cur, x);
  }
  return out;
}

}  // namespace toprec
