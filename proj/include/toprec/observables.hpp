#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/laurent_series.hpp"
#include "toprec/multidifferential.hpp"
#include "toprec/spectral_curve.hpp"

namespace toprec {

/// Coefficients of prod_i x_i^{-(k_i+1)} of W_n^(h), for 0 <= k_i <= orders[i].
struct Expansion {
  int h = 0;
  int n = 1;
  std::vector<int> orders;
  std::map<std::vector<int>, Scalar> coefficients;

  Scalar at(const std::vector<int>& k) const {
    auto it = coefficients.find(k);
    if (it == coefficients.end()) throw PreconditionError("Expansion: index outside the computed range");
    return it->second;
  }
};

namespace detail {

/// -u^2 w'(u) F(w(u)) where F(w) dw = (z - b)^{-k} dz in the chart w at the
/// physical pole; returned through u^{top}.
inline LaurentSeries slot_series_in_u(const SpectralCurve& curve, const Scalar& b, int k, int top) {
  const Point& p = curve.physical_pole();
  for (int ord = top + 4;; ord += 4) {
    const LaurentSeries w = inverse_x_at_pole(curve, ord);
    const LaurentSeries dw = w.derivative();
    const RationalFunction g = RationalFunction::power_of_linear(b, -k);
    LaurentSeries f = laurent_expand(g, p, ord);
    if (p.infinite) f = f * LaurentSeries::monomial(p, -1, -2);  // dz = -dw / w^2
    const LaurentSeries composed = f.compose(w, ord);
    const LaurentSeries s = (LaurentSeries::monomial(Point::infinity(), -1, 2) * dw * composed).truncated(top);
    if (s.truncation_order() >= top) return s;
    if (ord > top + 64) throw ComputationError("expand_observable: could not reach the requested order");
  }
}

/// Dense bivariate series, graded: g[d][i] is the coefficient of u1^i u2^(d-i).
using Graded = std::vector<std::vector<Scalar>>;

inline Graded graded_zero(int D) {
  Graded g(static_cast<std::size_t>(D) + 1);
  for (int d = 0; d <= D; ++d) g[static_cast<std::size_t>(d)].assign(static_cast<std::size_t>(d) + 1, Scalar(0));
  return g;
}

inline Graded graded_mul(const Graded& a, const Graded& b, int D) {
  Graded r = graded_zero(D);
  for (int da = 0; da <= D && da < static_cast<int>(a.size()); ++da)
    for (int db = 0; da + db <= D && db < static_cast<int>(b.size()); ++db)
      for (int i = 0; i <= da; ++i) {
        const Scalar& ca = a[static_cast<std::size_t>(da)][static_cast<std::size_t>(i)];
        if (is_zero(ca)) continue;
        for (int j = 0; j <= db; ++j)
          r[static_cast<std::size_t>(da + db)][static_cast<std::size_t>(i + j)] += ca * b[static_cast<std::size_t>(db)][static_cast<std::size_t>(j)];
      }
  return r;
}

inline Graded graded_inverse(const Graded& a, int D) {
  const Scalar a0 = a[0][0];
  if (is_zero(a0)) throw ComputationError("bivariate series not invertible");
  Graded r = graded_zero(D);
  r[0][0] = 1 / a0;
  for (int d = 1; d <= D; ++d) {
    std::vector<Scalar> acc(static_cast<std::size_t>(d) + 1, Scalar(0));
    for (int da = 1; da <= d && da < static_cast<int>(a.size()); ++da)
      for (int i = 0; i <= da; ++i) {
        const Scalar& ca = a[static_cast<std::size_t>(da)][static_cast<std::size_t>(i)];
        if (is_zero(ca)) continue;
        for (int j = 0; j <= d - da; ++j) acc[static_cast<std::size_t>(i + j)] += ca * r[static_cast<std::size_t>(d - da)][static_cast<std::size_t>(j)];
      }
    for (int i = 0; i <= d; ++i) r[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] = -acc[static_cast<std::size_t>(i)] / a0;
  }
  return r;
}

/// Exact division of each homogeneous component by (u1 - u2).
inline Graded graded_divide_by_difference(const Graded& a) {
  Graded r(a.size() > 0 ? a.size() - 1 : 0);
  if (!is_zero(a[0][0])) throw ComputationError("bivariate division by (u1 - u2) leaves a remainder");
  for (std::size_t d = 1; d < a.size(); ++d) {
    // a_d = (u1 - u2) q_{d-1}; q_j = coefficient of u1^j u2^(d-1-j).
    const auto& c = a[d];
    std::vector<Scalar> q(d, Scalar(0));
    Scalar prev = 0;
    for (std::size_t i = 0; i < d; ++i) {
      q[i] = prev - c[i];  // c_i = q_{i-1} - q_i
      prev = q[i];
    }
    if (q[d - 1] != c[d]) throw ComputationError("bivariate division by (u1 - u2) leaves a remainder");
    r[d - 1] = std::move(q);
  }
  return r;
}

}  // namespace detail

/// Expansion of W_n^(h) at the physical pole in 1/x_i.
inline Expansion expand_observable(const SpectralCurve& curve, const Multidifferential& omega, std::vector<int> orders) {
  const int n = omega.n();
  if (orders.size() == 1 && n > 1) orders.assign(static_cast<std::size_t>(n), orders[0]);
  if (static_cast<int>(orders.size()) != n) throw PreconditionError("expand_observable: one order per variable required");
  for (int k : orders)
    if (k < 0) throw PreconditionError("expand_observable: negative order");
  Expansion out{omega.h(), n, orders, {}};

  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  auto for_each_index = [&](auto&& fn) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      fn(idx);
      int i = n - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == orders[static_cast<std::size_t>(i)]) idx[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
    }
  };

  if (omega.kind() == DiffKind::Ydx) {
    const PoleExpansion pe = ydx_expansion_at_pole(curve, orders[0] + 1);
    for (int k = 0; k <= orders[0]; ++k) out.coefficients[{k}] = pe.y_series.coefficient(k + 1);
    return out;
  }

  if (omega.kind() == DiffKind::Bergman) {
    // W = u1^2 u2^2 [w'(u1) w'(u2) - Q^2] / ((u1 - u2)^2 Q^2), with
    // w(u1) - w(u2) = (u1 - u2) Q(u1, u2).
    const int D = orders[0] + orders[1] + 2;
    const LaurentSeries w = inverse_x_at_pole(curve, D + 2);
    const LaurentSeries dw = w.derivative();
    detail::Graded Q = detail::graded_zero(D), W1W2 = detail::graded_zero(D);
    for (int j = 1; j <= D + 1; ++j) {
      const Scalar bj = w.coefficient(j);
      if (is_zero(bj)) continue;
      for (int i = 0; i < j; ++i) Q[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)] += bj;
    }
    for (int i = 0; i <= D; ++i)
      for (int j = 0; i + j <= D; ++j) W1W2[static_cast<std::size_t>(i + j)][static_cast<std::size_t>(i)] = dw.coefficient(i) * dw.coefficient(j);
    detail::Graded num = detail::graded_mul(Q, Q, D);
    for (int d = 0; d <= D; ++d)
      for (int i = 0; i <= d; ++i) num[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] = W1W2[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] - num[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
    detail::Graded q = detail::graded_divide_by_difference(detail::graded_divide_by_difference(num));
    const detail::Graded invQ = detail::graded_inverse(Q, D);
    const detail::Graded core = detail::graded_mul(q, detail::graded_mul(invQ, invQ, D), D);
    for_each_index([&](const std::vector<int>& k) {
      const int i = k[0] - 1, j = k[1] - 1;  // coefficient of u1^{k1+1} u2^{k2+1} = core[u1^{k1-1} u2^{k2-1}]
      Scalar c = 0;
      if (i >= 0 && j >= 0 && i + j < static_cast<int>(core.size())) c = core[static_cast<std::size_t>(i + j)][static_cast<std::size_t>(i)];
      out.coefficients[k] = c;
    });
    return out;
  }

  int top = 0;
  for (int k : orders) top = std::max(top, k + 1);
  std::map<PoleSlot, LaurentSeries> slot;
  for (const auto& [key, c] : omega.terms())
    for (const auto& s : key)
      if (!slot.count(s)) slot.emplace(s, detail::slot_series_in_u(curve, omega.branch_points()[static_cast<std::size_t>(s.branch)], s.order, top));
  for_each_index([&](const std::vector<int>& k) { out.coefficients[k] = 0; });
  for (const auto& [key, c] : omega.terms()) {
    std::vector<std::vector<Scalar>> f(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const LaurentSeries& s = slot.at(key[static_cast<std::size_t>(i)]);
      for (int k = 0; k <= orders[static_cast<std::size_t>(i)]; ++k) f[static_cast<std::size_t>(i)].push_back(s.coefficient(k + 1));
    }
    for_each_index([&](const std::vector<int>& k) {
      Scalar t = c;
      for (int i = 0; i < n && !is_zero(t); ++i) t *= f[static_cast<std::size_t>(i)][static_cast<std::size_t>(k[static_cast<std::size_t>(i)])];
      if (!is_zero(t)) out.coefficients[k] += t;
    });
  }
  return out;
}

}  // namespace toprec
