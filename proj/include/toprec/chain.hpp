#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/multivariate.hpp"
#include "toprec/polynomial.hpp"
#include "toprec/spectral_curve.hpp"

namespace toprec {

/// Chain of m matrices M_1 - M_2 - ... - M_m - Lambda.
/// couplings[k-1] = c_{k,k+1}; a chain of length m may list m-1 couplings,
/// in which case c_{m,m+1} = 1.
struct ChainModel {
  std::vector<Poly> potentials;
  std::vector<Scalar> couplings;
  std::vector<Scalar> lambdas{Scalar(0)};
  std::vector<Scalar> weights{Scalar(1)};
  Scalar t = 1;

  int m() const { return static_cast<int>(potentials.size()); }

  /// c_{k,k+1} for k = 1..m; c_{0,1} = 0.
  Scalar coupling(int k) const {
    if (k == 0) return 0;
    if (k < 1 || k > m()) throw PreconditionError("ChainModel: coupling index " + std::to_string(k) + " out of range");
    if (k - 1 < static_cast<int>(couplings.size())) return couplings[static_cast<std::size_t>(k - 1)];
    return 1;
  }

  /// S(x) = prod (x - lambda_i).
  Poly minimal_polynomial() const {
    Poly s = Poly::constant(1);
    for (const auto& l : lambdas) s = s * Poly::linear_factor(l);
    return s;
  }

  void validate() const {
    if (m() < 1) throw PreconditionError("ChainModel: need at least one potential");
    if (static_cast<int>(couplings.size()) < m() - 1 || static_cast<int>(couplings.size()) > m())
      throw PreconditionError("ChainModel: expected m-1 or m couplings");
    for (const auto& p : potentials)
      if (p.derivative().degree() < 1) throw PreconditionError("ChainModel: every potential needs deg V' >= 1");
    if (lambdas.empty()) throw PreconditionError("ChainModel: at least one external eigenvalue");
    if (!weights.empty() && weights.size() != lambdas.size()) throw PreconditionError("ChainModel: one weight per external eigenvalue");
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      for (std::size_t j = i + 1; j < lambdas.size(); ++j)
        if (lambdas[i] == lambdas[j]) throw PreconditionError("ChainModel: external eigenvalues must be distinct");
  }
};

/// Tridiagonal determinant f_{i,j}(x_i..x_j) as a polynomial in x_1..x_m
/// (variable k-1 is x_k). f_{i,i-1} = 1, f_{i,j} = 0 for j < i-1.
/// Expanded over the permutations that survive in a tridiagonal matrix:
/// products of disjoint adjacent transpositions.
inline MPoly f_chain_polynomial(const ChainModel& model, int i, int j) {
  const int m = model.m();
  if (i < 1 || i > m + 1 || j > m) throw PreconditionError("f_chain_polynomial: index out of range");
  if (j < i - 1) return MPoly(m);
  if (j == i - 1) return MPoly::constant(m, 1);
  std::vector<MPoly> diag, pair;
  for (int k = i; k <= j; ++k) diag.push_back(compose(model.potentials[static_cast<std::size_t>(k - 1)].derivative(), MPoly::variable(m, k - 1)));
  for (int k = i; k < j; ++k) {
    const Scalar c = model.coupling(k);
    pair.push_back((-(c * c)) * (MPoly::variable(m, k - 1) * MPoly::variable(m, k)));
  }
  const int n = j - i + 1;
  MPoly total(m);
  // Enumerate matchings of the path 0..n-1 as bitmasks of pair starts.
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    if (mask & (mask >> 1)) continue;
    MPoly term = MPoly::constant(m, 1);
    for (int k = 0; k < n;) {
      if (k < n - 1 && (mask >> k & 1u)) {
        term = term * pair[static_cast<std::size_t>(k)];
        k += 2;
      } else {
        term = term * diag[static_cast<std::size_t>(k)];
        k += 1;
      }
    }
    total += term;
  }
  return total;
}

/// x_hat_i(x_1, x_2) from c_{i,i+1} x_hat_{i+1} = V'_i(x_hat_i) - c_{i-1,i} x_hat_{i-1}.
/// Polynomials in two variables (0 -> x_1, 1 -> x_2); computed once per index.
class HatXTable {
 public:
  explicit HatXTable(ChainModel model) : model_(std::move(model)) {
    model_.validate();
    table_.push_back(MPoly::variable(2, 0));
    table_.push_back(MPoly::variable(2, 1));
  }

  const MPoly& at(int i) {
    if (i < 1 || i > model_.m() + 1) throw PreconditionError("hat_x_sequence: index out of range");
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<int>(table_.size()) < i) {
      const int k = static_cast<int>(table_.size());  // computing x_hat_{k+1} from row k
      const Scalar c = model_.coupling(k);
      if (is_zero(c)) throw PreconditionError("hat_x_sequence: coupling c_{" + std::to_string(k) + "," + std::to_string(k + 1) + "} vanishes");
      MPoly next = compose(model_.potentials[static_cast<std::size_t>(k - 1)].derivative(), table_[static_cast<std::size_t>(k - 1)]);
      if (k >= 2) next -= model_.coupling(k - 1) * table_[static_cast<std::size_t>(k - 2)];
      table_.push_back((1 / c) * next);
    }
    return table_[static_cast<std::size_t>(i - 1)];
  }

  const ChainModel& model() const { return model_; }

 private:
  ChainModel model_;
  std::mutex mu_;
  std::vector<MPoly> table_;
};

inline MPoly hat_x_sequence(const ChainModel& model, int i) {
  HatXTable table(model);
  return table.at(i);
}

struct SaddleCount {
  int degree = 0;
  int expected = 0;
  Poly polynomial;  // in xi_1
};

/// Eliminates xi_2..xi_{m+1}: xi_2 = V'_1(xi_1)/c_{1,2}, xi_{k} = x_hat_k(xi_1, xi_2),
/// and the external condition S(xi_{m+1}) = 0.
inline SaddleCount saddle_count(const ChainModel& model) {
  model.validate();
  HatXTable table(model);
  const Scalar c12 = model.coupling(1);
  if (is_zero(c12)) throw PreconditionError("saddle_count: c_{1,2} vanishes");
  const Poly xi1 = Poly::identity();
  const Poly xi2 = (1 / c12) * model.potentials[0].derivative();
  const MPoly& last = table.at(model.m() + 1);
  const Poly hat = last.evaluate_in<Poly>({xi1, xi2}, Poly::constant(1), [](const Scalar& q) { return Poly::constant(q); });
  SaddleCount out;
  out.polynomial = model.minimal_polynomial().compose(hat);
  out.degree = out.polynomial.degree();
  out.expected = static_cast<int>(model.lambdas.size());
  for (const auto& v : model.potentials) out.expected *= v.derivative().degree();
  if (out.degree != out.expected)
    throw ComputationError("saddle_count: degenerate elimination, degree " + std::to_string(out.degree) + " instead of " +
                           std::to_string(out.expected));
  return out;
}

/// Gaussian chain V_k = a_k x^2/2 with Lambda = 0, integrated from the far end:
/// A_m = a_m, A_k = a_k - c_{k,k+1}^2 / A_{k+1}. The M_1 marginal is Gaussian
/// with quadratic coefficient A_1, hence x = gamma (z + 1/z), y = A_1 gamma / z,
/// gamma^2 = t / A_1.
struct GaussianChainCurve {
  Scalar A1;
  Scalar gamma2;
  std::optional<Scalar> gamma;  // when gamma^2 is a rational square

  /// Planar moments <Tr M_1^j>^(0) for j = 0..jmax: t C_{j/2} gamma^j for even j.
  std::vector<Scalar> planar_moments(int jmax) const {
    std::vector<Scalar> out;
    const Scalar t = A1 * gamma2;
    for (int j = 0; j <= jmax; ++j) {
      if (j % 2) {
        out.push_back(0);
        continue;
      }
      const int k = j / 2;
      out.push_back(t * binomial(2 * k, k) / (k + 1) * toprec::pow(gamma2, k));
    }
    return out;
  }

  SpectralCurve to_spectral_curve() const {
    if (!gamma)
      throw ComputationError("gaussian_chain_curve: gamma^2 = " + to_string(gamma2) +
                             " is not a rational square; the curve has irrational branch points");
    CurveSpec spec;
    spec.x = RationalFunction(Poly({*gamma, 0, *gamma}), Poly::monomial(1, 1));
    spec.y = RationalFunction(Poly::constant(A1 * *gamma), Poly::monomial(1, 1));
    spec.sigma = RationalFunction(Poly::constant(1), Poly::monomial(1, 1));
    spec.physical_pole = Point::infinity();
    spec.t = A1 * gamma2;
    return SpectralCurve::validate(spec);
  }
};

inline GaussianChainCurve gaussian_chain_curve(const ChainModel& model) {
  model.validate();
  if (model.lambdas.size() != 1 || !is_zero(model.lambdas[0]))
    throw PreconditionError("gaussian_chain_curve: only Lambda = 0 is supported");
  if (is_zero(model.t)) throw PreconditionError("gaussian_chain_curve: t must be nonzero");
  std::vector<Scalar> a;
  for (const auto& v : model.potentials) {
    if (v.degree() != 2 || !is_zero(v.coefficient(1)))
      throw PreconditionError("gaussian_chain_curve: potentials must be a x^2/2 (+ constant)");
    a.push_back(2 * v.coefficient(2));
  }
  const int m = model.m();
  // Only the couplings inside the chain matter; M_m couples to Lambda = 0.
  Scalar A = a[static_cast<std::size_t>(m - 1)];
  for (int k = m - 1; k >= 1; --k) {
    if (is_zero(A)) throw ComputationError("gaussian_chain_curve: vanishing effective quadratic coefficient at M_" + std::to_string(k + 1));
    const Scalar c = model.coupling(k);
    A = a[static_cast<std::size_t>(k - 1)] - c * c / A;
  }
  if (is_zero(A)) throw ComputationError("gaussian_chain_curve: vanishing effective quadratic coefficient at M_1");
  GaussianChainCurve out{A, model.t / A, std::nullopt};
  Scalar g;
  if (rational_sqrt(out.gamma2, g)) out.gamma = g;
  return out;
}

}  // namespace toprec
