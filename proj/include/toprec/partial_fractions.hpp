#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/laurent_series.hpp"
#include "toprec/polynomial.hpp"
#include "toprec/rational_function.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

/// f = sum over (pole a, order k) of c_{a,k} / (z - a)^k.
class PoleDecomposition {
 public:
  PoleDecomposition() = default;
  explicit PoleDecomposition(std::map<std::pair<Scalar, int>, Scalar> terms) : terms_(std::move(terms)) {
    std::erase_if(terms_, [](const auto& kv) { return is_zero(kv.second); });
  }

  const std::map<std::pair<Scalar, int>, Scalar>& terms() const { return terms_; }

  Scalar coefficient(const Scalar& pole, int order) const {
    auto it = terms_.find({pole, order});
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  RationalFunction recombine() const {
    RationalFunction acc;
    for (const auto& [key, c] : terms_) acc += c * RationalFunction::power_of_linear(key.first, -key.second);
    return acc;
  }

 private:
  std::map<std::pair<Scalar, int>, Scalar> terms_;
};

/// Multiplicity of `a` as a root of p (p nonzero).
inline int root_multiplicity(const Poly& p, const Scalar& a) { return p.taylor_shift(a).valuation(); }

inline PoleDecomposition partial_fractions(const RationalFunction& f, const std::vector<Scalar>& poles) {
  if (f.is_zero()) return {};
  if (f.num().degree() >= f.den().degree())
    throw PreconditionError("partial_fractions: polynomial part nonzero (deg num >= deg den)");
  std::vector<Scalar> distinct = poles;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  Poly rest = f.den();
  std::map<std::pair<Scalar, int>, Scalar> terms;
  for (const Scalar& a : distinct) {
    const int mult = root_multiplicity(rest, a);
    if (mult <= 0) continue;
    rest = rest.exact_divide(Poly::linear_factor(a).pow(mult));
    const LaurentSeries s = laurent_expand(f, Point::at(a), -1);
    for (int k = 1; k <= mult; ++k) terms[{a, k}] = s.coefficient(-k);
  }
  if (rest.degree() > 0)
    throw PreconditionError("partial_fractions: denominator has a pole outside the declared list (" + to_string(rest) + ")");
  return PoleDecomposition(std::move(terms));
}

}  // namespace toprec
