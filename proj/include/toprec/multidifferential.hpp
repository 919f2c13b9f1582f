#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/laurent_series.hpp"
#include "toprec/rational_function.hpp"
#include "toprec/scalar.hpp"

namespace toprec {

/// One factor dz/(z - a_branch)^order of a tensor term.
struct PoleSlot {
  int branch = 0;
  int order = 0;
  friend auto operator<=>(const PoleSlot&, const PoleSlot&) = default;
};

using SlotKey = std::vector<PoleSlot>;
/// sum over keys of coeff * prod_i dz_i / (z_i - a_{key[i].branch})^{key[i].order}.
using Tensor = std::map<SlotKey, Scalar>;

inline void add_to(Tensor& t, const SlotKey& key, const Scalar& c) {
  if (is_zero(c)) return;
  auto [it, inserted] = t.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (is_zero(it->second)) t.erase(it);
  }
}

/// sum_i c_i prod_b (z - a_b)^{-e_ib}, assembled over the common denominator.
inline RationalFunction sum_over_branches(const std::vector<Scalar>& branches, const std::map<std::vector<int>, Scalar>& terms) {
  std::vector<int> top(branches.size(), 0);
  for (const auto& [e, c] : terms)
    for (std::size_t b = 0; b < e.size(); ++b) top[b] = std::max(top[b], e[b]);
  std::vector<std::vector<Poly>> powers(branches.size());
  Poly den = Poly::constant(1);
  for (std::size_t b = 0; b < branches.size(); ++b) {
    powers[b].push_back(Poly::constant(1));
    const Poly lin = Poly::linear_factor(branches[b]);
    for (int k = 1; k <= top[b]; ++k) powers[b].push_back(powers[b].back() * lin);
    den = den * powers[b][static_cast<std::size_t>(top[b])];
  }
  Poly num;
  for (const auto& [e, c] : terms) {
    if (is_zero(c)) continue;
    Poly t = Poly::constant(c);
    for (std::size_t b = 0; b < e.size(); ++b)
      if (top[b] > e[b]) t = t * powers[b][static_cast<std::size_t>(top[b] - e[b])];
    num += t;
  }
  return RationalFunction(num, den);
}

enum class DiffKind { Tensor, Ydx, Bergman };

/// omega_n^(h) on a genus-0 curve. For 2h+n-2 >= 1 a partial-fraction tensor
/// with poles at branch points; omega_1^(0) = y dx and omega_2^(0) = Bergman
/// kernel are tagged base cases.
class Multidifferential {
 public:
  Multidifferential() = default;

  static Multidifferential tensor(int h, int n, std::vector<Scalar> branches, Tensor terms) {
    Multidifferential m;
    m.h_ = h;
    m.n_ = n;
    m.kind_ = DiffKind::Tensor;
    m.branches_ = std::move(branches);
    m.terms_ = std::move(terms);
    return m;
  }
  static Multidifferential ydx(const RationalFunction& density, std::vector<Scalar> branches) {
    Multidifferential m;
    m.h_ = 0;
    m.n_ = 1;
    m.kind_ = DiffKind::Ydx;
    m.branches_ = std::move(branches);
    m.ydx_ = density;
    return m;
  }
  static Multidifferential bergman(std::vector<Scalar> branches) {
    Multidifferential m;
    m.h_ = 0;
    m.n_ = 2;
    m.kind_ = DiffKind::Bergman;
    m.branches_ = std::move(branches);
    return m;
  }

  int h() const { return h_; }
  int n() const { return n_; }
  DiffKind kind() const { return kind_; }
  const std::vector<Scalar>& branch_points() const { return branches_; }
  const Tensor& terms() const { return terms_; }
  const RationalFunction& ydx_density() const { return ydx_; }

  int max_order() const {
    int k = 0;
    for (const auto& [key, c] : terms_)
      for (const auto& s : key) k = std::max(k, s.order);
    return k;
  }

  /// Coefficient of prod dz_i at the point (z_1, ..., z_n).
  Scalar evaluate(const std::vector<Scalar>& z) const {
    if (static_cast<int>(z.size()) != n_) throw PreconditionError("Multidifferential::evaluate: wrong arity");
    switch (kind_) {
      case DiffKind::Ydx:
        return ydx_(z[0]);
      case DiffKind::Bergman: {
        const Scalar d = z[0] - z[1];
        if (is_zero(d)) throw PreconditionError("Bergman kernel evaluated on the diagonal");
        return 1 / (d * d);
      }
      case DiffKind::Tensor:
        break;
    }
    std::vector<std::map<PoleSlot, Scalar>> cache(z.size());
    Scalar acc = 0;
    for (const auto& [key, c] : terms_) {
      Scalar t = c;
      for (std::size_t i = 0; i < key.size(); ++i) {
        auto [it, inserted] = cache[i].try_emplace(key[i]);
        if (inserted) {
          const Scalar d = z[i] - branches_[static_cast<std::size_t>(key[i].branch)];
          if (is_zero(d)) throw PreconditionError("Multidifferential::evaluate at a branch point");
          it->second = toprec::pow(d, -key[i].order);
        }
        t *= it->second;
      }
      acc += t;
    }
    return acc;
  }

  /// The coefficient of dz_1 as a rational function of z_1 with the other
  /// variables fixed at `others`.
  RationalFunction restrict_first(const std::vector<Scalar>& others) const {
    if (static_cast<int>(others.size()) != n_ - 1) throw PreconditionError("restrict_first: wrong arity");
    switch (kind_) {
      case DiffKind::Ydx:
        return ydx_;
      case DiffKind::Bergman:
        return RationalFunction::power_of_linear(others[0], -2);
      case DiffKind::Tensor:
        break;
    }
    std::map<std::vector<int>, Scalar> first;
    for (const auto& [key, c] : terms_) {
      Scalar t = c;
      for (std::size_t i = 1; i < key.size(); ++i)
        t *= toprec::pow(others[i - 1] - branches_[static_cast<std::size_t>(key[i].branch)], -key[i].order);
      std::vector<int> e(branches_.size(), 0);
      e[static_cast<std::size_t>(key[0].branch)] = key[0].order;
      first[e] += t;
    }
    return sum_over_branches(branches_, first);
  }

  friend bool operator==(const Multidifferential& a, const Multidifferential& b) {
    return a.h_ == b.h_ && a.n_ == b.n_ && a.kind_ == b.kind_ && a.branches_ == b.branches_ && a.terms_ == b.terms_ &&
           a.ydx_ == b.ydx_;
  }

 private:
  int h_ = 0;
  int n_ = 1;
  DiffKind kind_ = DiffKind::Tensor;
  std::vector<Scalar> branches_;
  Tensor terms_;
  RationalFunction ydx_;
};

/// Result of a structural check: pass, or the first counterexample.
struct CheckResult {
  bool pass = true;
  std::string detail;
};

/// Exact invariance under every transposition of slots i < j.
inline CheckResult check_symmetry(const Multidifferential& w) {
  if (w.kind() != DiffKind::Tensor) return {};
  const int n = w.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (const auto& [key, c] : w.terms()) {
        SlotKey s = key;
        std::swap(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
        auto it = w.terms().find(s);
        const Scalar other = it == w.terms().end() ? Scalar(0) : it->second;
        if (other != c)
          return {false, "slots " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " are not symmetric (coefficient " +
                             to_string(c) + " vs " + to_string(other) + ")"};
      }
  return {};
}

/// Every slot has zero residue at every branch point.
inline CheckResult check_residue_free(const Multidifferential& w) {
  if (w.kind() != DiffKind::Tensor) return {};
  for (const auto& [key, c] : w.terms())
    for (std::size_t i = 0; i < key.size(); ++i)
      if (key[i].order == 1)
        return {false, "slot " + std::to_string(i + 1) + " has a simple pole at branch point " +
                           to_string(w.branch_points()[static_cast<std::size_t>(key[i].branch)])};
  return {};
}

}  // namespace toprec
