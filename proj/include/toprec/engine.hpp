#pragma once

#include <algorithm>
#include <atomic>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "toprec/errors.hpp"
#include "toprec/laurent_series.hpp"
#include "toprec/multidifferential.hpp"
#include "toprec/spectral_curve.hpp"

namespace toprec {

/// Orientation of dS_{z', sigma(z')}(z): +1 means
/// dS = (1/(z - z') - 1/(z - sigma(z'))) dz. Fixed by the Gaussian one-point
/// functions (Catalan numbers at genus 0, the single torus gluing of the
/// square at genus 1).
inline constexpr int kKernelOrientation = +1;

struct EngineOptions {
  bool parallel_branches = true;
};

namespace detail {

/// Laurent series in e = z' - a whose coefficients are tensors in the
/// remaining variables. Coefficients are known through `trunc`.
struct TensorSeries {
  std::map<int, Tensor> c;
  int trunc = 0;

  int lowest() const {
    for (const auto& [p, t] : c)
      if (!t.empty()) return p;
    return trunc + 1;
  }
};

/// A * B with the slots of A placed at positions pa and those of B at pb
/// of an n-slot result.
inline void accumulate_product(TensorSeries& out, const TensorSeries& A, const std::vector<int>& pa, const TensorSeries& B,
                               const std::vector<int>& pb, int n) {
  SlotKey key(static_cast<std::size_t>(n));
  for (const auto& [p, ta] : A.c) {
    for (const auto& [q, tb] : B.c) {
      if (p + q > out.trunc) break;
      Tensor& dest = out.c[p + q];
      for (const auto& [ka, ca] : ta) {
        for (std::size_t r = 0; r < ka.size(); ++r) key[static_cast<std::size_t>(pa[r])] = ka[r];
        for (const auto& [kb, cb] : tb) {
          for (std::size_t r = 0; r < kb.size(); ++r) key[static_cast<std::size_t>(pb[r])] = kb[r];
          add_to(dest, key, ca * cb);
        }
      }
    }
  }
}

/// Per-branch-point workspace for one application of the recursion.
class BranchContext {
 public:
  BranchContext(const SpectralCurve& curve, std::size_t bi, int precision)
      : curve_(curve), bi_(static_cast<int>(bi)), a_(curve.branch_points()[bi]), prec_(precision) {
    const Point pa = Point::at(a_);
    const LaurentSeries sig = laurent_expand(curve.sigma(), pa, prec_ + 1);
    delta_ = (sig - LaurentSeries::monomial(pa, a_, 0)).truncated(prec_ + 1);
    dsigma_ = laurent_expand(curve.sigma().derivative(), pa, prec_);
  }

  const Scalar& a() const { return a_; }
  const LaurentSeries& delta() const { return delta_; }

  /// (z' - a_b)^{-k}, or sigma'(z') (sigma(z') - a_b)^{-k}, in powers of e.
  const LaurentSeries& slot_series(const PoleSlot& s, bool conj) {
    auto key = std::make_tuple(s.branch, s.order, conj);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const Scalar& ab = curve_.branch_points()[static_cast<std::size_t>(s.branch)];
    const Point pa = Point::at(a_);
    LaurentSeries ser;
    if (!conj) {
      if (s.branch == bi_) ser = LaurentSeries::monomial(pa, 1, -s.order).truncated(prec_);
      else ser = laurent_expand(RationalFunction::power_of_linear(ab, -s.order), pa, prec_);
    } else {
      const RationalFunction base = curve_.sigma() - RationalFunction::constant(ab);
      ser = laurent_expand(curve_.sigma().derivative() * base.pow(-s.order), pa, prec_);
    }
    return cache_.emplace(key, std::move(ser)).first->second;
  }

  /// omega(z', rest...) (or omega(sigma z', rest...)) with the first slot
  /// expanded at a.
  TensorSeries first_slot(const Multidifferential& w, bool conj) {
    TensorSeries out;
    out.trunc = prec_;
    if (w.kind() == DiffKind::Bergman) return bergman_slot(conj);
    std::map<PoleSlot, std::vector<std::pair<SlotKey, Scalar>>> groups;
    for (const auto& [key, c] : w.terms()) groups[key[0]].push_back({SlotKey(key.begin() + 1, key.end()), c});
    for (const auto& [slot, items] : groups) {
      const LaurentSeries& s = slot_series(slot, conj);
      for (int p = s.lowest_order(); p <= prec_; ++p) {
        const Scalar sp = s.coefficient(p);
        if (is_zero(sp)) continue;
        Tensor& dest = out.c[p];
        for (const auto& [rest, c] : items) add_to(dest, rest, sp * c);
      }
    }
    return out;
  }

  /// omega(z', sigma z', rest...) with both slots expanded at a.
  TensorSeries first_two_slots(const Multidifferential& w) {
    TensorSeries out;
    out.trunc = prec_;
    if (w.kind() == DiffKind::Bergman) {
      // sigma'(z') / (z' - sigma(z'))^2
      const RationalFunction d = RationalFunction::identity() - curve_.sigma();
      const LaurentSeries s = laurent_expand(curve_.sigma().derivative() * d.pow(-2), Point::at(a_), prec_);
      for (int p = s.lowest_order(); p <= prec_; ++p) add_to(out.c[p], SlotKey{}, s.coefficient(p));
      return out;
    }
    std::map<std::pair<PoleSlot, PoleSlot>, std::vector<std::pair<SlotKey, Scalar>>> groups;
    for (const auto& [key, c] : w.terms()) groups[{key[0], key[1]}].push_back({SlotKey(key.begin() + 2, key.end()), c});
    for (const auto& [slots, items] : groups) {
      const LaurentSeries s = (slot_series(slots.first, false) * slot_series(slots.second, true)).truncated(prec_);
      out.trunc = std::min(out.trunc, s.truncation_order());
      for (int p = s.lowest_order(); p <= s.truncation_order(); ++p) {
        const Scalar sp = s.coefficient(p);
        if (is_zero(sp)) continue;
        Tensor& dest = out.c[p];
        for (const auto& [rest, c] : items) add_to(dest, rest, sp * c);
      }
    }
    return out;
  }

 private:
  /// B(z', z_i) = sum_m (m+1) e^m / (z_i - a)^{m+2}; the conjugate version
  /// replaces e^m by sigma'(z') delta^m.
  TensorSeries bergman_slot(bool conj) {
    TensorSeries out;
    out.trunc = prec_;
    if (!conj) {
      for (int m = 0; m <= prec_; ++m) add_to(out.c[m], SlotKey{PoleSlot{bi_, m + 2}}, Scalar(m + 1));
      return out;
    }
    LaurentSeries dm = dsigma_;
    for (int m = 0; m <= prec_; ++m) {
      for (int p = m; p <= prec_; ++p) add_to(out.c[p], SlotKey{PoleSlot{bi_, m + 2}}, Scalar(m + 1) * dm.coefficient(p));
      dm = (dm * delta_).truncated(prec_);
    }
    return out;
  }

  const SpectralCurve& curve_;
  int bi_;
  Scalar a_;
  int prec_;
  LaurentSeries delta_;
  LaurentSeries dsigma_;
  std::map<std::tuple<int, int, bool>, LaurentSeries> cache_;
};

}  // namespace detail

/// Residue recursion on a validated genus-0 spectral curve, with a
/// thread-safe memo table keyed by (h, n).
class Engine {
 public:
  explicit Engine(SpectralCurve curve, EngineOptions options = {}) : curve_(std::move(curve)), options_(options) {}

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const SpectralCurve& curve() const { return curve_; }

  /// omega_n^(h); each (h, n) is computed once and then shared.
  const Multidifferential& omega(int h, int n) {
    if (h < 0 || n < 1) throw PreconditionError("omega: need h >= 0 and n >= 1");
    std::shared_ptr<Entry> e;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto& slot = memo_[{h, n}];
      if (!slot) slot = std::make_shared<Entry>();
      e = slot;
    }
    std::call_once(e->once, [&] {
      e->value = compute(h, n);
      e->ready = true;
    });
    return e->value;
  }

  /// Seeds the memo table (e.g. from a validated on-disk cache).
  void preload(const Multidifferential& w) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = memo_[{w.h(), w.n()}];
    if (!slot) slot = std::make_shared<Entry>();
    auto e = slot;
    std::call_once(e->once, [&] {
      e->value = w;
      e->ready = true;
    });
  }

  /// All memoized correlators computed so far, sorted by (h, n).
  std::vector<Multidifferential> memoized() {
    std::vector<std::shared_ptr<Entry>> entries;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      for (auto& [k, e] : memo_) entries.push_back(e);
    }
    std::vector<Multidifferential> out;
    for (auto& e : entries)
      if (e->ready.load()) out.push_back(e->value);
    return out;
  }

  /// F^(h) = 1/(2-2h) sum_a Res_{z->a} Phi(z) omega_1^(h)(z), h >= 2.
  Scalar free_energy(int h) {
    if (h < 2) throw PreconditionError("free_energy: the formula requires h >= 2 (got h = " + std::to_string(h) + ")");
    const Multidifferential& w = omega(h, 1);
    const CheckResult rf = check_residue_free(w);
    if (!rf.pass) throw ComputationError("free_energy: omega_1^(" + std::to_string(h) + ") is not residue-free: " + rf.detail);
    Scalar acc = 0;
    for (const auto& [key, c] : w.terms()) acc += c * phi_coefficient(key[0]);
    return acc / (2 - 2 * h);
  }

  /// Right-hand side of the Phi-operator identity:
  /// 1/(2-2h-n) sum_a Res_{z->a} Phi(z) omega_{n+1}^(h)(z, z_1..z_n).
  Multidifferential phi_operator_rhs(int h, int n) {
    if (n < 1 || 2 - 2 * h - n >= 0)
      throw PreconditionError("phi_operator_check: requires n >= 1 and 2-2h-n < 0 (got h = " + std::to_string(h) +
                              ", n = " + std::to_string(n) + ")");
    const Multidifferential& w = omega(h, n + 1);
    Tensor out;
    const Scalar factor = Scalar(1) / (2 - 2 * h - n);
    for (const auto& [key, c] : w.terms()) {
      const Scalar phi = phi_coefficient(key[0]);
      add_to(out, SlotKey(key.begin() + 1, key.end()), factor * c * phi);
    }
    return Multidifferential::tensor(h, n, curve_.branch_points(), std::move(out));
  }

  CheckResult phi_operator_check(int h, int n) {
    const Multidifferential rhs = phi_operator_rhs(h, n);
    const Multidifferential& lhs = omega(h, n);
    Tensor diff = lhs.terms();
    for (const auto& [k, c] : rhs.terms()) add_to(diff, k, -c);
    if (diff.empty()) return {};
    const auto& [key, c] = *diff.begin();
    std::string where;
    for (const auto& s : key)
      where += "(" + to_string(curve_.branch_points()[static_cast<std::size_t>(s.branch)]) + "," + std::to_string(s.order) + ")";
    return {false, std::to_string(diff.size()) + " coefficients differ; first at " + where + ": omega - rhs = " + to_string(c)};
  }

 private:
  struct Entry {
    std::once_flag once;
    std::atomic<bool> ready{false};
    Multidifferential value;
  };

  /// Res_{z->a_b} Phi(z) / (z - a_b)^k = Phi_b[k-1].
  Scalar phi_coefficient(const PoleSlot& s) {
    std::lock_guard<std::mutex> lock(phi_mutex_);
    auto& ser = phi_[s.branch];
    if (!ser || ser->truncation_order() < s.order - 1) {
      const Scalar& a = curve_.branch_points()[static_cast<std::size_t>(s.branch)];
      ser = std::make_shared<LaurentSeries>(primitive_phi_series(curve_, a, std::max(s.order - 1, 8)));
    }
    return ser->coefficient(s.order - 1);
  }

  Multidifferential compute(int h, int n1) {
    if (h == 0 && n1 == 1) return Multidifferential::ydx(curve_.ydx(), curve_.branch_points());
    if (h == 0 && n1 == 2) return Multidifferential::bergman(curve_.branch_points());
    const int n = n1 - 1;  // |J|

    // Lower correlators, materialized before any parallel work.
    std::vector<const Multidifferential*> lower;
    int kmax = 2;
    auto need = [&](int hh, int nn) {
      const Multidifferential& w = omega(hh, nn);
      kmax = std::max(kmax, w.max_order());
      return &w;
    };
    const Multidifferential* top = h >= 1 ? need(h - 1, n + 2) : nullptr;
    std::map<std::pair<int, int>, const Multidifferential*> parts;
    for (int j = 0; j <= h; ++j)
      for (int k = 0; k <= n; ++k) {
        if ((j == 0 && k == 0) || (j == h && k == n)) continue;
        parts[{j, k + 1}] = need(j, k + 1);
        parts[{h - j, n - k + 1}] = need(h - j, n - k + 1);
      }

    const auto& bps = curve_.branch_points();
    std::vector<Tensor> results(bps.size());
    auto run = [&](std::size_t bi) { results[bi] = branch_contribution(bi, h, n, top, parts, kmax); };
    if (options_.parallel_branches && bps.size() > 1) {
      std::vector<std::future<void>> fs;
      for (std::size_t bi = 0; bi < bps.size(); ++bi) fs.push_back(std::async(std::launch::async, run, bi));
      for (auto& f : fs) f.get();
    } else {
      for (std::size_t bi = 0; bi < bps.size(); ++bi) run(bi);
    }
    Tensor total;
    for (auto& t : results)
      for (auto& [k, c] : t) add_to(total, k, c);
    return Multidifferential::tensor(h, n1, bps, std::move(total));
  }

  Tensor branch_contribution(std::size_t bi, int h, int n, const Multidifferential* top,
                             const std::map<std::pair<int, int>, const Multidifferential*>& parts, int kmax) {
    const Scalar& a = curve_.branch_points()[bi];
    const Point pa = Point::at(a);
    const RationalFunction kf = curve_.y_difference() * curve_.dx();
    const int vf = pole_order(RationalFunction::constant(1) / kf, pa);
    const int tb = vf - 2;  // bracket precision needed
    const int prec = tb + 2 * kmax + 2;
    detail::BranchContext ctx(curve_, bi, prec);

    detail::TensorSeries bracket;
    bracket.trunc = tb;
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    if (top) {
      detail::TensorSeries s = ctx.first_two_slots(*top);
      for (auto& [p, t] : s.c)
        if (p <= tb)
          for (auto& [k, c] : t) add_to(bracket.c[p], k, c);
    }
    std::map<std::pair<int, int>, detail::TensorSeries> plain, conj;
    for (const auto& [hk, w] : parts) {
      plain.emplace(hk, ctx.first_slot(*w, false));
      conj.emplace(hk, ctx.first_slot(*w, true));
    }
    // Sum over subsets I of J encoded as bitmasks.
    for (int j = 0; j <= h; ++j)
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> in, out;
        for (int i = 0; i < n; ++i) (mask >> i & 1u ? in : out).push_back(i);
        const int k = static_cast<int>(in.size());
        if ((j == 0 && k == 0) || (j == h && k == n)) continue;
        detail::accumulate_product(bracket, plain.at({j, k + 1}), in, conj.at({h - j, n - k + 1}), out, n);
      }

    int vb = 0;
    for (const auto& [p, t] : bracket.c)
      if (!t.empty()) {
        vb = std::max(0, -p);
        break;
      }

    const LaurentSeries factor = laurent_expand(RationalFunction::constant(1) / kf, pa, std::max(-2 + vb, -vf));
    // P = factor * bracket through e^{-2}.
    std::map<int, Tensor> prod;
    for (int fi = factor.lowest_order(); fi <= factor.truncation_order(); ++fi) {
      const Scalar fc = factor.coefficient(fi);
      if (is_zero(fc)) continue;
      for (const auto& [p, t] : bracket.c) {
        if (fi + p > -2) break;
        Tensor& dest = prod[fi + p];
        for (const auto& [key, c] : t) add_to(dest, key, fc * c);
      }
    }
    const int v = vf + vb;
    const LaurentSeries delta = laurent_expand(curve_.sigma() - RationalFunction::constant(a), pa, std::max(v, 1));
    const LaurentSeries eps = LaurentSeries::monomial(pa, 1, 1);
    Tensor result;
    LaurentSeries em = eps, dm = delta;
    const Scalar half = kKernelOrientation * Scalar(1, 2);
    for (int m = 1; m <= v - 1; ++m) {
      const LaurentSeries Dm = (em - dm).truncated(v);
      for (const auto& [p, t] : prod) {
        const Scalar d = Dm.coefficient(-1 - p);
        if (is_zero(d)) continue;
        for (const auto& [key, c] : t) {
          SlotKey full;
          full.reserve(key.size() + 1);
          full.push_back(PoleSlot{static_cast<int>(bi), m + 1});
          full.insert(full.end(), key.begin(), key.end());
          add_to(result, full, half * c * d);
        }
      }
      em = (em * eps).truncated(v);
      dm = (dm * delta).truncated(v);
    }
    return result;
  }

  SpectralCurve curve_;
  EngineOptions options_;
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::shared_ptr<Entry>> memo_;
  std::mutex phi_mutex_;
  std::map<int, std::shared_ptr<LaurentSeries>> phi_;
};

}  // namespace toprec
