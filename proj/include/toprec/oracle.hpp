#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "toprec/engine.hpp"
#include "toprec/errors.hpp"
#include "toprec/observables.hpp"
#include "toprec/one_matrix.hpp"
#include "toprec/polynomial.hpp"

namespace toprec {

/// Gaussian matrix model with <M_ij M_kl> = (t/N) delta_il delta_jk. With
/// several species, <(M_a)_ij (M_b)_kl> = (t/N) covariance[a][b] delta_il delta_jk.
struct WickModel {
  Scalar t = 1;
  std::vector<std::vector<Scalar>> covariance;  // empty: one species, covariance 1
};

/// Moments as Laurent polynomials in N: power of N -> coefficient.
struct MomentResult {
  std::vector<int> powers;
  std::map<int, Scalar> full;
  std::map<int, Scalar> connected;

  /// Coefficient of N^{2-2h-n} in the connected moment.
  Scalar connected_genus(int h) const {
    const int p = 2 - 2 * h - static_cast<int>(powers.size());
    auto it = connected.find(p);
    return it == connected.end() ? Scalar(0) : it->second;
  }
  Scalar full_power(int p) const {
    auto it = full.find(p);
    return it == full.end() ? Scalar(0) : it->second;
  }
};

namespace detail {

inline constexpr int kMaxHalfEdges = 20;

/// Fatgraph with traces as vertices: half-edges of trace i are consecutive,
/// rotation goes to the next half-edge of the same trace.
struct Fatgraph {
  std::vector<int> next;   // rotation
  std::vector<int> trace;  // owning trace per half-edge
  std::vector<int> species;
  int traces = 0;
};

inline Fatgraph make_fatgraph(const std::vector<std::vector<int>>& words) {
  Fatgraph g;
  g.traces = static_cast<int>(words.size());
  for (int i = 0; i < g.traces; ++i) {
    const auto& w = words[static_cast<std::size_t>(i)];
    if (w.empty()) throw PreconditionError("gaussian_mixed_moment: trace powers must be >= 1");
    const int base = static_cast<int>(g.next.size());
    const int k = static_cast<int>(w.size());
    for (int j = 0; j < k; ++j) {
      g.next.push_back(base + (j + 1) % k);
      g.trace.push_back(i);
      g.species.push_back(w[static_cast<std::size_t>(j)]);
    }
  }
  return g;
}

/// Per-matching tally: weight keyed by (connected?, faces).
struct MatchingTally {
  std::map<int, Scalar> all, connected;  // faces -> summed propagator weight
};

inline int find_root(std::vector<int>& p, int a) {
  while (p[static_cast<std::size_t>(a)] != a) a = p[static_cast<std::size_t>(a)] = p[static_cast<std::size_t>(p[static_cast<std::size_t>(a)])];
  return a;
}

/// Enumerates all perfect matchings whose first pair is (0, first).
inline MatchingTally enumerate_matchings(const Fatgraph& g, int first, const std::vector<std::vector<Scalar>>* cov) {
  const int H = static_cast<int>(g.next.size());
  std::vector<int> alpha(static_cast<std::size_t>(H), -1);
  std::map<int, long long> count_all, count_conn;  // single species fast path
  MatchingTally tally;
  std::vector<char> seen(static_cast<std::size_t>(H));
  std::vector<int> parent(static_cast<std::size_t>(g.traces));

  auto record = [&]() {
    std::fill(seen.begin(), seen.end(), 0);
    int faces = 0;
    for (int s = 0; s < H; ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      ++faces;
      for (int h = s; !seen[static_cast<std::size_t>(h)]; h = g.next[static_cast<std::size_t>(alpha[static_cast<std::size_t>(h)])]) seen[static_cast<std::size_t>(h)] = 1;
    }
    std::iota(parent.begin(), parent.end(), 0);
    int comps = g.traces;
    for (int h = 0; h < H; ++h) {
      const int a = find_root(parent, g.trace[static_cast<std::size_t>(h)]);
      const int b = find_root(parent, g.trace[static_cast<std::size_t>(alpha[static_cast<std::size_t>(h)])]);
      if (a != b) parent[static_cast<std::size_t>(a)] = b, --comps;
    }
    if (!cov) {
      ++count_all[faces];
      if (comps == 1) ++count_conn[faces];
      return;
    }
    Scalar w = 1;
    for (int h = 0; h < H; ++h)
      if (h < alpha[static_cast<std::size_t>(h)])
        w *= (*cov)[static_cast<std::size_t>(g.species[static_cast<std::size_t>(h)])][static_cast<std::size_t>(g.species[static_cast<std::size_t>(alpha[static_cast<std::size_t>(h)])])];
    if (is_zero(w)) return;
    tally.all[faces] += w;
    if (comps == 1) tally.connected[faces] += w;
  };

  auto rec = [&](auto&& self) -> void {
    int i = 0;
    while (i < H && alpha[static_cast<std::size_t>(i)] >= 0) ++i;
    if (i == H) {
      record();
      return;
    }
    for (int j = i + 1; j < H; ++j) {
      if (alpha[static_cast<std::size_t>(j)] >= 0) continue;
      alpha[static_cast<std::size_t>(i)] = j;
      alpha[static_cast<std::size_t>(j)] = i;
      self(self);
      alpha[static_cast<std::size_t>(i)] = alpha[static_cast<std::size_t>(j)] = -1;
    }
  };
  alpha[0] = first;
  alpha[static_cast<std::size_t>(first)] = 0;
  rec(rec);
  if (!cov) {
    for (const auto& [f, c] : count_all) tally.all[f] = Scalar(static_cast<long>(c));
    for (const auto& [f, c] : count_conn) tally.connected[f] = Scalar(static_cast<long>(c));
  }
  return tally;
}

/// Sum over perfect matchings, split across the partner of half-edge 0.
inline MatchingTally tally_matchings(const Fatgraph& g, const std::vector<std::vector<Scalar>>* cov) {
  const int H = static_cast<int>(g.next.size());
  MatchingTally total;
  if (H == 0) {
    total.all[0] = 1;
    if (g.traces <= 1) total.connected[0] = 1;
    return total;
  }
  if (H % 2) return total;
  if (H > kMaxHalfEdges)
    throw PreconditionError("gaussian_mixed_moment: " + std::to_string(H) + " half-edges exceed the enumeration cap of " + std::to_string(kMaxHalfEdges));
  std::vector<std::future<MatchingTally>> parts;
  const bool parallel = H >= 12;
  for (int j = 1; j < H; ++j)
    parts.push_back(std::async(parallel ? std::launch::async : std::launch::deferred, [&g, j, cov] { return enumerate_matchings(g, j, cov); }));
  for (auto& f : parts) {
    const MatchingTally r = f.get();
    for (const auto& [k, v] : r.all) total.all[k] += v;
    for (const auto& [k, v] : r.connected) total.connected[k] += v;
  }
  return total;
}

inline MomentResult to_moment(const std::vector<int>& powers, const MatchingTally& tally, const Scalar& t, int H) {
  // weight (t/N)^E N^F with E = H/2
  const int E = H / 2;
  const Scalar te = toprec::pow(t, E);
  MomentResult r{powers, {}, {}};
  for (const auto& [f, w] : tally.all)
    if (!is_zero(w)) r.full[f - E] += te * w;
  for (const auto& [f, w] : tally.connected)
    if (!is_zero(w)) r.connected[f - E] += te * w;
  return r;
}

}  // namespace detail

/// < prod_i Tr M^{powers_i} > in the Gaussian model, full and connected.
inline MomentResult gaussian_mixed_moment(const WickModel& model, const std::vector<int>& powers) {
  std::vector<std::vector<int>> words;
  for (int k : powers) {
    if (k < 1) throw PreconditionError("gaussian_mixed_moment: trace powers must be >= 1");
    words.emplace_back(static_cast<std::size_t>(k), 0);
  }
  const detail::Fatgraph g = detail::make_fatgraph(words);
  const auto* cov = model.covariance.empty() ? nullptr : &model.covariance;
  return detail::to_moment(powers, detail::tally_matchings(g, cov), model.t, static_cast<int>(g.next.size()));
}

/// Multi-species version: each trace is a word in species indices.
inline MomentResult gaussian_species_moment(const WickModel& model, const std::vector<std::vector<int>>& words) {
  if (model.covariance.empty()) throw PreconditionError("gaussian_species_moment: covariance required");
  for (const auto& w : words)
    for (int s : w)
      if (s < 0 || s >= static_cast<int>(model.covariance.size())) throw PreconditionError("gaussian_species_moment: species index out of range");
  const detail::Fatgraph g = detail::make_fatgraph(words);
  std::vector<int> powers;
  for (const auto& w : words) powers.push_back(static_cast<int>(w.size()));
  return detail::to_moment(powers, detail::tally_matchings(g, &model.covariance), model.t, static_cast<int>(g.next.size()));
}

/// Series in t for the connected correlator <prod Tr M^{k_i}>_c^(h) in the
/// normalization of W_n^(h): key is twice the power of t.
struct CorrelatorSeries {
  int h = 0;
  std::vector<int> powers;
  std::map<int, Scalar> coefficients;
  int complete_through = 0;  // twice the t-power through which the series is exact
  bool finite = false;       // Gaussian: no vertices, exact for every t

  Scalar coefficient(int twice_power) const {
    if (!finite && twice_power > complete_through)
      throw PreconditionError("CorrelatorSeries: coefficient beyond the computed depth");
    auto it = coefficients.find(twice_power);
    return it == coefficients.end() ? Scalar(0) : it->second;
  }

  Scalar value(const Scalar& t) const {
    if (!finite) throw PreconditionError("CorrelatorSeries: only Gaussian correlators evaluate to a number");
    Scalar v = 0;
    for (const auto& [p, c] : coefficients) {
      if (p % 2) throw ComputationError("CorrelatorSeries: half-integer power of t");
      v += c * toprec::pow(t, p / 2);
    }
    return v;
  }
};

inline constexpr int kMaxVertices = 10;

/// Perturbative expansion around V = q x^2 + sum_{j>=3} v_j x^j: every vertex
/// x^j carries -v_j N/t and 1/n_j!, every propagator t/(2qN). depth bounds
/// sum_j n_j (j-2), i.e. twice the extra power of t carried by the vertices.
inline CorrelatorSeries connected_correlator_series(const Poly& V, int h, const std::vector<int>& powers, int depth) {
  if (h < 0 || powers.empty() || depth < 0) throw PreconditionError("connected_correlator_series: need h >= 0, n >= 1, depth >= 0");
  const Scalar q = V.coefficient(2);
  if (is_zero(q)) throw PreconditionError("connected_correlator_series: quadratic part must be nondegenerate");
  if (!is_zero(V.coefficient(1))) throw PreconditionError("connected_correlator_series: V'(0) must vanish");
  std::vector<std::pair<int, Scalar>> vertices;
  for (int j = 3; j <= V.degree(); ++j)
    if (!is_zero(V.coefficient(j))) vertices.emplace_back(j, V.coefficient(j));

  const int n = static_cast<int>(powers.size());
  const int sumk = std::accumulate(powers.begin(), powers.end(), 0);
  CorrelatorSeries out{h, powers, {}, sumk + depth, vertices.empty()};
  // Cap check before any enumeration: the deepest multisets are the largest.
  for (const auto& [j, v] : vertices) {
    const int count = depth / (j - 2);
    const int H = sumk + count * j;
    if (count > kMaxVertices || H > detail::kMaxHalfEdges)
      throw PreconditionError("connected_correlator_series: depth " + std::to_string(depth) + " needs " + std::to_string(count) +
                              " vertices / " + std::to_string(H) + " half-edges, beyond the enumeration caps");
  }
  // Every vertex-degree multiset with sum n_j (j - 2) <= depth.
  std::vector<int> mult(vertices.size(), 0);
  auto visit = [&](auto&& self, std::size_t idx, int used, int count) -> void {
    if (idx == vertices.size()) {
      const int H = sumk + [&] {
        int s = 0;
        for (std::size_t i = 0; i < vertices.size(); ++i) s += mult[i] * vertices[i].first;
        return s;
      }();
      if (H % 2) return;
      if (count > kMaxVertices || H > detail::kMaxHalfEdges)
        throw PreconditionError("connected_correlator_series: depth " + std::to_string(depth) + " needs " + std::to_string(count) +
                                " vertices / " + std::to_string(H) + " half-edges, beyond the enumeration caps");
      std::vector<std::vector<int>> words;
      for (int k : powers) words.emplace_back(static_cast<std::size_t>(k), 0);
      Scalar prefactor = 1;
      int nv = 0;
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        Scalar fact = 1;
        for (int c = 0; c < mult[i]; ++c) {
          words.emplace_back(static_cast<std::size_t>(vertices[i].first), 0);
          fact *= c + 1;
          prefactor *= -vertices[i].second;
        }
        prefactor /= fact;
        nv += mult[i];
      }
      const detail::Fatgraph g = detail::make_fatgraph(words);
      const detail::MatchingTally tally = detail::tally_matchings(g, nullptr);
      const int E = H / 2;
      // N power: nv - E + F must equal 2 - 2h - n.
      const int F = 2 - 2 * h - n - nv + E;
      auto it = tally.connected.find(F);
      if (it != tally.connected.end() && !is_zero(it->second)) {
        // t power of the correlator E - nv, times t^{2-2h-n} for W^(h).
        const int tp2 = 2 * (E - nv + 2 - 2 * h - n);
        out.coefficients[tp2] += prefactor * it->second / toprec::pow(2 * q, E);
      }
      return;
    }
    const int step = vertices[idx].first - 2;
    for (int c = 0; used + c * step <= depth; ++c) {
      mult[idx] = c;
      self(self, idx + 1, used + c * step, count + c);
    }
    mult[idx] = 0;
  };
  visit(visit, 0, 0, 0);
  // Truncation is reported relative to the leading power t^{sumk/2 + 2-2h-n}.
  out.complete_through += 2 * (2 - 2 * h - n);
  return out;
}

/// epsilon_h(k): gluings of a 2k-gon into a genus-h surface (Harer-Zagier).
inline Integer harer_zagier_one_point(int h, int k) {
  if (h < 0 || k < 0) throw PreconditionError("harer_zagier_one_point: need h >= 0, k >= 0");
  std::vector<std::vector<Integer>> e(static_cast<std::size_t>(k) + 1, std::vector<Integer>(static_cast<std::size_t>(h) + 1, Integer(0)));
  e[0][0] = 1;
  for (int kk = 1; kk <= k; ++kk)
    for (int g = 0; g <= h; ++g) {
      Integer v = 2 * (2 * kk - 1) * e[static_cast<std::size_t>(kk - 1)][static_cast<std::size_t>(g)];
      if (g >= 1 && kk >= 2) v += Integer((kk - 1) * (2 * kk - 1) * (2 * kk - 3)) * e[static_cast<std::size_t>(kk - 2)][static_cast<std::size_t>(g - 1)];
      e[static_cast<std::size_t>(kk)][static_cast<std::size_t>(g)] = v / (kk + 1);
    }
  return e[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)];
}

struct ComparisonEntry {
  std::vector<int> index;
  Scalar engine;
  Scalar oracle;
  bool pass() const { return engine == oracle; }
};

struct ComparisonReport {
  int h = 0, n = 0;
  std::vector<ComparisonEntry> entries;
  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ComparisonEntry& e) { return e.pass(); });
  }
  std::optional<ComparisonEntry> first_mismatch() const {
    for (const auto& e : entries)
      if (!e.pass()) return e;
    return std::nullopt;
  }
};

/// Engine expansion against the Wick oracle for a Gaussian one-matrix model
/// (finite oracle series, evaluated at the model's rational t).
inline ComparisonReport compare_with_engine(Engine& engine, const OneMatrixModel& model, int h, int n, const std::vector<int>& orders) {
  if (!std::holds_alternative<Scalar>(model.t)) throw PreconditionError("compare_with_engine: the model needs a rational t");
  const Scalar t = std::get<Scalar>(model.t);
  const Expansion ex = expand_observable(engine.curve(), engine.omega(h, n), orders);
  ComparisonReport rep{h, n, {}};
  for (const auto& [k, value] : ex.coefficients) {
    std::vector<int> powers;
    bool zero_power = false;
    for (int ki : k) {
      if (ki == 0) zero_power = true;
      powers.push_back(ki);
    }
    Scalar oracle = 0;
    if (!zero_power) {
      const CorrelatorSeries s = connected_correlator_series(model.V, h, powers, 0);
      if (!s.finite) throw PreconditionError("compare_with_engine: only Gaussian models have a finite oracle series");
      oracle = s.value(t);
    } else if (n == 1 && h == 0) {
      oracle = t;  // <Tr 1> = N, W^(0) = t
    }
    rep.entries.push_back({k, value, oracle});
  }
  return rep;
}

}  // namespace toprec
