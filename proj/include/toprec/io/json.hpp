#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "toprec/chain.hpp"
#include "toprec/engine.hpp"
#include "toprec/errors.hpp"
#include "toprec/multidifferential.hpp"
#include "toprec/observables.hpp"
#include "toprec/one_matrix.hpp"
#include "toprec/spectral_curve.hpp"

namespace toprec::io {

using Json = nlohmann::json;

inline Scalar scalar_from_json(const Json& j, const std::string& what) {
  try {
    if (j.is_string()) return parse_scalar(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(std::to_string(j.get<long long>()));
  } catch (const Error& e) {
    throw ParseError(what + ": " + e.what());
  }
  throw ParseError(what + ": expected an integer or a \"p/q\" string");
}

inline Json scalar_to_json(const Scalar& q) { return to_string(q); }

inline Poly poly_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected a coefficient array (constant term first)");
  std::vector<Scalar> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(scalar_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  return Poly(c);
}

inline Json poly_to_json(const Poly& p) {
  Json a = Json::array();
  for (const auto& c : p.coefficients()) a.push_back(scalar_to_json(c));
  return a;
}

inline RationalFunction rational_from_json(const Json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("num")) throw ParseError(what + ": expected {\"num\": [...], \"den\": [...]}");
  const Poly num = poly_from_json(j.at("num"), what + ".num");
  const Poly den = j.contains("den") ? poly_from_json(j.at("den"), what + ".den") : Poly::constant(1);
  if (den.is_zero()) throw ParseError(what + ": zero denominator");
  return RationalFunction(num, den);
}

inline Json rational_to_json(const RationalFunction& f) { return Json{{"num", poly_to_json(f.num())}, {"den", poly_to_json(f.den())}}; }

inline Point point_from_json(const Json& j, const std::string& what) {
  try {
    if (j.is_string()) return parse_point(j.get<std::string>());
    return Point::at(scalar_from_json(j, what));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline Json point_to_json(const Point& p) { return p.infinite ? Json("inf") : scalar_to_json(p.value); }

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(origin + ": invalid JSON (" + e.what() + ")");
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline CurveSpec curve_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("curve spec: expected a JSON object");
  for (const char* key : {"x", "y", "sigma"})
    if (!j.contains(key)) throw ParseError(std::string("curve spec: missing \"") + key + "\"");
  CurveSpec s;
  s.x = rational_from_json(j.at("x"), "x");
  s.y = rational_from_json(j.at("y"), "y");
  s.sigma = rational_from_json(j.at("sigma"), "sigma");
  s.physical_pole = j.contains("physical_pole") ? point_from_json(j.at("physical_pole"), "physical_pole") : Point::infinity();
  if (j.contains("t") && !j.at("t").is_null()) s.t = scalar_from_json(j.at("t"), "t");
  if (j.contains("branch_points") && !j.at("branch_points").is_null()) {
    std::vector<Scalar> b;
    for (const auto& e : j.at("branch_points")) b.push_back(scalar_from_json(e, "branch_points"));
    s.branch_points = b;
  }
  return s;
}

/// Canonical form: keys sorted, rationals in lowest terms, branch points listed.
inline Json curve_to_json(const SpectralCurve& c) {
  Json j;
  j["x"] = rational_to_json(c.x());
  j["y"] = rational_to_json(c.y());
  j["sigma"] = rational_to_json(c.sigma());
  j["physical_pole"] = point_to_json(c.physical_pole());
  if (c.t()) j["t"] = scalar_to_json(*c.t());
  Json b = Json::array();
  for (const auto& a : c.branch_points()) b.push_back(scalar_to_json(a));
  j["branch_points"] = b;
  return j;
}

// --- models -----------------------------------------------------------------

using Model = std::variant<OneMatrixModel, ChainModel>;

inline OneMatrixModel one_matrix_from_json(const Json& j) {
  OneMatrixModel m;
  m.V = poly_from_json(j.at("potential"), "potential");
  if (m.V.derivative().degree() < 1) throw ValidationError("potential-degree", "deg V' must be >= 1");
  if (!j.contains("t")) throw ParseError("model: missing \"t\"");
  const Json& t = j.at("t");
  if (t.is_object()) {
    SeriesSpec s;
    s.param = t.value("series_param", std::string("s"));
    s.power = t.value("substitution_power", 1);
    s.order = t.value("order", 8);
    if (s.power < 1 || s.order < s.power) throw ValidationError("series-spec", "need substitution_power >= 1 and order >= substitution_power");
    m.t = s;
  } else {
    m.t = scalar_from_json(t, "t");
  }
  if (j.contains("saddle") && !j.at("saddle").is_null()) m.saddle = scalar_from_json(j.at("saddle"), "saddle");
  return m;
}

inline ChainModel chain_from_json(const Json& j) {
  ChainModel m;
  for (const auto& p : j.at("potentials")) m.potentials.push_back(poly_from_json(p, "potentials"));
  if (j.contains("couplings"))
    for (const auto& c : j.at("couplings")) m.couplings.push_back(scalar_from_json(c, "couplings"));
  if (j.contains("external")) {
    const Json& e = j.at("external");
    m.lambdas.clear();
    m.weights.clear();
    for (const auto& l : e.at("lambdas")) m.lambdas.push_back(scalar_from_json(l, "external.lambdas"));
    if (e.contains("weights"))
      for (const auto& w : e.at("weights")) m.weights.push_back(scalar_from_json(w, "external.weights"));
  }
  if (j.contains("t")) m.t = scalar_from_json(j.at("t"), "t");
  try {
    m.validate();
  } catch (const PreconditionError& e) {
    throw ValidationError("chain-model", e.what());
  }
  return m;
}

inline Model model_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("model spec: expected a JSON object");
  try {
    if (j.contains("potentials")) return chain_from_json(j);
    if (j.contains("potential")) return one_matrix_from_json(j);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("model spec: ") + e.what());
  }
  throw ParseError("model spec: expected \"potential\" (one matrix) or \"potentials\" (chain)");
}

inline Json series_to_json(const TruncatedSeries& s) {
  Json c = Json::array();
  for (int k = 0; k <= s.order(); ++k) c.push_back(scalar_to_json(s.coefficient(k)));
  return Json{{"param", s.parameter()}, {"order", s.order()}, {"coefficients", c}};
}

inline Json one_cut_series_to_json(const OneCutSeries& c) {
  Json j;
  j["substitution"] = {{"param", c.spec.param}, {"power", c.spec.power}, {"order", c.spec.order}};
  j["alpha"] = series_to_json(c.alpha);
  j["gamma2"] = series_to_json(c.g2);
  if (c.gamma) {
    j["gamma"] = series_to_json(*c.gamma);
    Json y = Json::array();
    for (const auto& u : c.y_coefficients) y.push_back(series_to_json(u));
    j["y_coefficients"] = y;
  }
  return j;
}

// --- correlators ------------------------------------------------------------

inline Json tensor_to_json(const Multidifferential& w) {
  Json j;
  j["h"] = w.h();
  j["n"] = w.n();
  switch (w.kind()) {
    case DiffKind::Ydx:
      j["kind"] = "ydx";
      j["density"] = rational_to_json(w.ydx_density());
      return j;
    case DiffKind::Bergman:
      j["kind"] = "bergman";
      return j;
    case DiffKind::Tensor:
      break;
  }
  Json terms = Json::array();
  for (const auto& [key, c] : w.terms()) {
    Json slots = Json::array();
    for (const auto& s : key)
      slots.push_back({{"branch", scalar_to_json(w.branch_points()[static_cast<std::size_t>(s.branch)])}, {"order", s.order}});
    terms.push_back({{"slots", slots}, {"coeff", scalar_to_json(c)}});
  }
  j["terms"] = terms;
  return j;
}

/// Reads a tensor whose branch values must be branch points of the curve.
/// Accepts either a bare tensor or the {"omega": tensor} artifact of compute.
inline Multidifferential tensor_from_json(const Json& artifact, const std::vector<Scalar>& branches) {
  const Json& j = artifact.is_object() && artifact.contains("omega") ? artifact.at("omega") : artifact;
  try {
    const int h = j.at("h").get<int>(), n = j.at("n").get<int>();
    if (h < 0 || n < 1) throw ParseError("tensor: need h >= 0 and n >= 1");
    Tensor t;
    for (const auto& term : j.at("terms")) {
      SlotKey key;
      for (const auto& s : term.at("slots")) {
        const Scalar b = scalar_from_json(s.at("branch"), "tensor slot branch");
        int bi = -1;
        for (std::size_t i = 0; i < branches.size(); ++i)
          if (branches[i] == b) bi = static_cast<int>(i);
        if (bi < 0) throw ValidationError("tensor-branch-points", "slot pole " + to_string(b) + " is not a branch point of the curve");
        const int order = s.at("order").get<int>();
        if (order < 1) throw ParseError("tensor: slot orders must be >= 1");
        key.push_back({bi, order});
      }
      if (static_cast<int>(key.size()) != n) throw ParseError("tensor: every term needs n slots");
      add_to(t, key, scalar_from_json(term.at("coeff"), "tensor coeff"));
    }
    return Multidifferential::tensor(h, n, branches, std::move(t));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("tensor: ") + e.what());
  }
}

inline Json expansion_to_json(const Expansion& e) {
  Json c = Json::object();
  for (const auto& [k, v] : e.coefficients) {
    std::string key;
    for (std::size_t i = 0; i < k.size(); ++i) key += (i ? "," : "") + std::to_string(k[i]);
    c[key] = scalar_to_json(v);
  }
  return Json{{"h", e.h}, {"n", e.n}, {"orders", e.orders}, {"coefficients", c}};
}

/// Deterministic serialization used for artifacts and hashing.
inline std::string canonical(const Json& j) { return j.dump(2) + "\n"; }

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// --- memo cache ---------------------------------------------------------------

/// On-disk memo table at <dir>/<hash of canonical curve>.json. The stored
/// curve must match exactly before any entry is trusted.
class MemoCache {
 public:
  explicit MemoCache(std::string dir) : dir_(std::move(dir)) {}

  static std::optional<MemoCache> from_environment() {
    const char* d = std::getenv("TR_CACHE_DIR");
    if (!d || !*d) return std::nullopt;
    return MemoCache(d);
  }

  std::string path_for(const SpectralCurve& c) const {
    return (std::filesystem::path(dir_) / (hex64(fnv1a64(curve_to_json(c).dump())) + ".json")).string();
  }

  /// Returns the number of correlators preloaded; stale or damaged files are ignored.
  int load(Engine& engine) const {
    const std::string p = path_for(engine.curve());
    if (!std::filesystem::exists(p)) return 0;
    try {
      const Json j = read_json_file(p);
      if (j.at("curve").dump() != curve_to_json(engine.curve()).dump()) return 0;
      std::vector<Multidifferential> ws;
      for (const auto& t : j.at("correlators")) ws.push_back(tensor_from_json(t, engine.curve().branch_points()));
      for (const auto& w : ws) engine.preload(w);
      return static_cast<int>(ws.size());
    } catch (const std::exception&) {
      return 0;
    }
  }

  void store(Engine& engine) const {
    std::filesystem::create_directories(dir_);
    Json list = Json::array();
    for (const auto& w : engine.memoized())
      if (w.kind() == DiffKind::Tensor) list.push_back(tensor_to_json(w));
    const Json j{{"curve", curve_to_json(engine.curve())}, {"correlators", list}};
    const std::string p = path_for(engine.curve());
    const std::string tmp = p + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) throw ComputationError("cannot write cache file " + tmp);
      out << canonical(j);
    }
    std::filesystem::rename(tmp, p);
  }

 private:
  std::string dir_;
};

}  // namespace toprec::io
