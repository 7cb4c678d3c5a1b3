#pragma once

#include "difflab/core/config.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/core/parallel.hpp"
#include "difflab/core/random.hpp"
#include "difflab/core/verdict.hpp"
#include "difflab/expr/parser.hpp"
#include "difflab/jet/directional.hpp"
#include "difflab/jet/smoothness.hpp"

#include "json.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace difflab {

/// Scripted check of one property. `op` is one of directional, path_value,
/// smoothness, additivity_defect, homogeneity; `args` holds its parameters.
struct ClaimRecipe {
  std::string op;
  nlohmann::json args;
};

struct GalleryClaim {
  std::string id;
  std::string statement;
  ClaimRecipe recipe;
  Status expected = Status::Pass;
  std::string provenance; // "stated", "derived" or "disputed"
  std::string note;
};

struct GalleryEntry {
  std::string name;
  std::string source; // expression text
  Expression expr;
  std::vector<std::string> variables;
  std::vector<GalleryClaim> claims;
};

struct Gallery {
  std::vector<GalleryEntry> entries;

  const GalleryEntry& entry(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return e;
    throw UnknownEntry("no gallery entry named '" + name + "'");
  }
};

inline Status parse_status(const std::string& s) {
  if (s == "PASS") return Status::Pass;
  if (s == "FAIL") return Status::Fail;
  if (s == "INCONCLUSIVE") return Status::Inconclusive;
  throw SchemaError("unknown verdict '" + s + "'");
}

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  return j.at(key);
}

inline std::vector<double> vec(const nlohmann::json& j, const char* key, const std::string& where) {
  try {
    return field(j, key, where).get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(where + ": '" + key + "' must be a list of numbers");
  }
}

inline double num(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw SchemaError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

} // namespace detail

inline Gallery gallery_from_json(const nlohmann::json& doc) {
  Gallery g;
  for (const auto& je : detail::field(doc, "entries", "gallery")) {
    GalleryEntry e;
    e.name = detail::field(je, "name", "gallery entry").get<std::string>();
    e.source = detail::field(je, "expression", e.name).get<std::string>();
    e.expr = parse_expression(e.source);
    e.variables = detail::field(je, "variables", e.name).get<std::vector<std::string>>();
    for (const auto& jc : detail::field(je, "claims", e.name)) {
      GalleryClaim c;
      c.id = detail::field(jc, "id", e.name + " claim").get<std::string>();
      const std::string where = e.name + "/" + c.id;
      c.statement = jc.value("statement", std::string{});
      c.expected = parse_status(detail::field(jc, "expected", where).get<std::string>());
      c.provenance = jc.value("provenance", std::string("derived"));
      c.note = jc.value("note", std::string{});
      const auto& jr = detail::field(jc, "recipe", where);
      c.recipe.op = detail::field(jr, "op", where).get<std::string>();
      c.recipe.args = jr;
      e.claims.push_back(std::move(c));
    }
    g.entries.push_back(std::move(e));
  }
  return g;
}

namespace detail {

inline Witness claim_witness(std::string kind, std::vector<double> point, std::vector<double> dir, std::string note) {
  Witness w;
  w.kind = std::move(kind);
  w.point = std::move(point);
  w.direction = std::move(dir);
  w.note = std::move(note);
  return w;
}

// Gateaux derivative with a non-differentiable direction reported as NaN.
inline double gateaux_or_nan(const GalleryEntry& e, const std::vector<double>& x, const std::vector<double>& v) {
  try {
    return directional_derivative(e.expr, e.variables, x, {v});
  } catch (const NotDifferentiable&) {
    return std::nan("");
  }
}

inline Verdict run_directional(const GalleryEntry& e, const nlohmann::json& a) {
  const auto x = vec(a, "point", e.name);
  const auto dirs = field(a, "directions", e.name).get<std::vector<std::vector<double>>>();
  const auto expected = a.contains("expected") ? vec(a, "expected", e.name) : std::vector<double>{};
  if (!expected.empty() && expected.size() != dirs.size()) throw SchemaError(e.name + ": one expected value per direction");
  const double tol = num(a, "tol", 1e-8);
  std::vector<Residual> trace;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double d = gateaux_or_nan(e, x, dirs[i]);
    trace.push_back({"df", static_cast<double>(i), d});
    if (std::isnan(d)) return Verdict::fail(claim_witness("no-derivative", x, dirs[i], "Gateaux limit does not exist"), trace);
    if (!expected.empty() && !(std::fabs(d - expected[i]) <= tol * std::max(1.0, std::fabs(expected[i])))) {
      Witness w = claim_witness("value-mismatch", x, dirs[i], "limit differs from the stated value");
      w.values["measured"] = d;
      w.values["expected"] = expected[i];
      return Verdict::fail(w, trace);
    }
  }
  return Verdict::pass(trace).note(std::to_string(dirs.size()) + " directional limits exist" +
                                   (expected.empty() ? "" : " and match"));
}

// f along a path stays at `value` while f(base) differs: a discontinuity certificate.
inline Verdict run_path_value(const GalleryEntry& e, const nlohmann::json& a) {
  const auto path = field(a, "path", e.name).get<std::vector<std::string>>();
  if (path.size() != e.variables.size()) throw SchemaError(e.name + ": path needs one component per variable");
  const std::string param = a.value("param", std::string("s"));
  std::vector<Expression> comps;
  for (const auto& p : path) comps.push_back(parse_expression(p));
  const auto samples = vec(a, "samples", e.name);
  const double value = num(a, "value", 0.0), tol = num(a, "tol", 1e-12);
  const auto base = vec(a, "base", e.name);
  const double f_base = evaluate(e.expr, Env(e.variables, base));
  std::vector<Residual> trace{{"f_base", 0.0, f_base}};
  for (double s : samples) {
    std::vector<double> x;
    for (const auto& c : comps) x.push_back(evaluate(c, Env({param}, {s})));
    const double f = evaluate(e.expr, Env(e.variables, x));
    trace.push_back({"f_path", s, f});
    if (!(std::fabs(f - value) <= tol)) {
      Witness w = claim_witness("off-path-value", x, {}, "f leaves the stated value along the path");
      w.values["f"] = f;
      w.values["s"] = s;
      return Verdict::fail(w, trace);
    }
  }
  if (std::fabs(f_base - value) <= tol) {
    Witness w = claim_witness("no-jump", base, {}, "f at the base point equals the path value");
    w.values["f_base"] = f_base;
    return Verdict::fail(w, trace);
  }
  return Verdict::pass(trace).note("f = " + format_number(value) + " on every sampled path point, f(base) = " +
                                   format_number(f_base));
}

inline Verdict run_smoothness(const GalleryEntry& e, const nlohmann::json& a, const Tolerances& tol) {
  Box box;
  box.names = e.variables;
  box.lo = vec(a, "lo", e.name);
  box.hi = vec(a, "hi", e.name);
  if (box.lo.size() != e.variables.size() || box.hi.size() != e.variables.size())
    throw SchemaError(e.name + ": box needs one bound per variable");
  const int k = field(a, "k", e.name).get<int>();
  return smoothness_probe(e.expr, box, k, tol);
}

// df(x; u + v) - df(x; u) - df(x; v) against a stated defect.
inline Verdict run_additivity(const GalleryEntry& e, const nlohmann::json& a) {
  const auto x = vec(a, "point", e.name), u = vec(a, "u", e.name), v = vec(a, "v", e.name);
  const double expected = num(a, "expected", 0.0), tol = num(a, "tol", 1e-8);
  std::vector<double> uv(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) uv[i] = u[i] + v[i];
  const double duv = gateaux_or_nan(e, x, uv), du = gateaux_or_nan(e, x, u), dv = gateaux_or_nan(e, x, v);
  const double defect = duv - du - dv;
  std::vector<Residual> trace{{"df_u_plus_v", 0.0, duv}, {"df_u", 0.0, du}, {"df_v", 0.0, dv}, {"defect", 0.0, defect}};
  if (std::isnan(defect)) return Verdict::fail(claim_witness("no-derivative", x, uv, "a Gateaux limit is missing"), trace);
  if (!(std::fabs(defect - expected) <= tol)) {
    Witness w = claim_witness("defect-mismatch", x, uv, "additivity defect differs from the stated value");
    w.values["defect"] = defect;
    w.values["expected"] = expected;
    return Verdict::fail(w, trace);
  }
  return Verdict::pass(trace).note("additivity defect " + format_number(defect));
}

// df(x; c v) = c df(x; v) for c > 0 on seeded random directions.
inline Verdict run_homogeneity(const GalleryEntry& e, const nlohmann::json& a, const Tolerances& tol) {
  const auto x = vec(a, "point", e.name), scales = vec(a, "scales", e.name);
  const int samples = a.value("samples", 8);
  const double eps = num(a, "tol", 1e-8);
  std::uint64_t h = 1469598103934665603ULL; // FNV-1a of the entry name, stable across platforms
  for (unsigned char ch : e.name) h = (h ^ ch) * 1099511628211ULL;
  Rng rng(mix_seed(tol.seed, h));
  std::vector<Residual> trace;
  for (int s = 0; s < samples; ++s) {
    auto v = rng.unit_vector(x.size());
    const double d = gateaux_or_nan(e, x, v);
    for (double c : scales) {
      if (c <= 0.0) throw SchemaError(e.name + ": homogeneity scales must be positive");
      std::vector<double> cv = v;
      for (auto& t : cv) t *= c;
      const double dc = gateaux_or_nan(e, x, cv);
      const double gap = std::fabs(dc - c * d);
      trace.push_back({"homogeneity_gap", c, gap});
      if (!(gap <= eps * std::max(1.0, std::fabs(c * d)))) {
        Witness w = claim_witness("not-homogeneous", x, v, "df(x; c v) differs from c df(x; v)");
        w.values["c"] = c;
        w.values["gap"] = gap;
        return Verdict::fail(w, trace);
      }
    }
  }
  return Verdict::pass(trace).note("positively homogeneous on " + std::to_string(samples) + " directions");
}

} // namespace detail

/// Runs the recipe of one claim. The returned verdict is the measurement; compare
/// it with `claim.expected` (see ClaimOutcome).
inline Verdict run_recipe(const GalleryEntry& e, const GalleryClaim& c, const Tolerances& tol = default_tolerances()) {
  const auto& op = c.recipe.op;
  const auto& a = c.recipe.args;
  Verdict v = [&] {
    if (op == "directional") return detail::run_directional(e, a);
    if (op == "path_value") return detail::run_path_value(e, a);
    if (op == "smoothness") return detail::run_smoothness(e, a, tol);
    if (op == "additivity_defect") return detail::run_additivity(e, a);
    if (op == "homogeneity") return detail::run_homogeneity(e, a, tol);
    throw SchemaError(e.name + "/" + c.id + ": unknown recipe op '" + op + "'");
  }();
  return v.relabel(e.name + "/" + c.id);
}

struct ClaimOutcome {
  std::string entry, claim;
  Status expected = Status::Pass;
  std::string provenance;
  Verdict measured = Verdict::inconclusive({});

  bool matched() const { return measured.status() == expected; }
};

inline ClaimOutcome verify_claim(const GalleryEntry& e, const std::string& claim_id,
                                 const Tolerances& tol = default_tolerances()) {
  for (const auto& c : e.claims)
    if (c.id == claim_id) return {e.name, c.id, c.expected, c.provenance, run_recipe(e, c, tol)};
  throw UnknownClaim("entry '" + e.name + "' has no claim '" + claim_id + "'");
}

inline ClaimOutcome verify_claim(const Gallery& g, const std::string& entry, const std::string& claim_id,
                                 const Tolerances& tol = default_tolerances()) {
  return verify_claim(g.entry(entry), claim_id, tol);
}

struct GalleryReport {
  std::vector<ClaimOutcome> records;

  std::size_t unexpected() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.matched() ? 0 : 1;
    return n;
  }
  bool all_expected() const { return unexpected() == 0; }
};

/// Every claim of every entry, in catalog order. Claims run in parallel.
inline GalleryReport run_gallery(const Gallery& g, const Tolerances& tol = default_tolerances()) {
  std::vector<std::pair<const GalleryEntry*, const GalleryClaim*>> jobs;
  for (const auto& e : g.entries)
    for (const auto& c : e.claims) jobs.emplace_back(&e, &c);
  GalleryReport rep;
  rep.records.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& [e, c] = jobs[i];
    rep.records[i] = {e->name, c->id, c->expected, c->provenance, run_recipe(*e, *c, tol)};
  });
  return rep;
}

} // namespace difflab
