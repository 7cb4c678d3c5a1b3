#pragma once

// Command-line front end. run_cli() is the whole program minus process plumbing,
// so tests can drive it in-process.

#include "difflab/convenient/lipk.hpp"
#include "difflab/convenient/mackey.hpp"
#include "difflab/convenient/weak.hpp"
#include "difflab/diffeology/functors.hpp"
#include "difflab/diffeology/morphism.hpp"
#include "difflab/diffeology/probes.hpp"
#include "difflab/gallery/gallery.hpp"
#include "difflab/io/loaders.hpp"
#include "difflab/io/report.hpp"
#include "difflab/jet/directional.hpp"
#include "difflab/jet/divided_difference.hpp"
#include "difflab/jet/smoothness.hpp"
#include "difflab/tangent/alpha.hpp"
#include "difflab/tangent/structure.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace difflab::cli {

enum ExitCode { Ok = 0, FailPresent = 1, InconclusivePresent = 2, SchemaFailure = 3, DomainFailure = 4 };

/// Everything a run depends on. Unused fields keep their defaults.
struct RunConfig {
  std::string command;
  Tolerances tol;
  std::string out;      // report path; empty = stdout
  std::string csv;      // samples output; empty = stdout
  bool normalized = false;

  std::string expr, vars = "x", lo = "-1", hi = "1", params = "t";
  std::string space, source, target, map, mode;
  std::string plaque, p1, p2, point;
  std::vector<std::string> witnesses;
  std::string pair, curve, sequence, battery, catalog, entry, claim, nodes, var = "t", kind = "grid";
  int k = -1, samples = 8, trials = 4, n = 101;
  double at = 0.0, from = 0.0, to = 1.0;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    auto b = cur.find_first_not_of(" \t"), e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : cur.substr(b, e - b + 1));
  }
  return out;
}

inline std::vector<double> numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& t : split(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw SchemaError(what + ": '" + t + "' is not a number");
    }
  }
  return out;
}

// A bound list of length 1 is broadcast to every dimension.
inline std::vector<double> bounds(const std::string& s, std::size_t n, const std::string& what) {
  auto v = numbers(s, what);
  if (v.size() == 1) v.assign(n, v[0]);
  if (v.size() != n) throw SchemaError(what + " needs 1 or " + std::to_string(n) + " values");
  return v;
}

inline Box box_of(const RunConfig& c, const std::vector<std::string>& names) {
  Box b;
  b.names = names;
  b.lo = bounds(c.lo, names.size(), "--lo");
  b.hi = bounds(c.hi, names.size(), "--hi");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!(b.lo[i] < b.hi[i])) throw SchemaError("empty box along " + names[i]);
  return b;
}

// A file path, or the name of a bundled document of the given kind.
inline std::string resolve(const std::string& arg, const std::string& kind) {
  if (arg.empty()) throw SchemaError("--" + kind + " is required");
  if (std::filesystem::exists(arg)) return arg;
  const std::string bundled = bundled_path(kind == "space" || kind == "source" || kind == "target" ? "spaces"
                                           : kind == "pair" ? "pairs" : "sequences", arg);
  if (std::filesystem::exists(bundled)) return bundled;
  throw SchemaError("no " + kind + " document '" + arg + "'");
}

inline Expression expr_of(const std::string& text, const std::string& flag) {
  if (text.empty()) throw SchemaError(flag + " is required");
  return parse_expression(text);
}

inline Plaque plaque_of(const RunConfig& c, const std::string& text, const std::string& label) {
  Plaque p;
  p.label = label;
  auto names = split(c.params);
  p.domain = box_of(c, names);
  p.map = parse_expression_list(text);
  return p;
}

inline JetContext coords_context(const GeneratedDiffeology& D, int order = 1) {
  return {D.space.coords, coordinate_functions(D.space.coords), order};
}

inline FunctionFamily extra_witnesses(const RunConfig& c) {
  FunctionFamily F;
  for (std::size_t i = 0; i < c.witnesses.size(); ++i)
    F.push_back({"witness" + std::to_string(i + 1), parse_expression(c.witnesses[i])});
  return F;
}

inline SampledCurve curve_of(const RunConfig& c) {
  SampledCurve s;
  s.param = c.var;
  s.components = parse_expression_list(c.curve);
  auto b = bounds(c.lo, 1, "--lo"), e = bounds(c.hi, 1, "--hi");
  s.lo = b[0];
  s.hi = e[0];
  return s;
}

inline DualPair coordinate_pair(std::size_t m) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < m; ++i) {
    rows.emplace_back(m, 0.0);
    rows.back()[i] = 1.0;
    names.push_back("c" + std::to_string(i + 1));
  }
  return make_dual_pair(names, rows, names);
}

inline nlohmann::json solution_json(const WeakSolution& s) {
  return {{"value", s.value}, {"unique", s.unique}, {"residual", s.residual}, {"kernel", s.kernel}, {"pairings", s.pairings}};
}

// -- commands ---------------------------------------------------------------

inline void cmd_check_smooth(const RunConfig& c, Report& r) {
  auto box = box_of(c, split(c.vars));
  const int k = c.k < 0 ? 1 : c.k;
  r.add("C^" + std::to_string(k), smoothness_probe(expr_of(c.expr, "--expr"), box, k, c.tol));
  r.results()["k"] = k;
}

inline void cmd_phi(const RunConfig& c, Report& r) {
  auto D = load_space(resolve(c.space, "space"));
  if (c.k >= 0) D.k = c.k;
  r.add("phi", phi_probe(D, expr_of(c.expr, "--expr"), c.tol));
  r.results()["space"] = D.name;
}

inline void cmd_gamma(const RunConfig& c, Report& r) {
  auto D = load_space(resolve(c.space, "space"));
  if (c.k >= 0) D.k = c.k;
  auto F = validated_witnesses(D, extra_witnesses(c), c.tol);
  r.add("gamma", gamma_probe(F, D.space.coords, plaque_of(c, c.plaque, "p"), D.k, c.tol));
  for (const auto& f : F) r.results()["functions"].push_back(f.label);
}

inline void cmd_member(const RunConfig& c, Report& r) {
  auto D = load_space(resolve(c.space, "space"));
  if (c.k >= 0) D.k = c.k;
  r.add("member", membership_probe(D, extra_witnesses(c), plaque_of(c, c.plaque, "p"), c.tol));
  r.results()["space"] = D.name;
}

inline void cmd_morphism(const RunConfig& c, Report& r) {
  auto DX = load_space(resolve(c.source, "source")), DY = load_space(resolve(c.target, "target"));
  SpaceMap f;
  f.label = c.map;
  f.components = parse_expression_list(c.map);
  if (c.mode.empty() || c.mode == "all") {
    auto rep = morphism_all(f, DX, DY, c.tol);
    r.add("mode i", rep.i);
    r.add("mode ii", rep.ii);
    r.add("mode iii", rep.iii);
    r.results()["ii_iii_agree"] = rep.ii_iii_agree();
  } else {
    auto m = parse_morphism_mode(c.mode);
    r.add(std::string("mode ") + to_string(m), morphism_probe(f, DX, DY, m, c.tol));
  }
}

inline void cmd_psi_upsilon(const RunConfig& c, Report& r) {
  auto D = load_space(resolve(c.space, "space"));
  auto battery = load_battery(c.battery.empty() ? data_dir() + "/battery.json" : c.battery);
  auto source = upsilon(D);
  FunctionFamily F;
  std::vector<Status> before;
  for (const auto& f : battery) {
    before.push_back(phi_probe(source.curves, D.space.coords, f.expr, D.k, c.tol).status());
    if (before.back() == Status::Pass) F.push_back(f);
  }
  auto round = upsilon(psi(D.space, source.curves, F, D.k, c.tol).diffeology);
  auto& out = r.results()["functions"];
  out = nlohmann::json::array();
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const Status after = round.in_F(battery[i].expr, c.tol).status();
    out.push_back({{"label", battery[i].label}, {"source", to_string(before[i])}, {"round_trip", to_string(after)}});
    if (after == before[i]) {
      r.add(battery[i].label, Verdict::pass().note("round trip reproduces " + std::string(to_string(after))));
    } else {
      Witness w;
      w.kind = "round-trip-mismatch";
      w.label = battery[i].label;
      w.note = std::string("source ") + to_string(before[i]) + ", round trip " + to_string(after);
      r.add(battery[i].label, Verdict::fail(w));
    }
  }
  r.results()["curves"] = source.curves.size();
  r.results()["space"] = D.name;
}

inline std::vector<double> point_of(const RunConfig& c, std::size_t m) {
  auto F = numbers(c.point, "--point");
  if (F.size() != m) throw SchemaError("--point needs " + std::to_string(m) + " coordinates");
  return F;
}

inline nlohmann::json estimate_json(const TangentSpaceEstimate& est) {
  nlohmann::json j{{"point", est.point}, {"dim", est.dim}, {"singular_values", est.singular_values}, {"cone", est.cone}};
  j["witnesses"] = nlohmann::json::array();
  if (est.certificate) {
    j["witnesses"].push_back({{"kind", "no-sum-witness"}, {"label", est.certificate_pair}, {"gap", est.certificate->gap}});
  }
  for (const auto& p : est.pieces) j["pieces"].push_back({{"generator", p.generator}, {"dim", p.basis.size()}});
  j["skipped"] = est.skipped;
  return j;
}

inline void cmd_tangent_dim(const RunConfig& c, Report& r) {
  auto D = load_space(resolve(c.space, "space"));
  auto est = tangent_dim(point_of(c, D.space.dim()), D, coords_context(D), c.samples, c.tol);
  Verdict v = Verdict::pass().note("dimension " + std::to_string(est.dim) + (est.cone ? ", cone" : ""));
  for (std::size_t i = 0; i < est.singular_values.size(); ++i) v.add({"singular_value", static_cast<double>(i), est.singular_values[i]});
  r.add("tangent-dim", v);
  r.results() = estimate_json(est);
}

inline void cmd_linearity(const RunConfig& c, Report& r) {
  auto D = load_space(resolve(c.space, "space"));
  r.add("linearity", linearity_probe(D, point_of(c, D.space.dim()), coords_context(D), c.trials, c.tol));
}

inline void cmd_continuity(const RunConfig& c, Report& r) {
  auto D = load_space(resolve(c.space, "space"));
  auto rep = continuity_probe(D, plaque_of(c, c.p1, "p1"), plaque_of(c, c.p2, "p2"), coords_context(D), c.tol);
  r.add("continuity", rep.verdict);
  auto& s = r.results()["samples"];
  s = nlohmann::json::array();
  for (const auto& x : rep.samples) s.push_back({{"r", x.r}, {"base", x.base}, {"velocity", x.velocity}});
}

inline void cmd_alpha(const RunConfig& c, Report& r) {
  auto pair = load_pair(resolve(c.pair, "pair"));
  Verdict a = alpha_injectivity_probe(pair, c.trials, c.tol), s = separation_check(pair, c.tol);
  r.add("alpha-injective", a);
  r.add("separated", s);
  r.results()["agree"] = a.status() == s.status();
}

inline void cmd_weak(const RunConfig& c, Report& r, bool derivative) {
  auto pair = load_pair(resolve(c.pair, "pair"));
  if (c.curve.empty()) throw SchemaError("--curve is required");
  SampledCurve s;
  s.param = c.var;
  s.components = parse_expression_list(c.curve);
  const std::string label = derivative ? "weak-derivative" : "weak-integral";
  try {
    auto sol = derivative ? weak_derivative(s, c.at, pair, c.tol) : weak_integral(s, c.from, c.to, pair, c.tol);
    r.results() = solution_json(sol);
    if (sol.unique) r.add(label, Verdict::pass().note("unique"));
    else r.add(label, Verdict::inconclusive({}, "pairings determine the vector only up to the kernel"));
  } catch (const NoWeakDerivative& e) {
    Witness w;
    w.kind = "no-weak-solution";
    w.note = e.what();
    r.add(label, Verdict::fail(w));
  } catch (const NotDifferentiable& e) {
    Witness w;
    w.kind = "not-differentiable";
    w.point = {c.at};
    w.note = e.what();
    r.add(label, Verdict::fail(w));
  }
}

inline void cmd_mackey(const RunConfig& c, Report& r) {
  const auto path = resolve(c.sequence, "sequence");
  auto doc = read_json(path);
  auto seq = sequence_from_json(doc);
  auto pair = c.pair.empty() ? coordinate_pair(seq.dim()) : load_pair(resolve(c.pair, "pair"));
  if (pair.dim() != seq.dim()) throw SchemaError("pair and sequence dimensions differ");
  auto expected = [&](const char* key) -> std::optional<Status> {
    if (doc.contains("expected") && doc["expected"].contains(key)) return parse_status(doc["expected"][key].get<std::string>());
    return std::nullopt;
  };
  const bool both = c.mode.empty() || c.mode == "both";
  if (both || c.mode == "convergence") {
    if (seq.limit.empty()) {
      if (!both) throw SchemaError("convergence needs a 'limit' in the sequence document");
    } else {
      r.add("convergence", mackey_convergence_probe(seq, pair, c.tol.window), expected("convergence"));
    }
  }
  if (both || c.mode == "cauchy") r.add("cauchy", mackey_cauchy_probe(seq, pair, c.tol.window), expected("cauchy"));
  if (!both && c.mode != "convergence" && c.mode != "cauchy") throw SchemaError("--mode must be convergence, cauchy or both");
  r.results()["sequence"] = seq.name;
  r.results()["window"] = c.tol.window;
}

inline void cmd_lipk(const RunConfig& c, Report& r) {
  auto s = curve_of(c);
  const int k = c.k < 0 ? 1 : c.k;
  if (c.pair.empty()) {
    r.add("Lip^" + std::to_string(k), lipk_probe(s, k));
  } else {
    auto pair = load_pair(resolve(c.pair, "pair"));
    r.add("Lip^" + std::to_string(k), lipk_probe(s, k, &pair));
  }
}

inline void cmd_delta(const RunConfig& c, Report& r) {
  auto nodes = numbers(c.nodes, "--nodes");
  const double v = delta_k(expr_of(c.expr, "--expr"), c.var, nodes);
  r.results()["order"] = static_cast<int>(nodes.size()) - 1;
  r.results()["value"] = v;
  r.add("delta", Verdict::pass({{"delta", static_cast<double>(nodes.size() - 1), v}}));
}

inline void cmd_gallery(const RunConfig& c, Report& r) {
  auto g = load_gallery(c.catalog.empty() ? data_dir() + "/gallery.json" : c.catalog);
  if (!c.entry.empty()) {
    const auto& e = g.entry(c.entry);
    std::vector<std::string> ids;
    if (c.claim.empty())
      for (const auto& cl : e.claims) ids.push_back(cl.id);
    else
      ids.push_back(c.claim);
    for (const auto& id : ids) {
      auto o = verify_claim(e, id, c.tol);
      r.add(o.entry + "/" + o.claim, o.measured, o.expected);
    }
  } else {
    if (!c.claim.empty()) throw SchemaError("--claim needs --entry");
    auto rep = run_gallery(g, c.tol);
    for (const auto& o : rep.records) r.add(o.entry + "/" + o.claim, o.measured, o.expected);
    r.results()["unexpected"] = rep.unexpected();
  }
  r.results()["records"] = r.to_json(true)["verdicts"].size();
}

// Grid samples (point, value, partial derivatives) or the singular values of a tangent estimate.
inline void cmd_samples(const RunConfig& c, Report& r, std::ostream& csv_out) {
  std::size_t rows = 0;
  if (c.kind == "spectrum") {
    auto D = load_space(resolve(c.space, "space"));
    auto est = tangent_dim(point_of(c, D.space.dim()), D, coords_context(D), c.samples, c.tol);
    CsvWriter w(csv_out, {"index", "singular_value"});
    for (std::size_t i = 0; i < est.singular_values.size(); ++i) w.row({static_cast<double>(i), est.singular_values[i]});
    rows = w.rows();
  } else if (c.kind == "grid") {
    const auto names = split(c.vars);
    auto e = expr_of(c.expr, "--expr");
    auto box = box_of(c, names);
    std::vector<std::string> header = names;
    header.push_back("value");
    for (const auto& v : names) header.push_back("d_" + v);
    CsvWriter w(csv_out, header);
    if (c.n < 0) throw SchemaError("--n must be non-negative");
    std::size_t total = c.n == 0 ? 0 : 1;
    for (std::size_t i = 0; i < names.size(); ++i) total *= static_cast<std::size_t>(c.n);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> x(names.size());
      std::size_t rem = idx;
      for (std::size_t i = names.size(); i-- > 0;) {
        const auto gi = static_cast<double>(rem % static_cast<std::size_t>(c.n));
        rem /= static_cast<std::size_t>(c.n);
        x[i] = c.n == 1 ? 0.5 * (box.lo[i] + box.hi[i]) : box.lo[i] + gi * (box.hi[i] - box.lo[i]) / (c.n - 1);
      }
      std::vector<double> row = x;
      double value;
      try {
        value = evaluate(e, Env(names, x));
      } catch (const DomainError&) {
        value = std::nan("");
      }
      row.push_back(value);
      for (std::size_t i = 0; i < names.size(); ++i) {
        std::vector<double> dir(names.size(), 0.0);
        dir[i] = 1.0;
        try {
          row.push_back(directional_derivative(e, names, x, {dir}));
        } catch (const Error&) {
          row.push_back(std::nan(""));
        }
      }
      w.row(row);
    }
    rows = w.rows();
  } else {
    throw SchemaError("--kind must be grid or spectrum");
  }
  r.results()["rows"] = rows;
  r.add("samples", Verdict::pass().note(std::to_string(rows) + " rows"));
}

inline nlohmann::json config_echo(const RunConfig& c, const CLI::App* sub) {
  nlohmann::json j;
  j["seed"] = c.tol.seed;
  j["eps_jet"] = c.tol.jet_rel;
  j["eps_pt"] = c.tol.point;
  j["tau_rank"] = c.tol.rank;
  j["grid"] = c.tol.grid;
  j["window"] = c.tol.window;
  nlohmann::json opts = nlohmann::json::object();
  for (const auto* o : sub->get_options()) {
    if (o->get_single_name() == "help" || o->count() == 0) continue;
    const auto& res = o->results();
    if (res.size() == 1) opts[o->get_single_name()] = res[0];
    else opts[o->get_single_name()] = res;
  }
  j["options"] = opts;
  return j;
}

} // namespace detail

struct RunOutcome {
  int exit_code = 0;
  std::string report; // JSON document as written
};

/// Parses argv, runs the command and writes the report (to --out or `out`).
/// Errors go to `err`: schema / usage problems exit 3, domain problems 4.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"difflab: probes for diffeological and convenient calculus", "difflab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out,-o", c.out, "write the JSON report here instead of stdout");
  app.add_flag("--normalized", c.normalized, "omit timings so equal runs are byte-identical");
  app.add_option("--seed", c.tol.seed, "random seed")->capture_default_str();
  app.add_option("--eps-jet", c.tol.jet_rel, "relative jet tolerance")->check(CLI::PositiveNumber);
  app.add_option("--eps-pt", c.tol.point, "point tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tau-rank", c.tol.rank, "relative rank threshold")->check(CLI::PositiveNumber);
  app.add_option("--grid", c.tol.grid, "sample points per box dimension")->check(CLI::PositiveNumber);
  app.add_option("--window", c.tol.window, "sequence window N")->check(CLI::PositiveNumber);

  std::map<std::string, std::function<void(Report&)>> handlers;
  std::ostringstream csv_buffer;
  auto sub = [&](const std::string& name, const std::string& help, std::function<void(Report&)> fn) {
    handlers[name] = std::move(fn);
    return app.add_subcommand(name, help);
  };
  auto box_opts = [&](CLI::App* s) {
    s->add_option("--lo", c.lo, "lower bounds (one value broadcasts)");
    s->add_option("--hi", c.hi, "upper bounds");
  };

  auto* s = sub("check-smooth", "C^k probe of an expression on a box", [&](Report& r) { detail::cmd_check_smooth(c, r); });
  s->add_option("--expr", c.expr)->required();
  s->add_option("--vars", c.vars);
  s->add_option("--k", c.k);
  box_opts(s);

  s = sub("phi", "is f smooth along every generator?", [&](Report& r) { detail::cmd_phi(c, r); });
  s->add_option("--space", c.space)->required();
  s->add_option("--expr", c.expr)->required();
  s->add_option("--k", c.k);

  s = sub("gamma", "is the plaque smooth for every validated function?", [&](Report& r) { detail::cmd_gamma(c, r); });
  s->add_option("--space", c.space)->required();
  s->add_option("--plaque", c.plaque)->required();
  s->add_option("--params", c.params);
  s->add_option("--witness", c.witnesses);
  s->add_option("--k", c.k);
  box_opts(s);

  s = sub("member", "is the plaque in the generated diffeology?", [&](Report& r) { detail::cmd_member(c, r); });
  s->add_option("--space", c.space)->required();
  s->add_option("--plaque", c.plaque)->required();
  s->add_option("--params", c.params);
  s->add_option("--witness", c.witnesses);
  s->add_option("--k", c.k);
  box_opts(s);

  s = sub("morphism", "is a map between spaces smooth?", [&](Report& r) { detail::cmd_morphism(c, r); });
  s->add_option("--source", c.source)->required();
  s->add_option("--target", c.target)->required();
  s->add_option("--map", c.map)->required();
  s->add_option("--mode", c.mode, "i, ii, iii or all");

  s = sub("psi-upsilon", "round trip of the function battery through psi and upsilon", [&](Report& r) { detail::cmd_psi_upsilon(c, r); });
  s->add_option("--space", c.space)->required();
  s->add_option("--battery", c.battery);

  s = sub("tangent-dim", "dimension of the first-order tangent set", [&](Report& r) { detail::cmd_tangent_dim(c, r); });
  s->add_option("--space", c.space)->required();
  s->add_option("--point", c.point)->required();
  s->add_option("--samples", c.samples);

  s = sub("linearity", "are tangent classes closed under sums and scaling?", [&](Report& r) { detail::cmd_linearity(c, r); });
  s->add_option("--space", c.space)->required();
  s->add_option("--point", c.point)->required();
  s->add_option("--trials", c.trials);

  s = sub("continuity", "continuity of addition for plaques p(r, s)", [&](Report& r) { detail::cmd_continuity(c, r); });
  s->add_option("--space", c.space)->required();
  s->add_option("--p1", c.p1)->required();
  s->add_option("--p2", c.p2)->required();
  s->add_option("--params", c.params);
  box_opts(s);

  s = sub("alpha", "injectivity of alpha and separation of the pair", [&](Report& r) { detail::cmd_alpha(c, r); });
  s->add_option("--pair", c.pair)->required();
  s->add_option("--trials", c.trials);

  s = sub("weak-deriv", "weak derivative of a curve", [&](Report& r) { detail::cmd_weak(c, r, true); });
  s->add_option("--pair", c.pair)->required();
  s->add_option("--curve", c.curve)->required();
  s->add_option("--param", c.var);
  s->add_option("--at", c.at);

  s = sub("weak-int", "weak integral of a curve", [&](Report& r) { detail::cmd_weak(c, r, false); });
  s->add_option("--pair", c.pair)->required();
  s->add_option("--curve", c.curve)->required();
  s->add_option("--param", c.var);
  s->add_option("--from", c.from);
  s->add_option("--to", c.to);

  s = sub("mackey", "Mackey convergence and Mackey-Cauchy probes", [&](Report& r) { detail::cmd_mackey(c, r); });
  s->add_option("--sequence", c.sequence)->required();
  s->add_option("--pair", c.pair);
  s->add_option("--mode", c.mode, "convergence, cauchy or both");

  s = sub("lipk", "Lip^k probe of a curve", [&](Report& r) { detail::cmd_lipk(c, r); });
  s->add_option("--curve", c.curve)->required();
  s->add_option("--param", c.var);
  s->add_option("--k", c.k);
  s->add_option("--pair", c.pair);
  box_opts(s);

  s = sub("delta", "divided difference delta^k on nodes", [&](Report& r) { detail::cmd_delta(c, r); });
  s->add_option("--expr", c.expr)->required();
  s->add_option("--var", c.var);
  s->add_option("--nodes", c.nodes)->required();

  s = sub("gallery", "verify the counterexample catalog", [&](Report& r) { detail::cmd_gallery(c, r); });
  s->add_option("--catalog", c.catalog);
  s->add_option("--entry", c.entry);
  s->add_option("--claim", c.claim);

  s = sub("samples", "CSV samples for plotting", [&](Report& r) {
    if (c.csv.empty()) {
      detail::cmd_samples(c, r, csv_buffer);
    } else {
      std::ofstream f(c.csv);
      if (!f) throw SchemaError("cannot write '" + c.csv + "'");
      detail::cmd_samples(c, r, f);
    }
  });
  s->add_option("--kind", c.kind, "grid or spectrum");
  s->add_option("--expr", c.expr);
  s->add_option("--vars", c.vars);
  s->add_option("--n", c.n, "grid points per dimension");
  s->add_option("--space", c.space);
  s->add_option("--point", c.point);
  s->add_option("--samples", c.samples);
  s->add_option("--csv", c.csv, "CSV path; stdout when omitted (the report then goes to --out only)");
  box_opts(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return SchemaFailure;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  Report report(c.command);
  const auto start = std::chrono::steady_clock::now();
  try {
    report.config() = detail::config_echo(c, chosen);
    handlers.at(c.command)(report);
  } catch (const SchemaError& e) {
    err << "difflab: " << e.what() << "\n";
    return SchemaFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "difflab: malformed document: " << e.what() << "\n";
    return SchemaFailure;
  } catch (const std::exception& e) {
    err << "difflab: " << e.what() << "\n";
    return DomainFailure;
  }
  report.set_elapsed_ms(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());

  const std::string doc = report.dump(c.normalized);
  if (c.command == "samples" && c.csv.empty()) out << csv_buffer.str();
  if (!c.out.empty()) {
    std::ofstream f(c.out);
    if (!f) {
      err << "difflab: cannot write '" << c.out << "'\n";
      return SchemaFailure;
    }
    f << doc;
  } else if (!(c.command == "samples" && c.csv.empty())) {
    out << doc;
  }
  return report.exit_code();
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"difflab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace difflab::cli
