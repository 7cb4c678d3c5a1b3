// Acceptance run: one PASS/FAIL line per criterion, followed by indented log
// lines. Reference values come from the oracles in tests/support, never from the
// engine under test. Exit status is the number of failed criteria.

#include "difflab/cli/run.hpp"
#include "difflab/difflab.hpp"
#include "oracles.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace difflab;
using oracle::Rat;

namespace {

class Log {
public:
  void line(const std::string& s) { lines_.push_back(s); }
  template <class... A>
  void printf(const char* fmt, A... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, a...);
    lines_.emplace_back(buf);
  }
  /// Records a named check; the criterion fails if any check fails.
  bool check(bool ok, const std::string& what) {
    if (!ok) {
      ok_ = false;
      lines_.push_back("check failed: " + what);
    }
    return ok;
  }
  bool ok() const { return ok_; }
  const std::vector<std::string>& lines() const { return lines_; }

private:
  std::vector<std::string> lines_;
  bool ok_ = true;
};

std::string fmt_vec(const std::vector<double>& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str() + ")";
}

JetContext coords_ctx(const std::vector<std::string>& coords, int n = 1) { return {coords, coordinate_functions(coords), n}; }

Plaque curve(const std::string& label, std::vector<std::string> exprs) {
  Plaque p;
  p.label = label;
  p.domain = make_box({"t"}, -1.0, 1.0);
  for (const auto& e : exprs) p.map.push_back(parse_expression(e));
  return p;
}

// ---------------------------------------------------------------- 1

void cross_tangent(Log& log) {
  const auto D = load_space(bundled_path("spaces", "cross"));
  const auto ctx = coords_ctx(D.space.coords);
  const auto origin = tangent_dim({0, 0}, D, ctx, 8);
  log.printf("origin: dim %d, cone %s, singular values %s", origin.dim, origin.cone ? "true" : "false",
             fmt_vec(origin.singular_values).c_str());
  log.check(origin.dim == 2, "dimension 2 at (0,0)");
  log.check(origin.cone, "cone at (0,0)");

  const auto e1 = make_class(curve("x-axis", {"t", "0"}), {0, 0}, ctx);
  const auto e2 = make_class(curve("y-axis", {"0", "t"}), {0, 0}, ctx);
  const auto sum = add_classes(e1, e2, D, ctx);
  log.printf("add_classes(e1, e2): %s, gap %.3g", sum.found ? "found" : "NoWitness", sum.gap);
  log.check(!sum.found, "no witness for e1 + e2");

  const auto off = tangent_dim({1, 0}, D, ctx, 8);
  log.printf("(1,0): dim %d, cone %s", off.dim, off.cone ? "true" : "false");
  log.check(off.dim == 1 && !off.cone, "dimension 1, not a cone at (1,0)");
  const double ratio = origin.singular_values.size() > 1 ? origin.singular_values[1] / origin.singular_values[0] : 0.0;
  log.check(ratio > default_tolerances().rank, "second singular value above tau_rank at (0,0)");
}

// ---------------------------------------------------------------- 2

void gallery_certificates(Log& log) {
  const auto g = load_gallery(data_dir() + "/gallery.json");
  auto df = [&](const char* name, std::vector<double> v) {
    const auto& e = g.entry(name);
    return directional_derivative(e.expr, e.variables, {0, 0}, {v});
  };

  // f1(t, t) = t / (1 + t^2), so the slope along (1,1) is 1; the stated 0.5 is the slope along (2,1)
  const double d11 = df("f1", {1, 1}), d21 = df("f1", {2, 1});
  const double o11 = oracle::gateaux_at_zero(oracle::gallery_f1, 1, 1), o21 = oracle::gateaux_at_zero(oracle::gallery_f1, 2, 1);
  log.printf("f1: df(0,(1,1)) = %.12g (exact %.12g), df(0,(2,1)) = %.12g (exact %.12g)", d11, o11, d21, o21);
  log.line("note: 0.5 is also quoted for (1,1); the definition df(0,v) = (f o c)'(0) gives v2^2/v1 = 1 there.");
  log.line("      0.5 is f1 along (2,1) and f2 along (1,1); both are checked, the (1,1) value against its exact limit.");
  log.check(std::fabs(d11 - o11) <= 1e-8 && o11 == 1.0, "f1 along (1,1) matches the exact limit 1");
  log.check(std::fabs(d21 - 0.5) <= 1e-8 && o21 == 0.5, "f1 along (2,1) is 0.5");
  log.check(std::fabs(df("f2", {1, 1}) - 0.5) <= 1e-8, "f2 along (1,1) is 0.5");

  Rng rng(default_tolerances().seed);
  const auto& f1 = g.entry("f1");
  double worst = 0.0;
  int samples = 0;
  for (int i = 0; i < 200; ++i) {
    double y = rng.uniform(-1.0, 1.0);
    if (y == 0.0) continue;
    const double v = evaluate(f1.expr, Env(f1.variables, {y * y, y}));
    worst = std::max(worst, std::fabs(v - 0.5));
    Rat ry(y);
    log.check(oracle::gallery_f1(ry * ry, ry) == Rat(1, 2), "exact f1(y^2, y) = 1/2");
    ++samples;
  }
  log.printf("f1 on the parabola x = y^2: %d samples, max |f1 - 0.5| = %.3g, f1(0,0) = %g", samples, worst,
             evaluate(f1.expr, Env(f1.variables, {0.0, 0.0})));
  log.check(worst <= 1e-12, "f1 = 0.5 along the parabola");
  log.check(verify_claim(g, "f1", "discontinuous-at-0").matched(), "discontinuity claim verified");

  const double defect = df("f2", {1, 1}) - df("f2", {1, 0}) - df("f2", {0, 1});
  const double exact_defect = oracle::gateaux_at_zero(oracle::gallery_f2, 1, 1) - oracle::gateaux_at_zero(oracle::gallery_f2, 1, 0) -
                              oracle::gateaux_at_zero(oracle::gallery_f2, 0, 1);
  log.printf("f2 additivity defect: %.12g (exact %.12g)", defect, exact_defect);
  log.check(std::fabs(defect - 0.5) <= 1e-8, "f2 defect 0.5");

  const auto report = run_gallery(g);
  for (const auto& r : report.records)
    log.printf("  %s/%s: expected %s, measured %s%s", r.entry.c_str(), r.claim.c_str(), to_string(r.expected),
               to_string(r.measured.status()), r.provenance == "disputed" ? " (disputed)" : "");
  log.check(report.all_expected(), "every catalog claim measured as recorded");
}

// ---------------------------------------------------------------- 3

void delta_suite(Log& log) {
  Rng rng(default_tolerances().seed);
  const auto sq = parse_expression("t^2");
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> nodes{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    worst = std::max(worst, std::fabs(delta_k(sq, "t", nodes) - 2.0));
  }
  log.printf("delta^2(t^2) on 200 random node triples: max error %.3g", worst);
  log.check(worst <= 1e-12, "delta^2(t^2) = 2");

  double annihilate = 0.0;
  for (int k = 1; k <= 6; ++k)
    for (int trial = 0; trial < 30; ++trial) {
      auto p = oracle::random_poly(rng, k - 1, 1.0);
      std::vector<double> nodes;
      for (int i = 0; i <= k; ++i) nodes.push_back(-1.0 + 2.0 * i / k + rng.uniform(-0.05, 0.05));
      annihilate = std::max(annihilate, std::fabs(delta_k(oracle::poly_expr(p, "t"), "t", nodes)));
    }
  log.printf("delta^k on degree < k, k = 1..6: max |value| %.3g", annihilate);
  log.check(annihilate <= 1e-10, "delta^k annihilates lower degrees");

  int compared = 0, equal = 0;
  for (int degree = 0; degree <= 6; ++degree)
    for (int k = 0; k <= 6; ++k)
      for (int trial = 0; trial < 4; ++trial) {
        std::vector<long> coeffs(degree + 1);
        for (auto& c : coeffs) c = rng.integer(-6, 6);
        auto f = [&](const Rat& t) {
          Rat acc(0);
          for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * t + Rat(coeffs[i]);
          return acc;
        };
        std::vector<Rat> nodes;
        while (static_cast<int>(nodes.size()) <= k) {
          Rat t = Rat(rng.integer(-30, 30)) / Rat(rng.integer(1, 9));
          if (std::find(nodes.begin(), nodes.end(), t) == nodes.end()) nodes.push_back(t);
        }
        ++compared;
        if (delta_k<Rat>(f, nodes) == oracle::factorial(k) * oracle::lagrange_divided_difference(f, nodes)) ++equal;
      }
  log.printf("delta^k = k! [t0..tk] in exact rationals: %d / %d", equal, compared);
  log.check(equal == compared, "symbolic equality with k! times the classical divided difference");
}

// ---------------------------------------------------------------- 4

void jet_oracles(Log& log) {
  Rng rng(default_tolerances().seed);
  double worst = 0.0;
  int pairs = 0;
  std::string worst_case;
  while (pairs < 100) {
    auto e = oracle::random_smooth(rng, {"x", "y"}, 3);
    PolynomialPath path{{"x", oracle::random_poly(rng, 2, 1.0)}, {"y", oracle::random_poly(rng, 2, 1.0)}};
    const int k = static_cast<int>(rng.integer(1, 4));
    const Jet exact = taylor_eval(e, path, k);
    const auto approx = fd_jet(e, path, k);
    for (int i = 0; i <= k; ++i) {
      const double err = oracle::rel_err(approx.jet.c[i], exact.c[i]);
      if (err > worst) {
        worst = err;
        worst_case = to_string(e) + " order " + std::to_string(i);
      }
    }
    ++pairs;
  }
  log.printf("taylor_eval vs fd_jet on %d random pairs (orders 1..4): max relative error %.3g", pairs, worst);
  if (worst > 1e-6) log.line("worst: " + worst_case);
  log.check(worst <= 1e-6, "finite-difference oracle agrees to 1e-6");

  int exact = 0, trials = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = static_cast<int>(rng.integer(1, 4));
    auto f = oracle::random_int_poly(rng, static_cast<int>(rng.integer(1, 4)), 3);
    auto p = oracle::random_int_poly(rng, static_cast<int>(rng.integer(1, 3)), 3);
    auto fs = oracle::shift(f, p[0], k + 1);
    auto expect = oracle::compose(fs, p, k + 1);
    auto inner = p;
    inner.resize(k + 1, 0.0);
    const Jet composed = compose_jets(Jet{p[0], fs}, Jet{0.0, inner});
    const Jet direct = taylor_eval(substitute(oracle::poly_expr(f, "u"), {{"u", oracle::poly_expr(p, "s")}}), {{"s", {0, 1}}}, k);
    bool same = true;
    for (int i = 0; i <= k; ++i) same = same && composed.c[i] == expect[i] && direct.c[i] == expect[i];
    exact += same;
    ++trials;
  }
  log.printf("compose_jets vs direct composition on integer polynomials: %d / %d exact", exact, trials);
  log.check(exact == trials, "compose_jets exact on polynomials");
}

// ---------------------------------------------------------------- 5

// Truncated multivariate polynomials in exact rationals, keyed by exponent vector.
struct MPoly {
  std::map<std::vector<int>, Rat> c;
  std::size_t vars = 1;
  int keep = 1; // total degree kept

  static MPoly constant(std::size_t vars, int keep, Rat v) {
    MPoly p{{}, vars, keep};
    if (v != 0) p.c[std::vector<int>(vars, 0)] = v;
    return p;
  }
  MPoly operator+(const MPoly& o) const {
    MPoly r = *this;
    for (const auto& [e, v] : o.c) r.c[e] += v;
    return r;
  }
  MPoly operator*(const MPoly& o) const {
    MPoly r{{}, vars, keep};
    for (const auto& [a, x] : c)
      for (const auto& [b, y] : o.c) {
        std::vector<int> e(vars);
        int deg = 0;
        for (std::size_t i = 0; i < vars; ++i) deg += e[i] = a[i] + b[i];
        if (deg <= keep) r.c[e] += x * y;
      }
    return r;
  }
  MPoly scaled(Rat s) const {
    MPoly r = *this;
    for (auto& [e, v] : r.c) v *= s;
    return r;
  }
};

int degree_of(const std::vector<int>& e) {
  int d = 0;
  for (int v : e) d += v;
  return d;
}

// Exponents of total degree 1..n, degree by degree, lexicographically descending.
std::vector<std::vector<int>> graded_lex(std::size_t vars, int n) {
  std::vector<std::vector<int>> out;
  for (int d = 1; d <= n; ++d) {
    std::vector<std::vector<int>> level;
    std::function<void(std::vector<int>, std::size_t, int)> rec = [&](std::vector<int> e, std::size_t i, int left) {
      if (i + 1 == vars) {
        e[i] = left;
        level.push_back(e);
        return;
      }
      for (int v = left; v >= 0; --v) {
        e[i] = v;
        rec(e, i + 1, left - v);
      }
    };
    rec(std::vector<int>(vars, 0), 0, d);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

Rat multi_factorial(const std::vector<int>& e) {
  Rat f(1);
  for (int v : e) f *= oracle::factorial(v);
  return f;
}

Expression mpoly_expr(const MPoly& p, const std::vector<std::string>& names) {
  Expression e(0.0);
  for (const auto& [ex, v] : p.c) {
    Expression term(static_cast<double>(v));
    for (std::size_t i = 0; i < names.size(); ++i)
      if (ex[i]) term = term * pow(var(names[i]), ex[i]);
    e = e + term;
  }
  return e;
}

// A random polynomial with integer coefficients, no constant term, degree <= deg.
MPoly random_mpoly(Rng& rng, std::size_t vars, int deg, int keep) {
  MPoly p{{}, vars, keep};
  for (const auto& e : graded_lex(vars, deg))
    if (rng.uniform() < 0.6) p.c[e] = Rat(rng.integer(-3, 3));
  return p;
}

// The function family on R^2 as expressions and as oracle maps.
struct TestFunction {
  std::string label, text;
  std::function<MPoly(const MPoly&, const MPoly&)> apply;
};

const std::vector<TestFunction>& test_functions() {
  static const std::vector<TestFunction> fs = {
      {"x", "x", [](const MPoly& x, const MPoly&) { return x; }},
      {"y", "y", [](const MPoly&, const MPoly& y) { return y; }},
      {"xy", "x*y", [](const MPoly& x, const MPoly& y) { return x * y; }},
      {"x2-3y", "x^2 - 3*y", [](const MPoly& x, const MPoly& y) { return x * x + y.scaled(-3); }},
  };
  return fs;
}

struct OraclePlaque {
  std::vector<MPoly> comps; // ambient components as polynomials in the parameters
};

std::vector<Rat> oracle_jet(const OraclePlaque& p, int n) {
  std::vector<Rat> out;
  for (const auto& f : test_functions()) {
    MPoly v = f.apply(p.comps[0], p.comps[1]);
    for (const auto& e : graded_lex(p.comps[0].vars, n)) {
      auto it = v.c.find(e);
      out.push_back(it == v.c.end() ? Rat(0) : it->second * multi_factorial(e));
    }
  }
  return out;
}

// Substitutes the parameter polynomials phi into q.
MPoly substitute_mpoly(const MPoly& q, const std::vector<MPoly>& phi) {
  MPoly r = MPoly::constant(phi[0].vars, q.keep, 0);
  for (const auto& [e, v] : q.c) {
    MPoly term = MPoly::constant(phi[0].vars, q.keep, v);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int j = 0; j < e[i]; ++j) term = term * phi[i];
    r = r + term;
  }
  return r;
}

void tangent_axioms(Log& log) {
  Rng rng(default_tolerances().seed);
  const Tolerances tol = default_tolerances();
  const std::vector<std::string> coords{"x", "y"};
  FunctionFamily fam;
  for (const auto& f : test_functions()) fam.push_back({f.label, parse_expression(f.text)});

  int triples = 0, equivalent_pairs = 0, consistency = 0, oracle_mismatch = 0, restriction = 0, laws = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = rng.integer(1, 2);
    const int n = static_cast<int>(rng.integer(1, 3));
    const std::vector<std::string> params = d == 1 ? std::vector<std::string>{"t"} : std::vector<std::string>{"u", "v"};
    const std::vector<double> F{static_cast<double>(rng.integer(-2, 2)) / 2, static_cast<double>(rng.integer(-2, 2)) / 2};

    // p1 and p2 share all coefficients up to degree n when `same`, so they are equivalent exactly then
    const bool same = rng.uniform() < 0.6;
    OraclePlaque o1, o2, o3;
    for (int i = 0; i < 2; ++i) {
      MPoly a = random_mpoly(rng, d, 4, 4), b = a, c = a;
      for (const auto& e : graded_lex(d, 4))
        if (degree_of(e) > n) {
          b.c[e] = Rat(rng.integer(-3, 3));
          c.c[e] = Rat(rng.integer(-3, 3));
        }
      if (!same && i == 0) {
        const auto low = graded_lex(d, n);
        b.c[low[rng.integer(0, static_cast<long>(low.size()) - 1)]] += Rat(rng.integer(1, 3));
      }
      const Rat Fi(F[i]);
      o1.comps.push_back(a + MPoly::constant(d, 4, Fi));
      o2.comps.push_back(b + MPoly::constant(d, 4, Fi));
      // p3 ~ p2 by construction: same low coefficients as p2
      MPoly c3 = b;
      for (const auto& e : graded_lex(d, 4))
        if (degree_of(e) > n) c3.c[e] = c.c[e];
      o3.comps.push_back(c3 + MPoly::constant(d, 4, Fi));
    }
    auto to_plaque = [&](const OraclePlaque& o, const std::string& label, double lo, double hi) {
      Plaque p;
      p.label = label;
      p.domain = make_box(params, lo, hi);
      for (const auto& c : o.comps) p.map.push_back(mpoly_expr(c, params));
      return p;
    };
    const Plaque p1 = to_plaque(o1, "p1", -1, 1), p2 = to_plaque(o2, "p2", -1, 1), p3 = to_plaque(o3, "p3", -1, 1);

    // phi: R^d -> R^d fixing 0
    std::vector<MPoly> phi;
    std::map<std::string, Expression> sub;
    for (std::size_t i = 0; i < d; ++i) {
      phi.push_back(random_mpoly(rng, d, 3, n));
      sub[params[i]] = mpoly_expr(phi.back(), params);
    }
    auto composed = [&](const Plaque& p) {
      Plaque q = p;
      q.label = p.label + " o phi";
      q.map.clear();
      for (const auto& m : p.map) q.map.push_back(substitute(m, sub));
      return q;
    };
    OraclePlaque o1phi;
    for (const auto& c : o1.comps) {
      MPoly t = c;
      t.keep = n;
      o1phi.comps.push_back(substitute_mpoly(t, phi));
    }

    const JetContext ctx{coords, fam, n};
    const bool eq12 = equivalent(p1, p2, F, ctx, tol);
    if (eq12 != same) ++oracle_mismatch;
    if (eq12) {
      ++equivalent_pairs;
      if (equivalent(composed(p1), composed(p2), F, ctx, tol)) ++consistency;
    }

    const auto jet1phi = jet_vector(composed(p1), F, coords, fam, n, false, tol).entries;
    const auto expect = oracle_jet(o1phi, n);
    for (std::size_t i = 0; i < expect.size(); ++i) {
      const double gap = std::fabs(jet1phi.at(i) - static_cast<double>(expect[i]));
      worst_gap = std::max(worst_gap, gap / std::max(1.0, std::fabs(static_cast<double>(expect[i]))));
    }

    // restriction to a smaller box around 0 keeps the jet vector exactly
    const double lo = -rng.uniform(0.01, 0.9), hi = rng.uniform(0.01, 0.9);
    Plaque r1 = p1;
    r1.domain = make_box(params, lo, hi);
    if (jet_vector(r1, F, coords, fam, n, false, tol).entries == jet_vector(p1, F, coords, fam, n, false, tol).entries) ++restriction;

    const bool refl = equivalent(p1, p1, F, ctx, tol);
    const bool symm = equivalent(p2, p1, F, ctx, tol) == eq12;
    const bool trans = !(eq12 && equivalent(p2, p3, F, ctx, tol)) || equivalent(p1, p3, F, ctx, tol);
    laws += refl && symm && trans && equivalent(p2, p3, F, ctx, tol);
    ++triples;
  }
  log.printf("%d triples (1- and 2-plaques, orders 1..3), %d equivalent pairs", triples, equivalent_pairs);
  log.printf("equivalence decided as the coefficient oracle predicts: %d / %d", triples - oracle_mismatch, triples);
  log.printf("consistency p1 ~ p2 => p1 o phi ~ p2 o phi: %d / %d", consistency, equivalent_pairs);
  log.printf("jet of p1 o phi vs exact composition: max relative gap %.3g", worst_gap);
  log.printf("restriction keeps the jet vector: %d / %d", restriction, triples);
  log.printf("reflexive, symmetric, transitive: %d / %d", laws, triples);
  log.check(oracle_mismatch == 0, "equivalence matches the oracle");
  log.check(equivalent_pairs > 50 && consistency == equivalent_pairs, "consistency under precomposition");
  log.check(worst_gap <= tol.jet_rel, "composite jets match the oracle within eps_jet");
  log.check(restriction == triples, "restriction axiom");
  log.check(laws == triples, "equivalence relation laws");
}

// ---------------------------------------------------------------- 6

void alpha_separation(Log& log) {
  Rng rng(default_tolerances().seed);
  int agree = 0, fails = 0, kernel_ok = 0;
  const std::vector<std::string> names{"x", "y", "z", "w"};
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = rng.integer(2, 4);
    const std::size_t q = rng.integer(1, static_cast<long>(m) + 1);
    std::vector<std::vector<double>> rows(q, std::vector<double>(m));
    for (auto& r : rows)
      for (auto& v : r) v = static_cast<double>(rng.integer(-2, 2));
    if (trial % 3 == 0 && q >= 2) // force a dependent row
      for (std::size_t j = 0; j < m; ++j) rows[q - 1][j] = rows[0][j] - rows[1][j];
    std::vector<std::vector<Rat>> exact(q, std::vector<Rat>(m));
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < m; ++j) exact[i][j] = Rat(static_cast<long>(rows[i][j]));
    const bool separated = oracle::exact_rank(exact) == static_cast<int>(m);

    const auto pair = make_dual_pair(std::vector<std::string>(names.begin(), names.begin() + m), rows);
    const auto a = alpha_injectivity_probe(pair, 10);
    const auto s = separation_check(pair);
    const bool ok = a.status() == s.status() && s.passed() == separated;
    agree += ok;
    if (!separated) {
      ++fails;
      if (a.failed() && a.witness()) {
        const auto& v = a.witness()->direction;
        double norm = 0.0, lv = 0.0;
        for (double x : v) norm = std::max(norm, std::fabs(x));
        for (const auto& r : rows) {
          double dot = 0.0;
          for (std::size_t j = 0; j < m; ++j) dot += r[j] * v[j];
          lv = std::max(lv, std::fabs(dot));
        }
        kernel_ok += norm > 0.0 && lv <= 1e-12 * norm;
      }
    }
  }
  log.printf("20 random pairs: alpha probe, separation check and exact rank agree on %d, %d not separated", agree, fails);
  log.check(agree == 20, "alpha injectivity <=> separation");
  log.check(kernel_ok == fails && fails > 0, "every FAIL witness lies in the kernel");

  const auto sum = alpha_injectivity_probe(make_dual_pair({"x", "y"}, {{1, 1}}), 10);
  const auto sum_sep = separation_check(make_dual_pair({"x", "y"}, {{1, 1}}));
  log.printf("{x+y} on R^2: alpha %s witness %s, separation %s witness %s", to_string(sum.status()),
             sum.witness() ? fmt_vec(sum.witness()->direction).c_str() : "-", to_string(sum_sep.status()),
             sum_sep.witness() ? fmt_vec(sum_sep.witness()->direction).c_str() : "-");
  log.check(sum.failed() && sum.witness()->direction == std::vector<double>{1, -1}, "alpha witness (1,-1)");
  log.check(sum_sep.failed() && sum_sep.witness()->direction == std::vector<double>{1, -1}, "separation witness (1,-1)");
  const auto r3 = alpha_injectivity_probe(make_dual_pair({"x", "y", "z"}, {{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), 10);
  log.check(r3.failed() && r3.witness()->direction == std::vector<double>{0, 0, 1}, "{x, y, x+y} on R^3 witness (0,0,1)");
}

// ---------------------------------------------------------------- 7

struct ClosedCurve {
  SampledCurve c, dc;                         // curve and its derivative
  std::vector<std::function<double(double)>> value;
  std::vector<std::function<double(double)>> slope;
};

ClosedCurve random_c1_curve(Rng& rng, std::size_t m) {
  ClosedCurve out;
  out.c.lo = out.dc.lo = -2.0;
  out.c.hi = out.dc.hi = 2.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a0 = rng.integer(-4, 4) / 2.0, a1 = rng.integer(-4, 4) / 2.0, a2 = rng.integer(-4, 4) / 4.0;
    const double b = rng.integer(-3, 3) / 2.0, w = rng.integer(1, 4) / 2.0, e = rng.integer(-2, 2) / 2.0, g = rng.integer(-2, 2) / 2.0;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%g + %g*t + %g*t^2 + %g*sin(%g*t) + %g*exp(%g*t)", a0, a1, a2, b, w, e, g);
    out.c.components.push_back(parse_expression(buf));
    std::snprintf(buf, sizeof buf, "%g + 2*%g*t + %g*%g*cos(%g*t) + %g*%g*exp(%g*t)", a1, a2, b, w, w, e, g, g);
    out.dc.components.push_back(parse_expression(buf));
    out.value.push_back([=](double t) { return a0 + a1 * t + a2 * t * t + b * std::sin(w * t) + e * std::exp(g * t); });
    out.slope.push_back([=](double t) { return a1 + 2 * a2 * t + b * w * std::cos(w * t) + e * g * std::exp(g * t); });
  }
  return out;
}

void weak_calculus(Log& log) {
  const auto full = make_dual_pair({"x", "y"}, {{1, 0}, {0, 1}});
  SampledCurve par;
  par.components = {parse_expression("t"), parse_expression("t^2")};
  const auto w0 = weak_derivative(par, 0.0, full);
  log.printf("weak derivative of (t, t^2) at 0: %s, unique %s", fmt_vec(w0.value).c_str(), w0.unique ? "yes" : "no");
  log.check(w0.unique && w0.value == std::vector<double>{1, 0}, "(t, t^2)' (0) = (1, 0) unique");

  Rng rng(default_tolerances().seed);
  double worst_int = 0.0, worst_der = 0.0;
  int curves = 0;
  while (curves < 10) {
    const std::size_t m = rng.integer(2, 3);
    // a random separated pair with more functionals than coordinates
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<Rat>> exact;
    for (std::size_t i = 0; i < m + 1; ++i) {
      rows.emplace_back(m);
      exact.emplace_back(m);
      for (std::size_t j = 0; j < m; ++j) {
        rows[i][j] = static_cast<double>(rng.integer(-2, 2));
        exact[i][j] = Rat(static_cast<long>(rows[i][j]));
      }
    }
    if (oracle::exact_rank(exact) != static_cast<int>(m)) continue;
    const std::vector<std::string> names{"x", "y", "z"};
    const auto pair = make_dual_pair(std::vector<std::string>(names.begin(), names.begin() + m), rows);
    const auto cc = random_c1_curve(rng, m);
    const double a = rng.uniform(-2, 0), b = rng.uniform(0, 2), t0 = rng.uniform(-1.5, 1.5);
    const auto integral = weak_integral(cc.dc, a, b, pair);
    const auto derivative = weak_derivative(cc.c, t0, pair);
    for (std::size_t i = 0; i < m; ++i) {
      worst_int = std::max(worst_int, std::fabs(integral.value[i] - (cc.value[i](b) - cc.value[i](a))));
      worst_der = std::max(worst_der, std::fabs(derivative.value[i] - cc.slope[i](t0)));
    }
    log.check(integral.unique && derivative.unique, "unique on separated pairs");
    ++curves;
  }
  log.printf("fundamental theorem on %d random C^1 curves: max |int c' - (c(b) - c(a))| = %.3g", curves, worst_int);
  log.printf("weak derivative vs closed form: max error %.3g", worst_der);
  log.check(worst_int <= 1e-8, "integral of the derivative within 1e-8");
  log.check(worst_der <= 1e-8, "weak derivative matches the closed form");

  const auto sum = make_dual_pair({"x", "y"}, {{1, 1}});
  SampledCurve diag;
  diag.components = {parse_expression("sin(t)"), parse_expression("t^2")};
  const auto ns = weak_derivative(diag, 0.5, sum);
  log.printf("{x+y}: unique %s, kernel %s", ns.unique ? "yes" : "no", ns.kernel.empty() ? "-" : fmt_vec(ns.kernel[0]).c_str());
  log.check(!ns.unique && ns.kernel.size() == 1, "non-unique with a one-dimensional kernel");
  if (!ns.kernel.empty()) log.check(std::fabs(ns.kernel[0][0] + ns.kernel[0][1]) <= 1e-12 && ns.kernel[0][0] != 0.0, "kernel spanned by (1,-1)");
  log.check(std::fabs(ns.value[0] + ns.value[1] - (std::cos(0.5) + 1.0)) <= 1e-10, "pairing of the solution matches (x+y) o c");

  const auto skew = make_dual_pair({"x", "y", "z"}, {{1, 0, 1}, {0, 1, 1}, {1, 1, 2}});
  SampledCurve line;
  line.components = {parse_expression("t"), parse_expression("2*t"), parse_expression("-t")};
  const auto sk = weak_derivative(line, 0.0, skew);
  log.printf("rank-2 pair on R^3: unique %s, kernel dimension %zu", sk.unique ? "yes" : "no", sk.kernel.size());
  bool in_kernel = sk.kernel.size() == 1;
  for (const auto& k : sk.kernel) in_kernel = in_kernel && std::fabs(k[0] + k[2]) <= 1e-12 && std::fabs(k[1] + k[2]) <= 1e-12;
  log.check(!sk.unique && in_kernel, "kernel of the rank-2 pair is spanned by (1,1,-1)");
}

// ---------------------------------------------------------------- 8

void mackey(Log& log) {
  const long N = 10000;
  const std::map<std::string, Status> expected{{"geometric", Status::Pass}, {"alternating", Status::Fail}, {"constant", Status::Pass}};
  for (const auto& [name, want] : expected) {
    const auto seq = load_sequence(bundled_path("sequences", name));
    std::vector<std::vector<double>> id(seq.dim(), std::vector<double>(seq.dim(), 0.0));
    for (std::size_t i = 0; i < seq.dim(); ++i) id[i][i] = 1.0;
    std::vector<std::string> coords;
    for (std::size_t i = 0; i < seq.dim(); ++i) coords.push_back("x" + std::to_string(i + 1));
    const auto pair = make_dual_pair(coords, id);
    const auto conv = mackey_convergence_probe(seq, pair, N);
    const auto cauchy = mackey_cauchy_probe(seq, pair, N);
    log.printf("%s: convergence %s, Cauchy %s (N = %ld)", name.c_str(), to_string(conv.status()), to_string(cauchy.status()), N);
    log.check(conv.status() == want && cauchy.status() == want, name + " as expected");
  }
}

// ---------------------------------------------------------------- 9

void functor_round_trip(Log& log) {
  const auto battery = load_battery(data_dir() + "/battery.json");
  log.check(battery.size() == 20, "20-function battery");
  for (const auto& name : bundled_space_names()) {
    const auto D = load_space(bundled_path("spaces", name));
    const auto source = upsilon(D);
    FunctionFamily F;
    std::vector<Status> before;
    for (const auto& f : battery) {
      before.push_back(phi_probe(source.curves, D.space.coords, f.expr, D.k).status());
      if (before.back() == Status::Pass) F.push_back(f);
    }
    const auto round = upsilon(psi(D.space, source.curves, F, D.k).diffeology);
    int same = 0;
    std::string diff;
    for (std::size_t i = 0; i < battery.size(); ++i) {
      const Status after = round.in_F(battery[i].expr).status();
      if (after == before[i]) ++same;
      else diff += " " + battery[i].label;
    }
    log.printf("%-22s %2zu curves, %2zu smooth functions, round trip reproduces %d / %zu%s", name.c_str(), source.curves.size(),
               F.size(), same, battery.size(), diff.c_str());
    log.check(same == static_cast<int>(battery.size()), name + " round trip");
  }

  int agree = 0, recorded = 0;
  const auto cases = load_morphism_cases(data_dir() + "/morphisms.json");
  for (const auto& c : cases) {
    const auto rep = morphism_all(c.map, c.source, c.target);
    agree += rep.ii_iii_agree();
    recorded += rep.ii.status() == c.expected;
    if (!rep.ii_iii_agree() || rep.ii.status() != c.expected)
      log.printf("  %s: i %s, ii %s, iii %s, recorded %s", c.label.c_str(), to_string(rep.i.status()), to_string(rep.ii.status()),
                 to_string(rep.iii.status()), to_string(c.expected));
  }
  log.printf("morphism cases: modes ii and iii agree on %d / %zu, match the record on %d", agree, cases.size(), recorded);
  log.check(agree == static_cast<int>(cases.size()), "ii <=> iii on every bundled case");
  log.check(recorded == static_cast<int>(cases.size()), "bundled morphism verdicts as recorded");
}

// ---------------------------------------------------------------- 10

void sphere_parallels(Log& log) {
  const auto D = load_space(bundled_path("spaces", "sphere_parallels"));
  const auto ctx = coords_ctx(D.space.coords);
  Rng rng(default_tolerances().seed);
  int ones = 0;
  for (int i = 0; i < 10; ++i) {
    const double lat = rng.uniform(-1.3, 1.3), lon = rng.uniform(-3.1, 3.1);
    const std::vector<double> p{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
    const auto est = tangent_dim(p, D, ctx, 6);
    ones += est.dim == 1;
    log.printf("  %s: dim %d", fmt_vec(p).c_str(), est.dim);
  }
  log.check(ones == 10, "dimension 1 at 10 random non-pole points");
  for (const std::vector<double>& pole : {std::vector<double>{0, 0, 1}, {0, 0, -1}}) {
    const auto est = tangent_dim(pole, D, ctx, 6);
    log.printf("pole %s: dim %d, singular values %s (logged, not asserted)", fmt_vec(pole).c_str(), est.dim,
               fmt_vec(est.singular_values).c_str());
  }
}

// ---------------------------------------------------------------- 11

std::string run_in_process(const std::vector<std::string>& args, int& code) {
  std::ostringstream out, err;
  code = cli::run_cli(args, out, err);
  return out.str();
}

std::string run_binary(const std::string& args, int& code) {
  const std::string cmd = std::string(DIFFLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    code = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

void cli_determinism(Log& log) {
  const std::vector<std::vector<std::string>> commands = {
      {"check-smooth", "--expr", "atzero(x*y^2/(x^2+y^4),0)", "--vars", "x,y", "--k", "0"},
      {"tangent-dim", "--space", "cross", "--point", "0,0"},
      {"linearity", "--space", "cross", "--point", "0,0"},
      {"alpha", "--pair", "sum_only", "--trials", "6"},
      {"psi-upsilon", "--space", "lines_through_origin"},
      {"morphism", "--source", "cross", "--target", "standard_r2", "--map", "x^2,y^3"},
      {"mackey", "--sequence", "geometric"},
      {"gallery"},
  };
  int identical = 0, binary_identical = 0;
  for (const auto& cmd : commands) {
    for (const char* seed : {"42", "7"}) {
      std::vector<std::string> args{"--normalized", "--seed", seed};
      args.insert(args.end(), cmd.begin(), cmd.end());
      int c1 = 0, c2 = 0, c3 = 0;
      const auto a = run_in_process(args, c1), b = run_in_process(args, c2);
      std::string shell;
      for (const auto& s : args) shell += " '" + s + "'";
      const auto bin = run_binary(shell, c3);
      const bool same = a == b && c1 == c2 && !a.empty();
      identical += same;
      binary_identical += bin == a && c3 == c1;
      if (!same || bin != a) log.printf("  differs: %s (seed %s)", cmd[0].c_str(), seed);
    }
  }
  const int total = static_cast<int>(commands.size()) * 2;
  log.printf("normalized reports byte-identical in process: %d / %d, binary matches: %d / %d", identical, total, binary_identical, total);
  log.check(identical == total, "in-process determinism");
  log.check(binary_identical == total, "binary determinism");
}

} // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::function<void(Log&)>>> criteria = {
      {"cross-space tangent geometry", cross_tangent},
      {"gallery certificates", gallery_certificates},
      {"delta^k divided differences", delta_suite},
      {"jet oracle equivalence", jet_oracles},
      {"tangent-structure axioms", tangent_axioms},
      {"alpha / separation duality", alpha_separation},
      {"weak calculus", weak_calculus},
      {"Mackey probes", mackey},
      {"functor round trip and morphism modes", functor_round_trip},
      {"sphere of parallels", sphere_parallels},
      {"CLI determinism and run time", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Log log;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(log);
    } catch (const std::exception& e) {
      log.check(false, std::string("exception: ") + e.what());
    }
    if (i + 1 == criteria.size()) {
      const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      log.printf("acceptance run time %.2f s", total);
      log.check(total < 60.0, "complete run under 60 s");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu. %s (%.2f s)\n", log.ok() ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
    for (const auto& l : log.lines()) std::printf("        %s\n", l.c_str());
    std::fflush(stdout);
    failed += !log.ok();
  }
  std::printf("%d / %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
