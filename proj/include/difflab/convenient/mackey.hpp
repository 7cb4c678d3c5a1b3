#pragma once

#include "difflab/convenient/dual_pair.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/core/verdict.hpp"
#include "difflab/expr/expression.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace difflab {

/// x_n for n = 1, 2, ...: a closed form in n, an explicit list, or partial sums /
/// products of per-component terms in the summation index (also named n).
struct VectorSequence {
  enum class Kind { ClosedForm, List, PartialSums, PartialProducts };
  std::string name;
  Kind kind = Kind::ClosedForm;
  std::string index = "n";
  std::vector<Expression> terms;
  std::vector<std::vector<double>> list;
  std::vector<double> limit;

  std::size_t dim() const { return kind == Kind::List ? (list.empty() ? limit.size() : list[0].size()) : terms.size(); }

  /// x_1 .. x_N (a list is truncated to N).
  std::vector<std::vector<double>> generate(long N) const {
    std::vector<std::vector<double>> out;
    if (kind == Kind::List) {
      for (long n = 0; n < N && n < static_cast<long>(list.size()); ++n) out.push_back(list[static_cast<std::size_t>(n)]);
      return out;
    }
    const std::size_t m = terms.size();
    std::vector<double> acc(m, kind == Kind::PartialProducts ? 1.0 : 0.0);
    out.reserve(static_cast<std::size_t>(N));
    for (long n = 1; n <= N; ++n) {
      Env env({index}, {static_cast<double>(n)});
      std::vector<double> x(m);
      for (std::size_t i = 0; i < m; ++i) {
        double v = evaluate(terms[i], env);
        if (kind == Kind::PartialSums) acc[i] += v;
        else if (kind == Kind::PartialProducts) acc[i] *= v;
        x[i] = kind == Kind::ClosedForm ? v : acc[i];
        if (!std::isfinite(x[i])) throw DomainError("sequence entry " + std::to_string(n) + " is not finite");
      }
      out.push_back(std::move(x));
    }
    return out;
  }
};

inline const char* to_string(VectorSequence::Kind k) {
  switch (k) {
  case VectorSequence::Kind::ClosedForm: return "closed_form";
  case VectorSequence::Kind::List: return "list";
  case VectorSequence::Kind::PartialSums: return "partial_sums";
  case VectorSequence::Kind::PartialProducts: return "partial_products";
  }
  return "?";
}

namespace detail {

inline double functional_sup(const DualPair& pair, const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (Eigen::Index r = 0; r < pair.L.rows(); ++r) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < pair.L.cols(); ++c) s += pair.L(r, c) * (a[static_cast<std::size_t>(c)] - b[static_cast<std::size_t>(c)]);
    d = std::max(d, std::fabs(s));
  }
  return d;
}

// Shared decision on a decay profile d(n), n = 1..N, and its scaling t(n).
inline Verdict decay_verdict(const std::vector<double>& d, const std::vector<double>& t, const std::string& what,
                             std::vector<Residual> trace, long pass_end) {
  const long N = static_cast<long>(d.size());
  const long n100 = std::max(1L, N / 100), n10 = std::max(1L, N / 10);
  auto at = [&](long n) { return d[static_cast<std::size_t>(n - 1)]; };
  auto tt = [&](long n) { return t[static_cast<std::size_t>(n - 1)]; };
  double head = 0.0;
  for (long n = 1; n <= n10; ++n) head = std::max(head, at(n));
  double tail = std::numeric_limits<double>::infinity();
  for (long n = pass_end / 2 > 0 ? pass_end / 2 : 1; n <= pass_end; ++n) tail = std::min(tail, at(n));
  double bound = 0.0;
  for (long n = 1; n <= pass_end; ++n) bound = std::max(bound, tt(n) * at(n));
  trace.push_back({"scaled_sup", static_cast<double>(pass_end), bound});
  trace.push_back({"head_max", static_cast<double>(n10), head});
  trace.push_back({"tail_min", static_cast<double>(pass_end), tail});
  const long mid = std::max(1L, pass_end / 2);
  const bool decays = at(mid) <= 0.1 * at(n100);
  const bool grows = tt(pass_end) >= 2.0 * tt(n100);
  if (decays && grows) {
    Verdict v = Verdict::pass(trace);
    v.note("t_n grows from " + format_number(tt(n100)) + " to " + format_number(tt(pass_end)) +
           " with sup t_n " + what + " = " + format_number(bound));
    return v;
  }
  if (tail > 0.0 && tail >= 0.5 * head) {
    Witness w;
    w.kind = "no-decay";
    w.values["head_max"] = head;
    w.values["tail_min"] = tail;
    w.note = what + " stays above half its initial size over the window, so no scaling t_n -> infinity keeps it bounded";
    return Verdict::fail(w, trace);
  }
  return Verdict::inconclusive(trace, what + " neither decays clearly nor persists on the window");
}

} // namespace detail

/// Mackey convergence x_n -> x0 with the schedule t_n = min(n, 1/sqrt(d_n + 1/n^2)).
inline Verdict mackey_convergence_probe(const VectorSequence& seq, const DualPair& pair, long N) {
  if (seq.limit.size() != pair.dim()) throw SchemaError("sequence limit has the wrong dimension");
  auto xs = seq.generate(N);
  if (static_cast<long>(xs.size()) < 100) throw DomainError("window must contain at least 100 terms");
  std::vector<double> d, t;
  std::vector<Residual> trace;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    d.push_back(detail::functional_sup(pair, xs[i], seq.limit));
    t.push_back(std::min(n, 1.0 / std::sqrt(d.back() + 1.0 / (n * n))));
  }
  for (long n = 1; n <= static_cast<long>(xs.size()); n *= 10) trace.push_back({"d_n", static_cast<double>(n), d[static_cast<std::size_t>(n - 1)]});
  return detail::decay_verdict(d, t, "|l(x_n - x0)|", trace, static_cast<long>(xs.size()));
}

/// Mackey-Cauchy test on tail diameters D(n) = sup_{m,m' >= n} max_l |l(x_m - x_m')|,
/// with t_n = min(2n, 1/sqrt(D(n) + 1/(2n)^2)). Only n <= N/2 is judged so that each
/// tail spans at least half the window.
inline Verdict mackey_cauchy_probe(const VectorSequence& seq, const DualPair& pair, long N) {
  auto xs = seq.generate(N);
  const long M = static_cast<long>(xs.size());
  if (M < 100) throw DomainError("window must contain at least 100 terms");
  const auto q = static_cast<std::size_t>(pair.L.rows());
  std::vector<double> hi(q, -std::numeric_limits<double>::infinity()), lo(q, std::numeric_limits<double>::infinity());
  std::vector<double> D(static_cast<std::size_t>(M));
  for (long n = M; n >= 1; --n) {
    const auto& x = xs[static_cast<std::size_t>(n - 1)];
    double diam = 0.0;
    for (std::size_t r = 0; r < q; ++r) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < pair.L.cols(); ++c) s += pair.L(static_cast<Eigen::Index>(r), c) * x[static_cast<std::size_t>(c)];
      hi[r] = std::max(hi[r], s);
      lo[r] = std::min(lo[r], s);
      diam = std::max(diam, hi[r] - lo[r]);
    }
    D[static_cast<std::size_t>(n - 1)] = diam;
  }
  std::vector<double> t(D.size());
  for (std::size_t i = 0; i < D.size(); ++i) {
    const double s = 2.0 * static_cast<double>(i + 1);
    t[i] = std::min(s, 1.0 / std::sqrt(D[i] + 1.0 / (s * s)));
  }
  std::vector<Residual> trace;
  for (long n = 1; n <= M / 2; n *= 10) trace.push_back({"tail_diameter", static_cast<double>(n), D[static_cast<std::size_t>(n - 1)]});

  // ordinary boundedness: do the increments of |x_n| decelerate across decades?
  auto norm = [&](long n) {
    double s = 0.0;
    for (double v : xs[static_cast<std::size_t>(n - 1)]) s = std::max(s, std::fabs(v));
    return s;
  };
  const double late = norm(M) - norm(M / 10), early = norm(M / 10) - norm(M / 100);
  const bool unbounded = late > 1e-12 && early > 1e-12 && late >= 0.5 * early;
  trace.push_back({"norm_increment_ratio", static_cast<double>(M), early > 0.0 ? late / early : 0.0});

  Verdict v = detail::decay_verdict(D, t, "tail diameter", trace, M / 2);
  if (unbounded && !v.failed()) {
    auto diag = v.diagnostics();
    return Verdict::inconclusive(diag, "Mackey-Cauchy scaling is not contradicted on the window, but |x_n| keeps "
                                       "growing by a constant amount per decade (ordinary divergence suspected)");
  }
  return v;
}

} // namespace difflab
