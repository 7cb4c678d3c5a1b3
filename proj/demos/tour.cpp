// A short walk through the library: directional derivatives of the gallery
// functions, the tangent set of the coordinate cross, and a Mackey probe.

#include "difflab/difflab.hpp"

#include <cstdio>

using namespace difflab;

int main() {
  const auto gallery = load_gallery(data_dir() + "/gallery.json");
  std::printf("directional derivatives at the origin\n");
  for (const char* name : {"f1", "f2", "f3"}) {
    const auto& e = gallery.entry(name);
    std::printf("  %-3s %s\n", name, to_string(e.expr).c_str());
    for (std::vector<double> v : {std::vector<double>{1, 0}, {0, 1}, {1, 1}, {2, 1}}) {
      const double d = directional_derivative(e.expr, e.variables, {0, 0}, {v});
      std::printf("      v = (%g, %g)  df = %.12g\n", v[0], v[1], d);
    }
  }

  const auto report = run_gallery(gallery);
  std::printf("\ngallery claims\n");
  for (const auto& r : report.records)
    std::printf("  %-4s %-30s expected %-4s measured %s\n", r.entry.c_str(), r.claim.c_str(), to_string(r.expected),
                to_string(r.measured.status()));

  const auto cross = load_space(bundled_path("spaces", "cross"));
  const JetContext ctx{cross.space.coords, coordinate_functions(cross.space.coords), 1};
  for (std::vector<double> p : {std::vector<double>{0, 0}, {0.5, 0}}) {
    const auto est = tangent_dim(p, cross, ctx, 8);
    std::printf("\ncross at (%g, %g): tangent dimension %zu%s", p[0], p[1], est.dim, est.cone ? " (cone, not a vector space)" : "");
  }
  std::printf("\n\n");
  for (const char* s : {"geometric", "harmonic"}) {
    const auto seq = load_sequence(bundled_path("sequences", s));
    const auto pair = make_dual_pair({"x"}, {{1.0}}, {"x"});
    std::printf("%s: Mackey-Cauchy %s\n", s, to_string(mackey_cauchy_probe(seq, pair, 10000).status()));
  }
  return 0;
}
