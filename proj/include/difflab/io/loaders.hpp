#pragma once

#include "difflab/convenient/dual_pair.hpp"
#include "difflab/convenient/mackey.hpp"
#include "difflab/core/errors.hpp"
#include "difflab/diffeology/model_space.hpp"
#include "difflab/diffeology/morphism.hpp"
#include "difflab/expr/parser.hpp"
#include "difflab/gallery/gallery.hpp"
#include "difflab/io/schema.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef DIFFLAB_DATA_DIR
#define DIFFLAB_DATA_DIR "data"
#endif

namespace difflab {

/// Bundled data directory; DIFFLAB_DATA_DIR in the environment overrides the build path.
inline std::string data_dir() {
  if (const char* env = std::getenv("DIFFLAB_DATA_DIR")) return env;
  return DIFFLAB_DATA_DIR;
}

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

namespace detail {

inline std::vector<std::string> default_names(const char* stem, std::size_t n, const char* small) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(n <= std::char_traits<char>::length(small) ? std::string(1, small[i]) : stem + std::to_string(i + 1));
  return out;
}

inline Box box_from_json(const nlohmann::json& j, std::vector<std::string> names, const std::string& what) {
  Box b;
  b.lo = j.at("lo").get<std::vector<double>>();
  b.hi = j.at("hi").get<std::vector<double>>();
  if (b.lo.size() != names.size() || b.hi.size() != names.size())
    throw SchemaError(what + ": box bounds need " + std::to_string(names.size()) + " entries");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!(b.lo[i] < b.hi[i])) throw SchemaError(what + ": empty box along " + names[i]);
  b.names = std::move(names);
  return b;
}

inline Expression parse_in(const std::string& text, const std::string& what) {
  try {
    return parse_expression(text);
  } catch (const ParseError& e) {
    throw SchemaError(what + ": " + e.what());
  }
}

} // namespace detail

inline GeneratedDiffeology space_from_json(const nlohmann::json& j) {
  validate(j, "space");
  GeneratedDiffeology D;
  D.name = j.at("name").get<std::string>();
  const auto m = j.at("ambient_dim").get<std::size_t>();
  auto& X = D.space;
  X.name = D.name;
  X.coords = j.contains("coords") ? j.at("coords").get<std::vector<std::string>>() : detail::default_names("x", m, "xyz");
  if (X.coords.size() != m) throw SchemaError(D.name + ": coords must have ambient_dim entries");
  X.ambient = j.contains("ambient_box") ? detail::box_from_json(j.at("ambient_box"), X.coords, D.name + " ambient_box")
                                        : make_box(X.coords, -2.0, 2.0);
  for (const auto& c : j.value("constraints", std::vector<std::string>{})) {
    try {
      X.constraints.push_back(parse_constraint(c));
    } catch (const ParseError& e) {
      throw SchemaError(D.name + " constraint '" + c + "': " + e.what());
    }
  }
  for (const auto& g : j.at("generators")) {
    Plaque p;
    p.label = g.at("label").get<std::string>();
    const std::string what = D.name + " generator " + p.label;
    const auto lo = g.at("domain_box").at("lo").get<std::vector<double>>();
    auto params = g.contains("params") ? g.at("params").get<std::vector<std::string>>() : detail::default_names("t", lo.size(), "t");
    p.domain = detail::box_from_json(g.at("domain_box"), params, what);
    const auto exprs = g.at("exprs").get<std::vector<std::string>>();
    if (exprs.size() != m) throw SchemaError(what + ": needs one expression per ambient coordinate");
    for (const auto& e : exprs) p.map.push_back(detail::parse_in(e, what));
    for (const auto& f : g.value("family", nlohmann::json::array())) {
      p.family.push_back(f.at("name").get<std::string>());
      p.family_lo.push_back(f.at("lo").get<double>());
      p.family_hi.push_back(f.at("hi").get<double>());
      if (p.family_lo.back() > p.family_hi.back()) throw SchemaError(what + ": family range is reversed");
    }
    D.generators.push_back(std::move(p));
  }
  for (const auto& w : j.value("witnesses", nlohmann::json::array()))
    D.witnesses.push_back({w.at("label").get<std::string>(), detail::parse_in(w.at("expr").get<std::string>(), D.name + " witness")});
  D.k = j.value("class_k", 1);
  if (j.contains("reparam_library")) {
    D.library.degree = j.at("reparam_library").value("degree", D.library.degree);
    D.library.bound = j.at("reparam_library").value("bound", D.library.bound);
  }
  D.family_samples = j.value("family_samples", D.family_samples);
  return D;
}

inline GeneratedDiffeology load_space(const std::string& path) { return space_from_json(read_json(path)); }

inline DualPair pair_from_json(const nlohmann::json& j) {
  validate(j, "pair");
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  const auto coords = j.at("coords").get<std::vector<std::string>>();
  for (const auto& f : j.at("functionals")) {
    rows.push_back(f.at("coefficients").get<std::vector<double>>());
    labels.push_back(f.value("label", "l" + std::to_string(rows.size())));
  }
  DualPair p = make_dual_pair(coords, rows, labels);
  p.name = j.value("name", std::string("pair"));
  return p;
}

inline DualPair load_pair(const std::string& path) { return pair_from_json(read_json(path)); }

inline VectorSequence sequence_from_json(const nlohmann::json& j) {
  validate(j, "sequence");
  VectorSequence s;
  s.name = j.value("name", std::string("sequence"));
  const auto kind = j.at("kind").get<std::string>();
  s.kind = kind == "list" ? VectorSequence::Kind::List
         : kind == "partial_sums" ? VectorSequence::Kind::PartialSums
         : kind == "partial_products" ? VectorSequence::Kind::PartialProducts
                                      : VectorSequence::Kind::ClosedForm;
  s.index = j.value("index", std::string("n"));
  if (s.kind == VectorSequence::Kind::List) {
    if (!j.contains("list")) throw SchemaError(s.name + ": a list sequence needs 'list'");
    s.list = j.at("list").get<std::vector<std::vector<double>>>();
    for (const auto& x : s.list)
      if (x.size() != s.list.front().size()) throw SchemaError(s.name + ": list entries differ in length");
  } else {
    if (!j.contains("terms")) throw SchemaError(s.name + ": needs 'terms'");
    for (const auto& t : j.at("terms")) s.terms.push_back(detail::parse_in(t.get<std::string>(), s.name));
  }
  s.limit = j.value("limit", std::vector<double>{});
  if (!s.limit.empty() && s.limit.size() != s.dim()) throw SchemaError(s.name + ": limit has the wrong dimension");
  return s;
}

inline VectorSequence load_sequence(const std::string& path) { return sequence_from_json(read_json(path)); }

inline FunctionFamily battery_from_json(const nlohmann::json& j) {
  validate(j, "battery");
  FunctionFamily F;
  for (const auto& f : j.at("functions"))
    F.push_back({f.at("label").get<std::string>(), detail::parse_in(f.at("expr").get<std::string>(), "battery")});
  return F;
}

inline FunctionFamily load_battery(const std::string& path) { return battery_from_json(read_json(path)); }

inline Gallery load_gallery(const std::string& path) {
  auto j = read_json(path);
  validate(j, "gallery");
  try {
    return gallery_from_json(j);
  } catch (const ParseError& e) {
    throw SchemaError("gallery expression: " + std::string(e.what()));
  }
}

/// A map between two spaces with the expected mode ii / iii verdict.
struct MorphismCase {
  std::string label;
  GeneratedDiffeology source, target;
  SpaceMap map;
  Status expected = Status::Pass;
  std::string note;
};

/// Source and target name an entry of the document's "spaces" or a bundled space file.
inline std::vector<MorphismCase> morphism_cases_from_json(const nlohmann::json& j) {
  validate(j, "morphisms");
  std::map<std::string, GeneratedDiffeology> cache;
  auto space = [&](const std::string& name) -> const GeneratedDiffeology& {
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    const auto& inline_spaces = j.value("spaces", nlohmann::json::object());
    auto D = inline_spaces.contains(name) ? space_from_json(inline_spaces.at(name))
                                          : load_space(data_dir() + "/spaces/" + name + ".json");
    return cache.emplace(name, std::move(D)).first->second;
  };
  std::vector<MorphismCase> out;
  for (const auto& c : j.at("cases")) {
    MorphismCase m;
    m.label = c.at("label").get<std::string>();
    m.source = space(c.at("source").get<std::string>());
    m.target = space(c.at("target").get<std::string>());
    m.map.label = m.label;
    for (const auto& e : c.at("map")) m.map.components.push_back(detail::parse_in(e.get<std::string>(), m.label));
    if (m.map.components.size() != m.target.space.dim()) throw SchemaError(m.label + ": map needs one component per target coordinate");
    m.expected = parse_status(c.at("expected").get<std::string>());
    m.note = c.value("note", std::string());
    out.push_back(std::move(m));
  }
  return out;
}

inline std::vector<MorphismCase> load_morphism_cases(const std::string& path) { return morphism_cases_from_json(read_json(path)); }

/// The five bundled spaces, in a fixed order.
inline std::vector<std::string> bundled_space_names() {
  return {"standard_r2", "cross", "lines_through_origin", "sphere_parallels", "point"};
}

inline std::string bundled_path(const std::string& kind, const std::string& name) {
  return data_dir() + "/" + kind + "/" + name + ".json";
}

} // namespace difflab
