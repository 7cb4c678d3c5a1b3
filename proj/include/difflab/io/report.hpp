#pragma once

#include "difflab/core/verdict.hpp"
#include "difflab/io/schema.hpp"
#include "difflab/version.hpp"

#include "json.hpp"

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace difflab {

inline nlohmann::json to_json(const Witness& w) {
  nlohmann::json j{{"kind", w.kind}};
  if (!w.label.empty()) j["label"] = w.label;
  if (!w.point.empty()) j["point"] = w.point;
  if (!w.direction.empty()) j["direction"] = w.direction;
  if (!w.values.empty()) j["values"] = w.values;
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

inline nlohmann::json to_json(const std::vector<Residual>& trace) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : trace) out.push_back({{"quantity", r.quantity}, {"scale", r.scale}, {"value", r.value}});
  return out;
}

/// Report document {tool_version, schema_version, command, config, verdicts[],
/// witnesses[], results, timings, exit_code}.
class Report {
public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  nlohmann::json& config() { return config_; }
  nlohmann::json& results() { return results_; }
  void set_elapsed_ms(double ms) { elapsed_ms_ = ms; }

  void add(const std::string& label, const Verdict& v, std::optional<Status> expected = std::nullopt) {
    entries_.push_back({label, v, expected});
  }

  /// 0 all PASS or as expected, 1 a FAIL (or unexpected verdict), 2 INCONCLUSIVE without FAIL.
  int exit_code() const {
    bool fail = false, inconclusive = false;
    for (const auto& e : entries_) {
      const Status s = e.verdict.status();
      if (e.expected && s == *e.expected) continue;
      if (s == Status::Inconclusive) inconclusive = true;
      else if (s == Status::Fail || e.expected) fail = true;
    }
    return fail ? 1 : inconclusive ? 2 : 0;
  }

  /// Normalized documents omit timings so equal runs are byte-identical.
  nlohmann::json to_json(bool normalized = false) const {
    nlohmann::json j;
    j["tool_version"] = DIFFLAB_VERSION;
    j["schema_version"] = SCHEMA_VERSION;
    j["command"] = command_;
    j["config"] = config_;
    j["verdicts"] = nlohmann::json::array();
    j["witnesses"] = nlohmann::json::array();
    for (const auto& e : entries_) {
      nlohmann::json v{{"label", e.label}, {"status", to_string(e.verdict.status())}, {"trace", difflab::to_json(e.verdict.diagnostics())}};
      if (e.expected) v["expected"] = to_string(*e.expected);
      if (!e.verdict.reason().empty()) v["reason"] = e.verdict.reason();
      if (e.verdict.witness()) {
        Witness w = *e.verdict.witness();
        if (w.label.empty()) w.label = e.label;
        v["witness"] = difflab::to_json(w);
        j["witnesses"].push_back(v["witness"]);
      }
      j["verdicts"].push_back(std::move(v));
    }
    j["results"] = results_;
    if (!normalized) j["timings"] = {{"total_ms", elapsed_ms_}};
    j["exit_code"] = exit_code();
    return j;
  }

  std::string dump(bool normalized = false) const { return to_json(normalized).dump(2) + "\n"; }

private:
  struct Entry {
    std::string label;
    Verdict verdict;
    std::optional<Status> expected;
  };
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json results_ = nlohmann::json::object();
  std::vector<Entry> entries_;
  double elapsed_ms_ = 0.0;
};

/// Comma-separated rows, numbers with 17 significant digits.
class CsvWriter {
public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw SchemaError("csv row has the wrong number of columns");
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      out_ << (i ? "," : "") << buf;
    }
    out_ << "\n";
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

} // namespace difflab
