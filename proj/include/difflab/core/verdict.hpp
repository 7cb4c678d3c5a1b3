#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace difflab {

enum class Status { Pass, Fail, Inconclusive };

inline const char* to_string(Status s) {
  switch (s) {
  case Status::Pass: return "PASS";
  case Status::Fail: return "FAIL";
  case Status::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

/// Structured evidence attached to a verdict.
struct Witness {
  std::string kind;                 // e.g. "slope-jump", "kernel-vector", "non-smooth-composite"
  std::string label;                // function / plaque / claim label, when relevant
  std::vector<double> point;
  std::vector<double> direction;
  std::map<std::string, double> values;
  std::string note;
};

/// One entry of a scale-by-scale residual trace.
struct Residual {
  std::string quantity;
  double scale = 0.0;
  double value = 0.0;
};

/// Tri-state probe outcome. Construct through the factories so that a FAIL
/// always carries a witness.
class Verdict {
public:
  static Verdict pass(std::vector<Residual> trace = {}) {
    return Verdict(Status::Pass, std::nullopt, std::move(trace));
  }
  static Verdict fail(Witness w, std::vector<Residual> trace = {}) {
    return Verdict(Status::Fail, std::move(w), std::move(trace));
  }
  static Verdict inconclusive(std::vector<Residual> trace, std::string reason = {}) {
    Verdict v(Status::Inconclusive, std::nullopt, std::move(trace));
    v.reason_ = std::move(reason);
    return v;
  }

  Status status() const { return status_; }
  bool passed() const { return status_ == Status::Pass; }
  bool failed() const { return status_ == Status::Fail; }
  bool inconclusive() const { return status_ == Status::Inconclusive; }

  const std::optional<Witness>& witness() const { return witness_; }
  const std::vector<Residual>& diagnostics() const { return trace_; }
  const std::string& reason() const { return reason_; }

  Verdict& note(std::string r) {
    reason_ = std::move(r);
    return *this;
  }
  Verdict& add(Residual r) {
    trace_.push_back(std::move(r));
    return *this;
  }
  Verdict& relabel(const std::string& label) {
    if (witness_ && witness_->label.empty()) witness_->label = label;
    return *this;
  }

private:
  Verdict(Status s, std::optional<Witness> w, std::vector<Residual> trace)
      : status_(s), witness_(std::move(w)), trace_(std::move(trace)) {}

  Status status_;
  std::optional<Witness> witness_;
  std::vector<Residual> trace_;
  std::string reason_;
};

/// Folds verdicts: any FAIL wins (first one kept), then INCONCLUSIVE, else PASS.
class VerdictAccumulator {
public:
  void add(const Verdict& v) {
    if (v.failed()) {
      if (!fail_) fail_ = v;
    } else if (v.inconclusive()) {
      if (!inconclusive_) inconclusive_ = v;
    }
  }
  bool has_fail() const { return fail_.has_value(); }
  Verdict result() const {
    if (fail_) return *fail_;
    if (inconclusive_) return *inconclusive_;
    return Verdict::pass();
  }

private:
  std::optional<Verdict> fail_;
  std::optional<Verdict> inconclusive_;
};

} // namespace difflab
