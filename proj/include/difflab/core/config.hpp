#pragma once

#include <cstdint>

namespace difflab {

/// Truncation order cap for jets; beyond it the finite-difference oracle is rounding-bound.
inline constexpr int K_MAX = 6;

/// Numerical tolerances shared by every probe. Defaults are the documented values;
/// the CLI may override them per run.
struct Tolerances {
  double jet_rel = 1e-8;    ///< componentwise relative tolerance for jet equality
  double jet_abs = 1e-10;   ///< componentwise absolute tolerance for jet equality
  double point = 1e-9;      ///< point equality in ambient coordinates
  double rank = 1e-8;       ///< singular values below rank * sigma_max are dropped
  double richardson_rel = 1e-6;
  double richardson_abs = 1e-9;
  int grid = 5;             ///< sample points per box dimension
  long window = 10000;      ///< sequence window for Mackey probes
  std::uint64_t seed = 42;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

} // namespace difflab
