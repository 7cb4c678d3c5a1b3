#pragma once

#include "difflab/core/errors.hpp"
#include "difflab/diffeology/model_space.hpp"
#include "difflab/expr/expression.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace difflab {

/// Carrier R^m with a finite family of linear functionals, one per row of `L`.
struct DualPair {
  std::string name;
  std::vector<std::string> coords;
  std::vector<std::string> labels;
  Eigen::MatrixXd L; // q x m

  std::size_t dim() const { return coords.size(); }
  std::size_t functionals() const { return static_cast<std::size_t>(L.rows()); }

  Eigen::VectorXd pair(const Eigen::VectorXd& x) const { return L * x; }

  /// The functionals as expressions in the carrier coordinates.
  FunctionFamily functions() const {
    FunctionFamily out;
    for (Eigen::Index r = 0; r < L.rows(); ++r) {
      Expression e(0.0);
      bool first = true;
      for (Eigen::Index c = 0; c < L.cols(); ++c) {
        double a = L(r, c);
        if (a == 0.0) continue;
        Expression term = a == 1.0 ? var(coords[c]) : Expression(a) * var(coords[c]);
        e = first ? term : e + term;
        first = false;
      }
      out.push_back({labels.at(static_cast<std::size_t>(r)), e});
    }
    return out;
  }
};

inline DualPair make_dual_pair(std::vector<std::string> coords, const std::vector<std::vector<double>>& rows,
                               std::vector<std::string> labels = {}) {
  DualPair p;
  p.coords = std::move(coords);
  p.L.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p.coords.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != p.coords.size()) throw SchemaError("functional row has the wrong length");
    for (std::size_t c = 0; c < rows[r].size(); ++c) p.L(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  if (labels.empty())
    for (std::size_t r = 0; r < rows.size(); ++r) labels.push_back("l" + std::to_string(r + 1));
  p.labels = std::move(labels);
  return p;
}

namespace detail {

// Smallest nonzero integer vector in {-2..2}^m annihilated by L, first nonzero entry positive.
inline std::optional<std::vector<double>> lattice_kernel_vector(const Eigen::MatrixXd& L) {
  const auto m = static_cast<int>(L.cols());
  if (m > 6) return std::nullopt;
  static const int order[] = {0, 1, -1, 2, -2};
  for (int bound = 1; bound <= 2; ++bound) {
    const int width = 2 * bound + 1;
    long total = 1;
    for (int i = 0; i < m; ++i) total *= width;
    for (long idx = 1; idx < total; ++idx) {
      Eigen::VectorXd v(m);
      long k = idx;
      for (int i = m - 1; i >= 0; --i) {
        v[i] = order[k % width];
        k /= width;
      }
      int first = 0;
      while (first < m && v[first] == 0.0) ++first;
      if (first == m || v[first] < 0.0) continue;
      double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
      if ((L * v).cwiseAbs().maxCoeff() <= 1e-12 * scale) return std::vector<double>(v.data(), v.data() + m);
    }
  }
  return std::nullopt;
}

// Kernel vector from the SVD, max-abs 1, first nonzero entry positive.
inline std::vector<double> svd_kernel_vector(const Eigen::MatrixXd& L) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(L.cols() - 1);
  v /= v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::fabs(v[i]) < 1e-14) {
      v[i] = 0.0;
      continue;
    }
    if (v[i] < 0.0) v = -v;
    break;
  }
  return {v.data(), v.data() + v.size()};
}

} // namespace detail

/// Kernel vector of the functional matrix: a small integer one when it exists.
inline std::vector<double> kernel_vector(const DualPair& pair) {
  if (pair.L.rows() == 0) {
    std::vector<double> k(pair.dim(), 0.0);
    k[0] = 1.0;
    return k;
  }
  if (auto lat = detail::lattice_kernel_vector(pair.L)) return *lat;
  return detail::svd_kernel_vector(pair.L);
}

} // namespace difflab
