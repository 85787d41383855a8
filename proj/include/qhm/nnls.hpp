#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "qhm/linalg.hpp"

namespace qhm {

/// Lawson-Hanson active set method for min |Ax - b| subject to x >= 0.
inline Vector nnls(const Matrix& a, const Vector& b, int max_iter = 0) {
  const Eigen::Index n = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);
  Vector x = Vector::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(1.0, a.norm() * std::max(1.0, b.norm()));

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(Eigen::Index(k)) = a.col(idx[k]);
    const Vector zs = sub.colPivHouseholderQr().solve(b);
    Vector z = Vector::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zs(Eigen::Index(k));
    return z;
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    const Vector grad = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && grad(j) > tol && (best < 0 || grad(j) > grad(best))) best = j;
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      Vector z = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x(j) <= tol) {
          passive[j] = false;
          x(j) = 0.0;
        }
      }
    }
  }
  return x;
}

}  // namespace qhm
