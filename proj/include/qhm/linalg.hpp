#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace qhm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;  // column j belongs to values(j)
};

namespace detail {

// Makes the largest-magnitude component positive (first one on ties), so
// eigenvectors do not flip sign between otherwise identical runs.
inline void normalize_sign(Eigen::Ref<Vector> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best)) * (1.0 + 1e-12)) best = i;
  }
  if (v.size() > 0 && v(best) < 0.0) v = -v;
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for a symmetric matrix.
///
/// Sweeps visit (p, q) pairs in row-major order over the strict upper
/// triangle, which makes the result a deterministic function of the input.
/// Only the upper triangle of `a` is read.
inline SymmetricEigen jacobi_eigen(const Matrix& a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  Matrix m = a.selfadjointView<Eigen::Upper>();
  Matrix v = Matrix::Identity(n, n);

  const double norm = m.norm();
  const double stop = std::numeric_limits<double>::epsilon() * 0.1 * norm;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (std::sqrt(2.0 * off) <= stop || off == 0.0) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return m(i, i) < m(j, j); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = m(order[j], order[j]);
    out.vectors.col(j) = v.col(order[j]);
    detail::normalize_sign(out.vectors.col(j));
  }
  return out;
}

/// The centering projector I - (1/n) 11^T.
inline Matrix centering_projector(Eigen::Index n) {
  return Matrix::Identity(n, n) -
         Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

/// P * d * P for the centering projector P, computed without forming P.
inline Matrix double_center(const Matrix& d) {
  const Vector row_mean = d.rowwise().mean();
  const Vector col_mean = d.colwise().mean().transpose();
  const double mean = d.mean();
  Matrix out = d;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean.transpose();
  out.array() += mean;
  return 0.5 * (out + out.transpose());
}

/// Numerical rank and orthonormal null-space basis of a symmetric matrix.
struct NullSpace {
  int rank = 0;
  Matrix basis;  // n x (n - rank)
};

inline NullSpace symmetric_null_space(const SymmetricEigen& eig, double rank_tol) {
  const Eigen::Index n = eig.values.size();
  const double largest = n > 0 ? eig.values.cwiseAbs().maxCoeff() : 0.0;
  const double cut = rank_tol * largest;
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (largest == 0.0 || std::abs(eig.values(j)) <= cut) null_cols.push_back(j);
  }
  NullSpace out;
  out.rank = static_cast<int>(n - static_cast<Eigen::Index>(null_cols.size()));
  out.basis.resize(n, static_cast<Eigen::Index>(null_cols.size()));
  for (std::size_t k = 0; k < null_cols.size(); ++k) {
    out.basis.col(static_cast<Eigen::Index>(k)) = eig.vectors.col(null_cols[k]);
  }
  return out;
}

/// Minimum-norm least-squares solution of A x = b from a symmetric
/// eigendecomposition of A, treating |lambda| <= rank_tol * max|lambda| as 0.
inline Vector pseudo_solve(const SymmetricEigen& eig, const Vector& b, double rank_tol) {
  const Eigen::Index n = eig.values.size();
  const double largest = n > 0 ? eig.values.cwiseAbs().maxCoeff() : 0.0;
  Vector x = Vector::Zero(n);
  if (largest == 0.0) return x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lambda = eig.values(j);
    if (std::abs(lambda) <= rank_tol * largest) continue;
    x += eig.vectors.col(j) * (eig.vectors.col(j).dot(b) / lambda);
  }
  return x;
}

}  // namespace qhm
