#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qhm/linalg.hpp"

namespace qhm {

struct SimplexQuadraticResult {
  double value = 0.0;
  Vector weights;
  double gap = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Maximizes w^T Q w over the probability simplex with away-step Frank-Wolfe.
///
/// Q must be negative semidefinite on differences of simplex points (so the
/// objective is concave there). Starts at the uniform vector; vertex
/// selection breaks ties toward the lowest index. Stops when the Frank-Wolfe
/// duality gap drops to `gap_tol` or after `max_iter` iterations.
inline SimplexQuadraticResult maximize_quadratic_on_simplex(const Matrix& q, double gap_tol,
                                                           long max_iter) {
  const Eigen::Index n = q.rows();
  SimplexQuadraticResult out;
  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector qw = q * w;

  long it = 0;
  for (; it < max_iter; ++it) {
    if (it % 1000 == 999) qw = q * w;  // shed accumulated drift
    const Vector grad = 2.0 * qw;
    const double wg = w.dot(grad);

    Eigen::Index s = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (grad(i) > grad(s)) s = i;
    Eigen::Index v = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (w(i) > 0.0 && (v < 0 || grad(i) < grad(v))) v = i;

    const double fw_gap = grad(s) - wg;
    out.gap = fw_gap;
    if (fw_gap <= gap_tol) {
      out.converged = true;
      break;
    }
    const double away_gap = wg - grad(v);

    // Direction d and Q d; the objective along w + t d is
    // f + t <grad, d> + t^2 d^T Q d.
    Vector dir;
    Vector qdir;
    double t_max;
    if (fw_gap >= away_gap || w(v) >= 1.0) {
      dir = -w;
      dir(s) += 1.0;
      qdir = q.col(s) - qw;
      t_max = 1.0;
    } else {
      dir = w;
      dir(v) -= 1.0;
      qdir = qw - q.col(v);
      t_max = w(v) / (1.0 - w(v));
    }
    const double slope = grad.dot(dir);
    const double curv = dir.dot(qdir);
    double t = t_max;
    if (curv < 0.0) t = std::min(t_max, -slope / (2.0 * curv));
    if (!(t > 0.0)) {
      out.converged = false;
      break;
    }

    w += t * dir;
    qw += t * qdir;
    for (Eigen::Index i = 0; i < n; ++i)
      if (w(i) < 1e-15) w(i) = 0.0;
    if (t == t_max && fw_gap < away_gap) w(v) = 0.0;  // drop step
    w /= w.sum();
  }
  out.iterations = it;
  qw = q * w;
  out.weights = w;
  out.value = w.dot(qw);
  return out;
}

struct MinNormResult {
  Vector point;    // the minimizer, in the ambient space
  Vector weights;  // convex weights over the input points
  double distance = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Point of minimum Euclidean norm in the convex hull of the rows of `pts`
/// (Wolfe's algorithm).
///
/// Starts from the row of smallest norm (lowest index on ties). The corral
/// is kept as an index set; affine minimizers are found by solving the
/// bordered Gram system, and weights below 1e-12 are cleaned to zero.
inline MinNormResult min_norm_point(const Matrix& pts, double tol, long max_iter = 10000) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index dim = pts.cols();
  MinNormResult out;
  out.weights = Vector::Zero(n);
  if (n == 0) return out;

  double max_sq = 0.0;
  Eigen::Index start = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sq = pts.row(i).squaredNorm();
    max_sq = std::max(max_sq, sq);
    if (sq < pts.row(start).squaredNorm()) start = i;
  }
  const double eps = tol * std::max(max_sq, std::numeric_limits<double>::min());

  std::vector<Eigen::Index> corral{start};
  Vector lambda = Vector::Ones(1);
  Vector x = pts.row(start).transpose();

  auto affine_minimizer = [&](const std::vector<Eigen::Index>& s) {
    const auto m = static_cast<Eigen::Index>(s.size());
    Matrix a = Matrix::Zero(m + 1, m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) a(i, j) = pts.row(s[i]).dot(pts.row(s[j]));
      a(i, m) = 1.0;
      a(m, i) = 1.0;
    }
    Vector rhs = Vector::Zero(m + 1);
    rhs(m) = 1.0;
    return Vector(a.colPivHouseholderQr().solve(rhs).head(m));
  };
  auto combine = [&](const std::vector<Eigen::Index>& s, const Vector& coef) {
    Vector p = Vector::Zero(dim);
    for (std::size_t i = 0; i < s.size(); ++i) p += coef(Eigen::Index(i)) * pts.row(s[i]).transpose();
    return p;
  };

  long it = 0;
  for (; it < max_iter; ++it) {
    // Major cycle: most improving vertex.
    Eigen::Index j = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (pts.row(i).dot(x) < pts.row(j).dot(x)) j = i;
    if (x.squaredNorm() - pts.row(j).dot(x) <= eps) {
      out.converged = true;
      break;
    }
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) {
      out.converged = true;  // numerically stalled at the optimum
      break;
    }
    corral.push_back(j);
    lambda.conservativeResize(lambda.size() + 1);
    lambda(lambda.size() - 1) = 0.0;

    // Minor cycles: move toward the affine minimizer until it lies inside.
    while (true) {
      const Vector alpha = affine_minimizer(corral);
      if ((alpha.array() > 1e-12).all()) {
        lambda = alpha;
        x = combine(corral, lambda);
        break;
      }
      double theta = 1.0;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (alpha(i) <= 1e-12 && lambda(i) - alpha(i) > 0.0) {
          theta = std::min(theta, lambda(i) / (lambda(i) - alpha(i)));
        }
      }
      lambda = lambda + theta * (alpha - lambda);
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_lambda;
      for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > 1e-12) {
          kept.push_back(corral[static_cast<std::size_t>(i)]);
          kept_lambda.push_back(lambda(i));
        }
      }
      if (kept.empty()) {  // cannot happen in exact arithmetic
        kept.push_back(corral.back());
        kept_lambda.push_back(1.0);
      }
      corral = kept;
      lambda = Eigen::Map<Vector>(kept_lambda.data(), Eigen::Index(kept_lambda.size()));
      lambda /= lambda.sum();
      x = combine(corral, lambda);
      if (corral.size() == 1) break;
    }
  }
  out.iterations = it;
  out.point = x;
  for (std::size_t i = 0; i < corral.size(); ++i) out.weights(corral[i]) = lambda(Eigen::Index(i));
  out.distance = x.norm();
  return out;
}

}  // namespace qhm
