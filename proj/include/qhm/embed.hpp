#pragma once

#include <cmath>
#include <optional>

#include "qhm/classify.hpp"
#include "qhm/error.hpp"
#include "qhm/linalg.hpp"
#include "qhm/mconstant.hpp"
#include "qhm/metric_space.hpp"
#include "qhm/optim.hpp"
#include "qhm/tolerances.hpp"

namespace qhm {

struct Sphere {
  Vector centre;
  double radius = 0.0;
  double residual = 0.0;  // max_i | |y_i - z|^2 - r^2 | / diam
};

struct HullDistance {
  double distance = 0.0;          // s
  double m_plus_geometric = 0.0;  // 2 (r^2 - s^2)
  Vector weights;                 // convex weights of the nearest hull point
  bool converged = true;
};

/// Points y_i in R^k with |y_i - y_j|^2 = d(x_i, x_j).
struct SEmbedding {
  Matrix points;  // n x k, row i is y_i
  int dim = 0;
  Vector gram_eigenvalues;  // descending
  double scale = 0.0;       // diameter of the source space
  std::optional<Sphere> sphere;
  std::optional<HullDistance> hull;

  int size() const noexcept { return static_cast<int>(points.rows()); }
};

/// Largest |(|y_i - y_j|^2 - d_ij)| over all pairs.
inline double isometry_defect(const Matrix& points, const Matrix& dist) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = i + 1; j < points.rows(); ++j)
      worst = std::max(worst, std::abs((points.row(i) - points.row(j)).squaredNorm() -
                                       dist(i, j)));
  return worst;
}

/// Schoenberg embedding of (X, d^(1/2)) in minimal dimension.
///
/// Classical scaling: G = -1/2 P D P is factored as U L U^T and the points
/// are U L^(1/2) over the eigenvalues >= rank_tol * max eigenvalue. The
/// centroid of the points is the origin.
inline SEmbedding s_embed(const MetricSpace& space, const Tolerances& tol = {}) {
  const int n = space.size();
  const double diam = space.diameter();
  const Matrix gram = -0.5 * double_center(space.dist());
  const auto eig = jacobi_eigen(gram);

  SEmbedding out;
  out.scale = diam;
  out.gram_eigenvalues = eig.values.reverse();
  // The G spectrum is -1/2 of the P D P spectrum, so the quasihypermetric
  // threshold halves too.
  const double floor = -0.5 * tol.pos_tol * n * diam;
  if (n > 0 && eig.values(0) < floor) {
    throw WitnessError(ErrorCode::kNotQuasihypermetric, "embed",
                       "Gram matrix has eigenvalue " + std::to_string(eig.values(0)) +
                           "; the space is not quasihypermetric",
                       detail::tidy_witness(eig.vectors.col(0)));
  }
  const double top = n > 0 ? eig.values(n - 1) : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    if (top > 0.0 && eig.values(j) > 0.0 && eig.values(j) >= tol.rank_tol * top) {
      keep.push_back(j);
    }
  }
  out.dim = static_cast<int>(keep.size());
  out.points = Matrix::Zero(n, out.dim);
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.points.col(Eigen::Index(c)) = eig.vectors.col(keep[c]) * std::sqrt(eig.values(keep[c]));
  }
  const double defect = isometry_defect(out.points, space.dist());
  if (defect > tol.emb_tol * std::max(diam, std::numeric_limits<double>::min())) {
    throw Error(ErrorCode::kContradiction, "embed",
                "embedding isometry defect " + std::to_string(defect) + " exceeds emb_tol");
  }
  return out;
}

/// Least-squares centre of a sphere through all points:
/// 2 (y_1 - y_i)^T z = |y_1|^2 - |y_i|^2 for i >= 2. Absent when the relative
/// residual exceeds sph_tol.
inline std::optional<Sphere> circumsphere(const SEmbedding& emb, const Tolerances& tol = {}) {
  const Eigen::Index n = emb.points.rows();
  const Eigen::Index k = emb.points.cols();
  if (n == 0) return std::nullopt;
  Vector centre = Vector::Zero(k);
  if (n > 1 && k > 0) {
    Matrix a(n - 1, k);
    Vector b(n - 1);
    const double y1 = emb.points.row(0).squaredNorm();
    for (Eigen::Index i = 1; i < n; ++i) {
      a.row(i - 1) = 2.0 * (emb.points.row(0) - emb.points.row(i));
      b(i - 1) = y1 - emb.points.row(i).squaredNorm();
    }
    centre = a.colPivHouseholderQr().solve(b);
  } else if (n == 1) {
    centre = emb.points.row(0).transpose();
  }
  Sphere s;
  double sum = 0.0;
  double sum_sq = 0.0;
  Vector sq(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sq(i) = (emb.points.row(i).transpose() - centre).squaredNorm();
    sum += std::sqrt(sq(i));
    sum_sq += sq(i);
  }
  s.centre = centre;
  s.radius = sum / double(n);
  const double r2 = sum_sq / double(n);
  const double denom = emb.scale > 0.0 ? emb.scale : 1.0;
  s.residual = (sq.array() - r2).abs().maxCoeff() / denom;
  if (s.residual > tol.sph_tol) return std::nullopt;
  return s;
}

/// Distance s from the circumcentre to the convex hull of the points, by
/// Wolfe's min-norm-point algorithm on y_i - z.
inline HullDistance hull_distance(const SEmbedding& emb, const Tolerances& tol = {}) {
  if (!emb.sphere) {
    throw Error(ErrorCode::kPrecondition, "embed", "hull_distance needs a circumsphere");
  }
  const Matrix shifted = emb.points.rowwise() - emb.sphere->centre.transpose();
  const auto mn = min_norm_point(shifted, tol.mn_tol);
  HullDistance out;
  out.distance = mn.distance;
  out.weights = mn.weights;
  out.converged = mn.converged;
  const double r = emb.sphere->radius;
  out.m_plus_geometric = 2.0 * (r * r - out.distance * out.distance);
  return out;
}

/// s_embed plus circumsphere and, when the sphere exists, hull distance.
inline SEmbedding sphere_diagnostics(const MetricSpace& space, const Tolerances& tol = {}) {
  SEmbedding emb = s_embed(space, tol);
  emb.sphere = circumsphere(emb, tol);
  if (emb.sphere) emb.hull = hull_distance(emb, tol);
  return emb;
}

/// Whether the embedded points are affinely independent, i.e. k = n - 1.
inline bool affinely_independent(const SEmbedding& emb) {
  return emb.dim == emb.size() - 1;
}

/// The embedding translated so the circumcentre is the origin; every point
/// then has |y_i|^2 = M(X)/2.
inline SEmbedding recentred_embedding(const MetricSpace& space, const Tolerances& tol = {}) {
  const auto report = compute_m(space, tol);
  if (!report.finite()) {
    throw Error(ErrorCode::kPrecondition, "embed", "recentred_embedding needs M(X) finite");
  }
  SEmbedding emb = s_embed(space, tol);
  const auto sphere = circumsphere(emb, tol);
  if (!sphere) {
    throw Error(ErrorCode::kContradiction, "embed",
                "M(X) is finite but no circumsphere was found; check sph_tol");
  }
  emb.points.rowwise() -= sphere->centre.transpose();
  emb.sphere = Sphere{Vector::Zero(emb.dim), sphere->radius, sphere->residual};
  const double half_m = 0.5 * *report.m_value;
  const double band = (tol.sph_tol + tol.emb_tol) * std::max(*report.m_value, emb.scale);
  for (Eigen::Index i = 0; i < emb.points.rows(); ++i) {
    if (std::abs(emb.points.row(i).squaredNorm() - half_m) > band) {
      throw Error(ErrorCode::kContradiction, "embed",
                  "recentred point " + std::to_string(i) + " has |y|^2 != M/2");
    }
  }
  return emb;
}

}  // namespace qhm
