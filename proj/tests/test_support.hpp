#pragma once

// Independent oracles and random corpora shared by the unit and acceptance
// suites. Nothing here calls the library's eigensolver or its M / M+
// routines; the oracles use Eigen's decompositions directly.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qhm/qhm.hpp"

namespace qhm::testing {

/// M(X) by maximizing the energy over the mass-1 affine slice directly.
///
/// w = u + B t with u uniform and B an orthonormal basis of the mass-zero
/// hyperplane. The objective c + 2 g^T t + t^T H t (H = B^T D B,
/// g = B^T D u) is bounded above iff H is negative semidefinite and g lies in
/// the range of H; the maximum is then c - g^T H^+ g.
inline std::optional<double> m_oracle(const Eigen::MatrixXd& d, double rel_tol = 1e-9) {
  const Eigen::Index n = d.rows();
  if (n == 1) return 0.0;
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  // Orthonormal basis of 1^perp from a full QR of the all-ones column.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Ones(n, 1));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd b = q.rightCols(n - 1);
  const Eigen::MatrixXd h = b.transpose() * d * b;
  const Eigen::VectorXd g = b.transpose() * d * u;
  const double c = u.dot(d * u);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const double scale = d.maxCoeff() * double(n);
  const double cut = rel_tol * scale;
  if (es.eigenvalues().maxCoeff() > cut) return std::nullopt;
  double value = c;
  for (Eigen::Index j = 0; j < h.rows(); ++j) {
    const double lambda = es.eigenvalues()(j);
    const double gj = es.eigenvectors().col(j).dot(g);
    if (std::abs(lambda) <= cut) {
      if (std::abs(gj) > 1e-7 * std::max(1.0, g.norm())) return std::nullopt;
      continue;
    }
    value -= gj * gj / lambda;
  }
  return value;
}

/// Maximum of w^T D w over a regular grid on the simplex with `steps`
/// subdivisions (4 points only).
inline double simplex_grid_max4(const Eigen::Matrix4d& d, int steps) {
  double best = -1e300;
  const double h = 1.0 / steps;
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; a + b <= steps; ++b) {
      for (int c = 0; a + b + c <= steps; ++c) {
        const Eigen::Vector4d w(a * h, b * h, c * h, (steps - a - b - c) * h);
        best = std::max(best, w.dot(d * w));
      }
    }
  }
  return best;
}

/// min |sum w_i p_i| over a grid on the simplex (4 points only).
inline double simplex_grid_min_norm4(const Eigen::MatrixXd& pts, int steps) {
  double best = 1e300;
  const double h = 1.0 / steps;
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; a + b <= steps; ++b)
      for (int c = 0; a + b + c <= steps; ++c) {
        const double w3 = (steps - a - b - c) * h;
        const Eigen::VectorXd x = (a * h) * pts.row(0) + (b * h) * pts.row(1) +
                                  (c * h) * pts.row(2) + w3 * pts.row(3);
        best = std::min(best, x.norm());
      }
  return best;
}

/// Largest eigenvalue of D restricted to the mass-zero hyperplane (Eigen).
inline double max_hyperplane_eigenvalue(const Eigen::MatrixXd& d) {
  const Eigen::Index n = d.rows();
  if (n == 1) return 0.0;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Ones(n, 1));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd b = q.rightCols(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.transpose() * d * b);
  return es.eigenvalues().maxCoeff();
}

/// Random mass-one vector with entries of either sign.
inline Eigen::VectorXd random_mass_one(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = g(rng);
  w.array() -= w.mean();
  w.array() += 1.0 / double(n);
  return w;
}

/// Random orthogonal k x k matrix (QR of a Gaussian matrix).
inline Eigen::MatrixXd random_rotation(Eigen::Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
}

/// Euclidean point sets: n in [2, max_n], ambient dimension 1..3.
inline std::vector<MetricSpace> euclidean_corpus(int count, int max_n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, max_n);
  std::uniform_int_distribution<int> dim(1, 3);
  std::vector<MetricSpace> out;
  for (int i = 0; i < count; ++i) out.push_back(random_euclidean(size(rng), dim(rng), rng()));
  return out;
}

/// Shortest-path-closed random metrics: n in [min_n, max_n].
inline std::vector<MetricSpace> metric_corpus(int count, int min_n, int max_n,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(min_n, max_n);
  std::vector<MetricSpace> out;
  for (int i = 0; i < count; ++i) out.push_back(random_metric(size(rng), rng()));
  return out;
}

inline std::vector<MetricSpace> all_fixtures() {
  std::vector<MetricSpace> out;
  for (const auto& name : fixture_names()) out.push_back(make_fixture(name));
  out.push_back(make_fixture("twopoint(6)"));
  out.push_back(make_fixture("discrete(1,1)"));
  out.push_back(make_fixture("discrete(5,1)"));
  return out;
}

/// Verdict triples for the three equivalence lists of the sphere theorem.
struct ChainAudit {
  bool m_finite = false, sphere_exists = false;
  bool m_plus_equals_m = false, centre_in_hull = false, nonnegative_maximal = false;
  bool strict = false, unique_maximal = false, affinely_independent = false;

  bool consistent() const {
    return m_finite == sphere_exists && m_plus_equals_m == centre_in_hull &&
           centre_in_hull == nonnegative_maximal && strict == unique_maximal &&
           unique_maximal == affinely_independent;
  }
};

inline ChainAudit audit_chain(const MetricSpace& space, const Tolerances& tol = {}) {
  ChainAudit a;
  a.strict = static_cast<bool>(check_strictly_quasihypermetric(space, tol));
  const auto report = compute_m_report(space, tol);
  a.m_finite = report.finite();
  if (!check_quasihypermetric(space, tol)) return a;  // no embedding exists

  const auto emb = sphere_diagnostics(space, tol);
  a.sphere_exists = emb.sphere.has_value();
  a.affinely_independent = affinely_independent(emb);
  if (!a.m_finite) return a;

  const double m = *report.m_value;
  const double band = 1e-9 * std::max(1.0, m);
  a.unique_maximal = report.unique_maximal;
  a.m_plus_equals_m = std::abs(*report.m_plus - m) <= band;
  if (emb.hull) a.centre_in_hull = 2.0 * emb.hull->distance * emb.hull->distance <= band;
  a.nonnegative_maximal = has_nonnegative_maximal_measure(space, report, tol);
  return a;
}

}  // namespace qhm::testing
