#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qhm/energy.hpp"
#include "qhm/error.hpp"
#include "qhm/linalg.hpp"
#include "qhm/metric_space.hpp"
#include "qhm/tolerances.hpp"

namespace qhm {

/// Outcome of a property check. `witness` is empty when the property holds;
/// otherwise it certifies the failure.
struct Verdict {
  bool holds = true;
  std::vector<double> witness;

  static Verdict pass() { return {}; }
  static Verdict fail(std::vector<double> w) { return {false, std::move(w)}; }
  explicit operator bool() const noexcept { return holds; }
};

struct HypermetricVerdict {
  int bound = 1;
  Verdict verdict;  // witness is an integer vector stored as doubles
};

struct Classification {
  Verdict quasihypermetric;
  Verdict strictly_quasihypermetric;
  std::optional<HypermetricVerdict> hypermetric;  // absent if over budget
  std::string hypermetric_note;
  int matrix_rank = 0;
  std::vector<std::vector<double>> nullspace_basis;
};

/// Spectrum of P D P together with the thresholds derived from it.
struct CenteredSpectrum {
  SymmetricEigen eig;
  double pos_abs = 0.0;  // eigenvalues above this are positive
  double neg_abs = 0.0;  // eigenvalues in [-neg_abs, pos_abs] count as zero
};

inline CenteredSpectrum centered_spectrum(const MetricSpace& space, const Tolerances& tol) {
  const double scale = space.size() * space.diameter();
  return {jacobi_eigen(double_center(space.dist())), tol.pos_tol * scale,
          tol.neg_tol * scale};
}

namespace detail {

// Scales a witness so its largest-magnitude entry is +1.
inline std::vector<double> tidy_witness(Vector v) {
  v.array() -= v.mean();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) * (1.0 + 1e-9)) best = i;
  if (v.size() && v(best) != 0.0) v /= v(best);
  return to_std(v);
}

inline Verdict quasihypermetric_from(const CenteredSpectrum& s) {
  const Eigen::Index n = s.eig.values.size();
  if (n == 0 || s.eig.values(n - 1) <= s.pos_abs) return Verdict::pass();
  return Verdict::fail(tidy_witness(s.eig.vectors.col(n - 1)));
}

inline Verdict strictly_from(const CenteredSpectrum& s) {
  Verdict qhm = quasihypermetric_from(s);
  if (!qhm) return qhm;
  const Eigen::Index n = s.eig.values.size();
  const Vector ones = Vector::Constant(n, 1.0 / std::sqrt(double(n)));
  int zero_count = 0;
  Vector best;
  double best_norm = -1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lambda = s.eig.values(j);
    if (lambda < -s.neg_abs || lambda > s.pos_abs) continue;
    ++zero_count;
    // The all-ones direction is always in the zero band; the witness is the
    // band member with the largest component orthogonal to it.
    Vector v = s.eig.vectors.col(j);
    v -= ones * ones.dot(v);
    if (v.norm() > best_norm) {
      best_norm = v.norm();
      best = v;
    }
  }
  if (zero_count <= 1) return Verdict::pass();
  return Verdict::fail(tidy_witness(best));
}

}  // namespace detail

/// Negative semidefiniteness of D on the mass-zero hyperplane.
inline Verdict check_quasihypermetric(const MetricSpace& space, const Tolerances& tol = {}) {
  return detail::quasihypermetric_from(centered_spectrum(space, tol));
}

/// Quasihypermetric, and the form vanishes on mass-zero vectors only at 0.
inline Verdict check_strictly_quasihypermetric(const MetricSpace& space,
                                               const Tolerances& tol = {}) {
  return detail::strictly_from(centered_spectrum(space, tol));
}

/// Kelly's hypermetric inequalities restricted to integer vectors b with
/// sum(b) = 1 and |b_i| <= bound. Vectors are scanned in lexicographic order
/// over [-bound, bound]^n, so the reported witness is the first violator in
/// that order. A passing verdict certifies nothing beyond the bound.
inline Verdict check_hypermetric_bounded(const MetricSpace& space, int bound,
                                         const Tolerances& tol = {}) {
  if (bound < 1) {
    throw Error(ErrorCode::kBadInput, "classify", "hypermetric bound must be >= 1");
  }
  const int n = space.size();
  const double count = std::pow(2.0 * bound + 1.0, n);
  if (count > tol.hyper_budget) {
    throw Error(ErrorCode::kBudgetExceeded, "classify",
                "hypermetric search needs " + std::to_string(count) +
                    " vectors, budget hyper_budget=" + std::to_string(tol.hyper_budget));
  }
  const double pos_abs = tol.pos_tol * n * space.diameter();
  const Matrix& d = space.dist();
  std::vector<int> b(static_cast<std::size_t>(n), -bound);
  while (true) {
    int sum = 0;
    for (int v : b) sum += v;
    if (sum == 1) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) {
        if (b[i] == 0) continue;
        for (int j = i + 1; j < n; ++j) q += 2.0 * b[i] * b[j] * d(i, j);
      }
      if (q > pos_abs) return Verdict::fail(std::vector<double>(b.begin(), b.end()));
    }
    int k = n - 1;
    while (k >= 0 && b[k] == bound) {
      b[k] = -bound;
      --k;
    }
    if (k < 0) break;
    ++b[k];
  }
  return Verdict::pass();
}

/// Rank and orthonormal null-space basis of D.
inline NullSpace distance_matrix_nullspace(const MetricSpace& space,
                                           const Tolerances& tol = {}) {
  return symmetric_null_space(jacobi_eigen(space.dist()), tol.rank_tol);
}

/// All verdicts at once. The hypermetric search is skipped, with a note,
/// when it would exceed the budget.
inline Classification classify(const MetricSpace& space, int hyper_bound,
                               const Tolerances& tol = {}) {
  const auto spectrum = centered_spectrum(space, tol);
  Classification out;
  out.quasihypermetric = detail::quasihypermetric_from(spectrum);
  out.strictly_quasihypermetric = detail::strictly_from(spectrum);
  try {
    out.hypermetric =
        HypermetricVerdict{hyper_bound, check_hypermetric_bounded(space, hyper_bound, tol)};
    out.hypermetric_note = "checked up to bound " + std::to_string(hyper_bound);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBudgetExceeded) throw;
    out.hypermetric_note = e.what();
  }
  const auto ns = distance_matrix_nullspace(space, tol);
  out.matrix_rank = ns.rank;
  for (Eigen::Index j = 0; j < ns.basis.cols(); ++j) {
    out.nullspace_basis.push_back(to_std(ns.basis.col(j)));
  }
  return out;
}

}  // namespace qhm
