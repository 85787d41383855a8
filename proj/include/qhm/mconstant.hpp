#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qhm/classify.hpp"
#include "qhm/energy.hpp"
#include "qhm/error.hpp"
#include "qhm/linalg.hpp"
#include "qhm/metric_space.hpp"
#include "qhm/nnls.hpp"
#include "qhm/optim.hpp"
#include "qhm/tolerances.hpp"

namespace qhm {

/// M(X) and the data that certifies it.
struct MReport {
  std::optional<double> m_value;  // nullopt means M(X) is infinite
  std::optional<Vector> maximal_measure;
  std::optional<double> m_plus;
  bool m_plus_converged = true;
  bool unique_maximal = false;
  std::optional<double> invariant_value;
  double solution_mass = 0.0;  // raw sum(w) for Dw = 1; NaN if not solved
  double residual = 0.0;       // max |Dw - 1|
  std::vector<std::string> method_tags;

  bool finite() const noexcept { return m_value.has_value(); }
};

/// Solution of Dw = 1 as used by compute_m.
struct UnitSystemSolution {
  Vector w;
  double residual = 0.0;
  NullSpace null_space;
};

namespace detail {

// Among all solutions w0 + Z c, picks the one that vanishes on a set of
// coordinates chosen greedily from the last index backwards. This is the
// basic solution whose free variables are the highest-indexed dependent
// columns of D.
inline Vector basic_solution(const Vector& w0, const Matrix& z) {
  const Eigen::Index m = z.cols();
  if (m == 0) return w0;
  const Eigen::Index n = z.rows();
  std::vector<Eigen::Index> free_rows;
  Matrix picked(0, m);
  for (Eigen::Index i = n - 1; i >= 0 && Eigen::Index(free_rows.size()) < m; --i) {
    Matrix trial(picked.rows() + 1, m);
    trial << picked, z.row(i);
    Eigen::FullPivLU<Matrix> lu(trial);
    lu.setThreshold(1e-8);
    if (lu.rank() == trial.rows()) {
      picked = trial;
      free_rows.push_back(i);
    }
  }
  Vector rhs(static_cast<Eigen::Index>(free_rows.size()));
  for (std::size_t k = 0; k < free_rows.size(); ++k) rhs(Eigen::Index(k)) = -w0(free_rows[k]);
  const Vector c = picked.colPivHouseholderQr().solve(rhs);
  Vector w = w0 + z * c;
  for (Eigen::Index i : free_rows) w(i) = 0.0;
  return w;
}

}  // namespace detail

/// Solves Dw = 1 through the eigendecomposition of D. For singular D the
/// minimum-norm solution is moved to the basic solution described above.
inline UnitSystemSolution solve_unit_system(const MetricSpace& space, const Tolerances& tol) {
  const auto eig = jacobi_eigen(space.dist());
  const Vector ones = Vector::Ones(space.size());
  UnitSystemSolution out;
  out.null_space = symmetric_null_space(eig, tol.rank_tol);
  const Vector w0 = pseudo_solve(eig, ones, tol.rank_tol);
  out.w = detail::basic_solution(w0, out.null_space.basis);
  out.residual = (space.dist() * out.w - ones).cwiseAbs().maxCoeff();
  return out;
}

/// Returns c when d_mu is the constant c within inv_tol * diam * max(1, |mu|_1).
inline std::optional<double> check_invariant(const SignedMeasure& mu,
                                             const Tolerances& tol = {}) {
  const Vector pot = d_mu(mu);
  const double c = pot.mean();
  const double band = tol.inv_tol * mu.space().diameter() *
                      std::max(1.0, mu.weights().lpNorm<1>());
  if ((pot.array() - c).abs().maxCoeff() <= band) return c;
  return std::nullopt;
}

/// M(X) from the linear system Dw = 1.
///
/// Non-quasihypermetric spaces short-circuit to infinity. Otherwise
/// |sum(w)| * diam <= mass_tol * n declares M infinite; else M = 1/sum(w)
/// and w/sum(w) is a maximal measure, which is verified to be d-invariant
/// with value M.
inline MReport compute_m(const MetricSpace& space, const Tolerances& tol = {}) {
  MReport out;
  const int n = space.size();
  if (n == 1) {
    out.m_value = 0.0;
    out.maximal_measure = Vector::Ones(1);
    out.invariant_value = 0.0;
    out.unique_maximal = true;
    out.solution_mass = std::nan("");
    out.method_tags.push_back("m_value: single-point convention");
    return out;
  }
  if (!check_quasihypermetric(space, tol)) {
    out.solution_mass = std::nan("");
    out.method_tags.push_back("m_value: not quasihypermetric, infinite without solving");
    return out;
  }

  const auto sol = solve_unit_system(space, tol);
  out.residual = sol.residual;
  if (sol.residual > tol.res_tol * n) {
    throw Error(ErrorCode::kInconsistentSystem, "mconstant",
                "Dw = 1 has residual " + std::to_string(sol.residual) +
                    " above res_tol; tolerances may be mis-set");
  }
  const double mass = sol.w.sum();
  out.solution_mass = mass;
  if (std::abs(mass) * space.diameter() <= tol.mass_tol * n) {
    out.method_tags.push_back("m_value: Dw=1 solution has zero mass, M infinite");
    return out;
  }
  out.m_value = 1.0 / mass;
  out.method_tags.push_back("m_value: 1/sum(w) for Dw=1");
  const Vector measure = sol.w / mass;
  out.maximal_measure = measure;

  const auto c = check_invariant(SignedMeasure(space, measure), tol);
  if (!c) {
    throw Error(ErrorCode::kContradiction, "mconstant",
                "maximal measure is not d-invariant within inv_tol");
  }
  out.invariant_value = *c;
  out.method_tags.push_back("invariant_value: mean of d_mu of the maximal measure");

  // [D; 1^T] has full column rank iff no null vector of D has zero mass.
  const Matrix& z = sol.null_space.basis;
  const Eigen::Index zero_mass_dim =
      z.cols() - ((z.cols() > 0 && z.colwise().sum().norm() > 1e-8) ? 1 : 0);
  out.unique_maximal = zero_mass_dim == 0;
  out.method_tags.push_back("unique_maximal: rank of [D; 1^T]");
  return out;
}

/// For singular D: checks that every null vector of D has zero mass, which
/// makes sum(w) the same for every solution of Dw = 1.
inline bool mass_of_solution_is_canonical(const MetricSpace& space,
                                          const Tolerances& tol = {}) {
  const auto ns = distance_matrix_nullspace(space, tol);
  if (ns.basis.cols() == 0) {
    throw Error(ErrorCode::kPrecondition, "mconstant",
                "distance matrix is non-singular; Dw = 1 has a unique solution");
  }
  const int n = space.size();
  for (Eigen::Index j = 0; j < ns.basis.cols(); ++j) {
    if (std::abs(ns.basis.col(j).sum()) > tol.mass_tol * n) {
      throw Error(ErrorCode::kInconsistentSystem, "mconstant",
                  "null vector of D with nonzero mass; Dw = 1 is inconsistent");
    }
  }
  return true;
}

/// Whether the maximal measure is unique; requires M(X) finite.
inline bool uniqueness_of_maximal(const MetricSpace& space, const Tolerances& tol = {}) {
  const auto report = compute_m(space, tol);
  if (!report.finite()) {
    throw Error(ErrorCode::kPrecondition, "mconstant",
                "uniqueness_of_maximal needs M(X) finite");
  }
  return report.unique_maximal;
}

struct MPlusResult {
  double value = 0.0;
  Vector measure;
  bool converged = false;
  long iterations = 0;
};

namespace detail {

inline MPlusResult frank_wolfe_m_plus(const MetricSpace& space, const Tolerances& tol) {
  const auto r = maximize_quadratic_on_simplex(space.dist(), tol.fw_tol * space.diameter(),
                                               static_cast<long>(tol.fw_max_iter));
  return {r.value, r.weights, r.converged, r.iterations};
}

}  // namespace detail

/// M+(X): the largest energy of a probability measure, by Frank-Wolfe.
inline MPlusResult compute_m_plus_detailed(const MetricSpace& space,
                                           const Tolerances& tol = {}) {
  if (!check_quasihypermetric(space, tol)) {
    throw Error(ErrorCode::kPrecondition, "mconstant",
                "M+ needs a quasihypermetric space");
  }
  if (!compute_m(space, tol).finite()) {
    throw Error(ErrorCode::kPrecondition, "mconstant", "M+ needs M(X) finite");
  }
  return detail::frank_wolfe_m_plus(space, tol);
}

inline double compute_m_plus(const MetricSpace& space, const Tolerances& tol = {}) {
  return compute_m_plus_detailed(space, tol).value;
}

/// compute_m followed by compute_m_plus when M is finite.
inline MReport compute_m_report(const MetricSpace& space, const Tolerances& tol = {}) {
  MReport out = compute_m(space, tol);
  if (out.finite()) {
    if (space.size() == 1) {
      out.m_plus = 0.0;
      out.method_tags.push_back("m_plus: single-point convention");
    } else {
      const auto mp = detail::frank_wolfe_m_plus(space, tol);
      out.m_plus = mp.value;
      out.m_plus_converged = mp.converged;
      out.method_tags.push_back("m_plus: away-step Frank-Wolfe on the simplex");
    }
  }
  return out;
}

/// Whether some maximal measure is a probability measure, decided by
/// nonnegative least squares on [D; 1^T] w = [M 1; 1].
///
/// Independent of both the Frank-Wolfe and the convex-hull routes; used to
/// audit them when the maximal measure is not unique.
inline bool has_nonnegative_maximal_measure(const MetricSpace& space, const MReport& report,
                                            const Tolerances& tol = {}) {
  if (!report.finite()) return false;
  const int n = space.size();
  const double m = *report.m_value;
  if (report.unique_maximal) {
    const double floor = -tol.inv_tol * std::max(1.0, report.maximal_measure->lpNorm<1>());
    return report.maximal_measure->minCoeff() >= floor;
  }
  Matrix a(n + 1, n);
  a.topRows(n) = space.dist() / std::max(m, space.diameter());
  a.row(n).setOnes();
  Vector b(n + 1);
  b.head(n).setConstant(m / std::max(m, space.diameter()));
  b(n) = 1.0;
  const Vector w = nnls(a, b);
  return (a * w - b).norm() <= 1e-7 * std::sqrt(double(n));
}

}  // namespace qhm
