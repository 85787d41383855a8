#pragma once

#include <cmath>

#include "qhm/error.hpp"
#include "qhm/metric_space.hpp"

namespace qhm {

namespace detail {

inline void require_same_space(const SignedMeasure& a, const SignedMeasure& b) {
  if (!(a.space() == b.space())) {
    throw Error(ErrorCode::kDimension, "core", "measures live on different spaces");
  }
}

}  // namespace detail

/// Potential of a measure: component i is sum_j d(x_i, x_j) mu_j.
inline Vector d_mu(const SignedMeasure& mu) { return mu.space().dist() * mu.weights(); }

/// Mutual energy I(mu, nu) = sum_ij mu_i nu_j d(x_i, x_j).
///
/// Computed as <nu, d_mu(mu)> after ordering the pair canonically, so the
/// result is bitwise symmetric in its arguments.
inline double energy_pair(const SignedMeasure& mu, const SignedMeasure& nu) {
  detail::require_same_space(mu, nu);
  const Vector& a = mu.weights();
  const Vector& b = nu.weights();
  const bool swap = std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(),
                                                 a.data() + a.size());
  const Vector& first = swap ? b : a;
  const Vector& second = swap ? a : b;
  return second.dot(mu.space().dist() * first);
}

inline double energy(const SignedMeasure& mu) { return energy_pair(mu, mu); }

/// ||mu|| = sqrt(-I(mu)) for a measure of total mass zero.
///
/// Values of -I(mu) in [-tol, 0] are clamped to zero; tol is
/// pos_tol * n * diam * |mu|_2^2. Anything more negative means the quadratic
/// form is positive somewhere on mass-zero vectors, and the offending vector
/// is attached to the error.
inline double seminorm(const SignedMeasure& mu, const Tolerances& tol = {}) {
  const int n = mu.space().size();
  const double scale = mu.space().diameter() * n;
  const double w2 = mu.weights().squaredNorm();
  if (std::abs(mu.mass()) > tol.mass_tol * n * std::max(1.0, mu.weights().lpNorm<1>())) {
    throw Error(ErrorCode::kDomain, "core",
                "seminorm needs a mass-zero measure, got mass " + std::to_string(mu.mass()));
  }
  const double neg_energy = -energy(mu);
  const double band = tol.pos_tol * scale * w2;
  if (neg_energy < -band) {
    throw WitnessError(ErrorCode::kNegativeEnergy, "core",
                       "I(mu) > 0 on a mass-zero measure; space is not quasihypermetric",
                       to_std(mu.weights()));
  }
  return neg_energy <= 0.0 ? 0.0 : std::sqrt(neg_energy);
}

}  // namespace qhm
